#include "doctest.h"
#include "oracles.hpp"

#include "jch/hamiltonians.hpp"
#include "jch/lindblad.hpp"
#include "jch/protocols.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

using namespace jch;

namespace {

constexpr double pi = std::numbers::pi;

SystemParams pair(double j, double delta) {
    SystemParams p;
    p.n_cavities = 2;
    p.n_fock = 3;
    p.J = j;
    p.set_detuning(delta);
    return p;
}

SystemParams site(double delta) {
    SystemParams p;
    p.n_fock = 3;
    p.set_detuning(delta);
    return p;
}

std::vector<double> grid(double t_max, int n) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(t_max * i / (n - 1));
    return t;
}

}  // namespace

TEST_CASE("parallel_for visits every index once and forwards exceptions") {
    for (int threads : {1, 3, 8}) {
        std::vector<std::atomic<int>> hits(50);
        parallel_for(50, threads, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
    CHECK_NOTHROW(parallel_for(0, 4, [](std::size_t) {}));
}

TEST_CASE("named states") {
    const SystemParams p = pair(0.1, 0.5);
    const Vector v = named_state("1-,0", p).amplitudes();
    CHECK((v - two_site_polariton(PolaritonLabel::lower(1), PolaritonLabel::ground(), p).amplitudes()).norm() < 1e-15);
    const Vector w = named_state("0g, 2+", p).amplitudes();
    CHECK((w - two_site_polariton(PolaritonLabel::ground(), PolaritonLabel::upper(2), p).amplitudes()).norm() < 1e-15);
    CHECK(named_state("1+", site(0.0)).amplitudes().size() == 8);
    CHECK_THROWS_AS(named_state("1-,bogus", p), std::invalid_argument);
    CHECK_THROWS_AS(named_state("1-,0", site(0.0)), std::invalid_argument);
}

TEST_CASE("upper-branch population") {
    const SystemParams p = pair(0.1, 0.0);
    CHECK(std::abs(upper_branch_population(named_state("1+,0", p).amplitudes(), p) - 1.0) < 1e-12);
    CHECK(upper_branch_population(named_state("1-,1-", p).amplitudes(), p) < 1e-14);
    const Vector mix = (named_state("1-,1-", p).amplitudes() + named_state("1+,1-", p).amplitudes()) / std::sqrt(2.0);
    CHECK(std::abs(upper_branch_population(mix, p) - 0.5) < 1e-12);
}

TEST_CASE("hopping interchange probe") {
    SystemParams p = pair(0.1, 0.0);
    const ProbeResult r = hopping_interchange_probe(p, "1-,0", "0,1+");
    CHECK(r.window == doctest::Approx(100.0));
    CHECK(r.max_probability > 0.0);
    CHECK(r.max_probability < 0.05);
    CHECK(r.t_at_max <= r.window);
    // the target population is bounded by the oracle of the direct propagator
    const UnitaryPropagator u(build_h_jch(p));
    const Vector psi = u.apply(named_state("1-,0", p).amplitudes(), r.t_at_max);
    CHECK(std::abs(std::norm(named_state("0,1+", p).amplitudes().dot(psi)) - r.max_probability) < 1e-10);

    // J → 0: no transfer
    SystemParams weak = pair(1e-3, 0.0);
    CHECK(hopping_interchange_probe(weak, "1-,0", "0,1+", 10.0, 0.5).max_probability < 1e-5);

    CHECK_THROWS_AS(hopping_interchange_probe(site(0.0), "1-", "1+"), std::invalid_argument);
    SystemParams lossy = p;
    lossy.gamma = 0.1;
    CHECK_THROWS_AS(hopping_interchange_probe(lossy, "1-,0", "0,1+"), std::invalid_argument);
    CHECK_THROWS_AS(hopping_interchange_probe(pair(0.0, 0.0), "1-,0", "0,1+"), std::invalid_argument);
    CHECK_THROWS_AS(hopping_interchange_probe(p, "nope", "0,1+"), std::invalid_argument);
}

TEST_CASE("coherence") {
    const SystemParams s = site(0.4);
    const Vector lo = polariton_ket(PolaritonLabel::lower(1), s).amplitudes();
    const Vector up = polariton_ket(PolaritonLabel::upper(1), s).amplitudes();
    CHECK(coherence(DensityMatrix::from_ket(Ket(s.dims(), lo)), s) < 1e-14);
    CHECK(std::abs(coherence(DensityMatrix::from_ket(Ket::normalized(s.dims(), lo + up)), s) - 1.0) < 1e-12);
    const Matrix mixed = 0.5 * (lo * lo.adjoint() + up * up.adjoint());
    CHECK(coherence(DensityMatrix(s.dims(), mixed), s) < 1e-14);
    // two sites: partial trace over site 1 first
    const SystemParams p = pair(0.1, 0.4);
    const Vector prod = oracle::brute_kron((lo + up) / std::sqrt(2.0), oracle::bare(3, 0, 0));
    CHECK(std::abs(coherence(DensityMatrix::from_ket(Ket(p.dims(), prod)), p) - 1.0) < 1e-12);
    // entangled with site 1: coherence destroyed by the trace
    const Vector ent = (oracle::brute_kron(lo, oracle::bare(3, 0, 0)) + oracle::brute_kron(up, oracle::bare(3, 1, 0))) / std::sqrt(2.0);
    CHECK(coherence(DensityMatrix::from_ket(Ket(p.dims(), ent)), p) < 1e-12);
}

TEST_CASE("number variance") {
    const SystemParams p = pair(0.1, 0.0);
    CHECK(number_variance(named_state("1-,1-", p).amplitudes(), p.dims()) < 1e-14);
    // (|2-,0> + |0,2->)/√2: each site 0 or 2 with probability ½
    const Vector psi1 = (named_state("2-,0", p).amplitudes() + named_state("0,2-", p).amplitudes()) / std::sqrt(2.0);
    CHECK(std::abs(number_variance(psi1, p.dims()) - 2.0) < 1e-12);
    const DensityMatrix rho = DensityMatrix::from_ket(Ket(p.dims(), psi1));
    CHECK(std::abs(number_variance(rho) - 2.0) < 1e-12);
    const Vector r = oracle::random_ket(p.dims().total_dim(), 3);
    CHECK(std::abs(number_variance(r, p.dims()) - number_variance(DensityMatrix::from_ket(Ket(p.dims(), r)))) < 1e-12);
    CHECK(number_variance(r, p.dims()) >= 0.0);
}

TEST_CASE("order parameter integration") {
    const auto t = grid(2.0, 201);
    std::vector<double> flat(t.size(), 0.3), lin;
    for (double x : t) lin.push_back(x);
    CHECK(std::abs(order_parameter(t, flat, 2.0) - 0.3) < 1e-14);
    CHECK(std::abs(order_parameter(t, lin, 2.0) - 1.0) < 1e-12);
    CHECK(std::abs(order_parameter(t, lin, 1.005) - 0.5025) < 1e-12);  // clipped between samples
    CHECK_THROWS_AS(order_parameter(grid(2.0, 199), std::vector<double>(199, 0.0), 2.0), std::invalid_argument);
    CHECK_THROWS_AS(order_parameter(t, flat, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(order_parameter(t, flat, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(order_parameter(t, std::vector<double>(5, 0.0), 2.0), std::invalid_argument);
    std::vector<double> shifted = t;
    for (double& x : shifted) x += 0.1;
    CHECK_THROWS_AS(order_parameter(shifted, flat, 1.0), std::invalid_argument);
}

TEST_CASE("branch order parameter and the effective model") {
    // deep Mott side: J = 0.1g, Δ = 0
    const SystemParams p = pair(0.1, 0.0);
    const OrderParameterPoint num = branch_order_parameter(p, Branch::minus);
    CHECK(num.var_tau < 0.15);
    CHECK(num.var_tau > 0.1);

    const EffectiveModel m = effective_model(p, Branch::minus);
    CHECK(std::abs(m.b + 1.20711 * 0.1) < 1e-6);
    CHECK(std::abs(std::abs(m.a - m.c) - 0.5858) < 1e-4);
    // oracle: b from the hopping matrix element, a and c from H_JC expectation values
    const Vector k11 = named_state("1-,1-", p).amplitudes();
    const Vector psi1 = (named_state("2-,0", p).amplitudes() + named_state("0,2-", p).amplitudes()) / std::sqrt(2.0);
    CHECK(std::abs(std::abs(psi1.dot(build_h_hop(p).matrix() * k11)) - std::abs(m.b)) < 1e-12);
    const Matrix hjc = build_h_jc(p).matrix();
    CHECK(std::abs(k11.dot(hjc * k11).real() - m.a) < 1e-9);
    CHECK(std::abs(psi1.dot(hjc * psi1).real() - m.c) < 1e-9);
    CHECK(std::abs(m.omega0 - std::sqrt(4 * m.b * m.b + (m.a - m.c) * (m.a - m.c))) < 1e-15);

    const double ana = analytic_variance(m, 0.1);
    CHECK(std::abs(ana - 0.144) < 1e-3);
    CHECK(std::abs(ana - num.var_tau) / num.var_tau < 0.05);

    // upper branch uses the + quantities
    const EffectiveModel u = effective_model(p, Branch::plus);
    CHECK(std::abs(u.a - 2 * polariton_energy(PolaritonLabel::upper(1), p)) < 1e-9);
    const Vector u11 = named_state("1+,1+", p).amplitudes();
    const Vector psi1u = (named_state("2+,0", p).amplitudes() + named_state("0,2+", p).amplitudes()) / std::sqrt(2.0);
    CHECK(std::abs(std::abs(psi1u.dot(build_h_hop(p).matrix() * u11)) - std::abs(u.b)) < 1e-12);
}

TEST_CASE("analytic variance limits") {
    EffectiveModel m;
    CHECK(analytic_variance(m, 0.1) == 0.0);  // b = 0
    const EffectiveModel z = effective_model(pair(0.0, 0.0), Branch::minus);
    CHECK(z.b == 0.0);
    CHECK(analytic_variance(z, 1.0) == 0.0);
    CHECK_THROWS_AS(analytic_variance(effective_model(pair(0.1, 0.0), Branch::minus), 0.0), std::invalid_argument);
    // series branch continuous with the closed form
    EffectiveModel s;
    s.b = 0.01;
    s.omega0 = 1.0001e-4 * 0.1;
    const double closed = 4 * s.b * s.b / (s.omega0 * s.omega0) * (1 - std::sin(s.omega0 / 0.1) / (s.omega0 / 0.1));
    s.omega0 = 0.9999e-4 * 0.1;
    CHECK(std::abs(analytic_variance(s, 0.1) - closed) < 1e-6 * closed);
    // weak hopping: ω0 → |a−c|, so var → 4b²/(a−c)² · (1 − sinc), which scales as J² up to the sinc wiggle
    for (double j : {0.01, 0.02}) {
        const EffectiveModel w = effective_model(pair(j, 0.0), Branch::minus);
        const double x = std::abs(w.a - w.c) / j;
        const double lead = 4 * w.b * w.b / ((w.a - w.c) * (w.a - w.c)) * (1 - std::sin(x) / x);
        CHECK(std::abs(analytic_variance(w, j) - lead) / lead < 0.01);
    }
}

TEST_CASE("branch separability and excitation conservation") {
    for (double delta : {0.0, 1.0, 5.0}) {
        const SystemParams p = pair(0.1, delta);
        const UnitaryPropagator u(build_h_jch(p));
        const Vector psi0 = named_state("1-,1-", p).amplitudes();
        double worst = 0.0;
        for (double t : grid(100.0, 401)) worst = std::max(worst, upper_branch_population(u.apply(psi0, t), p));
        CHECK(worst < 0.1);
    }
    // pulses and free evolution keep two excitations
    const SystemParams p = pair(0.1, 3.0);
    const Matrix n = total_number(p.dims()).matrix();
    Vector psi = named_state("1-,1-", p).amplitudes();
    const UnitaryPropagator pulse(build_stroboscopic_vi_full(p, 1)), free(build_h_jch(p));
    for (int k = 0; k < 3; ++k) {
        psi = free.apply(pulse.apply(psi, pi / 2), 2.7);
        CHECK(std::abs(psi.dot(n * psi).real() - 2.0) < 1e-10);
    }
}

TEST_CASE("ramp schedule") {
    const RampSchedule s = make_ramp_schedule(1, 0.1, 1.0, 12);
    CHECK_NOTHROW(s.validate());
    CHECK(s.delta_values.front() == doctest::Approx(60.0));
    CHECK(s.delta_values.back() == doctest::Approx(0.1));
    CHECK(s.tau == doctest::Approx(10.0));
    CHECK(s.t1 == doctest::Approx(pi / 2));
    for (std::size_t i = 0; i < s.delta_values.size(); ++i) {
        CHECK(s.delta_values[i] * s.hold_times[i] == doctest::Approx(1.5 * pi));
        if (i > 0) CHECK(s.delta_values[i] / s.delta_values[i - 1] == doctest::Approx(s.delta_values[1] / s.delta_values[0]));
    }
    RampSchedule bad = s;
    bad.hold_times[3] *= 1.01;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    std::swap(bad.delta_values[2], bad.delta_values[3]);
    std::swap(bad.hold_times[2], bad.hold_times[3]);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.t1 = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_ramp_schedule(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_ramp_schedule(1, 0.1, 1.0, 10, 0.1, 60.0), std::invalid_argument);
}

TEST_CASE("ramp experiment") {
    const SystemParams p = pair(0.1, 60.0);
    const RampSchedule s = make_ramp_schedule(1, 0.1, 1.0, 6, 60.0, 0.2);
    RampOptions opt;
    opt.samples = 201;
    opt.threads = 2;
    const auto fresh = ramp_experiment(s, p, "1-,1-", false, opt);
    const auto ramp = ramp_experiment(s, p, "1-,1-", true, opt);
    const auto lp = ramp_reference(s, p, Branch::minus, opt);
    REQUIRE(fresh.size() == s.delta_values.size());
    REQUIRE(ramp.size() == s.delta_values.size());
    for (std::size_t i = 0; i < ramp.size(); ++i) {
        CHECK(ramp[i].pulses == static_cast<int>(i));
        CHECK(ramp[i].var_tau >= -1e-8);
        CHECK(ramp[i].lp_weight + ramp[i].up_weight <= 1.0 + 1e-9);
        CHECK(fresh[i].delta == doctest::Approx(s.delta_values[i]));
        // the fresh sweep from |1-,1-> is the lower reference curve
        CHECK(std::abs(fresh[i].var_tau - lp[i].var_tau) < 1e-12);
    }
    // m = 1: odd points carry the upper branch
    CHECK(ramp[1].up_weight > 0.9);
    CHECK(ramp[2].lp_weight > 0.9);
    // thread count does not change results
    RampOptions serial = opt;
    serial.threads = 1;
    const auto again = ramp_experiment(s, p, "1-,1-", true, serial);
    for (std::size_t i = 0; i < ramp.size(); ++i) CHECK(again[i].var_tau == ramp[i].var_tau);
    CHECK_THROWS_AS(ramp_experiment(s, p, "1-,x", false, opt), std::invalid_argument);
}

TEST_CASE("driven oscillations") {
    SystemParams p = driven_defaults();
    const DrivenRun closed = driven_oscillation_run(p, 4.0, 0.002);
    CHECK(std::abs(closed.analytic.period - 2 * pi / (2 * std::sqrt(26.0))) < 1e-12);
    CHECK(std::abs(closed.estimate.period - 0.627) / 0.627 < 0.03);
    for (std::size_t i = 0; i < closed.times.size(); ++i) {
        CHECK(closed.p_1plus[i] + closed.p_1minus[i] + closed.p_ground[i] <= 1.0 + 1e-9);
    }
    p.gamma = 0.1;
    const DrivenRun damped = driven_oscillation_run(p, 4.0, 0.002);
    REQUIRE(damped.estimate.max_values.size() >= 3);
    for (std::size_t i = 1; i < damped.estimate.max_values.size(); ++i) {
        CHECK(damped.estimate.max_values[i] < damped.estimate.max_values[i - 1]);
    }
    CHECK(std::abs(damped.estimate.period - closed.estimate.period) / closed.estimate.period < 0.01);

    // period extraction on a synthetic signal
    const auto t = grid(10.0, 2001);
    std::vector<double> v;
    for (double x : t) v.push_back(std::sin(2 * pi * x / 1.7) * std::sin(2 * pi * x / 1.7));
    CHECK(std::abs(extract_period(t, v).period - 0.85) < 1e-3);
    std::vector<double> short_t = grid(1.0, 201), one;
    for (double x : short_t) one.push_back(std::sin(pi * x));
    CHECK_THROWS_AS(extract_period(short_t, one), std::runtime_error);
}
