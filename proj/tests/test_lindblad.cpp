#include "doctest.h"
#include "oracles.hpp"

#include "jch/hamiltonians.hpp"
#include "jch/lindblad.hpp"
#include "jch/protocols.hpp"

#include <cmath>
#include <numbers>

using namespace jch;

namespace {

constexpr double pi = std::numbers::pi;

SystemParams site(double delta, int n_fock = 3) {
    SystemParams p;
    p.omega_c = 10.0;
    p.n_fock = n_fock;
    p.set_detuning(delta);
    return p;
}

std::vector<double> grid(double t_max, int n) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(t_max * i / (n - 1));
    return t;
}

// (r/2)(2LρL† − {L†L, ρ}) evaluated directly on the matrix.
Matrix dissipator_oracle(const Matrix& l, double r, const Matrix& rho) {
    const Matrix ll = l.adjoint() * l;
    return 0.5 * r * (2.0 * l * rho * l.adjoint() - ll * rho - rho * ll);
}

double population(const DensityMatrix& rho, const Vector& psi) { return psi.dot(rho.matrix() * psi).real(); }

}  // namespace

TEST_CASE("vectorization is column-major") {
    const Matrix m = oracle::random_density(4, 3);
    const Vector v = vectorize(m);
    CHECK(v(1) == m(1, 0));
    CHECK(v(4) == m(0, 1));
    CHECK((unvectorize(v, 4) - m).norm() == 0.0);
    CHECK_THROWS_AS(unvectorize(v, 3), std::invalid_argument);
    // vec(AXB) = (Bᵀ ⊗ A) vec(X)
    const Matrix a = oracle::random_density(4, 5), b = oracle::random_density(4, 6);
    CHECK((vectorize(a * m * b) - oracle::brute_kron(b.transpose(), a) * v).norm() < 1e-13);
}

TEST_CASE("dissipator against direct matrix evaluation") {
    const SystemParams p = site(0.0);
    const HilbertDims d = p.dims();
    for (const Operator& jump : {fock_annihilation(d), atomic_lowering(d), fock_annihilation(d) + atomic_lowering(d)}) {
        const Liouvillian l = dissipator(jump, 0.7);
        for (unsigned seed = 1; seed < 4; ++seed) {
            const Matrix rho = oracle::random_density(d.total_dim(), seed);
            CHECK((l.apply(rho) - dissipator_oracle(jump.matrix(), 0.7, rho)).norm() < 1e-13);
        }
    }
    CHECK(dissipator(fock_annihilation(d), 0.0).matrix().norm() == 0.0);
    CHECK_THROWS_AS(dissipator(fock_annihilation(d), -0.1), std::invalid_argument);
    CHECK_THROWS_AS(build_liouvillian(build_h_jc(p), {{fock_annihilation(d), -1.0}}), std::invalid_argument);
    SystemParams two = p;
    two.n_cavities = 2;
    CHECK_THROWS_AS(build_liouvillian(build_h_jc(p), {{annihilation(two.dims(), 0), 1.0}}), std::invalid_argument);
}

TEST_CASE("generator preserves trace and Hermiticity") {
    SystemParams p = site(0.4);
    p.gamma = 0.3;
    p.kappa = 0.8;
    const Liouvillian l = build_liouvillian(build_h_jc(p), standard_channels(p));
    for (unsigned seed = 1; seed < 5; ++seed) {
        const Matrix rho = oracle::random_density(p.dims().total_dim(), seed);
        const Matrix out = l.apply(rho);
        CHECK(std::abs(out.trace()) < 1e-10);
        CHECK((out - out.adjoint()).norm() < 1e-10);
    }
    // commutator part equals −i[H, ρ]
    const Liouvillian lh = Liouvillian::hamiltonian(build_h_jc(p));
    const Matrix rho = oracle::random_density(p.dims().total_dim(), 9);
    const Matrix h = build_h_jc(p).matrix();
    CHECK((lh.apply(rho) - cplx(0, -1) * (h * rho - rho * h)).norm() < 1e-12);
    CHECK(lh.closed_hamiltonian().has_value());
    CHECK_FALSE(l.closed_hamiltonian().has_value());
}

TEST_CASE("Liouvillian spectra") {
    SystemParams p = site(0.0, 2);
    p.omega_c = 3.0;
    p.set_detuning(0.0);
    // closed: purely imaginary
    const Eigen::ComplexEigenSolver<Matrix> closed(build_liouvillian(build_h_jc(p), {}).matrix());
    CHECK(closed.eigenvalues().real().cwiseAbs().maxCoeff() < 1e-10);
    // γ = κ = g/2: zero mode and stability
    p.gamma = p.kappa = 0.5;
    const Eigen::ComplexEigenSolver<Matrix> open(build_liouvillian(build_h_jc(p), standard_channels(p)).matrix());
    CHECK(open.eigenvalues().real().maxCoeff() < 1e-8);
    CHECK(open.eigenvalues().cwiseAbs().minCoeff() < 1e-8);
}

TEST_CASE("atomic decay follows exp(-κt)") {
    SystemParams p = site(0.0);
    p.g = 1e-12;  // effectively uncoupled
    p.kappa = 0.6;
    const Liouvillian l = build_liouvillian(build_h_jc(p), standard_channels(p));
    const Vector e = oracle::bare(3, 0, 1);
    const DensityMatrix rho0 = DensityMatrix::from_ket(Ket(p.dims(), e));
    const auto t = grid(5.0, 26);
    EvolveOptions opts;
    opts.observables.emplace("excited", Operator(p.dims(), e * e.adjoint()));
    const Trajectory tr = evolve(l, rho0, t, opts);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(tr.observables.at("excited")[i] - std::exp(-0.6 * t[i])) < 1e-9);
}

TEST_CASE("closed evolution") {
    SystemParams p = site(0.0);
    // L = 0: constant
    const DensityMatrix rho0(p.dims(), oracle::random_density(p.dims().total_dim(), 2));
    const Trajectory flat = evolve(Liouvillian::zero(p.dims()), rho0, grid(3.0, 5));
    for (const auto& s : flat.states) CHECK((s.matrix() - rho0.matrix()).norm() < 1e-12);

    // vacuum Rabi |1,g> ↔ |0,e> with period π/g
    const Vector one_g = oracle::bare(3, 1, 0);
    const DensityMatrix start = DensityMatrix::from_ket(Ket(p.dims(), one_g));
    const auto t = grid(pi, 9);
    for (bool fixed : {false, true}) {
        EvolveOptions opts;
        opts.force_fixed_step = fixed;
        const Trajectory tr = evolve(Liouvillian::hamiltonian(build_h_jc(p)), start, t, opts);
        for (std::size_t i = 0; i < t.size(); ++i) {
            CHECK(std::abs(population(tr.states[i], one_g) - std::pow(std::cos(t[i]), 2)) < 1e-8);
        }
        CHECK(tr.max_trace_drift < 1e-8);
        CHECK(tr.max_hermiticity_error < 1e-9);
    }
}

TEST_CASE("spectral and fixed-step propagation agree on the driven configuration") {
    SystemParams p = driven_defaults();
    p.gamma = 0.1;
    const Liouvillian l = build_liouvillian(build_h_driven(p), standard_channels(p));
    const DensityMatrix rho0 = DensityMatrix::from_ket(Ket::basis(p.dims(), 0));
    const auto t = grid(0.6, 13);
    EvolveOptions fast, slow;
    slow.force_fixed_step = true;
    fast.check_positivity = slow.check_positivity = true;
    const Trajectory a = evolve(l, rho0, t, fast);
    const Trajectory b = evolve(l, rho0, t, slow);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, trace_distance(a.states[i].matrix(), b.states[i].matrix()));
    CHECK(worst < 1e-6);
    CHECK(a.min_eigenvalue >= -1e-7);
    CHECK(b.min_eigenvalue >= -1e-7);
    CHECK(a.max_trace_drift < 1e-8);
    CHECK(b.max_trace_drift < 1e-8);
}

TEST_CASE("evolve argument checks") {
    const SystemParams p = site(0.0);
    const Liouvillian l = Liouvillian::hamiltonian(build_h_jc(p));
    const DensityMatrix rho0 = DensityMatrix::from_ket(Ket::basis(p.dims(), 2));
    CHECK_THROWS_AS(evolve(l, rho0, {}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(l, rho0, {0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(l, rho0, {-1.0, 1.0}), std::invalid_argument);
    SystemParams two = p;
    two.n_cavities = 2;
    CHECK_THROWS_AS(evolve(Liouvillian::zero(two.dims()), rho0, {0.0}), std::invalid_argument);
}

TEST_CASE("steady states") {
    SystemParams p = site(0.3);
    p.gamma = 0.5;
    p.kappa = 0.5;
    const Liouvillian l = build_liouvillian(build_h_jc(p), standard_channels(p));
    const DensityMatrix ss = steady_state(l);
    CHECK(std::abs(ss.matrix()(0, 0) - 1.0) < 1e-10);
    CHECK(l.apply(ss.matrix()).norm() < 1e-8);

    // two cavities, long-time evolution oracle
    SystemParams q = p;
    q.n_cavities = 2;
    q.n_fock = 2;
    q.J = 0.5;
    const Liouvillian l2 = build_liouvillian(build_h_jch(q), standard_channels(q));
    const DensityMatrix ss2 = steady_state(l2);
    CHECK(std::abs(ss2.matrix()(0, 0) - 1.0) < 1e-10);
    const DensityMatrix start = DensityMatrix::from_ket(two_site_polariton(PolaritonLabel::lower(1), PolaritonLabel::upper(1), q));
    const Trajectory tr = evolve(l2, start, {0.0, 80.0});
    CHECK(trace_distance(tr.states.back().matrix(), ss2.matrix()) < 1e-6);

    // driven steady state is not the vacuum but still a zero mode
    SystemParams r = site(0.0);
    r.set_drive_detunings(0.5, 0.5);
    r.alpha = 0.2;
    r.gamma = r.kappa = 0.4;
    const Liouvillian ld = build_liouvillian(build_h_driven(r), standard_channels(r));
    const DensityMatrix ssd = steady_state(ld);
    CHECK(ld.apply(ssd.matrix()).norm() < 1e-8);
    CHECK(ssd.matrix()(0, 0).real() < 1.0 - 1e-4);
    CHECK(ssd.check().valid());

    // closed system: zero eigenspace degenerate
    CHECK_THROWS_AS(steady_state(Liouvillian::hamiltonian(build_h_jc(site(0.0)))), std::runtime_error);
}

TEST_CASE("piecewise evolution") {
    const SystemParams p = site(0.2);
    const Operator h = build_h_jc(p);
    const DensityMatrix rho0 = DensityMatrix::from_ket(Ket::basis(p.dims(), site_index(1, false)));
    const Trajectory twice = evolve_piecewise({{std::cref(h), 0.7, 3}, {std::cref(h), 0.7, 3}}, rho0);
    const Trajectory once = evolve_piecewise({{std::cref(h), 1.4, 3}}, rho0);
    CHECK((twice.states.back().matrix() - once.states.back().matrix()).norm() < 1e-10);
    CHECK(twice.segment_boundaries.size() == 2);
    CHECK(twice.times.back() == doctest::Approx(1.4));

    // V_I quarter pulse then free JC: |1+> population is frozen
    SystemParams q = site(0.0);
    const Operator vi = build_stroboscopic_vi_full(q, 0);
    const Operator hp = build_h_jc(q);
    const DensityMatrix lp = DensityMatrix::from_ket(polariton_ket(PolaritonLabel::lower(1), q));
    const Trajectory tr = evolve_piecewise({{std::cref(vi), pi / 2, 2}, {std::cref(hp), 5.0, 11}}, lp);
    const Vector up = polariton_ket(PolaritonLabel::upper(1), q).amplitudes();
    for (std::size_t i = tr.segment_boundaries.back(); i < tr.states.size(); ++i) {
        CHECK(std::abs(population(tr.states[i], up) - 1.0) < 1e-10);
    }
    // mixed generators: a Liouvillian segment after a Hamiltonian one
    SystemParams d = q;
    d.gamma = 0.3;
    const Liouvillian ld = build_liouvillian(build_h_jc(d), standard_channels(d));
    const Trajectory mix = evolve_piecewise({{std::cref(vi), pi / 2, 2}, {std::cref(ld), 2.0, 5}}, lp);
    CHECK(mix.max_trace_drift < 1e-8);
    CHECK(population(mix.states.back(), up) < population(mix.states[1], up));

    CHECK_THROWS_AS(evolve_piecewise({}, lp), std::invalid_argument);
    CHECK_THROWS_AS(evolve_piecewise({{std::cref(h), 0.0, 2}}, lp), std::invalid_argument);
    SystemParams two = q;
    two.n_cavities = 2;
    const Operator h2 = build_h_jc(two);
    CHECK_THROWS_AS(evolve_piecewise({{std::cref(h), 1.0, 2}, {std::cref(h2), 1.0, 2}}, lp), std::invalid_argument);
}

TEST_CASE("branch-decoupled dissipator") {
    auto max_distance = [](double delta) {
        SystemParams p = site(delta, 2);
        p.gamma = 0.5;
        const Operator h = build_h_jc(p);
        const Liouvillian full = build_liouvillian(h, standard_channels(p));
        const Liouvillian split = Liouvillian::hamiltonian(h) + branch_decoupled_dissipator(p);
        const DensityMatrix rho0 = DensityMatrix::from_ket(polariton_ket(PolaritonLabel::lower(2), p));
        const auto t = grid(10.0, 101);
        const Trajectory a = evolve(full, rho0, t), b = evolve(split, rho0, t);
        double worst = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, trace_distance(a.states[i].matrix(), b.states[i].matrix()));
        return worst;
    };
    const double d5 = max_distance(5.0), d10 = max_distance(10.0), d20 = max_distance(20.0);
    CHECK(d10 < d5);
    CHECK(d20 < d10);

    // |2-> at Δ = 20g: cascade through |1-> with negligible |1+>
    SystemParams p = site(20.0, 2);
    p.gamma = 0.5;
    const Liouvillian split = Liouvillian::hamiltonian(build_h_jc(p)) + branch_decoupled_dissipator(p);
    const DensityMatrix rho0 = DensityMatrix::from_ket(polariton_ket(PolaritonLabel::lower(2), p));
    const Trajectory tr = evolve(split, rho0, grid(30.0, 61));
    const Vector m1 = polariton_ket(PolaritonLabel::lower(1), p).amplitudes();
    const Vector u1 = polariton_ket(PolaritonLabel::upper(1), p).amplitudes();
    double peak_m1 = 0.0, peak_u1 = 0.0;
    for (const auto& s : tr.states) {
        peak_m1 = std::max(peak_m1, population(s, m1));
        peak_u1 = std::max(peak_u1, population(s, u1));
    }
    CHECK(peak_m1 > 0.3);
    CHECK(peak_u1 < 1e-3);
    CHECK(tr.states.back().matrix()(0, 0).real() > 0.99);

    SystemParams off = p;
    off.gamma = 0.0;
    CHECK(branch_decoupled_dissipator(off).matrix().norm() == 0.0);
}

TEST_CASE("unitary propagator") {
    const SystemParams p = site(0.5);
    const Operator h = build_h_jc(p);
    const UnitaryPropagator u(h);
    CHECK((u.at(0.8) - oracle::unitary(h.matrix(), 0.8)).norm() < 1e-10);
    const Matrix bad = Matrix::Identity(8, 8) * cplx(0, 1);
    CHECK_THROWS_AS(UnitaryPropagator(Operator(p.dims(), bad)), std::invalid_argument);
}
