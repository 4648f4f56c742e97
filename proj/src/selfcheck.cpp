#include "jch/selfcheck.hpp"

#include "jch/hamiltonians.hpp"
#include "jch/lindblad.hpp"
#include "jch/polariton_basis.hpp"
#include "jch/protocols.hpp"
#include "jch/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace jch::selfcheck {

namespace {

struct Check {
    std::string name;
    std::string module;
    double threshold;
    bool upper;  // value must stay below the threshold (otherwise above)
    std::function<double(const Options&)> measure;
};

SystemParams site(double delta, int n_fock = 4) {
    SystemParams p;
    p.n_fock = n_fock;
    p.set_detuning(delta);
    return p;
}

SystemParams pair(double j, double delta) {
    SystemParams p;
    p.n_cavities = 2;
    p.n_fock = 3;
    p.J = j;
    p.set_detuning(delta);
    return p;
}

CoefficientHook hook_for(const Options& o) {
    if (!o.corrupt_coefficients) return {};
    return [](int n, PolaritonCoefficients& c) {
        if (n == 2) {
            c.c_plus *= 1.05;
            c.ca_minus += 0.01;
        }
    };
}

double reconstruction_residual(const Options& o) {
    double worst = 0.0;
    for (double delta : {0.0, 0.7, -1.3}) {
        const SystemParams p = site(delta);
        const HilbertDims sd = p.dims().site();
        const Matrix proj = excitation_projector(sd, p.n_fock - 1);
        const Matrix field = fock_annihilation(sd).adjoint().matrix();
        const Matrix atom = atomic_lowering(sd).adjoint().matrix();
        const Matrix f = decompose_creation(p, hook_for(o)).total().matrix();
        const Matrix s = decompose_atomic_raising(p, hook_for(o)).total().matrix();
        worst = std::max(worst, ((field - f) * proj).norm());
        worst = std::max(worst, ((atom - s) * proj).norm());
    }
    return worst;
}

double diagonalization_residual(const Options&) {
    double worst = 0.0;
    for (double delta : {0.0, 0.7, -1.3, 20.0}) {
        const SystemParams p = site(delta);
        const Matrix w = polariton_transform(p);
        const Matrix d = w.adjoint() * build_h_jc(p).matrix() * w;
        worst = std::max(worst, (d - build_h_jc_polariton(p).matrix()).norm() / p.omega_c);
        worst = std::max(worst, (w.adjoint() * w - Matrix::Identity(w.rows(), w.cols())).norm());
    }
    return worst;
}

double hermiticity(const Options&) {
    SystemParams p = pair(0.3, 0.5);
    double worst = (build_h_jch(p).matrix() - build_h_jch(p).matrix().adjoint()).norm();
    SystemParams q = driven_defaults();
    const Matrix h = build_h_driven(q).matrix();
    worst = std::max(worst, (h - h.adjoint()).norm());
    return worst;
}

Liouvillian dissipative_site(SystemParams& p) {
    p = driven_defaults();
    p.n_fock = 3;
    p.gamma = 0.1;
    p.kappa = 0.2;
    return build_liouvillian(build_h_driven(p), standard_channels(p));
}

Trajectory dissipative_run(bool fixed_step) {
    SystemParams p;
    const Liouvillian l = dissipative_site(p);
    EvolveOptions opts;
    opts.check_positivity = true;
    opts.force_fixed_step = fixed_step;
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(0.02 * i);
    return evolve(l, DensityMatrix::from_ket(polariton_ket(PolaritonLabel::lower(1), p)), grid, opts);
}

double trace_drift(const Options&) {
    return std::max(dissipative_run(false).max_trace_drift, dissipative_run(true).max_trace_drift);
}

double positivity(const Options&) {
    return std::min(dissipative_run(false).min_eigenvalue, dissipative_run(true).min_eigenvalue);
}

double zero_mode(const Options&) {
    SystemParams p;
    const Liouvillian l = dissipative_site(p);
    const DensityMatrix ss = steady_state(l);
    return l.apply(ss.matrix()).norm();
}

double branch_separability(const Options&) {
    double worst = 0.0;
    for (double delta : {0.0, 1.0}) {
        const SystemParams p = pair(0.1, delta);
        const UnitaryPropagator u(build_h_jch(p));
        const Vector psi0 = named_state("1-,1-", p).amplitudes();
        for (int i = 0; i <= 400; ++i) worst = std::max(worst, upper_branch_population(u.apply(psi0, 100.0 * i / 400), p));
    }
    return worst;
}

double excitation_drift(const Options&) {
    const SystemParams p = pair(0.1, 2.0);
    const Operator n_tot = total_number(p.dims());
    const UnitaryPropagator pulse(build_stroboscopic_vi_full(p, 1));
    const UnitaryPropagator free(build_h_jch(p));
    Vector psi = named_state("1-,1-", p).amplitudes();
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
        psi = pulse.apply(psi, 0.5 * std::numbers::pi / p.g);
        for (int i = 1; i <= 10; ++i) {
            const Vector s = free.apply(psi, 0.3 * i);
            worst = std::max(worst, std::abs(s.dot(n_tot.matrix() * s).real() - 2.0));
        }
        psi = free.apply(psi, 3.0);
    }
    return worst;
}

double stroboscopic_cycle(const Options&) {
    double worst = 0.0;
    for (int m : {0, 1}) {
        const SystemParams p = site(0.0);
        const UnitaryPropagator u(build_stroboscopic_vi(p, m, 1));
        const Vector psi0 = polariton_ket(PolaritonLabel::lower(1), p).amplitudes();
        worst = std::max(worst, 1.0 - std::abs(psi0.dot(u.apply(psi0, std::numbers::pi / p.g))));
    }
    return worst;
}

double variance_nonnegative(const Options&) {
    double lowest = 1.0;
    for (double j : {0.05, 0.1}) lowest = std::min(lowest, branch_order_parameter(pair(j, 0.0), Branch::minus, 201).var_tau);
    return lowest;
}

double variance_weak_hopping(const Options&) {
    return branch_order_parameter(pair(1e-3, 0.0), Branch::minus, 201).var_tau;
}

double spectrum_agreement(const Options&) {
    SystemParams p = site(0.0, 2);
    p.gamma = p.kappa = 0.5;
    const auto grid = default_frequency_grid(p, 401);
    const Spectrum num = system_absorption_spectrum(p, grid);
    const Spectrum ana = absorption_spectrum_analytic(p, grid);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        err = std::max(err, std::abs(num.values[i] - ana.values[i]));
        scale = std::max(scale, ana.values[i]);
    }
    return err / scale;
}

const std::vector<Check>& checks() {
    static const std::vector<Check> list = {
        {"polariton_diagonalization", "polariton-basis", 1e-10, true, diagonalization_residual},
        {"ladder_reconstruction", "polariton-basis", 1e-10, true, reconstruction_residual},
        {"hamiltonian_hermiticity", "hamiltonians", 1e-10, true, hermiticity},
        {"stroboscopic_full_cycle", "hamiltonians", 1e-10, true, stroboscopic_cycle},
        {"trace_preservation", "lindblad-engine", 1e-8, true, trace_drift},
        {"snapshot_positivity", "lindblad-engine", -1e-7, false, positivity},
        {"liouvillian_zero_mode", "lindblad-engine", 1e-8, true, zero_mode},
        {"spectrum_numeric_vs_analytic", "spectroscopy", 5e-3, true, spectrum_agreement},
        {"excitation_conservation", "protocols", 1e-8, true, excitation_drift},
        {"branch_separability", "protocols", 0.1, true, branch_separability},
        {"variance_nonnegative", "protocols", -1e-8, false, variance_nonnegative},
        {"variance_vanishes_weak_hopping", "protocols", 1e-3, true, variance_weak_hopping},
    };
    return list;
}

}  // namespace

std::vector<CheckResult> run(const Options& options) {
    std::vector<CheckResult> out;
    for (const auto& c : checks()) {
        CheckResult r{c.name, c.module, false, 0.0, c.threshold, ""};
        try {
            r.value = c.measure(options);
            r.passed = c.upper ? r.value < c.threshold : r.value >= c.threshold;
            r.detail = std::string(c.upper ? "value < " : "value >= ") + "threshold";
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json to_json(const std::vector<CheckResult>& results) {
    nlohmann::json j;
    j["passed"] = all_passed(results);
    j["checks"] = nlohmann::json::array();
    for (const auto& r : results) {
        j["checks"].push_back({{"name", r.name},
                               {"module", r.module},
                               {"passed", r.passed},
                               {"value", r.value},
                               {"threshold", r.threshold},
                               {"detail", r.detail}});
    }
    return j;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace jch::selfcheck
