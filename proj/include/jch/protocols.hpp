// protocols.hpp — Composite experiments: hopping probes, driven oscillations, mechanism table,
// detuning ramp with the number-variance order parameter, and the effective two-level model.

#pragma once

#include "jch/hamiltonians.hpp"
#include "jch/lindblad.hpp"
#include "jch/params.hpp"
#include "jch/polariton_basis.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace jch {

// Runs fn(0..n-1) on up to `threads` workers; each index is written by exactly one call.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// "1-,0" → |1−>⊗|0g>; single labels ("1-") give a one-site ket.
Ket named_state(const std::string& name, const SystemParams& params);

// Probability that at least one site sits in the + branch.
double upper_branch_population(const Vector& psi, const SystemParams& params);

struct ProbeResult {
    double max_probability{0.0};
    double t_at_max{0.0};
    double window{0.0};
};

// Closed two-site evolution under H_JC + H_hp for window_j/J and the maximal target probability.
ProbeResult hopping_interchange_probe(const SystemParams& params, const std::string& initial,
                                      const std::string& target, double window_j = 10.0, double dt = 0.005);

// |ρ_{1+,1−}| + |ρ_{1−,1+}| in the site-0 polariton basis (site 1 traced out for two cavities).
double coherence(const DensityMatrix& rho, const SystemParams& params);

// Σ_i <N_i²> − <N_i>².
double number_variance(const Vector& psi, const HilbertDims& dims);
double number_variance(const DensityMatrix& rho);

// (1/τ)∫₀^τ v(t) dt by the trapezoid rule; needs >= 200 samples covering [0, τ].
double order_parameter(const std::vector<double>& times, const std::vector<double>& variance, double tau);
double order_parameter(const Trajectory& trajectory, double tau);

struct PeriodEstimate {
    std::vector<double> max_times;
    std::vector<double> max_values;
    double period{0.0};
};

// Maxima of the humps above the mid-level, refined by quadratic interpolation; period = mean spacing.
// Throws std::runtime_error with fewer than 3 maxima.
PeriodEstimate extract_period(const std::vector<double>& times, const std::vector<double>& values);

struct DrivenRun {
    std::vector<double> times;
    std::vector<double> p_1plus, p_1minus, p_ground, coherence;
    PeriodEstimate estimate;
    RabiEstimate analytic;
};

// Single driven site from |1−>; Lindblad (γ, κ) when rates are nonzero, unitary otherwise.
DrivenRun driven_oscillation_run(const SystemParams& params, double t_max = 4.0, double dt = 0.002);

// Parameter sets reproducing the driven-oscillation experiment (Ω = 50g, Δ_a = Δ_c = 500g, Δ = 0).
SystemParams driven_defaults();

struct MechanismRow {
    std::string mechanism;
    std::string control;
    std::string initial;
    double coherence_max{0.0};
    double interchange{0.0};
    double coherence_expected{0.0};
    double interchange_expected{0.0};
};

std::vector<MechanismRow> mechanism_table(int threads = 1);

struct RampSchedule {
    int m{1};
    double delta_start{60.0};
    std::vector<double> delta_values;  // strictly decreasing, positive
    std::vector<double> hold_times;    // t_i with Δ_i t_i = π(2m+1)/2
    double t1{0.0};                    // g t1 = π/2
    double tau{10.0};                  // 1/J

    // Throws std::invalid_argument when ordering or the stroboscopic constraint is violated.
    void validate(double g = 1.0) const;
};

RampSchedule make_ramp_schedule(int m, double J, double g = 1.0, int points = 40, double delta_start = 60.0,
                                double delta_end = 0.1);

struct OrderParameterPoint {
    double delta{0.0};
    int pulses{0};
    double var_tau{0.0};
    double lp_weight{0.0};  // site-averaged population of the − branch
    double up_weight{0.0};  // site-averaged population of the + branch
    std::map<std::string, double> max_probability;   // over [0, τ]
    std::map<std::string, double> mean_probability;  // time average over [0, τ]
};

struct RampOptions {
    bool strict{false};  // keep hopping on during pulses
    int threads{1};
    int samples{401};    // grid points over [0, τ]
};

// time_dependent: point i has received i V_I pulses (gt₁ = π/2 each) applied between detuning steps,
// polariton amplitudes transported unchanged from Δ_{i−1} to Δ_i. Otherwise every point starts fresh in
// the named initial state at Δ_i. Closed system only.
std::vector<OrderParameterPoint> ramp_experiment(const RampSchedule& schedule, const SystemParams& params,
                                                 const std::string& initial, bool time_dependent,
                                                 const RampOptions& options = {});

// var(τ) from |1η,1η>(Δ_i) at every schedule point.
std::vector<OrderParameterPoint> ramp_reference(const RampSchedule& schedule, const SystemParams& params, Branch branch,
                                                const RampOptions& options = {});

// Single-point order parameter from |1η,1η> at the given parameters (two cavities, closed).
OrderParameterPoint branch_order_parameter(const SystemParams& params, Branch branch, int samples = 401);

enum class DiagonalForm { energy_consistent, printed };

struct EffectiveModel {
    double a{0.0}, b{0.0}, c{0.0};
    double omega0{0.0};
    Branch branch{Branch::minus};
    DiagonalForm form{DiagonalForm::energy_consistent};
};

EffectiveModel effective_model(const SystemParams& params, Branch branch,
                               DiagonalForm form = DiagonalForm::energy_consistent);

// (4b²/Ω₀²)[1 − (J/Ω₀) sin(Ω₀/J)], series form when Ω₀/J < 1e-4.
double analytic_variance(const EffectiveModel& model, double J);

}  // namespace jch
