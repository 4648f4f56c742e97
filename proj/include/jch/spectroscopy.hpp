// spectroscopy.hpp — Correlation functions and absorption spectra via quantum regression

#pragma once

#include "jch/lindblad.hpp"
#include "jch/operator_core.hpp"
#include "jch/params.hpp"

#include <optional>
#include <vector>

namespace jch {

struct Spectrum {
    std::vector<double> frequencies;  // absolute ω, units of g
    std::vector<double> values;
    SystemParams params;
};

struct Peak {
    double position{0.0};
    double height{0.0};
    double fwhm{0.0};
};

struct PeakReport {
    std::vector<Peak> peaks;          // ascending in frequency
    std::optional<Peak> a, b;         // two tallest, a at lower ω
    std::optional<double> asymmetry;  // |h_A − h_B| / (h_A + h_B)
};

// Modes of the regression expansion G(τ) = Σ_k w_k e^{λ_k τ}, zero modes removed.
struct RegressionModes {
    std::vector<cplx> lambda;
    std::vector<cplx> weight;
    cplx limit{0.0};  // long-time value of Tr[a f(τ)] from the zero modes
};

RegressionModes regression_modes(const Liouvillian& l, const DensityMatrix& rho_ss, const Operator& a_op);

// G(τ) = Tr[a f(τ)] − lim, f(0) = a†ρ_ss propagated by L.
// Throws std::invalid_argument when ρ_ss is not stationary (‖L[ρ_ss]‖ >= 1e-6) or L has no dissipation.
std::vector<cplx> correlation_function(const Liouvillian& l, const DensityMatrix& rho_ss, const Operator& a_op,
                                       const std::vector<double>& t_grid);

// S(ω) = Σ_k 2Re[w_k / (−λ_k − iω)]. Throws std::runtime_error on a non-decaying contributing mode.
Spectrum absorption_spectrum_numeric(const Liouvillian& l, const DensityMatrix& rho_ss, const Operator& a_op,
                                     const std::vector<double>& freq_grid, const SystemParams& params = {});

// Closed-form lineshape of the single-cavity three-level manifold {|0g>, |1−>, |1+>}.
Spectrum absorption_spectrum_analytic(const SystemParams& params, const std::vector<double>& freq_grid);

// Default grid: 2001 points over [ω^c − w, ω^c + w], w = 4g (+2J for two cavities).
std::vector<double> default_frequency_grid(const SystemParams& params, int points = 2001);

// Local maxima above 1% of the global maximum; FWHM by half-height interpolation.
// Throws std::invalid_argument for fewer than 3 points and std::runtime_error when no peak is found.
PeakReport find_peaks(const Spectrum& spectrum);

// Full pipeline for one configuration: Liouvillian of H_JC(+hop) with standard channels, steady state,
// numeric spectrum of a on site 0.
Spectrum system_absorption_spectrum(const SystemParams& params, const std::vector<double>& freq_grid);

}  // namespace jch
