// params.hpp — Physical parameters of identical JC sites (all in units of g)

#pragma once

#include "jch/operator_core.hpp"

#include <algorithm>
#include <cmath>

namespace jch {

struct SystemParams {
    double omega_a{1.0e4};  // atomic transition
    double omega_c{1.0e4};  // cavity mode
    double g{1.0};
    double J{0.0};          // hopping, real
    double gamma{0.0};      // cavity decay
    double kappa{0.0};      // atomic decay
    double Omega{0.0};      // atomic drive amplitude
    double alpha{0.0};      // cavity drive amplitude
    double omega_l{1.0e4};  // atomic drive frequency
    double omega_p{1.0e4};  // cavity drive frequency
    int n_fock{4};
    int n_cavities{1};

    double delta() const noexcept { return omega_a - omega_c; }
    double delta_a() const noexcept { return omega_a - omega_l; }
    double delta_c() const noexcept { return omega_c - omega_p; }
    double delta_1() const noexcept { return omega_p - omega_l; }
    // Δ₁ = 0 up to rounding in the absolute drive frequencies.
    bool delta_1_vanishes() const noexcept {
        return std::abs(delta_1()) <= 1e-12 * std::max({1.0, std::abs(omega_p), std::abs(omega_l)});
    }

    HilbertDims dims() const noexcept { return {n_fock, n_cavities}; }

    // Moves omega_a so that delta() == d.
    SystemParams& set_detuning(double d) noexcept {
        omega_a = omega_c + d;
        return *this;
    }
    // Places the drive frequencies so that delta_a() == da and delta_c() == dc.
    SystemParams& set_drive_detunings(double da, double dc) noexcept {
        omega_l = omega_a - da;
        omega_p = omega_c - dc;
        return *this;
    }

    // g > 0, non-negative rates, valid truncation. Throws std::invalid_argument.
    void validate() const;
};

}  // namespace jch
