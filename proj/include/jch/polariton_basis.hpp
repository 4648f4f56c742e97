// polariton_basis.hpp — Dressed states |n±>, mixing angles and polariton ladder families
//
// Polariton-ordered site basis: 0 = |0g>, 2n-1 = |n->, 2n = |n+> (n = 1..N_f), and the
// last index holds |N_f, e>, the truncation-edge state whose partner |N_f+1, g> is cut off.

#pragma once

#include "jch/operator_core.hpp"
#include "jch/params.hpp"

#include <compare>
#include <functional>
#include <string>
#include <vector>

namespace jch {

enum class Branch { minus, plus };

struct PolaritonLabel {
    int n{0};
    Branch branch{Branch::minus};

    static PolaritonLabel ground() noexcept { return {0, Branch::minus}; }
    static PolaritonLabel lower(int n) noexcept { return {n, Branch::minus}; }
    static PolaritonLabel upper(int n) noexcept { return {n, Branch::plus}; }

    bool is_ground() const noexcept { return n == 0; }
    std::string name() const;  // "0g", "1-", "2+"

    friend auto operator<=>(const PolaritonLabel&, const PolaritonLabel&) = default;
};

// Parses "0g", "G", "1-", "2+".
PolaritonLabel parse_label(const std::string& text);

struct MixingAngle {
    int n{1};
    double theta{0.0};
};

// θ_n = ½ atan2(g√n, Δ/2) ∈ (0, π/2).
MixingAngle mixing_angle(int n, double g, double delta);

// Single-site polariton ket; label n must not exceed N_f.
Ket polariton_ket(const PolaritonLabel& label, double theta_n, const HilbertDims& dims);
Ket polariton_ket(const PolaritonLabel& label, const SystemParams& params);

// Product of single-site polaritons |l0> ⊗ |l1>.
Ket two_site_polariton(const PolaritonLabel& l0, const PolaritonLabel& l1, const SystemParams& params);

// E_{n±} = ω^c n + Δ/2 ± R_n/2; zero for the ground label.
double polariton_energy(const PolaritonLabel& label, const SystemParams& params);
// R_n = √(Δ² + 4g²n), with R_0 = 0.
double polariton_splitting(int n, const SystemParams& params);

struct PolaritonCoefficients {
    double c_plus{0.0}, c_minus{0.0}, k_pm{0.0}, k_mp{0.0};      // field, a†
    double ca_plus{0.0}, ca_minus{0.0}, ka_pm{0.0}, ka_mp{0.0};  // atomic, σ⁺
};

PolaritonCoefficients coefficients(int n, double theta_n, double theta_prev);

// Invoked per manifold after the coefficients are computed; lets selfcheck inject faults.
using CoefficientHook = std::function<void(int n, PolaritonCoefficients&)>;

// Entry n (1..N_f) holds the manifold-n coefficients; entry 0 is zero.
std::vector<PolaritonCoefficients> coefficient_table(const SystemParams& params, const CoefficientHook& hook = {});

// Column j is the bare-basis amplitude vector of polariton-ordered state j (single site).
Matrix polariton_transform(const SystemParams& params);
// Same for the full N_c-site space (Kronecker product of site transforms).
Matrix polariton_transform_full(const SystemParams& params);
int polariton_index(const PolaritonLabel& label);

// The four creation-direction families P₊†, P₋†, P_±†, P_∓† on one site.
struct LadderFamilies {
    Operator plus;
    Operator minus;
    Operator pm;
    Operator mp;

    Operator total() const { return plus + minus + pm + mp; }
};

LadderFamilies decompose_creation(const SystemParams& params, const CoefficientHook& hook = {});
LadderFamilies decompose_atomic_raising(const SystemParams& params, const CoefficientHook& hook = {});

// Projector onto site states with local excitation number <= max_excitation.
Matrix excitation_projector(const HilbertDims& site_dims, int max_excitation);

enum class HoppingFamily { plus_plus, minus_minus, plus_minus, plus_pm, plus_mp };

struct PhaseReport {
    double frequency{0.0};  // interaction-picture exponent, R_n conventions of the hopping expansion
    bool vanishes{false};   // the product has no amplitude in this manifold
    bool eliminable{false}; // |frequency| >= 4J and the product is present
};

PhaseReport interaction_picture_phase(HoppingFamily family, int n, int n_prime, const SystemParams& params);

}  // namespace jch
