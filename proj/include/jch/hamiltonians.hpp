// hamiltonians.hpp — JC, hopping, driven and stroboscopic Hamiltonian builders
//
// All builders return matrices in the bare (n, atom) product basis unless the name says
// "polariton", in which case the polariton-ordered site basis of polariton_basis.hpp is used.

#pragma once

#include "jch/operator_core.hpp"
#include "jch/params.hpp"
#include "jch/polariton_basis.hpp"

#include <vector>

namespace jch {

// Σ_j ω^a σ_j⁺σ_j⁻ + ω^c a_j†a_j + g(a_j†σ_j⁻ + σ_j⁺a_j)
Operator build_h_jc(const SystemParams& params);
// J(a_0†a_1 + a_1†a_0); requires two cavities.
Operator build_h_hop(const SystemParams& params);
// build_h_jc + build_h_hop (hopping only when two cavities).
Operator build_h_jch(const SystemParams& params);

// Diagonal E_{n±} in the polariton-ordered basis (Kronecker sum over sites).
Operator build_h_jc_polariton(const SystemParams& params);

// Hopping rewritten through the ladder families, J Σ (P_0†P_1 + h.c.), in the bare basis.
// With branch_conserving_only the interchanging products are dropped (RWA form).
Operator build_h_hop_polariton(const SystemParams& params, bool branch_conserving_only);

// Multi-rotating-frame driven JC with Δ₁ = 0:
// Δ_a σ⁺σ⁻ + Δ_c a†a + g(a†σ⁻ + σ⁺a) + iΩ(σ⁺ − σ⁻) + iα(a† − a), summed over sites (+ hopping).
// Throws std::invalid_argument if Δ₁ ≠ 0.
Operator build_h_driven(const SystemParams& params);

// β_{n±}, ξ_{n±}, ξ_{n∓} per manifold; index 0 unused.
struct DrivenPolaritonCoefficients {
    std::vector<cplx> beta_plus, beta_minus, xi_pm, xi_mp;
};

DrivenPolaritonCoefficients drive_coefficients(const SystemParams& params, const CoefficientHook& hook = {});

// Unperturbed rotating-frame energy Δ_c n + Δ/2 ± R_n/2 (0 for the ground label).
double rotating_energy(const PolaritonLabel& label, const SystemParams& params);

// Explicit polariton-basis assembly of the driven Hamiltonian for one site:
// diagonal rotating-frame energies plus β/ξ couplings between adjacent manifolds.
// The truncation-edge state carries its diagonal energy and no couplings.
Operator build_h_driven_polariton(const SystemParams& params);

struct RabiEstimate {
    double omega_r{0.0};
    double period{0.0};
};

// Ω_R = 2√(g² + (Ω²/Δ_c)²), T = 2π/Ω_R. Throws std::domain_error when Δ_c = 0.
RabiEstimate rabi_frequency(const SystemParams& params);

// 2×2 action of V_I(m) = 2g(−1)^m S_y on {|n,g>, |n−1,e>}, S₊ = σ⁺a.
Eigen::Matrix2cd stroboscopic_block(double g, int m, int n);
// V_I(m) restricted to manifold n of a single site.
Operator build_stroboscopic_vi(const SystemParams& params, int m, int n_manifold);
// Direct sum over all manifolds, summed over sites: −i g(−1)^m Σ_j (σ_j⁺a_j − a_j†σ_j⁻).
Operator build_stroboscopic_vi_full(const SystemParams& params, int m);

}  // namespace jch
