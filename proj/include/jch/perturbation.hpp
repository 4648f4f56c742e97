// perturbation.hpp — Weak-drive Rayleigh-Schrödinger series for the driven JC site
//
// H̃ = H̃₀ + V in the polariton basis (rotating frame, Δ₁ = 0). V couples adjacent manifolds only:
// <nη|V|(n−1)η> = β_{nη}, <n+|V|(n−1)−> = ξ_{n±}, <n−|V|(n−1)+> = ξ_{n∓}, and V is Hermitian.
// State corrections use intermediate normalization (<k⁰|k> = 1).

#pragma once

#include "jch/hamiltonians.hpp"
#include "jch/params.hpp"
#include "jch/polariton_basis.hpp"

#include <map>
#include <string>
#include <vector>

namespace jch {

// The five labels the series is written for: G, 1−, 1+, 2−, 2+.
std::vector<PolaritonLabel> perturbative_labels();

// Rotating-frame E⁽⁰⁾ for G, 1±, 2±, 3±.
std::map<PolaritonLabel, double> unperturbed_energies(const SystemParams& params);

// Checks pairwise gaps among the labels a formula touches; throws std::domain_error naming the pair.
void require_nondegenerate(const SystemParams& params, double min_gap = 1e-6);

// E⁽²⁾ for the five labels. E⁽¹⁾ vanishes identically and is not stored.
std::map<PolaritonLabel, double> second_order_energies(const SystemParams& params);

using Amplitudes = std::map<PolaritonLabel, cplx>;

struct CorrectionOptions {
    // Include |3±> amplitudes (first-order d, e and second-order g, h). Off by default.
    bool include_third_manifold{false};
};

// order 1 or 2; returns label → correction amplitudes (the k-th order part only).
std::map<PolaritonLabel, Amplitudes> corrected_states(const SystemParams& params, int order,
                                                      const CorrectionOptions& options = {});

// Single-site ket of Σ amplitudes·|label>, normalized.
Ket assemble_ket(const Amplitudes& amplitudes, const SystemParams& params);

struct PerturbationEntry {
    PolaritonLabel label;
    double e0{0.0};
    double e1{0.0};
    double e2{0.0};
    Amplitudes first;
    Amplitudes second;
    // Exact-diagonalization comparison (eigenvector matched by maximal overlap with |k⁰>).
    double e_exact{0.0};
    double residual{0.0};     // |E_exact − E⁰ − E⁽²⁾|
    double overlap{0.0};      // |<exact|k⁰ + k⁽¹⁾ + k⁽²⁾>|² after normalization
};

struct PerturbationReport {
    std::vector<PerturbationEntry> entries;
};

PerturbationReport perturbation_report(const SystemParams& params, const CorrectionOptions& options = {});

// Human-readable expansion of every coefficient formula, one line per term.
std::vector<std::string> expanded_formula_table();

}  // namespace jch
