// lindblad.hpp — Liouvillian assembly, propagation and steady states
//
// Vectorization is column-major stacking (Eigen's native layout): vec(AXB) = (Bᵀ⊗A) vec(X).
// Commutator part −i(I⊗H − Hᵀ⊗I); a channel (L, r) adds r(conj(L)⊗L − ½ I⊗L†L − ½ (L†L)ᵀ⊗I),
// i.e. (r/2)(2LρL† − {L†L, ρ}).

#pragma once

#include "jch/operator_core.hpp"
#include "jch/params.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace jch {

class Liouvillian {
public:
    Liouvillian(HilbertDims dims, Matrix data);

    static Liouvillian zero(HilbertDims dims);
    // Pure commutator generator; remembers H so closed evolution can use it directly.
    static Liouvillian hamiltonian(const Operator& h);

    const HilbertDims& dims() const noexcept { return dims_; }
    const Matrix& matrix() const noexcept { return data_; }
    int hilbert_dim() const noexcept { return dims_.total_dim(); }

    // Set when the generator is exactly −i[H, ·].
    const std::optional<Operator>& closed_hamiltonian() const noexcept { return h_; }

    Matrix apply(const Matrix& rho) const;

    Liouvillian operator+(const Liouvillian& o) const;

private:
    HilbertDims dims_;
    Matrix data_;
    std::optional<Operator> h_;
};

Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, int dim);

struct DecayChannel {
    Operator jump;
    double rate{0.0};
};

// Throws std::invalid_argument for a negative rate.
Liouvillian dissipator(const Operator& jump, double rate);
Liouvillian build_liouvillian(const Operator& h, const std::vector<DecayChannel>& channels);

// Cavity decay γ on every a_j and atomic decay κ on every σ_j⁻.
std::vector<DecayChannel> standard_channels(const SystemParams& params);

// L₊ + L₋ with jumps P₊ and P₋ (lowering parts of the branch-conserving families) at rate γ per site.
Liouvillian branch_decoupled_dissipator(const SystemParams& params);

// Indices of vec-space reachable from `seed` under the sparsity graph of L; the block L[S,S] is invariant.
std::vector<Eigen::Index> reachable_set(const Matrix& l, const std::vector<Eigen::Index>& seed);
std::vector<Eigen::Index> support_of(const Vector& v, double tol = 0.0);

// Eigen-decomposition of L restricted to the sector reachable from a seed vector,
// expanded as v(t) = Σ_k c_k e^{λ_k t} R_k.
class SpectralPropagator {
public:
    SpectralPropagator(const Liouvillian& l, const Vector& v0);

    bool usable() const noexcept { return usable_; }  // false when the eigenbasis is ill-conditioned
    double rcond() const noexcept { return rcond_; }
    const std::vector<Eigen::Index>& sector() const noexcept { return sector_; }
    const Vector& eigenvalues() const noexcept { return lambda_; }
    const Vector& amplitudes() const noexcept { return coeff_; }   // c_k
    const Matrix& modes() const noexcept { return modes_; }        // R_k restricted to the sector (columns)

    Vector propagate(double t) const;  // full-length vec(ρ(t))

private:
    std::vector<Eigen::Index> sector_;
    Eigen::Index full_size_{0};
    Vector lambda_;
    Vector coeff_;
    Matrix modes_;
    double rcond_{0.0};
    bool usable_{false};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;  // empty when states are not kept
    std::map<std::string, std::vector<double>> observables;
    std::vector<std::size_t> segment_boundaries;  // sample index where each segment starts
    std::vector<std::string> warnings;
    double max_trace_drift{0.0};
    double max_hermiticity_error{0.0};
    double min_eigenvalue{0.0};  // only tracked when positivity checks are requested
};

struct EvolveOptions {
    bool keep_states{true};
    bool check_positivity{false};
    bool force_fixed_step{false};  // use the RK4 integrator even when the spectral route is available
    double max_step{1e-3};         // upper bound on the RK4 step, in 1/g
    std::map<std::string, Operator> observables;
};

// ρ0 is the state at t = 0; t_grid must be strictly increasing and start at >= 0.
Trajectory evolve(const Liouvillian& l, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                  const EvolveOptions& options = {});

// Unique zero mode, unit trace, Hermitized. Throws std::runtime_error on a missing or degenerate zero mode.
DensityMatrix steady_state(const Liouvillian& l);

struct Segment {
    std::variant<std::reference_wrapper<const Liouvillian>, std::reference_wrapper<const Operator>> generator;
    double duration{0.0};
    int samples{2};  // grid points including both ends
};

Trajectory evolve_piecewise(const std::vector<Segment>& segments, const DensityMatrix& rho0,
                            const EvolveOptions& options = {});

// Exact closed-system propagator exp(−iHt) from a Hermitian eigendecomposition.
class UnitaryPropagator {
public:
    explicit UnitaryPropagator(const Operator& h);
    Matrix at(double t) const;
    Vector apply(const Vector& psi, double t) const;

private:
    Eigen::VectorXd energies_;
    Matrix vectors_;
};

}  // namespace jch
