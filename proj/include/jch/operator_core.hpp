// operator_core.hpp — Truncated Fock/qubit operator algebra for one or two JC sites
//
// Per-site basis ordering is (photon n, atom) lexicographic: index = 2*n + atom,
// atom 0 = |g>, 1 = |e>. Site 0 is the leftmost (slowest-varying) tensor factor.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>

namespace jch {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx I_UNIT{0.0, 1.0};

struct HilbertDims {
    int n_fock{4};      // photon cutoff N_f, photon dim = N_f + 1
    int n_cavities{1};  // 1 or 2

    int photon_dim() const noexcept { return n_fock + 1; }
    int site_dim() const noexcept { return 2 * photon_dim(); }
    int total_dim() const noexcept;
    HilbertDims site() const noexcept { return {n_fock, 1}; }

    // Throws std::invalid_argument when the truncation is unusable.
    void validate() const;

    friend bool operator==(const HilbertDims&, const HilbertDims&) = default;
};

// Index of |n, atom> inside one site.
inline int site_index(int n, bool excited) noexcept { return 2 * n + (excited ? 1 : 0); }
// Local excitation number n + atom of a per-site index.
inline int site_excitation(int idx) noexcept { return idx / 2 + idx % 2; }

class Operator {
public:
    Operator(HilbertDims dims, Matrix data);

    static Operator zero(HilbertDims dims);
    static Operator identity(HilbertDims dims);

    const HilbertDims& dims() const noexcept { return dims_; }
    const Matrix& matrix() const noexcept { return data_; }
    cplx operator()(Eigen::Index r, Eigen::Index c) const { return data_(r, c); }

    Operator adjoint() const;
    double norm() const { return data_.norm(); }
    bool is_hermitian(double tol) const;

    Operator operator+(const Operator& o) const;
    Operator operator-(const Operator& o) const;
    Operator operator*(const Operator& o) const;
    Operator operator*(cplx s) const;
    friend Operator operator*(cplx s, const Operator& op) { return op * s; }

private:
    void require_same(const Operator& o, const char* what) const;

    HilbertDims dims_;
    Matrix data_;
};

class Ket {
public:
    // Unit norm is enforced to 1e-10.
    Ket(HilbertDims dims, Vector amplitudes);

    static Ket basis(HilbertDims dims, Eigen::Index index);
    // Normalizes first; throws on a zero vector.
    static Ket normalized(HilbertDims dims, Vector amplitudes);

    const HilbertDims& dims() const noexcept { return dims_; }
    const Vector& amplitudes() const noexcept { return amp_; }

private:
    HilbertDims dims_;
    Vector amp_;
};

// Product state of two single-site kets (site a is site 0).
Ket tensor(const Ket& a, const Ket& b);

struct DensityCheck {
    double hermiticity_error{0.0};
    double trace_error{0.0};
    double min_eigenvalue{0.0};

    bool valid() const noexcept {
        return hermiticity_error <= 1e-10 && trace_error <= 1e-8 && min_eigenvalue >= -1e-8;
    }
};

class DensityMatrix {
public:
    // Validates Hermiticity, unit trace and positivity; throws std::invalid_argument.
    DensityMatrix(HilbertDims dims, Matrix data);

    static DensityMatrix from_ket(const Ket& ket);
    // Skips validation; used for propagated snapshots, which are checked separately.
    static DensityMatrix unchecked(HilbertDims dims, Matrix data);

    const HilbertDims& dims() const noexcept { return dims_; }
    const Matrix& matrix() const noexcept { return data_; }

    DensityCheck check() const;
    cplx trace() const { return data_.trace(); }

private:
    struct NoCheck {};
    DensityMatrix(HilbertDims dims, Matrix data, NoCheck);

    HilbertDims dims_;
    Matrix data_;
};

DensityCheck check_density(const Matrix& rho);

// Kronecker product of dense matrices.
Matrix kron(const Matrix& a, const Matrix& b);

// Single-site operators (dims.site()).
Operator fock_annihilation(const HilbertDims& dims);
Operator atomic_lowering(const HilbertDims& dims);

// identity ⊗ ... ⊗ op ⊗ ... ⊗ identity, op at position site_index.
Operator embed_site(const Operator& op, int site_index, const HilbertDims& dims);

// Full-space conveniences.
Operator annihilation(const HilbertDims& dims, int site);
Operator lowering(const HilbertDims& dims, int site);
// N_i = a_i† a_i + σ_i⁺ σ_i⁻
Operator number_operator(const HilbertDims& dims, int site);
Operator total_number(const HilbertDims& dims);

Operator commutator(const Operator& a, const Operator& b);

DensityMatrix partial_trace(const DensityMatrix& rho, int keep_site);
Matrix partial_trace(const Matrix& rho, const HilbertDims& dims, int keep_site);

cplx expectation(const Operator& op, const DensityMatrix& rho);

struct RealExpectation {
    double value{0.0};
    double imag_residual{0.0};
};
RealExpectation expectation_real(const Operator& op, const DensityMatrix& rho);

// 0.5 * || rho - sigma ||_1 for Hermitian arguments.
double trace_distance(const Matrix& rho, const Matrix& sigma);

}  // namespace jch
