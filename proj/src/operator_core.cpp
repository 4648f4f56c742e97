#include "jch/operator_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace jch {

int HilbertDims::total_dim() const noexcept {
    int d = 1;
    for (int i = 0; i < n_cavities; ++i) d *= site_dim();
    return d;
}

void HilbertDims::validate() const {
    if (n_fock < 2) {
        throw std::invalid_argument("HilbertDims: n_fock must be >= 2 (two-excitation manifold), got " +
                                    std::to_string(n_fock));
    }
    if (n_cavities != 1 && n_cavities != 2) {
        throw std::invalid_argument("HilbertDims: n_cavities must be 1 or 2, got " +
                                    std::to_string(n_cavities));
    }
}

// ---------------------------------------------------------------- Operator

Operator::Operator(HilbertDims dims, Matrix data) : dims_(dims), data_(std::move(data)) {
    dims_.validate();
    const auto d = static_cast<Eigen::Index>(dims_.total_dim());
    if (data_.rows() != d || data_.cols() != d) {
        throw std::invalid_argument("Operator: matrix is " + std::to_string(data_.rows()) + "x" +
                                    std::to_string(data_.cols()) + ", expected " + std::to_string(d) +
                                    "x" + std::to_string(d));
    }
}

Operator Operator::zero(HilbertDims dims) {
    const auto d = dims.total_dim();
    return Operator(dims, Matrix::Zero(d, d));
}

Operator Operator::identity(HilbertDims dims) {
    const auto d = dims.total_dim();
    return Operator(dims, Matrix::Identity(d, d));
}

Operator Operator::adjoint() const { return Operator(dims_, data_.adjoint()); }

bool Operator::is_hermitian(double tol) const { return (data_ - data_.adjoint()).norm() <= tol; }

void Operator::require_same(const Operator& o, const char* what) const {
    if (!(dims_ == o.dims_)) throw std::invalid_argument(std::string("Operator ") + what + ": dimension mismatch");
}

Operator Operator::operator+(const Operator& o) const {
    require_same(o, "+");
    return Operator(dims_, data_ + o.data_);
}

Operator Operator::operator-(const Operator& o) const {
    require_same(o, "-");
    return Operator(dims_, data_ - o.data_);
}

Operator Operator::operator*(const Operator& o) const {
    require_same(o, "*");
    return Operator(dims_, data_ * o.data_);
}

Operator Operator::operator*(cplx s) const { return Operator(dims_, data_ * s); }

// --------------------------------------------------------------------- Ket

Ket::Ket(HilbertDims dims, Vector amplitudes) : dims_(dims), amp_(std::move(amplitudes)) {
    dims_.validate();
    if (amp_.size() != dims_.total_dim()) throw std::invalid_argument("Ket: length does not match dims");
    if (std::abs(amp_.norm() - 1.0) > 1e-10) {
        throw std::invalid_argument("Ket: amplitudes not normalized (norm " + std::to_string(amp_.norm()) + ")");
    }
}

Ket Ket::basis(HilbertDims dims, Eigen::Index index) {
    Vector v = Vector::Zero(dims.total_dim());
    if (index < 0 || index >= v.size()) throw std::out_of_range("Ket::basis: index out of range");
    v(index) = 1.0;
    return Ket(dims, std::move(v));
}

Ket Ket::normalized(HilbertDims dims, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (n == 0.0) throw std::invalid_argument("Ket::normalized: zero vector");
    return Ket(dims, amplitudes / n);
}

Ket tensor(const Ket& a, const Ket& b) {
    if (a.dims().n_cavities != 1 || b.dims().n_cavities != 1 || !(a.dims() == b.dims())) {
        throw std::invalid_argument("tensor: expects two single-site kets with equal truncation");
    }
    Vector v(a.amplitudes().size() * b.amplitudes().size());
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
    }
    return Ket(HilbertDims{a.dims().n_fock, 2}, std::move(v));
}

// ------------------------------------------------------------ DensityMatrix

DensityCheck check_density(const Matrix& rho) {
    DensityCheck c;
    c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

DensityMatrix::DensityMatrix(HilbertDims dims, Matrix data, NoCheck) : dims_(dims), data_(std::move(data)) {}

DensityMatrix::DensityMatrix(HilbertDims dims, Matrix data) : dims_(dims), data_(std::move(data)) {
    dims_.validate();
    const auto d = static_cast<Eigen::Index>(dims_.total_dim());
    if (data_.rows() != d || data_.cols() != d) throw std::invalid_argument("DensityMatrix: dimension mismatch");
    const DensityCheck c = check();
    if (!c.valid()) {
        throw std::invalid_argument("DensityMatrix: invalid state (hermiticity " + std::to_string(c.hermiticity_error) +
                                    ", trace error " + std::to_string(c.trace_error) + ", min eigenvalue " +
                                    std::to_string(c.min_eigenvalue) + ")");
    }
}

DensityMatrix DensityMatrix::from_ket(const Ket& ket) {
    return DensityMatrix(ket.dims(), ket.amplitudes() * ket.amplitudes().adjoint(), NoCheck{});
}

DensityMatrix DensityMatrix::unchecked(HilbertDims dims, Matrix data) {
    return DensityMatrix(dims, std::move(data), NoCheck{});
}

DensityCheck DensityMatrix::check() const { return check_density(data_); }

// ------------------------------------------------------------- operators

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Operator fock_annihilation(const HilbertDims& dims) {
    const HilbertDims s = dims.site();
    Matrix m = Matrix::Zero(s.site_dim(), s.site_dim());
    for (int n = 1; n <= s.n_fock; ++n) {
        for (int atom = 0; atom < 2; ++atom) {
            m(site_index(n - 1, atom), site_index(n, atom)) = std::sqrt(static_cast<double>(n));
        }
    }
    return Operator(s, std::move(m));
}

Operator atomic_lowering(const HilbertDims& dims) {
    const HilbertDims s = dims.site();
    Matrix m = Matrix::Zero(s.site_dim(), s.site_dim());
    for (int n = 0; n <= s.n_fock; ++n) m(site_index(n, false), site_index(n, true)) = 1.0;
    return Operator(s, std::move(m));
}

Operator embed_site(const Operator& op, int site_index_, const HilbertDims& dims) {
    dims.validate();
    if (site_index_ < 0 || site_index_ >= dims.n_cavities) {
        throw std::out_of_range("embed_site: site " + std::to_string(site_index_) + " out of range for " +
                                std::to_string(dims.n_cavities) + " cavities");
    }
    if (op.matrix().rows() != dims.site_dim()) throw std::invalid_argument("embed_site: operator is not single-site");
    Matrix full = Matrix::Identity(1, 1);
    const Matrix id = Matrix::Identity(dims.site_dim(), dims.site_dim());
    for (int s = 0; s < dims.n_cavities; ++s) full = kron(full, s == site_index_ ? op.matrix() : id);
    return Operator(dims, std::move(full));
}

Operator annihilation(const HilbertDims& dims, int site) { return embed_site(fock_annihilation(dims), site, dims); }

Operator lowering(const HilbertDims& dims, int site) { return embed_site(atomic_lowering(dims), site, dims); }

Operator number_operator(const HilbertDims& dims, int site) {
    const Operator a = fock_annihilation(dims);
    const Operator sm = atomic_lowering(dims);
    return embed_site(a.adjoint() * a + sm.adjoint() * sm, site, dims);
}

Operator total_number(const HilbertDims& dims) {
    Operator n = Operator::zero(dims);
    for (int s = 0; s < dims.n_cavities; ++s) n = n + number_operator(dims, s);
    return n;
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Matrix partial_trace(const Matrix& rho, const HilbertDims& dims, int keep_site) {
    if (dims.n_cavities != 2) throw std::invalid_argument("partial_trace: requires two cavities");
    if (keep_site != 0 && keep_site != 1) throw std::out_of_range("partial_trace: keep_site must be 0 or 1");
    const int d = dims.site_dim();
    Matrix out = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            cplx acc{0.0, 0.0};
            for (int k = 0; k < d; ++k) {
                acc += keep_site == 0 ? rho(i * d + k, j * d + k) : rho(k * d + i, k * d + j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep_site) {
    return DensityMatrix::unchecked(rho.dims().site(), partial_trace(rho.matrix(), rho.dims(), keep_site));
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
    if (!(op.dims() == rho.dims())) throw std::invalid_argument("expectation: dimension mismatch");
    // Tr(A rho) without forming the product.
    return (op.matrix().transpose().cwiseProduct(rho.matrix())).sum();
}

RealExpectation expectation_real(const Operator& op, const DensityMatrix& rho) {
    const cplx v = expectation(op, rho);
    return {v.real(), std::abs(v.imag())};
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
    const Matrix diff = 0.5 * ((rho - sigma) + (rho - sigma).adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace jch
