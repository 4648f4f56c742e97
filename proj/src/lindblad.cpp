#include "jch/lindblad.hpp"

#include "jch/polariton_basis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace jch {

namespace {

// out += scale * (a ⊗ b), visiting only the nonzero entries of a.
void add_kron(Matrix& out, const Matrix& a, const Matrix& b, cplx scale) {
    const Eigen::Index br = b.rows(), bc = b.cols();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const cplx v = a(i, j);
            if (v == cplx(0.0)) continue;
            out.block(i * br, j * bc, br, bc) += (scale * v) * b;
        }
    }
}

// out += scale * (a ⊗ I), touching only the diagonals of each block.
void add_kron_identity_right(Matrix& out, const Matrix& a, cplx scale) {
    const Eigen::Index d = a.rows();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const cplx v = a(i, j);
            if (v == cplx(0.0)) continue;
            for (Eigen::Index k = 0; k < d; ++k) out(i * d + k, j * d + k) += scale * v;
        }
    }
}

// s += rate (conj(L)⊗L − ½ I⊗L†L − ½ (L†L)ᵀ⊗I)
void add_dissipator(Matrix& s, const Matrix& l, double rate) {
    const Eigen::Index d = l.rows();
    const Matrix ldl = l.adjoint() * l;
    add_kron(s, l.conjugate(), l, rate);
    add_kron(s, Matrix::Identity(d, d), ldl, -0.5 * rate);
    add_kron_identity_right(s, ldl.transpose(), -0.5 * rate);
}

Matrix commutator_super(const Matrix& h) {
    const Eigen::Index d = h.rows();
    Matrix l = Matrix::Zero(d * d, d * d);
    add_kron(l, Matrix::Identity(d, d), h, -I_UNIT);
    add_kron_identity_right(l, h.transpose(), I_UNIT);
    return l;
}

void check_grid(const std::vector<double>& t) {
    if (t.empty()) throw std::invalid_argument("evolve: empty time grid");
    if (t.front() < 0.0) throw std::invalid_argument("evolve: time grid must start at t >= 0");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("evolve: time grid must be strictly increasing");
    }
}

void record(Trajectory& traj, double t, Matrix rho, const HilbertDims& dims, const EvolveOptions& opt) {
    const double trace_drift = std::abs(rho.trace() - cplx(1.0));
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    traj.max_trace_drift = std::max(traj.max_trace_drift, trace_drift);
    traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, herm);
    DensityMatrix state = DensityMatrix::unchecked(dims, std::move(rho));
    if (opt.check_positivity) {
        const double mn = check_density(state.matrix()).min_eigenvalue;
        traj.min_eigenvalue = traj.times.empty() ? mn : std::min(traj.min_eigenvalue, mn);
    }
    for (const auto& [name, op] : opt.observables) traj.observables[name].push_back(expectation_real(op, state).value);
    traj.times.push_back(t);
    if (opt.keep_states) traj.states.push_back(std::move(state));
}

// Fixed-step RK4 on the sector reachable from v0.
void evolve_rk4(const Liouvillian& l, const Vector& v0, const std::vector<double>& grid, const EvolveOptions& opt,
                Trajectory& traj, double t_offset) {
    const auto sector = reachable_set(l.matrix(), support_of(v0));
    const auto n = static_cast<Eigen::Index>(sector.size());
    Matrix m(n, n);
    Vector v(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        v(j) = v0(sector[j]);
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = l.matrix()(sector[i], sector[j]);
    }
    // Fastest scale bounded by the row-sum norm of the generator; T/40 keeps RK4 within 1e-6 of the exact route.
    const double norm_inf = m.rowwise().lpNorm<1>().maxCoeff();
    double h = std::min(opt.max_step, 1e-3);
    if (norm_inf > 0.0) h = std::min(h, 2.0 * std::numbers::pi / norm_inf / 40.0);

    const int dim = l.hilbert_dim();
    Vector full = Vector::Zero(v0.size());
    double t = 0.0;
    for (double target : grid) {
        const double span = target - t;
        if (span > 0.0) {
            const auto steps = static_cast<long>(std::ceil(span / h));
            const double dt = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) {
                const Vector k1 = m * v;
                const Vector k2 = m * (v + 0.5 * dt * k1);
                const Vector k3 = m * (v + 0.5 * dt * k2);
                const Vector k4 = m * (v + dt * k3);
                v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t = target;
        }
        full.setZero();
        for (Eigen::Index j = 0; j < n; ++j) full(sector[j]) = v(j);
        record(traj, target + t_offset, unvectorize(full, dim), l.dims(), opt);
    }
}

void evolve_unitary(const Operator& h, const Matrix& rho0, const std::vector<double>& grid, const EvolveOptions& opt,
                    Trajectory& traj, double t_offset) {
    const UnitaryPropagator u(h);
    for (double t : grid) {
        const Matrix ut = u.at(t);
        record(traj, t + t_offset, ut * rho0 * ut.adjoint(), h.dims(), opt);
    }
}

void evolve_into(const Liouvillian& l, const Matrix& rho0, const std::vector<double>& grid, const EvolveOptions& opt,
                 Trajectory& traj, double t_offset) {
    if (l.closed_hamiltonian() && !opt.force_fixed_step) {
        evolve_unitary(*l.closed_hamiltonian(), rho0, grid, opt, traj, t_offset);
        return;
    }
    const Vector v0 = vectorize(rho0);
    if (!opt.force_fixed_step) {
        const SpectralPropagator sp(l, v0);
        if (sp.usable()) {
            for (double t : grid) record(traj, t + t_offset, unvectorize(sp.propagate(t), l.hilbert_dim()), l.dims(), opt);
            return;
        }
        traj.warnings.push_back("evolve: Liouvillian eigenbasis ill-conditioned (rcond " + std::to_string(sp.rcond()) +
                                "), fixed-step RK4 fallback engaged");
    }
    evolve_rk4(l, v0, grid, opt, traj, t_offset);
}

}  // namespace

// ---------------------------------------------------------------- Liouvillian

Liouvillian::Liouvillian(HilbertDims dims, Matrix data) : dims_(dims), data_(std::move(data)) {
    dims_.validate();
    const auto d = static_cast<Eigen::Index>(dims_.total_dim());
    if (data_.rows() != d * d || data_.cols() != d * d) {
        throw std::invalid_argument("Liouvillian: superoperator must be " + std::to_string(d * d) + " square");
    }
}

Liouvillian Liouvillian::zero(HilbertDims dims) {
    const auto d = dims.total_dim();
    Liouvillian l(dims, Matrix::Zero(d * d, d * d));
    l.h_ = Operator::zero(dims);
    return l;
}

Liouvillian Liouvillian::hamiltonian(const Operator& h) {
    Liouvillian l(h.dims(), commutator_super(h.matrix()));
    l.h_ = h;
    return l;
}

Matrix Liouvillian::apply(const Matrix& rho) const {
    return unvectorize(data_ * vectorize(rho), hilbert_dim());
}

Liouvillian Liouvillian::operator+(const Liouvillian& o) const {
    if (!(dims_ == o.dims_)) throw std::invalid_argument("Liouvillian +: dimension mismatch");
    Liouvillian out(dims_, data_ + o.data_);
    if (h_ && o.h_) out.h_ = *h_ + *o.h_;
    return out;
}

Vector vectorize(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvectorize(const Vector& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) throw std::invalid_argument("unvectorize: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Liouvillian dissipator(const Operator& jump, double rate) {
    if (rate < 0.0) throw std::invalid_argument("dissipator: negative rate " + std::to_string(rate));
    const HilbertDims dims = jump.dims();
    if (rate == 0.0) return Liouvillian::zero(dims);
    const Eigen::Index d = jump.matrix().rows();
    Matrix s = Matrix::Zero(d * d, d * d);
    add_dissipator(s, jump.matrix(), rate);
    return Liouvillian(dims, std::move(s));
}

Liouvillian build_liouvillian(const Operator& h, const std::vector<DecayChannel>& channels) {
    Matrix s = commutator_super(h.matrix());
    bool closed = true;
    for (const auto& c : channels) {
        if (!(c.jump.dims() == h.dims())) throw std::invalid_argument("build_liouvillian: channel dimension mismatch");
        if (c.rate < 0.0) throw std::invalid_argument("build_liouvillian: negative rate " + std::to_string(c.rate));
        if (c.rate == 0.0) continue;
        add_dissipator(s, c.jump.matrix(), c.rate);
        closed = false;
    }
    if (closed) return Liouvillian::hamiltonian(h);
    return Liouvillian(h.dims(), std::move(s));
}

std::vector<DecayChannel> standard_channels(const SystemParams& params) {
    const HilbertDims dims = params.dims();
    std::vector<DecayChannel> out;
    for (int s = 0; s < dims.n_cavities; ++s) {
        out.push_back({annihilation(dims, s), params.gamma});
        out.push_back({lowering(dims, s), params.kappa});
    }
    return out;
}

Liouvillian branch_decoupled_dissipator(const SystemParams& params) {
    const HilbertDims dims = params.dims();
    const LadderFamilies f = decompose_creation(params);
    Liouvillian l = Liouvillian::zero(dims);
    for (int s = 0; s < dims.n_cavities; ++s) {
        l = l + dissipator(embed_site(f.plus.adjoint(), s, dims), params.gamma);
        l = l + dissipator(embed_site(f.minus.adjoint(), s, dims), params.gamma);
    }
    return l;
}

std::vector<Eigen::Index> support_of(const Vector& v, double tol) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > tol) s.push_back(i);
    }
    return s;
}

std::vector<Eigen::Index> reachable_set(const Matrix& l, const std::vector<Eigen::Index>& seed) {
    const Eigen::Index n = l.cols();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack;
    for (auto i : seed) {
        if (i < 0 || i >= n) throw std::out_of_range("reachable_set: seed index out of range");
        if (!seen[i]) {
            seen[i] = 1;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const Eigen::Index j = stack.back();
        stack.pop_back();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!seen[i] && l(i, j) != cplx(0.0)) {
                seen[i] = 1;
                stack.push_back(i);
            }
        }
    }
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (seen[i]) out.push_back(i);
    }
    return out;
}

// ------------------------------------------------------ SpectralPropagator

SpectralPropagator::SpectralPropagator(const Liouvillian& l, const Vector& v0)
    : sector_(reachable_set(l.matrix(), support_of(v0))), full_size_(v0.size()) {
    if (v0.size() != l.matrix().rows()) throw std::invalid_argument("SpectralPropagator: vector size mismatch");
    const auto n = static_cast<Eigen::Index>(sector_.size());
    if (n == 0) {
        usable_ = true;
        rcond_ = 1.0;
        return;
    }
    Matrix m(n, n);
    Vector v(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        v(j) = v0(sector_[j]);
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = l.matrix()(sector_[i], sector_[j]);
    }
    Eigen::ComplexEigenSolver<Matrix> es(m, true);
    if (es.info() != Eigen::Success) return;
    lambda_ = es.eigenvalues();
    modes_ = es.eigenvectors();
    Eigen::PartialPivLU<Matrix> lu(modes_);
    rcond_ = lu.rcond();
    if (!(rcond_ >= 1e-12)) return;
    coeff_ = lu.solve(v);
    usable_ = true;
}

Vector SpectralPropagator::propagate(double t) const {
    Vector full = Vector::Zero(full_size_);
    if (sector_.empty()) return full;
    const Vector w = (coeff_.array() * (lambda_.array() * t).exp()).matrix();
    const Vector v = modes_ * w;
    for (std::size_t j = 0; j < sector_.size(); ++j) full(sector_[j]) = v(static_cast<Eigen::Index>(j));
    return full;
}

// ------------------------------------------------------------- propagation

Trajectory evolve(const Liouvillian& l, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                  const EvolveOptions& options) {
    check_grid(t_grid);
    if (!(rho0.dims() == l.dims())) throw std::invalid_argument("evolve: initial state dimension mismatch");
    const DensityCheck c = rho0.check();
    if (!c.valid()) throw std::invalid_argument("evolve: invalid initial state");
    Trajectory traj;
    evolve_into(l, rho0.matrix(), t_grid, options, traj, 0.0);
    traj.segment_boundaries.push_back(0);
    return traj;
}

DensityMatrix steady_state(const Liouvillian& l) {
    const int d = l.hilbert_dim();
    // The stationary state is the long-time limit of the evolution of I/d, so it lies in the sector reachable from vec(I).
    std::vector<Eigen::Index> seed;
    for (int i = 0; i < d; ++i) seed.push_back(static_cast<Eigen::Index>(i) * d + i);
    const auto sector = reachable_set(l.matrix(), seed);
    const auto n = static_cast<Eigen::Index>(sector.size());
    Matrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = l.matrix()(sector[i], sector[j]);
    }
    Eigen::ComplexEigenSolver<Matrix> es(m, true);
    if (es.info() != Eigen::Success) throw std::runtime_error("steady_state: eigen-decomposition failed");
    std::vector<Eigen::Index> zeros;
    Eigen::Index best = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (std::abs(es.eigenvalues()(k)) < 1e-8) zeros.push_back(k);
        if (std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(best))) best = k;
    }
    if (zeros.empty()) {
        throw std::runtime_error("steady_state: no zero mode within 1e-8 (smallest |lambda| = " +
                                 std::to_string(std::abs(es.eigenvalues()(best))) + ")");
    }
    if (zeros.size() > 1) {
        std::string list;
        for (auto k : zeros) list += " " + std::to_string(std::abs(es.eigenvalues()(k)));
        throw std::runtime_error("steady_state: degenerate zero eigenspace of dimension " +
                                 std::to_string(zeros.size()) + " (|lambda|:" + list + ")");
    }
    Vector full = Vector::Zero(static_cast<Eigen::Index>(d) * d);
    const Vector mode = es.eigenvectors().col(zeros.front());
    for (Eigen::Index j = 0; j < n; ++j) full(sector[j]) = mode(j);
    Matrix rho = unvectorize(full, d);
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-14) throw std::runtime_error("steady_state: zero mode is traceless");
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint());
    return DensityMatrix::unchecked(l.dims(), std::move(rho));
}

Trajectory evolve_piecewise(const std::vector<Segment>& segments, const DensityMatrix& rho0,
                            const EvolveOptions& options) {
    if (segments.empty()) throw std::invalid_argument("evolve_piecewise: no segments");
    if (!rho0.check().valid()) throw std::invalid_argument("evolve_piecewise: invalid initial state");
    Trajectory traj;
    Matrix current = rho0.matrix();
    double t0 = 0.0;
    EvolveOptions opt = options;
    opt.keep_states = true;  // the segment end state seeds the next segment
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const Segment& seg = segments[k];
        if (!(seg.duration > 0.0)) throw std::invalid_argument("evolve_piecewise: durations must be > 0");
        if (seg.samples < 2) throw std::invalid_argument("evolve_piecewise: need at least 2 samples per segment");
        std::vector<double> grid;
        // Later segments skip t = 0: that sample is the previous segment's last one.
        for (int i = (k == 0 ? 0 : 1); i < seg.samples; ++i) grid.push_back(seg.duration * i / (seg.samples - 1));
        traj.segment_boundaries.push_back(k == 0 ? 0 : traj.times.size() - 1);
        std::visit(
            [&](auto ref) {
                const auto& gen = ref.get();
                if (!(gen.dims() == rho0.dims())) throw std::invalid_argument("evolve_piecewise: dimension mismatch across segments");
                using G = std::decay_t<decltype(gen)>;
                if constexpr (std::is_same_v<G, Operator>) {
                    evolve_unitary(gen, current, grid, opt, traj, t0);
                } else {
                    evolve_into(gen, current, grid, opt, traj, t0);
                }
            },
            seg.generator);
        current = traj.states.back().matrix();
        t0 += seg.duration;
    }
    if (!options.keep_states) traj.states.clear();
    return traj;
}

UnitaryPropagator::UnitaryPropagator(const Operator& h) {
    if (!h.is_hermitian(1e-10 * std::max(1.0, h.norm()))) throw std::invalid_argument("UnitaryPropagator: H not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h.matrix() + h.matrix().adjoint()));
    if (es.info() != Eigen::Success) throw std::runtime_error("UnitaryPropagator: eigen-decomposition failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

Matrix UnitaryPropagator::at(double t) const {
    const Vector phase = (energies_.cast<cplx>() * (-I_UNIT * t)).array().exp();
    return vectors_ * phase.asDiagonal() * vectors_.adjoint();
}

Vector UnitaryPropagator::apply(const Vector& psi, double t) const {
    const Vector phase = (energies_.cast<cplx>() * (-I_UNIT * t)).array().exp();
    return vectors_ * (phase.cwiseProduct(vectors_.adjoint() * psi));
}

}  // namespace jch
