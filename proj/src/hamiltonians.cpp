#include "jch/hamiltonians.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace jch {

namespace {

Operator site_jc(const HilbertDims& dims, double wa, double wc, double g) {
    const Operator a = fock_annihilation(dims), sm = atomic_lowering(dims);
    const Operator ad = a.adjoint(), sp = sm.adjoint();
    return cplx(wa) * (sp * sm) + cplx(wc) * (ad * a) + cplx(g) * (ad * sm + sp * a);
}

Operator sum_over_sites(const Operator& site_op, const HilbertDims& dims) {
    Operator h = Operator::zero(dims);
    for (int s = 0; s < dims.n_cavities; ++s) h = h + embed_site(site_op, s, dims);
    return h;
}

void require_zero_delta_1(const SystemParams& p, const char* who) {
    if (!p.delta_1_vanishes()) {
        throw std::invalid_argument(std::string(who) + ": requires delta_1 = omega_p - omega_l = 0, got " +
                                    std::to_string(p.delta_1()));
    }
}

}  // namespace

Operator build_h_jc(const SystemParams& params) {
    params.validate();
    const HilbertDims dims = params.dims();
    return sum_over_sites(site_jc(dims, params.omega_a, params.omega_c, params.g), dims);
}

Operator build_h_hop(const SystemParams& params) {
    params.validate();
    const HilbertDims dims = params.dims();
    if (dims.n_cavities != 2) throw std::invalid_argument("build_h_hop: requires two cavities");
    const Operator a0 = annihilation(dims, 0), a1 = annihilation(dims, 1);
    return cplx(params.J) * (a0.adjoint() * a1 + a1.adjoint() * a0);
}

Operator build_h_jch(const SystemParams& params) {
    Operator h = build_h_jc(params);
    if (params.n_cavities == 2) h = h + build_h_hop(params);
    return h;
}

Operator build_h_jc_polariton(const SystemParams& params) {
    params.validate();
    const HilbertDims dims = params.dims();
    const int d = dims.site_dim();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    for (int n = 1; n <= params.n_fock; ++n) {
        e(2 * n - 1) = polariton_energy(PolaritonLabel::lower(n), params);
        e(2 * n) = polariton_energy(PolaritonLabel::upper(n), params);
    }
    e(d - 1) = params.n_fock * params.omega_c + params.omega_a;
    Eigen::VectorXd full = e;
    if (dims.n_cavities == 2) {
        full.resize(d * d);
        for (int i = 0; i < d; ++i) full.segment(i * d, d) = e.array() + e(i);
    }
    return Operator(dims, full.cast<cplx>().asDiagonal());
}

Operator build_h_hop_polariton(const SystemParams& params, bool branch_conserving_only) {
    params.validate();
    const HilbertDims dims = params.dims();
    if (dims.n_cavities != 2) throw std::invalid_argument("build_h_hop_polariton: requires two cavities");
    const LadderFamilies f = decompose_creation(params);
    Matrix h = Matrix::Zero(dims.total_dim(), dims.total_dim());
    auto hop = [&](const Operator& create_on_0, const Operator& create_on_1) {
        // P_0† P_1 with P_1 = (P_1†)†, plus Hermitian conjugate.
        const Matrix term = kron(create_on_0.matrix(), create_on_1.matrix().adjoint());
        h += params.J * (term + term.adjoint());
    };
    if (branch_conserving_only) {
        hop(f.plus, f.plus);
        hop(f.minus, f.minus);
    } else {
        const Operator total = f.total();
        hop(total, total);
    }
    return Operator(dims, std::move(h));
}

Operator build_h_driven(const SystemParams& params) {
    params.validate();
    require_zero_delta_1(params, "build_h_driven");
    const HilbertDims dims = params.dims();
    const Operator a = fock_annihilation(dims), sm = atomic_lowering(dims);
    const Operator drive = I_UNIT * params.Omega * (sm.adjoint() - sm) + I_UNIT * params.alpha * (a.adjoint() - a);
    Operator h = sum_over_sites(site_jc(dims, params.delta_a(), params.delta_c(), params.g) + drive, dims);
    if (dims.n_cavities == 2) h = h + build_h_hop(params);
    return h;
}

DrivenPolaritonCoefficients drive_coefficients(const SystemParams& params, const CoefficientHook& hook) {
    params.validate();
    const auto table = coefficient_table(params, hook);
    DrivenPolaritonCoefficients d;
    const std::size_t size = table.size();
    d.beta_plus.assign(size, 0.0);
    d.beta_minus.assign(size, 0.0);
    d.xi_pm.assign(size, 0.0);
    d.xi_mp.assign(size, 0.0);
    for (std::size_t n = 1; n < size; ++n) {
        const PolaritonCoefficients& c = table[n];
        d.beta_plus[n] = I_UNIT * (params.Omega * c.ca_plus + params.alpha * c.c_plus);
        d.beta_minus[n] = I_UNIT * (params.Omega * c.ca_minus + params.alpha * c.c_minus);
        d.xi_pm[n] = I_UNIT * (params.Omega * c.ka_pm + params.alpha * c.k_pm);
        d.xi_mp[n] = I_UNIT * (params.Omega * c.ka_mp + params.alpha * c.k_mp);
    }
    return d;
}

double rotating_energy(const PolaritonLabel& label, const SystemParams& params) {
    if (label.is_ground()) return 0.0;
    const double half_r = 0.5 * polariton_splitting(label.n, params);
    return params.delta_c() * label.n + 0.5 * params.delta() + (label.branch == Branch::plus ? half_r : -half_r);
}

Operator build_h_driven_polariton(const SystemParams& params) {
    params.validate();
    require_zero_delta_1(params, "build_h_driven_polariton");
    if (params.n_cavities != 1) throw std::invalid_argument("build_h_driven_polariton: single cavity only");
    const HilbertDims dims = params.dims();
    const int d = dims.site_dim();
    const DrivenPolaritonCoefficients dc = drive_coefficients(params);
    Matrix h = Matrix::Zero(d, d);
    for (int n = 1; n <= params.n_fock; ++n) {
        h(2 * n - 1, 2 * n - 1) = rotating_energy(PolaritonLabel::lower(n), params);
        h(2 * n, 2 * n) = rotating_energy(PolaritonLabel::upper(n), params);
    }
    h(d - 1, d - 1) = params.n_fock * params.delta_c() + params.delta_a();

    auto couple = [&h](int upper, int lower, cplx v) {
        h(upper, lower) += v;
        h(lower, upper) += std::conj(v);
    };
    const int up1 = polariton_index(PolaritonLabel::upper(1)), lo1 = polariton_index(PolaritonLabel::lower(1));
    couple(up1, 0, dc.beta_plus[1]);
    couple(lo1, 0, dc.beta_minus[1]);
    for (int n = 2; n <= params.n_fock; ++n) {
        const int up = polariton_index(PolaritonLabel::upper(n)), lo = polariton_index(PolaritonLabel::lower(n));
        const int up_prev = polariton_index(PolaritonLabel::upper(n - 1));
        const int lo_prev = polariton_index(PolaritonLabel::lower(n - 1));
        couple(up, up_prev, dc.beta_plus[n]);
        couple(lo, lo_prev, dc.beta_minus[n]);
        couple(up, lo_prev, dc.xi_pm[n]);
        couple(lo, up_prev, dc.xi_mp[n]);
    }
    return Operator(dims, std::move(h));
}

RabiEstimate rabi_frequency(const SystemParams& params) {
    const double dc = params.delta_c();
    if (dc == 0.0) throw std::domain_error("rabi_frequency: delta_c = 0, the large-detuning formula does not apply");
    const double shift = params.Omega * params.Omega / dc;
    RabiEstimate r;
    r.omega_r = 2.0 * std::sqrt(params.g * params.g + shift * shift);
    r.period = 2.0 * std::numbers::pi / r.omega_r;
    return r;
}

Eigen::Matrix2cd stroboscopic_block(double g, int m, int n) {
    if (n < 1) throw std::invalid_argument("stroboscopic_block: manifold must be >= 1");
    // S_y = (S₊ − S₋)/2i with S₊|n,g> = √n|n−1,e>; in this basis S_y = −(√n/2)σ_y.
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const double v = g * std::sqrt(static_cast<double>(n)) * sign;
    Eigen::Matrix2cd b;
    b << 0.0, cplx(0.0, v), cplx(0.0, -v), 0.0;
    return b;
}

Operator build_stroboscopic_vi(const SystemParams& params, int m, int n_manifold) {
    params.validate();
    const HilbertDims s = params.dims().site();
    if (n_manifold < 1 || n_manifold > s.n_fock) {
        throw std::invalid_argument("build_stroboscopic_vi: manifold " + std::to_string(n_manifold) + " outside 1.." +
                                    std::to_string(s.n_fock));
    }
    const Eigen::Matrix2cd b = stroboscopic_block(params.g, m, n_manifold);
    const int idx[2] = {site_index(n_manifold, false), site_index(n_manifold - 1, true)};
    Matrix v = Matrix::Zero(s.site_dim(), s.site_dim());
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) v(idx[i], idx[j]) = b(i, j);
    }
    return Operator(s, std::move(v));
}

Operator build_stroboscopic_vi_full(const SystemParams& params, int m) {
    params.validate();
    const HilbertDims dims = params.dims();
    Operator site = Operator::zero(dims.site());
    for (int n = 1; n <= dims.n_fock; ++n) site = site + build_stroboscopic_vi(params, m, n);
    return sum_over_sites(site, dims);
}

}  // namespace jch
