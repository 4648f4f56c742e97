#include "jch/polariton_basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jch {

std::string PolaritonLabel::name() const {
    if (is_ground()) return "0g";
    return std::to_string(n) + (branch == Branch::plus ? "+" : "-");
}

PolaritonLabel parse_label(const std::string& text) {
    if (text == "0g" || text == "G" || text == "g" || text == "0") return PolaritonLabel::ground();
    if (text.size() < 2) throw std::invalid_argument("parse_label: cannot parse '" + text + "'");
    const char sign = text.back();
    if (sign != '+' && sign != '-') throw std::invalid_argument("parse_label: missing branch sign in '" + text + "'");
    int n = 0;
    try {
        std::size_t used = 0;
        n = std::stoi(text.substr(0, text.size() - 1), &used);
        if (used != text.size() - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_label: bad manifold in '" + text + "'");
    }
    if (n < 1) throw std::invalid_argument("parse_label: manifold must be >= 1 in '" + text + "'");
    return {n, sign == '+' ? Branch::plus : Branch::minus};
}

MixingAngle mixing_angle(int n, double g, double delta) {
    if (n < 1) throw std::invalid_argument("mixing_angle: n must be >= 1, got " + std::to_string(n));
    if (!(g > 0.0)) throw std::invalid_argument("mixing_angle: g must be > 0");
    return {n, 0.5 * std::atan2(g * std::sqrt(static_cast<double>(n)), 0.5 * delta)};
}

Ket polariton_ket(const PolaritonLabel& label, double theta_n, const HilbertDims& dims) {
    const HilbertDims s = dims.site();
    s.validate();
    if (label.n < 0 || label.n > s.n_fock) {
        throw std::invalid_argument("polariton_ket: manifold " + std::to_string(label.n) + " above cutoff N_f = " +
                                    std::to_string(s.n_fock));
    }
    if (label.is_ground()) return Ket::basis(s, site_index(0, false));
    Vector v = Vector::Zero(s.site_dim());
    const double c = std::cos(theta_n), sn = std::sin(theta_n);
    if (label.branch == Branch::minus) {
        v(site_index(label.n, false)) = c;
        v(site_index(label.n - 1, true)) = -sn;
    } else {
        v(site_index(label.n, false)) = sn;
        v(site_index(label.n - 1, true)) = c;
    }
    return Ket(s, std::move(v));
}

Ket polariton_ket(const PolaritonLabel& label, const SystemParams& params) {
    const double theta = label.is_ground() ? 0.0 : mixing_angle(label.n, params.g, params.delta()).theta;
    return polariton_ket(label, theta, params.dims());
}

Ket two_site_polariton(const PolaritonLabel& l0, const PolaritonLabel& l1, const SystemParams& params) {
    return tensor(polariton_ket(l0, params), polariton_ket(l1, params));
}

double polariton_splitting(int n, const SystemParams& params) {
    if (n <= 0) return 0.0;
    const double d = params.delta();
    return std::sqrt(d * d + 4.0 * params.g * params.g * n);
}

double polariton_energy(const PolaritonLabel& label, const SystemParams& params) {
    if (label.is_ground()) return 0.0;
    const double half_r = 0.5 * polariton_splitting(label.n, params);
    return params.omega_c * label.n + 0.5 * params.delta() + (label.branch == Branch::plus ? half_r : -half_r);
}

PolaritonCoefficients coefficients(int n, double theta_n, double theta_prev) {
    if (n < 1) throw std::invalid_argument("coefficients: n must be >= 1");
    PolaritonCoefficients c;
    const double s = std::sin(theta_n), co = std::cos(theta_n);
    if (n == 1) {
        c.c_plus = s;
        c.c_minus = co;
        c.ca_plus = co;
        c.ca_minus = -s;
        return c;
    }
    const double sp = std::sin(theta_prev), cp = std::cos(theta_prev);
    const double rn = std::sqrt(static_cast<double>(n)), rm = std::sqrt(static_cast<double>(n - 1));
    c.c_plus = rn * s * sp + rm * co * cp;
    c.c_minus = rn * co * cp + rm * s * sp;
    c.k_pm = rn * s * cp - rm * co * sp;
    c.k_mp = rn * co * sp - rm * s * cp;
    c.ca_plus = co * sp;
    c.ca_minus = -s * cp;
    c.ka_pm = co * cp;
    c.ka_mp = -s * sp;
    return c;
}

std::vector<PolaritonCoefficients> coefficient_table(const SystemParams& params, const CoefficientHook& hook) {
    std::vector<PolaritonCoefficients> table(static_cast<std::size_t>(params.n_fock) + 1);
    double prev = 0.0;
    for (int n = 1; n <= params.n_fock; ++n) {
        const double theta = mixing_angle(n, params.g, params.delta()).theta;
        table[n] = coefficients(n, theta, prev);
        if (hook) hook(n, table[n]);
        prev = theta;
    }
    return table;
}

int polariton_index(const PolaritonLabel& label) {
    if (label.is_ground()) return 0;
    return label.branch == Branch::minus ? 2 * label.n - 1 : 2 * label.n;
}

Matrix polariton_transform(const SystemParams& params) {
    const HilbertDims s = params.dims().site();
    s.validate();
    const int d = s.site_dim();
    Matrix w = Matrix::Zero(d, d);
    w(site_index(0, false), 0) = 1.0;
    for (int n = 1; n <= s.n_fock; ++n) {
        const double theta = mixing_angle(n, params.g, params.delta()).theta;
        w.col(2 * n - 1) = polariton_ket(PolaritonLabel::lower(n), theta, s).amplitudes();
        w.col(2 * n) = polariton_ket(PolaritonLabel::upper(n), theta, s).amplitudes();
    }
    w(site_index(s.n_fock, true), d - 1) = 1.0;
    return w;
}

Matrix polariton_transform_full(const SystemParams& params) {
    const Matrix w = polariton_transform(params);
    Matrix full = Matrix::Identity(1, 1);
    for (int s = 0; s < params.n_cavities; ++s) full = kron(full, w);
    return full;
}

namespace {

// Builds Σ_n coef(n) |n b_to><(n-1) b_from| on one site, the bra at n = 1 being |0g>.
LadderFamilies assemble(const SystemParams& params, const std::vector<PolaritonCoefficients>& table, bool atomic) {
    const HilbertDims s = params.dims().site();
    const Matrix w = polariton_transform(params);
    const int d = s.site_dim();
    Matrix plus = Matrix::Zero(d, d), minus = Matrix::Zero(d, d), pm = Matrix::Zero(d, d), mp = Matrix::Zero(d, d);
    auto col = [&](int n, Branch b) -> Vector { return w.col(polariton_index({n, b})); };
    for (int n = 1; n <= s.n_fock; ++n) {
        const PolaritonCoefficients& c = table[n];
        const Vector up = col(n, Branch::plus), lo = col(n, Branch::minus);
        if (n == 1) {
            const Vector g0 = w.col(0);
            plus += (atomic ? c.ca_plus : c.c_plus) * up * g0.adjoint();
            minus += (atomic ? c.ca_minus : c.c_minus) * lo * g0.adjoint();
            continue;
        }
        const Vector up_prev = col(n - 1, Branch::plus), lo_prev = col(n - 1, Branch::minus);
        plus += (atomic ? c.ca_plus : c.c_plus) * up * up_prev.adjoint();
        minus += (atomic ? c.ca_minus : c.c_minus) * lo * lo_prev.adjoint();
        pm += (atomic ? c.ka_pm : c.k_pm) * up * lo_prev.adjoint();
        mp += (atomic ? c.ka_mp : c.k_mp) * lo * up_prev.adjoint();
    }
    return {Operator(s, std::move(plus)), Operator(s, std::move(minus)), Operator(s, std::move(pm)),
            Operator(s, std::move(mp))};
}

}  // namespace

LadderFamilies decompose_creation(const SystemParams& params, const CoefficientHook& hook) {
    params.validate();
    return assemble(params, coefficient_table(params, hook), false);
}

LadderFamilies decompose_atomic_raising(const SystemParams& params, const CoefficientHook& hook) {
    params.validate();
    return assemble(params, coefficient_table(params, hook), true);
}

Matrix excitation_projector(const HilbertDims& site_dims, int max_excitation) {
    const int d = site_dims.site_dim();
    Matrix p = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (site_excitation(i) <= max_excitation) p(i, i) = 1.0;
    }
    return p;
}

PhaseReport interaction_picture_phase(HoppingFamily family, int n, int n_prime, const SystemParams& params) {
    if (n < 1 || n_prime < 1) throw std::invalid_argument("interaction_picture_phase: manifolds must be >= 1");
    auto r = [&](int m) { return polariton_splitting(m, params); };
    // Creation factor on site j carries R_n - R_{n-1} for the + branch; the partner on j+1
    // contributes the branch-dependent exponent of its lowering projector.
    const double step = r(n) - r(n - 1), step_p = r(n_prime) - r(n_prime - 1);
    const double cross_p = r(n_prime) + r(n_prime - 1);
    PhaseReport rep;
    switch (family) {
        case HoppingFamily::plus_plus: rep.frequency = step - step_p; break;
        case HoppingFamily::minus_minus: rep.frequency = -step + step_p; break;
        case HoppingFamily::plus_minus: rep.frequency = step + step_p; break;
        case HoppingFamily::plus_pm:
            rep.frequency = step + cross_p;
            rep.vanishes = n_prime == 1;
            break;
        case HoppingFamily::plus_mp:
            rep.frequency = step - cross_p;
            rep.vanishes = n_prime == 1;
            break;
    }
    rep.eliminable = !rep.vanishes && std::abs(rep.frequency) > 1e-12 && std::abs(rep.frequency) >= 4.0 * params.J;
    return rep;
}

}  // namespace jch
