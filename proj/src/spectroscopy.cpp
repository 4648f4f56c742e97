#include "jch/spectroscopy.hpp"

#include "jch/hamiltonians.hpp"
#include "jch/polariton_basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jch {

namespace {

constexpr double zero_mode_tol = 1e-8;

void require_stationary(const Liouvillian& l, const DensityMatrix& rho_ss) {
    if (l.closed_hamiltonian()) {
        throw std::invalid_argument("correlation_function: Liouvillian has no dissipation, G(tau) does not decay");
    }
    const double res = l.apply(rho_ss.matrix()).norm();
    if (res >= 1e-6) {
        throw std::invalid_argument("correlation_function: rho_ss is not stationary (||L[rho_ss]|| = " +
                                    std::to_string(res) + ")");
    }
}

}  // namespace

RegressionModes regression_modes(const Liouvillian& l, const DensityMatrix& rho_ss, const Operator& a_op) {
    require_stationary(l, rho_ss);
    if (!(a_op.dims() == l.dims())) throw std::invalid_argument("regression_modes: operator dimension mismatch");
    const Matrix f0 = a_op.matrix().adjoint() * rho_ss.matrix();
    const SpectralPropagator sp(l, vectorize(f0));
    if (!sp.usable()) {
        throw std::runtime_error("regression_modes: Liouvillian eigenbasis ill-conditioned (rcond " +
                                 std::to_string(sp.rcond()) + ")");
    }
    const int d = l.hilbert_dim();
    const auto& sector = sp.sector();
    // Tr[a R] = Σ a(col, row) R(row, col) over the sector's vec indices (col-major: s = col*d + row).
    Vector a_weights(static_cast<Eigen::Index>(sector.size()));
    for (std::size_t s = 0; s < sector.size(); ++s) {
        const Eigen::Index row = sector[s] % d, col = sector[s] / d;
        a_weights(static_cast<Eigen::Index>(s)) = a_op.matrix()(col, row);
    }
    RegressionModes out;
    for (Eigen::Index k = 0; k < sp.eigenvalues().size(); ++k) {
        const cplx w = sp.amplitudes()(k) * (a_weights.transpose() * sp.modes().col(k))(0, 0);
        const cplx lam = sp.eigenvalues()(k);
        if (std::abs(lam) < zero_mode_tol) {
            out.limit += w;
            continue;
        }
        out.lambda.push_back(lam);
        out.weight.push_back(w);
    }
    return out;
}

std::vector<cplx> correlation_function(const Liouvillian& l, const DensityMatrix& rho_ss, const Operator& a_op,
                                       const std::vector<double>& t_grid) {
    const RegressionModes m = regression_modes(l, rho_ss, a_op);
    std::vector<cplx> g;
    g.reserve(t_grid.size());
    for (double t : t_grid) {
        cplx acc{0.0};
        for (std::size_t k = 0; k < m.lambda.size(); ++k) acc += m.weight[k] * std::exp(m.lambda[k] * t);
        g.push_back(acc);
    }
    return g;
}

Spectrum absorption_spectrum_numeric(const Liouvillian& l, const DensityMatrix& rho_ss, const Operator& a_op,
                                     const std::vector<double>& freq_grid, const SystemParams& params) {
    const RegressionModes m = regression_modes(l, rho_ss, a_op);
    double scale = 0.0;
    for (const auto& w : m.weight) scale = std::max(scale, std::abs(w));
    for (std::size_t k = 0; k < m.lambda.size(); ++k) {
        if (m.lambda[k].real() >= 0.0 && std::abs(m.weight[k]) > 1e-12 * std::max(scale, 1e-300)) {
            throw std::runtime_error("absorption_spectrum_numeric: contributing mode with Re(lambda) = " +
                                     std::to_string(m.lambda[k].real()) + " >= 0, integral diverges");
        }
    }
    Spectrum s;
    s.params = params;
    s.frequencies = freq_grid;
    s.values.reserve(freq_grid.size());
    for (double w : freq_grid) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m.lambda.size(); ++k) acc += 2.0 * (m.weight[k] / (-m.lambda[k] - I_UNIT * w)).real();
        s.values.push_back(acc);
    }
    return s;
}

Spectrum absorption_spectrum_analytic(const SystemParams& params, const std::vector<double>& freq_grid) {
    params.validate();
    if (params.n_cavities != 1) throw std::invalid_argument("absorption_spectrum_analytic: single cavity only");
    const double theta = mixing_angle(1, params.g, params.delta()).theta;
    const double s2 = std::sin(theta) * std::sin(theta), c2 = std::cos(theta) * std::cos(theta);
    const double gp = 0.5 * (s2 * params.gamma + c2 * params.kappa);
    const double gm = 0.5 * (c2 * params.gamma + s2 * params.kappa);
    const double ep = polariton_energy(PolaritonLabel::upper(1), params);
    const double em = polariton_energy(PolaritonLabel::lower(1), params);
    Spectrum s;
    s.params = params;
    s.frequencies = freq_grid;
    for (double w : freq_grid) {
        s.values.push_back(2.0 * s2 * gp / ((w - ep) * (w - ep) + gp * gp) +
                           2.0 * c2 * gm / ((w - em) * (w - em) + gm * gm));
    }
    return s;
}

std::vector<double> default_frequency_grid(const SystemParams& params, int points) {
    if (points < 3) throw std::invalid_argument("default_frequency_grid: need at least 3 points");
    const double half = 4.0 * params.g + (params.n_cavities == 2 ? 2.0 * std::abs(params.J) : 0.0);
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) grid[i] = params.omega_c - half + 2.0 * half * i / (points - 1);
    return grid;
}

PeakReport find_peaks(const Spectrum& spectrum) {
    const auto& x = spectrum.frequencies;
    const auto& y = spectrum.values;
    if (x.size() < 3 || x.size() != y.size()) throw std::invalid_argument("find_peaks: need >= 3 matching grid points");
    const double ymax = *std::max_element(y.begin(), y.end());
    PeakReport rep;
    const std::size_t n = y.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1]) || y[i] < 0.01 * ymax) continue;
        Peak p;
        // Quadratic refinement through the three samples around the maximum.
        const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        const double off = denom != 0.0 ? std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5) : 0.0;
        const double step = 0.5 * (x[i + 1] - x[i - 1]);
        p.position = x[i] + off * step;
        p.height = y1 - 0.25 * (y0 - y2) * off;
        const double half = 0.5 * p.height;
        std::size_t lo = i, hi = i;
        while (lo > 0 && y[lo] > half) --lo;
        while (hi + 1 < n && y[hi] > half) ++hi;
        auto cross = [&](std::size_t a, std::size_t b) {
            if (y[a] == y[b]) return x[a];
            return x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
        };
        const double left = y[lo] <= half ? cross(lo, lo + 1) : x[lo];
        const double right = y[hi] <= half ? cross(hi - 1, hi) : x[hi];
        p.fwhm = right - left;
        rep.peaks.push_back(p);
    }
    if (rep.peaks.empty()) throw std::runtime_error("find_peaks: no peaks above 1% of the maximum");
    if (rep.peaks.size() >= 2) {
        std::vector<Peak> sorted = rep.peaks;
        std::sort(sorted.begin(), sorted.end(), [](const Peak& p, const Peak& q) { return p.height > q.height; });
        Peak a = sorted[0], b = sorted[1];
        if (b.position < a.position) std::swap(a, b);
        rep.a = a;
        rep.b = b;
        rep.asymmetry = std::abs(a.height - b.height) / (a.height + b.height);
    }
    return rep;
}

Spectrum system_absorption_spectrum(const SystemParams& params, const std::vector<double>& freq_grid) {
    params.validate();
    const Liouvillian l = build_liouvillian(build_h_jch(params), standard_channels(params));
    const DensityMatrix rho_ss = steady_state(l);
    return absorption_spectrum_numeric(l, rho_ss, annihilation(params.dims(), 0), freq_grid, params);
}

}  // namespace jch
