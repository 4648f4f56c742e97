#include "jch/protocols.hpp"

#include "jch/spectroscopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace jch {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// ------------------------------------------------------------ state helpers

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        out.push_back(item);
    }
    return out;
}

enum class SiteKind { ground, minus, plus, edge };

SiteKind site_kind(int polariton_idx, int site_dim) {
    if (polariton_idx == 0) return SiteKind::ground;
    if (polariton_idx == site_dim - 1) return SiteKind::edge;
    return polariton_idx % 2 == 1 ? SiteKind::minus : SiteKind::plus;
}

// Reduced density matrix of site 0 from a two-site ket.
Matrix reduced_site0(const Vector& psi, int d) {
    const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(psi.data(), d, d);
    return m * m.adjoint();
}

double coherence_site(const Matrix& rho_site, const Matrix& w) {
    const Matrix rp = w.adjoint() * rho_site * w;
    const int lo = polariton_index(PolaritonLabel::lower(1)), up = polariton_index(PolaritonLabel::upper(1));
    return std::abs(rp(up, lo)) + std::abs(rp(lo, up));
}

std::vector<double> uniform_grid(double t_max, int samples) {
    std::vector<double> t(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) t[i] = t_max * i / (samples - 1);
    return t;
}

}  // namespace

Ket named_state(const std::string& name, const SystemParams& params) {
    const auto parts = split(name, ',');
    if (parts.size() == 1) {
        if (params.n_cavities != 1) throw std::invalid_argument("named_state: '" + name + "' names one site, system has two");
        return polariton_ket(parse_label(parts[0]), params);
    }
    if (parts.size() == 2) {
        if (params.n_cavities != 2) throw std::invalid_argument("named_state: '" + name + "' needs two cavities");
        return two_site_polariton(parse_label(parts[0]), parse_label(parts[1]), params);
    }
    throw std::invalid_argument("named_state: unknown state name '" + name + "'");
}

double upper_branch_population(const Vector& psi, const SystemParams& params) {
    const Vector c = polariton_transform_full(params).adjoint() * psi;
    const int d = params.dims().site_dim();
    double p = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        bool any_plus = false;
        Eigen::Index rest = k;
        for (int s = params.n_cavities - 1; s >= 0; --s) {
            if (site_kind(static_cast<int>(rest % d), d) == SiteKind::plus) any_plus = true;
            rest /= d;
        }
        if (any_plus) p += std::norm(c(k));
    }
    return p;
}

ProbeResult hopping_interchange_probe(const SystemParams& params, const std::string& initial, const std::string& target,
                                      double window_j, double dt) {
    params.validate();
    if (params.n_cavities != 2) throw std::invalid_argument("hopping_interchange_probe: requires two cavities");
    if (params.gamma != 0.0 || params.kappa != 0.0) throw std::invalid_argument("hopping_interchange_probe: closed system only");
    if (!(params.J > 0.0)) throw std::invalid_argument("hopping_interchange_probe: J must be > 0");
    const Vector psi0 = named_state(initial, params).amplitudes();
    const Vector tgt = named_state(target, params).amplitudes();
    const UnitaryPropagator u(build_h_jch(params));
    // Work in the energy basis: amplitudes and target overlaps are fixed, only phases move.
    ProbeResult r;
    r.window = window_j / params.J;
    const auto steps = static_cast<long>(std::ceil(r.window / dt));
    for (long i = 0; i <= steps; ++i) {
        const double t = r.window * static_cast<double>(i) / static_cast<double>(steps);
        const double p = std::norm(tgt.dot(u.apply(psi0, t)));
        if (p > r.max_probability) {
            r.max_probability = p;
            r.t_at_max = t;
        }
    }
    return r;
}

double coherence(const DensityMatrix& rho, const SystemParams& params) {
    const Matrix w = polariton_transform(params);
    if (rho.dims().n_cavities == 2) return coherence_site(partial_trace(rho.matrix(), rho.dims(), 0), w);
    return coherence_site(rho.matrix(), w);
}

double number_variance(const Vector& psi, const HilbertDims& dims) {
    const int d = dims.site_dim();
    double total = 0.0;
    for (int s = 0; s < dims.n_cavities; ++s) {
        double m1 = 0.0, m2 = 0.0;
        for (Eigen::Index k = 0; k < psi.size(); ++k) {
            const int idx = static_cast<int>(dims.n_cavities == 1 ? k : (s == 0 ? k / d : k % d));
            const double n = site_excitation(idx), p = std::norm(psi(k));
            m1 += p * n;
            m2 += p * n * n;
        }
        total += m2 - m1 * m1;
    }
    return total;
}

double number_variance(const DensityMatrix& rho) {
    const Vector diag = rho.matrix().diagonal().cwiseAbs().cwiseSqrt().cast<cplx>();
    return number_variance(diag, rho.dims());
}

double order_parameter(const std::vector<double>& times, const std::vector<double>& variance, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("order_parameter: tau must be > 0");
    if (times.size() != variance.size()) throw std::invalid_argument("order_parameter: series length mismatch");
    if (times.size() < 200) throw std::invalid_argument("order_parameter: need at least 200 samples");
    if (std::abs(times.front()) > 1e-12) throw std::invalid_argument("order_parameter: trajectory must start at t = 0");
    if (times.back() < tau * (1.0 - 1e-9)) {
        throw std::invalid_argument("order_parameter: trajectory ends at " + std::to_string(times.back()) +
                                    " before tau = " + std::to_string(tau));
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double t0 = times[i - 1];
        if (t0 >= tau) break;
        double t1 = times[i], v1 = variance[i];
        if (t1 > tau) {
            v1 = variance[i - 1] + (variance[i] - variance[i - 1]) * (tau - t0) / (t1 - t0);
            t1 = tau;
        }
        acc += 0.5 * (variance[i - 1] + v1) * (t1 - t0);
    }
    return acc / tau;
}

double order_parameter(const Trajectory& trajectory, double tau) {
    if (trajectory.states.size() != trajectory.times.size()) {
        throw std::invalid_argument("order_parameter: trajectory must keep its states");
    }
    std::vector<double> v;
    v.reserve(trajectory.states.size());
    for (const auto& s : trajectory.states) v.push_back(number_variance(s));
    return order_parameter(trajectory.times, v, tau);
}

PeriodEstimate extract_period(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size() || times.size() < 5) throw std::invalid_argument("extract_period: bad series");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double mid = 0.5 * (*mn + *mx);
    PeriodEstimate est;
    const std::size_t n = values.size();
    std::size_t i = 0;
    while (i < n) {
        if (values[i] <= mid) {
            ++i;
            continue;
        }
        std::size_t begin = i, best = i;
        while (i < n && values[i] > mid) {
            if (values[i] > values[best]) best = i;
            ++i;
        }
        // Humps cut by the window edges have no interior maximum.
        if (begin == 0 || i == n || best == 0 || best + 1 >= n) continue;
        const double y0 = values[best - 1], y1 = values[best], y2 = values[best + 1];
        const double denom = y0 - 2.0 * y1 + y2;
        const double off = denom != 0.0 ? std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5) : 0.0;
        const double h = 0.5 * (times[best + 1] - times[best - 1]);
        est.max_times.push_back(times[best] + off * h);
        est.max_values.push_back(y1 - 0.25 * (y0 - y2) * off);
    }
    if (est.max_times.size() < 3) {
        throw std::runtime_error("extract_period: found " + std::to_string(est.max_times.size()) +
                                 " maxima, need at least 3");
    }
    est.period = (est.max_times.back() - est.max_times.front()) / static_cast<double>(est.max_times.size() - 1);
    return est;
}

// ------------------------------------------------------------ driven run

SystemParams driven_defaults() {
    SystemParams p;
    p.omega_c = 1.0e4;
    p.omega_a = 1.0e4;
    p.g = 1.0;
    p.Omega = 50.0;
    p.alpha = 0.0;
    p.set_drive_detunings(500.0, 500.0);
    p.n_fock = 4;
    p.n_cavities = 1;
    return p;
}

DrivenRun driven_oscillation_run(const SystemParams& params, double t_max, double dt) {
    params.validate();
    if (params.n_cavities != 1) throw std::invalid_argument("driven_oscillation_run: single cavity only");
    const Operator h = build_h_driven(params);
    const Matrix w = polariton_transform(params);
    const Vector psi0 = polariton_ket(PolaritonLabel::lower(1), params).amplitudes();
    const int samples = static_cast<int>(std::ceil(t_max / dt)) + 1;
    DrivenRun run;
    run.times = uniform_grid(t_max, samples);
    const int lo = polariton_index(PolaritonLabel::lower(1)), up = polariton_index(PolaritonLabel::upper(1));

    auto push = [&](const Matrix& rho) {
        const Matrix rp = w.adjoint() * rho * w;
        run.p_1plus.push_back(rp(up, up).real());
        run.p_1minus.push_back(rp(lo, lo).real());
        run.p_ground.push_back(rp(0, 0).real());
        run.coherence.push_back(std::abs(rp(up, lo)) + std::abs(rp(lo, up)));
    };
    if (params.gamma == 0.0 && params.kappa == 0.0) {
        const UnitaryPropagator u(h);
        for (double t : run.times) {
            const Vector psi = u.apply(psi0, t);
            push(psi * psi.adjoint());
        }
    } else {
        const Liouvillian l = build_liouvillian(h, standard_channels(params));
        const Trajectory traj = evolve(l, DensityMatrix::from_ket(Ket(params.dims(), psi0)), run.times);
        for (const auto& s : traj.states) push(s.matrix());
    }
    run.estimate = extract_period(run.times, run.p_1plus);
    run.analytic = rabi_frequency(params);
    return run;
}

// ------------------------------------------------------------ mechanism table

std::vector<MechanismRow> mechanism_table(int threads) {
    std::vector<MechanismRow> rows(4);
    parallel_for(4, threads, [&rows](std::size_t k) {
        MechanismRow& r = rows[k];
        if (k == 0) {
            SystemParams p;
            p.J = 1.0;
            p.n_cavities = 2;
            p.n_fock = 3;
            const Vector psi0 = named_state("1-,1-", p).amplitudes();
            const Vector tgt = named_state("1+,1-", p).amplitudes();
            const UnitaryPropagator u(build_h_jch(p));
            const Matrix w = polariton_transform(p);
            const int d = p.dims().site_dim();
            for (double t : uniform_grid(20.0, 4001)) {
                const Vector psi = u.apply(psi0, t);
                r.interchange = std::max(r.interchange, std::norm(tgt.dot(psi)));
                r.coherence_max = std::max(r.coherence_max, coherence_site(reduced_site0(psi, d), w));
            }
            r = {"hopping", "J = g", "|1-,1->", r.coherence_max, r.interchange, 0.4, 0.2};
        } else if (k == 1) {
            const DrivenRun run = driven_oscillation_run(driven_defaults());
            r = {"driving", "Omega = 50 g", "|1->", *std::max_element(run.coherence.begin(), run.coherence.end()),
                 *std::max_element(run.p_1plus.begin(), run.p_1plus.end()), 1.0, 1.0};
        } else if (k == 2) {
            SystemParams p;
            p.gamma = 1.0;
            p.kappa = 0.0;
            const Liouvillian l = build_liouvillian(build_h_jc(p), standard_channels(p));
            const Trajectory traj = evolve(l, DensityMatrix::from_ket(named_state("2-", p)), uniform_grid(10.0, 1001));
            const Matrix w = polariton_transform(p);
            const int up = polariton_index(PolaritonLabel::upper(1));
            double c = 0.0, pu = 0.0;
            for (const auto& s : traj.states) {
                c = std::max(c, coherence_site(s.matrix(), w));
                pu = std::max(pu, (w.adjoint() * s.matrix() * w)(up, up).real());
            }
            r = {"relaxation", "gamma = g", "|2->", c, pu, 0.1, 0.0};
        } else {
            SystemParams p;
            const UnitaryPropagator u(build_stroboscopic_vi_full(p, 0));
            const Vector psi0 = named_state("1-", p).amplitudes();
            const Matrix w = polariton_transform(p);
            const int up = polariton_index(PolaritonLabel::upper(1));
            double c = 0.0, pu = 0.0;
            for (double t : uniform_grid(0.5 * std::numbers::pi / p.g, 201)) {
                const Vector psi = u.apply(psi0, t);
                const Matrix rho = psi * psi.adjoint();
                c = std::max(c, coherence_site(rho, w));
                pu = std::max(pu, std::norm((w.adjoint() * psi)(up)));
            }
            r = {"modulation", "Delta = pi/(2t)", "|1->", c, pu, 1.0, 1.0};
        }
    });
    return rows;
}

// ------------------------------------------------------------ ramp

void RampSchedule::validate(double g) const {
    if (delta_values.size() < 2) throw std::invalid_argument("RampSchedule: need at least 2 detuning points");
    if (hold_times.size() != delta_values.size()) throw std::invalid_argument("RampSchedule: hold_times size mismatch");
    if (m < 0) throw std::invalid_argument("RampSchedule: mode m must be >= 0");
    const double phase = std::numbers::pi * (2 * m + 1) / 2.0;
    for (std::size_t i = 0; i < delta_values.size(); ++i) {
        if (!(delta_values[i] > 0.0)) throw std::invalid_argument("RampSchedule: detunings must be positive");
        if (i > 0 && !(delta_values[i] < delta_values[i - 1])) {
            throw std::invalid_argument("RampSchedule: detunings must be strictly decreasing");
        }
        if (std::abs(delta_values[i] * hold_times[i] - phase) > 1e-9 * phase) {
            throw std::invalid_argument("RampSchedule: step " + std::to_string(i) +
                                        " violates Delta*t = pi(2m+1)/2");
        }
    }
    if (std::abs(g * t1 - 0.5 * std::numbers::pi) > 1e-12) throw std::invalid_argument("RampSchedule: g*t1 must be pi/2");
    if (!(tau > 0.0)) throw std::invalid_argument("RampSchedule: tau must be > 0");
}

RampSchedule make_ramp_schedule(int m, double J, double g, int points, double delta_start, double delta_end) {
    if (!(J > 0.0)) throw std::invalid_argument("make_ramp_schedule: J must be > 0");
    if (points < 2 || !(delta_start > delta_end) || !(delta_end > 0.0)) {
        throw std::invalid_argument("make_ramp_schedule: need points >= 2 and delta_start > delta_end > 0");
    }
    RampSchedule s;
    s.m = m;
    s.delta_start = delta_start;
    const double l0 = std::log10(delta_start), l1 = std::log10(delta_end);
    for (int i = 0; i < points; ++i) {
        const double d = std::pow(10.0, l0 + (l1 - l0) * i / (points - 1));
        s.delta_values.push_back(d);
        s.hold_times.push_back(std::numbers::pi * (2 * m + 1) / (2.0 * d));
    }
    s.t1 = 0.5 * std::numbers::pi / g;
    s.tau = 1.0 / J;
    return s;
}

namespace {

const std::vector<std::pair<std::string, std::vector<std::string>>>& tracked_states() {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> states = {
        {"1-,1-", {"1-,1-"}},
        {"1+,1+", {"1+,1+"}},
        {"1-,1+|1+,1-", {"1-,1+", "1+,1-"}},
        {"2-,0|0,2-", {"2-,0", "0,2-"}},
        {"2+,0|0,2+", {"2+,0", "0,2+"}},
    };
    return states;
}

void require_ramp_params(const SystemParams& params) {
    params.validate();
    if (params.n_cavities != 2) throw std::invalid_argument("ramp: requires two cavities");
    if (params.gamma != 0.0 || params.kappa != 0.0) throw std::invalid_argument("ramp: closed system only (gamma = kappa = 0)");
    if (!(params.J > 0.0)) throw std::invalid_argument("ramp: J must be > 0");
}

// Evolves a two-site ket under H_JCH at `params` over [0, τ] and records the order parameter.
OrderParameterPoint evaluate_point(const SystemParams& params, const Vector& psi0, double tau, int samples) {
    const UnitaryPropagator u(build_h_jch(params));
    const Matrix w = polariton_transform_full(params);
    const int d = params.dims().site_dim();
    OrderParameterPoint pt;
    pt.delta = params.delta();
    const std::vector<double> times = uniform_grid(tau, samples);
    std::vector<double> var;
    var.reserve(times.size());
    std::map<std::string, std::vector<double>> series;
    for (double t : times) {
        const Vector psi = u.apply(psi0, t);
        var.push_back(number_variance(psi, params.dims()));
        const Vector c = w.adjoint() * psi;
        for (const auto& [name, parts] : tracked_states()) {
            double p = 0.0;
            for (const auto& part : parts) {
                const auto labels = split(part, ',');
                const int i0 = polariton_index(parse_label(labels[0])), i1 = polariton_index(parse_label(labels[1]));
                p += std::norm(c(static_cast<Eigen::Index>(i0) * d + i1));
            }
            series[name].push_back(p);
        }
    }
    pt.var_tau = order_parameter(times, var, tau);
    for (const auto& [name, s] : series) {
        pt.max_probability[name] = *std::max_element(s.begin(), s.end());
        pt.mean_probability[name] = order_parameter(times, s, tau);
    }
    // Branch weights at t = 0, site-averaged.
    const Vector c0 = w.adjoint() * psi0;
    for (Eigen::Index k = 0; k < c0.size(); ++k) {
        const double p = std::norm(c0(k));
        for (int idx : {static_cast<int>(k / d), static_cast<int>(k % d)}) {
            const SiteKind kind = site_kind(idx, d);
            if (kind == SiteKind::minus) pt.lp_weight += 0.5 * p;
            if (kind == SiteKind::plus) pt.up_weight += 0.5 * p;
        }
    }
    return pt;
}

SystemParams at_detuning(const SystemParams& params, double delta) {
    SystemParams p = params;
    p.set_detuning(delta);
    return p;
}

}  // namespace

OrderParameterPoint branch_order_parameter(const SystemParams& params, Branch branch, int samples) {
    require_ramp_params(params);
    const std::string name = branch == Branch::minus ? "1-,1-" : "1+,1+";
    return evaluate_point(params, named_state(name, params).amplitudes(), 1.0 / params.J, samples);
}

namespace {

std::vector<OrderParameterPoint> fresh_sweep(const RampSchedule& schedule, const SystemParams& params,
                                             const std::string& initial, const RampOptions& options) {
    std::vector<OrderParameterPoint> out(schedule.delta_values.size());
    parallel_for(out.size(), options.threads, [&](std::size_t i) {
        const SystemParams p = at_detuning(params, schedule.delta_values[i]);
        out[i] = evaluate_point(p, named_state(initial, p).amplitudes(), schedule.tau, options.samples);
    });
    return out;
}

}  // namespace

std::vector<OrderParameterPoint> ramp_reference(const RampSchedule& schedule, const SystemParams& params, Branch branch,
                                                const RampOptions& options) {
    schedule.validate(params.g);
    require_ramp_params(params);
    return fresh_sweep(schedule, params, branch == Branch::minus ? "1-,1-" : "1+,1+", options);
}

std::vector<OrderParameterPoint> ramp_experiment(const RampSchedule& schedule, const SystemParams& params,
                                                 const std::string& initial, bool time_dependent,
                                                 const RampOptions& options) {
    schedule.validate(params.g);
    require_ramp_params(params);
    if (!time_dependent) return fresh_sweep(schedule, params, initial, options);

    const std::size_t n = schedule.delta_values.size();
    // Pulse generator is independent of Δ; with strict mode hopping stays on.
    Operator pulse_h = build_stroboscopic_vi_full(params, schedule.m);
    if (options.strict) pulse_h = pulse_h + build_h_hop(params);
    const UnitaryPropagator pulse(pulse_h);
    const Matrix pulse_u = pulse.at(schedule.t1);

    // Polariton amplitudes carried between points (adiabatic transport across detuning steps).
    std::vector<Vector> start(n);
    const SystemParams p0 = at_detuning(params, schedule.delta_values[0]);
    start[0] = named_state(initial, p0).amplitudes();
    Vector c = polariton_transform_full(p0).adjoint() * start[0];
    for (std::size_t i = 1; i < n; ++i) {
        const Matrix w = polariton_transform_full(at_detuning(params, schedule.delta_values[i]));
        const Vector psi = pulse_u * (w * c);
        c = w.adjoint() * psi;
        start[i] = psi;
    }
    std::vector<OrderParameterPoint> out(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        out[i] = evaluate_point(at_detuning(params, schedule.delta_values[i]), start[i], schedule.tau, options.samples);
        out[i].pulses = static_cast<int>(i);
    });
    return out;
}

// ------------------------------------------------------------ effective model

EffectiveModel effective_model(const SystemParams& params, Branch branch, DiagonalForm form) {
    params.validate();
    const double t1 = mixing_angle(1, params.g, params.delta()).theta;
    const double t2 = mixing_angle(2, params.g, params.delta()).theta;
    const double s1 = std::sin(t1), c1 = std::cos(t1), s2 = std::sin(t2), c2 = std::cos(t2);
    EffectiveModel m;
    m.branch = branch;
    m.form = form;
    const double e1 = polariton_energy({1, branch}, params), e2 = polariton_energy({2, branch}, params);
    m.a = 2.0 * e1;
    m.c = form == DiagonalForm::energy_consistent ? e2 : 2.0 * e2;
    const double product = branch == Branch::minus ? c1 * (std::numbers::sqrt2 * c1 * c2 + s1 * s2)
                                                   : s1 * (std::numbers::sqrt2 * s1 * s2 + c1 * c2);
    m.b = -std::numbers::sqrt2 * params.J * product;
    m.omega0 = std::sqrt(4.0 * m.b * m.b + (m.a - m.c) * (m.a - m.c));
    return m;
}

double analytic_variance(const EffectiveModel& model, double J) {
    if (!(J > 0.0)) throw std::invalid_argument("analytic_variance: J must be > 0");
    if (model.b == 0.0) return 0.0;
    const double x = model.omega0 / J;
    if (x < 1e-4) return 4.0 * model.b * model.b / (J * J) * (1.0 / 6.0 - x * x / 120.0);
    return 4.0 * model.b * model.b / (model.omega0 * model.omega0) * (1.0 - std::sin(x) / x);
}

}  // namespace jch
