#include "jch/perturbation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace jch {

namespace {

constexpr Branch other(Branch b) { return b == Branch::plus ? Branch::minus : Branch::plus; }

// Matrix elements and energies needed by the explicit formulas.
struct Series {
    std::map<PolaritonLabel, double> e;
    DrivenPolaritonCoefficients d;

    double E(int n, Branch b) const { return n == 0 ? 0.0 : e.at({n, b}); }
    // <nη|V|(n−1)η>
    cplx beta(int n, Branch b) const { return b == Branch::plus ? d.beta_plus[n] : d.beta_minus[n]; }
    // <n to|V|(n−1) from>, from ≠ to
    cplx xi(int n, Branch from, Branch to) const {
        (void)to;
        return from == Branch::minus ? d.xi_pm[n] : d.xi_mp[n];
    }
};

void require_three_manifolds(const SystemParams& p, const char* who) {
    if (p.n_fock < 3) {
        throw std::invalid_argument(std::string(who) + ": needs N_f >= 3 so that |3+-> exist, got N_f = " +
                                    std::to_string(p.n_fock));
    }
    if (p.n_cavities != 1) throw std::invalid_argument(std::string(who) + ": single cavity only");
}

Series make_series(const SystemParams& params) {
    return {unperturbed_energies(params), drive_coefficients(params)};
}

}  // namespace

std::vector<PolaritonLabel> perturbative_labels() {
    return {PolaritonLabel::ground(), PolaritonLabel::lower(1), PolaritonLabel::upper(1), PolaritonLabel::lower(2),
            PolaritonLabel::upper(2)};
}

std::map<PolaritonLabel, double> unperturbed_energies(const SystemParams& params) {
    if (!params.delta_1_vanishes()) throw std::invalid_argument("unperturbed_energies: requires delta_1 = 0");
    std::map<PolaritonLabel, double> e;
    e[PolaritonLabel::ground()] = 0.0;
    for (int n = 1; n <= 3; ++n) {
        e[PolaritonLabel::lower(n)] = rotating_energy(PolaritonLabel::lower(n), params);
        e[PolaritonLabel::upper(n)] = rotating_energy(PolaritonLabel::upper(n), params);
    }
    return e;
}

void require_nondegenerate(const SystemParams& params, double min_gap) {
    const auto e = unperturbed_energies(params);
    for (auto i = e.begin(); i != e.end(); ++i) {
        for (auto j = std::next(i); j != e.end(); ++j) {
            // Only pairs coupled in first or second order matter: manifolds differing by at most 2.
            if (std::abs(i->first.n - j->first.n) > 2) continue;
            if (std::abs(i->second - j->second) <= min_gap) {
                throw std::domain_error("perturbation: near-degenerate unperturbed levels " + i->first.name() + " and " +
                                        j->first.name() + " (gap " + std::to_string(std::abs(i->second - j->second)) +
                                        ")");
            }
        }
    }
}

std::map<PolaritonLabel, double> second_order_energies(const SystemParams& params) {
    require_three_manifolds(params, "second_order_energies");
    require_nondegenerate(params);
    const Series s = make_series(params);
    auto a2 = [](cplx z) { return std::norm(z); };
    std::map<PolaritonLabel, double> out;
    out[PolaritonLabel::ground()] =
        -a2(s.beta(1, Branch::minus)) / s.E(1, Branch::minus) - a2(s.beta(1, Branch::plus)) / s.E(1, Branch::plus);
    for (Branch b : {Branch::minus, Branch::plus}) {
        const Branch o = other(b);
        out[{1, b}] = a2(s.beta(1, b)) / s.E(1, b) + a2(s.beta(2, b)) / (s.E(1, b) - s.E(2, b)) +
                      a2(s.xi(2, b, o)) / (s.E(1, b) - s.E(2, o));
        out[{2, b}] = a2(s.beta(2, b)) / (s.E(2, b) - s.E(1, b)) + a2(s.xi(2, o, b)) / (s.E(2, b) - s.E(1, o)) +
                      a2(s.beta(3, b)) / (s.E(2, b) - s.E(3, b)) + a2(s.xi(3, b, o)) / (s.E(2, b) - s.E(3, o));
    }
    return out;
}

std::map<PolaritonLabel, Amplitudes> corrected_states(const SystemParams& params, int order,
                                                      const CorrectionOptions& options) {
    if (order != 1 && order != 2) throw std::invalid_argument("corrected_states: order must be 1 or 2");
    require_three_manifolds(params, "corrected_states");
    require_nondegenerate(params);
    const Series s = make_series(params);
    const PolaritonLabel G = PolaritonLabel::ground();
    const bool third = options.include_third_manifold;
    std::map<PolaritonLabel, Amplitudes> out;

    if (order == 1) {
        for (Branch b : {Branch::minus, Branch::plus}) {
            out[G][{1, b}] = -s.beta(1, b) / s.E(1, b);  // −a_η
        }
        for (Branch b : {Branch::minus, Branch::plus}) {
            const Branch o = other(b);
            Amplitudes& one = out[{1, b}];
            one[G] = std::conj(s.beta(1, b)) / s.E(1, b);                     // −a_η for imaginary β
            one[{2, b}] = s.beta(2, b) / (s.E(1, b) - s.E(2, b));             // b_η
            one[{2, o}] = s.xi(2, b, o) / (s.E(1, b) - s.E(2, o));            // c_{η,μ}
            Amplitudes& two = out[{2, b}];
            two[{1, b}] = std::conj(s.beta(2, b)) / (s.E(2, b) - s.E(1, b));  // +b_η
            two[{1, o}] = std::conj(s.xi(2, o, b)) / (s.E(2, b) - s.E(1, o)); // +c_{−η,·}
            if (third) {
                two[{3, b}] = s.beta(3, b) / (s.E(2, b) - s.E(3, b));         // d_η
                two[{3, o}] = s.xi(3, b, o) / (s.E(2, b) - s.E(3, o));        // e_{η,μ}
            }
        }
        return out;
    }

    for (Branch b : {Branch::minus, Branch::plus}) {
        const Branch o = other(b);
        // G → 2η through 1η and 1(−η)
        out[G][{2, b}] = (s.beta(2, b) * s.beta(1, b) / s.E(1, b) + s.xi(2, o, b) * s.beta(1, o) / s.E(1, o)) / s.E(2, b);

        Amplitudes& one = out[{1, b}];
        const double e1 = s.E(1, b);
        // f: 1η → 1(−η) through G, 2η, 2(−η)
        one[{1, o}] = (s.beta(1, o) * std::conj(s.beta(1, b)) / e1 +
                       std::conj(s.xi(2, o, b)) * s.beta(2, b) / (e1 - s.E(2, b)) +
                       std::conj(s.beta(2, o)) * s.xi(2, b, o) / (e1 - s.E(2, o))) /
                      (e1 - s.E(1, o));
        if (third) {
            // g: 1η → 3η through 2η, 2(−η)
            one[{3, b}] = (s.beta(3, b) * s.beta(2, b) / (e1 - s.E(2, b)) +
                           s.xi(3, o, b) * s.xi(2, b, o) / (e1 - s.E(2, o))) /
                          (e1 - s.E(3, b));
            // h: 1η → 3(−η) through 2η, 2(−η)
            one[{3, o}] = (s.xi(3, b, o) * s.beta(2, b) / (e1 - s.E(2, b)) +
                           s.beta(3, o) * s.xi(2, b, o) / (e1 - s.E(2, o))) /
                          (e1 - s.E(3, o));
        }

        Amplitudes& two = out[{2, b}];
        const double e2 = s.E(2, b);
        // i: 2η → 2(−η) through 1η, 1(−η), 3η, 3(−η)
        two[{2, o}] = (s.xi(2, b, o) * std::conj(s.beta(2, b)) / (e2 - s.E(1, b)) +
                       s.beta(2, o) * std::conj(s.xi(2, o, b)) / (e2 - s.E(1, o)) +
                       std::conj(s.xi(3, o, b)) * s.beta(3, b) / (e2 - s.E(3, b)) +
                       std::conj(s.beta(3, o)) * s.xi(3, b, o) / (e2 - s.E(3, o))) /
                      (e2 - s.E(2, o));
        // j: 2η → G through 1η, 1(−η)
        two[G] = (std::conj(s.beta(1, b)) * std::conj(s.beta(2, b)) / (e2 - s.E(1, b)) +
                  std::conj(s.beta(1, o)) * std::conj(s.xi(2, o, b)) / (e2 - s.E(1, o))) /
                 e2;
    }
    return out;
}

Ket assemble_ket(const Amplitudes& amplitudes, const SystemParams& params) {
    Vector v = Vector::Zero(params.dims().site_dim());
    for (const auto& [label, amp] : amplitudes) v += amp * polariton_ket(label, params).amplitudes();
    return Ket::normalized(params.dims().site(), std::move(v));
}

PerturbationReport perturbation_report(const SystemParams& params, const CorrectionOptions& options) {
    const auto e0 = unperturbed_energies(params);
    const auto e2 = second_order_energies(params);
    const auto first = corrected_states(params, 1, options);
    const auto second = corrected_states(params, 2, options);
    const Operator h = build_h_driven(params);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    if (es.info() != Eigen::Success) throw std::runtime_error("perturbation_report: diagonalization failed");

    PerturbationReport rep;
    for (const auto& label : perturbative_labels()) {
        PerturbationEntry en;
        en.label = label;
        en.e0 = e0.at(label);
        en.e2 = e2.at(label);
        if (first.count(label)) en.first = first.at(label);
        if (second.count(label)) en.second = second.at(label);
        const Vector k0 = polariton_ket(label, params).amplitudes();
        Eigen::Index best = 0;
        (es.eigenvectors().adjoint() * k0).cwiseAbs2().maxCoeff(&best);
        en.e_exact = es.eigenvalues()(best);
        en.residual = std::abs(en.e_exact - en.e0 - en.e2);
        Amplitudes total{{label, 1.0}};
        for (const auto& [l, a] : en.first) total[l] += a;
        for (const auto& [l, a] : en.second) total[l] += a;
        const Vector approx = assemble_ket(total, params).amplitudes();
        en.overlap = std::norm(es.eigenvectors().col(best).dot(approx));
        rep.entries.push_back(std::move(en));
    }
    return rep;
}

std::vector<std::string> expanded_formula_table() {
    return {
        "E2(G)  = -|b1-|^2/E1- - |b1+|^2/E1+",
        "E2(1h) = |b1h|^2/E1h + |b2h|^2/(E1h-E2h) + |x2(h->-h)|^2/(E1h-E2(-h))",
        "E2(2h) = |b2h|^2/(E2h-E1h) + |x2(-h->h)|^2/(E2h-E1(-h)) + |b3h|^2/(E2h-E3h) + |x3(h->-h)|^2/(E2h-E3(-h))",
        "G(1)  <1h|  = -b1h/E1h",
        "1h(1) <G|   = conj(b1h)/E1h",
        "1h(1) <2h|  = b2h/(E1h-E2h)",
        "1h(1) <2-h| = x2(h->-h)/(E1h-E2(-h))",
        "2h(1) <1h|  = conj(b2h)/(E2h-E1h)",
        "2h(1) <1-h| = conj(x2(-h->h))/(E2h-E1(-h))",
        "2h(1) <3h|  = b3h/(E2h-E3h)                      [third manifold]",
        "2h(1) <3-h| = x3(h->-h)/(E2h-E3(-h))             [third manifold]",
        "G(2)  <2h|  = [b2h b1h/E1h + x2(-h->h) b1(-h)/E1(-h)] / E2h",
        "1h(2) <1-h| = [b1(-h) conj(b1h)/E1h + conj(x2(-h->h)) b2h/(E1h-E2h) + conj(b2(-h)) x2(h->-h)/(E1h-E2(-h))] / (E1h-E1(-h))",
        "1h(2) <3h|  = [b3h b2h/(E1h-E2h) + x3(-h->h) x2(h->-h)/(E1h-E2(-h))] / (E1h-E3h)          [third manifold]",
        "1h(2) <3-h| = [x3(h->-h) b2h/(E1h-E2h) + b3(-h) x2(h->-h)/(E1h-E2(-h))] / (E1h-E3(-h))    [third manifold]",
        "2h(2) <2-h| = [x2(h->-h) conj(b2h)/(E2h-E1h) + b2(-h) conj(x2(-h->h))/(E2h-E1(-h)) + conj(x3(-h->h)) b3h/(E2h-E3h) + conj(b3(-h)) x3(h->-h)/(E2h-E3(-h))] / (E2h-E2(-h))",
        "2h(2) <G|   = [conj(b1h) conj(b2h)/(E2h-E1h) + conj(b1(-h)) conj(x2(-h->h))/(E2h-E1(-h))] / E2h",
        "notation: h = branch, -h = other branch, b = beta, x2(u->v) = <2v|V|1u> (xi_{2+-} for -->+, xi_{2-+} for +->-)",
    };
}

}  // namespace jch
