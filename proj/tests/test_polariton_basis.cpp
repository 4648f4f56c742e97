#include "doctest.h"
#include "oracles.hpp"

#include "jch/hamiltonians.hpp"
#include "jch/polariton_basis.hpp"

#include <cmath>
#include <numbers>

using namespace jch;

namespace {

constexpr double pi = std::numbers::pi;

SystemParams site(double delta, int n_fock = 4) {
    SystemParams p;
    p.n_fock = n_fock;
    p.set_detuning(delta);
    return p;
}

// <bra| X |ket> through polariton kets built independently from the bare basis.
Vector lp_oracle(int n, double theta, int n_fock) {
    return std::cos(theta) * oracle::bare(n_fock, n, 0) - std::sin(theta) * oracle::bare(n_fock, n - 1, 1);
}
Vector up_oracle(int n, double theta, int n_fock) {
    return std::sin(theta) * oracle::bare(n_fock, n, 0) + std::cos(theta) * oracle::bare(n_fock, n - 1, 1);
}

}  // namespace

TEST_CASE("labels") {
    CHECK(parse_label("0g").is_ground());
    CHECK(parse_label("2+") == PolaritonLabel::upper(2));
    CHECK(parse_label("1-") == PolaritonLabel::lower(1));
    CHECK(PolaritonLabel::upper(3).name() == "3+");
    CHECK_THROWS_AS(parse_label("x"), std::invalid_argument);
}

TEST_CASE("mixing angle") {
    CHECK(mixing_angle(1, 1.0, 0.0).theta == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK(mixing_angle(1, 1.0, 2.0).theta == doctest::Approx(pi / 8).epsilon(1e-15));
    const double t60 = mixing_angle(1, 1.0, 60.0).theta;
    CHECK(std::abs(t60 - 0.5 * std::atan2(1.0, 30.0)) < 1e-15);
    CHECK(std::abs(t60 - 0.016663) < 5e-6);
    const double neg = mixing_angle(1, 1.0, -3.0).theta;
    CHECK(neg > pi / 4);
    CHECK(neg < pi / 2);
    double prev = pi / 4;
    for (double d = 0.5; d < 50; d *= 2) {
        const double t = mixing_angle(2, 1.0, d).theta;
        CHECK(t < prev);
        prev = t;
    }
    CHECK_THROWS_AS(mixing_angle(0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mixing_angle(1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("polariton kets") {
    const SystemParams p0 = site(0.0);
    CHECK(std::abs(polariton_ket(PolaritonLabel::lower(2), p0).amplitudes()(site_index(2, false)) - 1.0 / std::sqrt(2.0)) <
          1e-15);
    for (double d : {-2.0, 0.0, 0.3, 7.0}) {
        const SystemParams p = site(d);
        for (int n = 1; n <= p.n_fock; ++n) {
            const Vector m = polariton_ket(PolaritonLabel::lower(n), p).amplitudes();
            const Vector u = polariton_ket(PolaritonLabel::upper(n), p).amplitudes();
            const double th = mixing_angle(n, p.g, d).theta;
            CHECK(std::abs(u.dot(m)) < 1e-15);
            CHECK((m - lp_oracle(n, th, p.n_fock)).norm() < 1e-12);
            CHECK((u - up_oracle(n, th, p.n_fock)).norm() < 1e-12);
        }
    }
    // far detuned: LP photonic, UP atomic
    const SystemParams far = site(1e4);
    CHECK(std::abs(polariton_ket(PolaritonLabel::lower(1), far).amplitudes()(site_index(1, false))) > 1 - 1e-7);
    CHECK(std::abs(polariton_ket(PolaritonLabel::upper(1), far).amplitudes()(site_index(0, true))) > 1 - 1e-7);
    CHECK_THROWS_AS(polariton_ket(PolaritonLabel::lower(5), site(0.0, 4)), std::invalid_argument);
}

TEST_CASE("polariton energies") {
    SystemParams p = site(0.0);
    p.omega_c = 100.0;
    p.set_detuning(0.0);
    CHECK(polariton_energy(PolaritonLabel::upper(1), p) == doctest::Approx(101.0).epsilon(1e-15));
    CHECK(polariton_energy(PolaritonLabel::lower(1), p) == doctest::Approx(99.0).epsilon(1e-15));
    CHECK(polariton_splitting(2, p) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
    p.set_detuning(1.0);
    CHECK(polariton_energy(PolaritonLabel::upper(1), p) - 100.0 == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-12));
    CHECK(polariton_energy(PolaritonLabel::lower(1), p) - 100.0 == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-12));
}

TEST_CASE("coefficients at resonance, n = 2") {
    const auto t = coefficient_table(site(0.0));
    CHECK(std::abs(t[2].c_minus - (std::sqrt(2.0) + 1) / 2) < 1e-14);
    CHECK(std::abs(t[2].c_minus - 1.20711) < 1e-5);
    CHECK(std::abs(t[2].k_pm - (std::sqrt(2.0) - 1) / 2) < 1e-14);
    CHECK(std::abs(t[2].k_mp - 0.20711) < 1e-5);
    CHECK(std::abs(t[2].ka_pm - 0.5) < 1e-14);
    CHECK(t[1].k_pm == 0.0);
    CHECK(t[1].k_mp == 0.0);
    CHECK(t[1].ka_pm == 0.0);
}

TEST_CASE("coefficients equal bare matrix elements") {
    for (double d : {0.0, 0.8, -1.7, 12.0}) {
        const SystemParams p = site(d);
        const auto t = coefficient_table(p);
        const Matrix ad = oracle::brute_kron(oracle::photon_lowering(p.n_fock).adjoint(), Matrix::Identity(2, 2));
        const Matrix sp = oracle::brute_kron(Matrix::Identity(p.n_fock + 1, p.n_fock + 1), oracle::qubit_lowering().adjoint());
        for (int n = 1; n <= p.n_fock; ++n) {
            const double th = mixing_angle(n, 1.0, d).theta;
            const Vector mn = lp_oracle(n, th, p.n_fock), un = up_oracle(n, th, p.n_fock);
            Vector mprev, uprev;
            if (n == 1) {
                mprev = uprev = oracle::bare(p.n_fock, 0, 0);
            } else {
                const double tp = mixing_angle(n - 1, 1.0, d).theta;
                mprev = lp_oracle(n - 1, tp, p.n_fock);
                uprev = up_oracle(n - 1, tp, p.n_fock);
            }
            CHECK(std::abs(un.dot(ad * uprev) - t[n].c_plus) < 1e-12);
            CHECK(std::abs(mn.dot(ad * mprev) - t[n].c_minus) < 1e-12);
            CHECK(std::abs(un.dot(sp * uprev) - t[n].ca_plus) < 1e-12);
            CHECK(std::abs(mn.dot(sp * mprev) - t[n].ca_minus) < 1e-12);
            if (n >= 2) {
                CHECK(std::abs(un.dot(ad * mprev) - t[n].k_pm) < 1e-12);
                CHECK(std::abs(mn.dot(ad * uprev) - t[n].k_mp) < 1e-12);
                CHECK(std::abs(un.dot(sp * mprev) - t[n].ka_pm) < 1e-12);
                CHECK(std::abs(mn.dot(sp * uprev) - t[n].ka_mp) < 1e-12);
            }
        }
        // n = 1 special values
        const double t1 = mixing_angle(1, 1.0, d).theta;
        CHECK(std::abs(t[1].c_plus - std::sin(t1)) < 1e-12);
        CHECK(std::abs(t[1].c_minus - std::cos(t1)) < 1e-12);
        CHECK(std::abs(t[1].ca_plus - std::cos(t1)) < 1e-12);
        CHECK(std::abs(t[1].ca_minus + std::sin(t1)) < 1e-12);
    }
}

TEST_CASE("coefficient symmetry, monotonicity and the far-detuned limit") {
    for (double d : {0.0, 0.5, 3.0}) {
        const auto pos = coefficient_table(site(d, 5));
        const auto neg = coefficient_table(site(-d, 5));
        for (int n = 2; n <= 5; ++n) {
            CHECK(std::abs(pos[n].k_pm - neg[n].k_mp) < 1e-14);
            if (n > 2) {
                CHECK(pos[n].k_pm < pos[n - 1].k_pm);
                // the minority family only shrinks with n close to resonance
                if (d <= 0.5) CHECK(pos[n].k_mp < pos[n - 1].k_mp);
            }
        }
        if (d == 0.0) {
            for (int n = 2; n <= 5; ++n) CHECK(std::abs(pos[n].k_pm - pos[n].k_mp) < 1e-15);
        }
    }
    const auto far = coefficient_table(site(20.0));
    CHECK(far[2].k_pm > far[2].k_mp);
    // at Delta = 3g the small family grows towards its large-n limit
    const auto mid = coefficient_table(site(3.0, 5));
    for (int n = 3; n <= 5; ++n) CHECK(mid[n].k_mp > mid[n - 1].k_mp);
}

TEST_CASE("ladder families reconstruct a† and σ⁺ below the cutoff") {
    for (double d : {0.0, 0.4, -2.5, 15.0}) {
        const SystemParams p = site(d);
        const HilbertDims sd = p.dims().site();
        const Matrix proj = excitation_projector(sd, p.n_fock - 1);
        const Matrix ad = oracle::brute_kron(oracle::photon_lowering(p.n_fock).adjoint(), Matrix::Identity(2, 2));
        const Matrix sp = oracle::brute_kron(Matrix::Identity(p.n_fock + 1, p.n_fock + 1), oracle::qubit_lowering().adjoint());
        CHECK(((decompose_creation(p).total().matrix() - ad) * proj).norm() < 1e-10);
        CHECK(((decompose_atomic_raising(p).total().matrix() - sp) * proj).norm() < 1e-10);
    }
    const SystemParams p = site(0.3);
    const auto f = decompose_creation(p);
    const auto t = coefficient_table(p);
    const Vector m1 = polariton_ket(PolaritonLabel::lower(1), p).amplitudes();
    const Vector u2 = polariton_ket(PolaritonLabel::upper(2), p).amplitudes();
    CHECK((f.pm.matrix() * m1 - t[2].k_pm * u2).norm() < 1e-14);

    // far detuned: interchanging families small next to P₊†
    const auto far = decompose_creation(site(200.0));
    CHECK((far.pm.norm() + far.mp.norm()) / far.plus.norm() < 0.02);
    const auto near = decompose_creation(site(0.0));
    CHECK((near.pm.norm() + near.mp.norm()) / near.plus.norm() > 0.1);
}

TEST_CASE("polariton transform diagonalizes H_JC and is complete") {
    for (double d : {0.0, 1.0, -0.6, 30.0}) {
        const SystemParams p = site(d);
        const Matrix w = polariton_transform(p);
        CHECK((w * w.adjoint() - Matrix::Identity(w.rows(), w.rows())).norm() < 1e-14);
        const Matrix diag = w.adjoint() * build_h_jc(p).matrix() * w;
        Matrix expect = Matrix::Zero(w.rows(), w.rows());
        for (int n = 1; n <= p.n_fock; ++n) {
            expect(polariton_index(PolaritonLabel::lower(n)), polariton_index(PolaritonLabel::lower(n))) =
                polariton_energy(PolaritonLabel::lower(n), p);
            expect(polariton_index(PolaritonLabel::upper(n)), polariton_index(PolaritonLabel::upper(n))) =
                polariton_energy(PolaritonLabel::upper(n), p);
        }
        expect(w.rows() - 1, w.rows() - 1) = p.n_fock * p.omega_c + p.omega_a;
        CHECK((diag - expect).norm() / p.omega_c < 1e-10);
    }
}

TEST_CASE("interaction-picture phases") {
    SystemParams p = site(0.0);
    p.J = 0.1;
    const auto pp = interaction_picture_phase(HoppingFamily::plus_plus, 1, 1, p);
    CHECK(pp.frequency == 0.0);
    CHECK_FALSE(pp.eliminable);
    const auto pm = interaction_picture_phase(HoppingFamily::plus_minus, 1, 1, p);
    CHECK(pm.frequency == doctest::Approx(2 * std::sqrt(4.0)).epsilon(1e-14));
    CHECK(pm.eliminable);
    p.set_detuning(1.5);
    CHECK(interaction_picture_phase(HoppingFamily::plus_minus, 1, 1, p).frequency ==
          doctest::Approx(2 * std::sqrt(1.5 * 1.5 + 4.0)).epsilon(1e-14));
    CHECK(interaction_picture_phase(HoppingFamily::plus_pm, 2, 1, p).vanishes);
    CHECK(interaction_picture_phase(HoppingFamily::plus_mp, 2, 1, p).vanishes);
    CHECK_FALSE(interaction_picture_phase(HoppingFamily::plus_pm, 2, 2, p).vanishes);
    // branch-preserving, different manifolds: frequency (R2-R1)-(R1-R0)
    const auto mm = interaction_picture_phase(HoppingFamily::minus_minus, 2, 1, p);
    const double r0 = 0.0, r1 = polariton_splitting(1, p), r2 = polariton_splitting(2, p);
    CHECK(std::abs(std::abs(mm.frequency) - std::abs((r2 - r1) - (r1 - r0))) < 1e-12);
}
