#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cusplab/asymptotics.hpp"

using namespace cusplab;

namespace {
constexpr double kPi = 3.14159265358979323846;

// exact antiderivative of the alpha = 0 collar integrand over the truncated
// collar with cutoff 1/e: (k^3/pi) ((1 - 2/k) + sin(2 pi / k) / pi)
double collar_exact(double k) {
    const double eps = 1.0 / k;
    return (k * k * k / kPi) * ((1.0 - 2.0 * eps) + std::sin(2.0 * kPi * eps) / kPi);
}
} // namespace

TEST_CASE("collar norm integral: cubic growth with bounded remainder") {
    // k = 10 against the independent antiderivative
    CHECK(collar_norm_integral(10.0, 0) == doctest::Approx(collar_exact(10.0)).epsilon(1e-11));
    // leading term value
    CHECK(1000.0 / kPi == doctest::Approx(318.310).epsilon(1e-5));
    CHECK(std::abs(collar_norm_integral(10.0, 0) - 1000.0 / kPi) <= 5.0);
    // leading form with the 4 pi / 3 correction, accurate to the eps^5 term
    const double lead = 1000.0 / kPi - 4.0 * kPi / 3.0;
    CHECK(lead == doctest::Approx(314.121).epsilon(1e-5));
    CHECK(std::abs(collar_norm_integral(10.0, 0) - lead) <=
          (4.0 * kPi * kPi * kPi / 15.0) * 1000.0 * 1e-5);

    for (double k : {5.0, 10.0, 20.0, 40.0}) {
        CHECK(collar_norm_integral(k, 0) == doctest::Approx(collar_exact(k)).epsilon(1e-10));
        CHECK(std::abs(collar_norm_integral(k, 0) - k * k * k / kPi) <= 5.0);
        CHECK(collar_norm_integral(k, 1) <= 5.0);  // k-independent bound
    }

    CHECK_THROWS_AS(collar_norm_integral(1.5, 0), InputError);     // k <= 2|log c|
    CHECK_THROWS_AS(collar_norm_integral(10.0, -1), InputError);
    CHECK_THROWS_AS(collar_norm_integral(10.0, 0, 1.5), InputError);
}

TEST_CASE("plumbing pairing: boundary value and vanishing modes") {
    const auto prof = PairingProfile::plateau(0.25, 0.75);
    for (double t : {0.1, 0.05, 0.01}) {
        const auto v = plumbing_pairing(t, 0, prof);
        CHECK(std::abs(v - std::complex<double>(-kPi / t, 0.0)) <= 1e-6 * kPi / t);
        for (int alpha : {1, 2})
            CHECK(std::abs(plumbing_pairing(t, alpha, prof)) <= 1e-8 / t);
    }
    CHECK(std::abs(plumbing_pairing(0.1, 0, prof) - std::complex<double>(-10.0 * kPi, 0.0)) <=
          1e-6 * 10.0 * kPi);

    // profile independence: the integral telescopes to the boundary
    const auto prof2 = PairingProfile::plateau(0.15, 0.6);
    for (double t : {0.1, 0.02}) {
        const auto a = plumbing_pairing(t, 0, prof);
        const auto b = plumbing_pairing(t, 0, prof2);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
    }

    // complex parameter carries the phase
    const std::complex<double> tc = std::polar(0.07, 2.3);
    CHECK(std::abs(plumbing_pairing(tc, 0, prof) - (-kPi / tc)) <= 1e-6 * std::abs(kPi / tc));

    // boundary normalization violations are rejected
    PairingProfile badp;
    badp.u0 = 0.5;
    badp.u1 = 1.5;  // psi(1) != 1
    CHECK_THROWS_AS(plumbing_pairing(0.1, 0, badp), InputError);
    CHECK_THROWS_AS(plumbing_pairing(0.0, 0, prof), InputError);
    CHECK_THROWS_AS(PairingProfile::plateau(0.75, 0.25), InputError);
}

TEST_CASE("block matrices: determinant ratio and inverse classes") {
    // diagonal case: ratio exactly one
    BlockMatrix D;
    D.lambda = Eigen::VectorXd::Constant(1, 777.0);
    D.coupling = Eigen::MatrixXd::Zero(2, 2);
    D.tail = Eigen::MatrixXd::Identity(1, 1);
    CHECK(block_det_asymptotics(D).ratio == doctest::Approx(1.0).epsilon(1e-16));
    CHECK(block_inverse_check(D).c_diag == 0.0);

    // 2x2 closed form: ratio 1 - a^2/(l1 l2), alpha_12 = -a / (l1 l2 - a^2)
    BlockMatrix B;
    B.lambda = Eigen::VectorXd(2);
    B.lambda << 250.0, 9000.0;
    B.coupling = Eigen::MatrixXd::Zero(2, 2);
    B.coupling(0, 1) = B.coupling(1, 0) = 0.6;
    B.tail = Eigen::MatrixXd(0, 0);
    const auto det = block_det_asymptotics(B);
    CHECK(det.ratio == doctest::Approx(1.0 - 0.36 / (250.0 * 9000.0)).epsilon(1e-14));
    const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> Minv =
        B.assemble().inverse();
    CHECK(static_cast<double>(Minv(0, 1)) ==
          doctest::Approx(-0.6 / (250.0 * 9000.0 - 0.36)).epsilon(1e-14));

    // random ensemble: all four fitted classes stay bounded
    std::mt19937_64 rng(31);
    double cd = 0.0, ch = 0.0, cc = 0.0, ct = 0.0, cdet = 0.0;
    for (int i = 0; i < 400; ++i) {
        std::uniform_int_distribution<int> un(1, 5), um(0, 5);
        const BlockMatrix A = BlockMatrix::random(un(rng), um(rng), rng);
        const auto d = block_det_asymptotics(A);
        const auto inv = block_inverse_check(A);
        cdet = std::max(cdet, d.deviation / d.rho);
        cd = std::max(cd, inv.c_diag);
        ch = std::max(ch, inv.c_head);
        cc = std::max(cc, inv.c_cross);
        ct = std::max(ct, inv.c_tail);
    }
    CHECK(cdet < 1e3);
    CHECK(cd < 1e3);
    CHECK(ch < 1e3);
    CHECK(cc < 1e3);
    CHECK(ct < 1e3);

    BlockMatrix S = D;
    S.tail = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(block_det_asymptotics(S), InputError);
}

TEST_CASE("entry model and the exact normal form") {
    for (double k : {0.8, 3.0, 10.0}) {
        const std::complex<double> t = std::polar(std::exp(-k), 0.3);
        CHECK(wp_entry_model(t) * std::exp(-2.0 * k) * k * k * k ==
              doctest::Approx(kPi * kPi * kPi).epsilon(1e-14));
    }
    CHECK_THROWS_AS(wp_entry_model(0.0), InputError);
    CHECK_THROWS_AS(wp_entry_model(1.0), InputError);

    // radial, angular and mixed tangents
    const std::complex<double> t = std::polar(0.05, 1.2);
    const auto radial = normal_form_check(t, t);            // dt parallel to t: dtheta = 0
    CHECK(radial.residual <= 1e-12);
    const auto angular = normal_form_check(t, t * std::complex<double>(0.0, 1.0));
    CHECK(angular.residual <= 1e-12);

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uk(0.4, 30.0), uph(0.0, 2.0 * kPi), um(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::complex<double> tt = std::polar(std::exp(-uk(rng)), uph(rng));
        const std::complex<double> dt = std::polar(std::exp(um(rng)), uph(rng));
        worst = std::max(worst, normal_form_check(tt, dt).residual);
    }
    CHECK(worst <= 1e-10);
}
