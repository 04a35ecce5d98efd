#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cusplab/metrics.hpp"
#include "oracles.hpp"

using namespace cusplab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("metric matrices: closed-form entries") {
    const MetricModel cusp1 = MetricModel::cuspidal_plane(1.0);
    Eigen::MatrixXd g = eval_metric(cusp1, ChartPoint::polar(1.0, 0.7));
    CHECK(g(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(g(1, 1) == doctest::Approx(1.0).epsilon(1e-15));

    // r^6 at r = 1/2 by independent arithmetic
    g = eval_metric(cusp1, ChartPoint::polar(0.5, -2.0));
    CHECK(g(1, 1) == doctest::Approx(0.5 * 0.5 * 0.5 * 0.5 * 0.5 * 0.5).epsilon(1e-15));
    CHECK(g(1, 1) == doctest::Approx(0.015625).epsilon(1e-15));

    const MetricModel flat = MetricModel::euclidean_block(1);
    CHECK(eval_metric(flat, ChartPoint::plane(3.0, -4.0)).isIdentity(1e-15));
}

TEST_CASE("metric matrices: degenerate direction at the cusp") {
    const MetricModel model = MetricModel::product_cuspidal(1, 2, 2.5);
    Eigen::VectorXd x(2), r(2), th(2);
    x << 0.1, 0.2;
    r << 0.0, 0.4;
    th << 1.0, 2.0;
    const Eigen::MatrixXd g = eval_metric(model, ChartPoint(x, r, th));
    CHECK(g(model.itheta(0), model.itheta(0)) == 0.0);  // literal zero row/column
    CHECK(g.row(model.itheta(0)).norm() == 0.0);
    CHECK(g(model.itheta(1), model.itheta(1)) > 0.0);
}

TEST_CASE("metric matrices: symmetric and positive definite on the smooth locus") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(0.05, 2.0), uth(-3.0, 3.0), ux(-2.0, 2.0);
    const auto models = {MetricModel::cuspidal_plane(0.7), MetricModel::product_cuspidal(1, 2, kPi * kPi * kPi),
                         MetricModel::perturbed_product(MetricModel::product_cuspidal(1, 1, 1.0), 0.1,
                                                        PerturbationProfile::named("cubic-wave")),
                         MetricModel::sphere_patch(2.0), MetricModel::quotient_cover()};
    for (const auto& model : models) {
        for (int trial = 0; trial < 1000; ++trial) {
            Eigen::VectorXd x(model.xdim()), r(model.n()), th(model.n());
            for (int i = 0; i < model.xdim(); ++i) x[i] = ux(rng);
            for (int k = 0; k < model.n(); ++k) {
                r[k] = model.kind() == MetricModel::Kind::SpherePatch ? 0.3 + ur(rng) : ur(rng);
                th[k] = uth(rng);
            }
            const Eigen::MatrixXd g = eval_metric(model, ChartPoint(x, r, th));
            REQUIRE((g - g.transpose()).norm() == 0.0);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
            REQUIRE(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("christoffel symbols: closed form against the finite-difference oracle") {
    const MetricModel model = MetricModel::cuspidal_plane(1.0);

    // r = 1: Gamma^r_tt = -3/4, Gamma^t_rt = 3
    auto g1 = christoffel(model, ChartPoint::polar(1.0, 0.0));
    CHECK(g1[0](1, 1) == doctest::Approx(-0.75).epsilon(1e-14));
    CHECK(g1[1](0, 1) == doctest::Approx(3.0).epsilon(1e-14));

    // r = 1/2: values from the oracle
    auto fd = oracles::christoffel_fd(model, ChartPoint::polar(0.5, 0.0));
    CHECK(fd[0](1, 1) == doctest::Approx(-0.0234375).epsilon(1e-7));
    CHECK(fd[1](0, 1) == doctest::Approx(6.0).epsilon(1e-9));
    auto g2 = christoffel(model, ChartPoint::polar(0.5, 0.0));
    CHECK(g2[0](1, 1) == doctest::Approx(-0.0234375).epsilon(1e-14));
    CHECK(g2[1](0, 1) == doctest::Approx(6.0).epsilon(1e-14));

    // sweep r in [0.05, 2]: max gap <= 1e-6, scale independence, lower symmetry
    for (double s : {1.0, 3.0}) {
        const MetricModel ms = MetricModel::cuspidal_plane(s);
        for (double r = 0.05; r <= 2.0; r += 0.065) {
            const ChartPoint p = ChartPoint::polar(r, 0.4);
            const auto closed = christoffel(ms, p);
            const auto oracle = oracles::christoffel_fd(ms, p);
            for (int i = 0; i < 2; ++i) {
                REQUIRE((closed[i] - closed[i].transpose()).norm() == 0.0);
                REQUIRE((closed[i] - oracle[i]).cwiseAbs().maxCoeff() <= 1e-6);
            }
            CHECK(closed[0](1, 1) == doctest::Approx(-0.75 * std::pow(r, 5)).epsilon(1e-12));
        }
    }

    CHECK_THROWS_AS(christoffel(model, ChartPoint::polar(0.0, 0.0)), SingularPointError);
    auto flat = christoffel(MetricModel::euclidean_block(2), ChartPoint(Eigen::VectorXd::Zero(4),
                                                                        Eigen::VectorXd(0),
                                                                        Eigen::VectorXd(0)));
    for (const auto& m : flat) CHECK(m.norm() == 0.0);

    // perturbed product: assembled symbols still match the oracle
    const MetricModel pert = MetricModel::perturbed_product(
        MetricModel::product_cuspidal(1, 1, 1.0), 0.1, PerturbationProfile::named("cubic-wave"));
    Eigen::VectorXd px(2), pr(1), pth(1);
    px << 0.4, -0.3;
    pr << 0.35;
    pth << 0.8;
    const ChartPoint pp(px, pr, pth);
    const auto closed_p = christoffel(pert, pp);
    const auto oracle_p = oracles::christoffel_fd(pert, pp);
    for (int i = 0; i < pert.dim(); ++i) {
        REQUIRE((closed_p[static_cast<std::size_t>(i)] -
                 closed_p[static_cast<std::size_t>(i)].transpose())
                    .norm() == 0.0);
        REQUIRE((closed_p[static_cast<std::size_t>(i)] - oracle_p[static_cast<std::size_t>(i)])
                    .cwiseAbs()
                    .maxCoeff() <= 1e-6);
    }
}

TEST_CASE("gaussian curvature: closed forms, Brioschi oracle, scaling law") {
    const MetricModel cusp = MetricModel::cuspidal_plane(1.0);
    CHECK(gaussian_curvature(cusp, ChartPoint::polar(1.0, 0.0)) ==
          doctest::Approx(-1.5).epsilon(1e-13));
    CHECK(gaussian_curvature(cusp, ChartPoint::polar(0.5, 0.0)) ==
          doctest::Approx(-6.0).epsilon(1e-13));
    CHECK(oracles::brioschi_fd(cusp, ChartPoint::polar(1.0, 0.3)) ==
          doctest::Approx(-1.5).epsilon(1e-6));
    CHECK(oracles::brioschi_fd(cusp, ChartPoint::polar(0.5, 0.3)) ==
          doctest::Approx(-6.0).epsilon(1e-6));

    CHECK(gaussian_curvature(MetricModel::sphere_patch(1.0), ChartPoint::polar(1.2, 0.0)) ==
          doctest::Approx(1.0).epsilon(1e-13));
    CHECK(oracles::brioschi_fd(MetricModel::sphere_patch(1.0), ChartPoint::polar(1.2, 0.0)) ==
          doctest::Approx(1.0).epsilon(1e-6));

    for (double s : {0.3, 2.0, 17.0}) {
        const MetricModel ms = MetricModel::cuspidal_plane(s);
        for (double r : {0.1, 0.7, 1.9}) {
            const double K1 = gaussian_curvature(cusp, ChartPoint::polar(r, 0.0));
            const double Ks = gaussian_curvature(ms, ChartPoint::polar(r, 0.0));
            CHECK(Ks == doctest::Approx(K1 / s).epsilon(1e-8));
        }
    }
    CHECK_THROWS_AS(gaussian_curvature(MetricModel::product_cuspidal(1, 1, 1.0),
                                       ChartPoint(Eigen::VectorXd::Zero(2),
                                                  Eigen::VectorXd::Constant(1, 0.5),
                                                  Eigen::VectorXd::Zero(1))),
                    InputError);
}

TEST_CASE("annulus density: values, degeneration, domain") {
    // Theta = pi/2 at |z| = e^{-5}, |t| = e^{-10}
    CHECK(annulus_density(std::exp(-10.0), std::exp(-5.0)) ==
          doctest::Approx((kPi / 10.0) * std::exp(5.0)).epsilon(1e-14));
    // cusp branch at |z| = 1/e
    CHECK(annulus_density(0.0, std::exp(-1.0)) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));

    // pointwise monotone decrease to the cusp branch as |t| -> 0
    const double z = std::exp(-1.0);
    const double limit = annulus_density(0.0, z);
    double prev = std::numeric_limits<double>::infinity();
    for (double k = 3.0; k < 2e5; k *= 1.4) {
        const double d = annulus_density(std::exp(-k), z);
        CHECK(d >= limit);
        CHECK(d <= prev);
        prev = d;
    }
    // Theta csc Theta - 1 decays like Theta^2/6
    CHECK(prev == doctest::Approx(limit).epsilon(1e-8));

    CHECK_THROWS_AS(annulus_density(0.5, 0.4), InputError);   // |z| < |t|
    CHECK_THROWS_AS(annulus_density(0.0, 1.0), InputError);   // |z| = 1
    CHECK_THROWS_AS(annulus_density(0.0, 0.0), InputError);
}

TEST_CASE("density series: remainder dominated by the next term") {
    // limits
    const auto tiny = density_series_check(1e-6);
    CHECK(tiny.exact == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(tiny.residual) <= 2e-36 + 1e-15);

    const auto s01 = density_series_check(0.1);
    const double csc = 1.0 / std::sin(0.1);
    CHECK(s01.exact == doctest::Approx(0.01 * csc * csc).epsilon(1e-15));
    CHECK(s01.exact == doctest::Approx(1.0033400).epsilon(1e-7));
    CHECK(std::abs(s01.residual) <= 2.0 * std::pow(0.1, 6));

    const auto shalf = density_series_check(kPi / 2.0);
    CHECK(shalf.exact == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-15));

    for (double th = 0.01; th <= 0.3 + 1e-12; th += 0.01)
        CHECK(std::abs(density_series_check(th).residual) <= 2.0 * std::pow(th, 6));

    CHECK_THROWS_AS(density_series_check(0.0), InputError);
    CHECK_THROWS_AS(density_series_check(kPi), InputError);
}

TEST_CASE("surface of revolution: first fundamental form comparison") {
    CHECK(revolution_surface_compare(0.0).rr_ratio == 1.0);
    CHECK(revolution_surface_compare(0.1).rr_ratio ==
          doctest::Approx(1.0 + 9.0 * std::pow(0.2, 4) / 64.0).epsilon(1e-15));
    CHECK(revolution_surface_compare(0.1).rr_ratio == doctest::Approx(1.000225).epsilon(1e-12));
    for (double r : {0.0, 0.3, 1.0, 2.5}) CHECK(revolution_surface_compare(r).thth_ratio == 1.0);
    CHECK_THROWS_AS(revolution_surface_compare(-0.1), InputError);
}

TEST_CASE("perturbed product: ratio bounded by eps C |r|^3") {
    const auto prof = PerturbationProfile::named("cubic-wave");
    const MetricModel base = MetricModel::product_cuspidal(1, 2, 1.0);
    const double eps = 0.07;
    const MetricModel pert = MetricModel::perturbed_product(base, eps, prof);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ur(0.01, 0.9), uth(-4.0, 4.0), ux(-2.0, 2.0);
    for (int trial = 0; trial < 500; ++trial) {
        Eigen::VectorXd x(2), r(2), th(2);
        x << ux(rng), ux(rng);
        r << ur(rng), ur(rng);
        th << uth(rng), uth(rng);
        const ChartPoint p(x, r, th);
        const Eigen::MatrixXd gb = eval_metric(base, p);
        const Eigen::MatrixXd gp = eval_metric(pert, p);
        const double bound = eps * prof.bound * std::pow(r.norm(), 3);
        for (int i = 0; i < gb.rows(); ++i) {
            if (gb(i, i) == 0.0) continue;
            CHECK(std::abs(gp(i, i) / gb(i, i) - 1.0) <= bound + 1e-12);
        }
    }
}

TEST_CASE("profiles without analytic gradients fall back to differences") {
    PerturbationProfile prof;
    prof.name = "custom";
    prof.bound = 1.5;
    prof.value = [](std::span<const double>, std::span<const double> r,
                    std::span<const double> th) {
        double s = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k)
            s += r[k] * r[k] * r[k] * (1.0 + 0.5 * std::sin(th[k]));
        return s;
    };
    const MetricModel pert = MetricModel::perturbed_product(
        MetricModel::product_cuspidal(1, 1, 1.0), 0.2, prof);
    Eigen::VectorXd x(2), r(1), th(1);
    x << 0.3, -0.2;
    r << 0.4;
    th << 0.9;
    const ChartPoint p(x, r, th);
    const auto closed = christoffel(pert, p);
    const auto oracle = oracles::christoffel_fd(pert, p);
    for (int i = 0; i < pert.dim(); ++i)
        CHECK((closed[static_cast<std::size_t>(i)] - oracle[static_cast<std::size_t>(i)])
                  .cwiseAbs()
                  .maxCoeff() <= 1e-6);
}

TEST_CASE("input validation") {
    const MetricModel model = MetricModel::product_cuspidal(1, 1, 1.0);
    CHECK_THROWS_AS(eval_metric(model, ChartPoint::polar(0.5, 0.0)), InputError);  // wrong dims
    Eigen::VectorXd x(2), r(1), th(1);
    x << 0.0, 0.0;
    r << -0.1;
    th << 0.0;
    CHECK_THROWS_AS(eval_metric(model, ChartPoint(x, r, th)), InputError);  // r < 0
    CHECK_THROWS_AS(MetricModel::cuspidal_plane(0.0), InputError);
    CHECK_THROWS_AS(MetricModel::cuspidal_plane(-1.0), InputError);
    CHECK_THROWS_AS(PerturbationProfile::named("nope"), InputError);
}
