#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cusplab/cat0.hpp"

using namespace cusplab;

namespace {
constexpr double kPi = 3.14159265358979323846;

ChartPoint plane4(double a, double b, double c, double d) {
    Eigen::VectorXd x(4);
    x << a, b, c, d;
    return ChartPoint(x, Eigen::VectorXd(0), Eigen::VectorXd(0));
}
} // namespace

TEST_CASE("comparison triangles: law of cosines layout") {
    const auto t = ComparisonTriangle::from_lengths(3.0, 4.0, 5.0);
    CHECK(t.v[0].norm() == 0.0);
    CHECK(t.v[1].y() == 0.0);
    // right angle opposite the 5-side sits at the origin vertex
    CHECK(std::abs((t.v[1] - t.v[0]).dot(t.v[2] - t.v[0])) <= 1e-12);

    // side lengths reproduced to 1e-12
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 200; ++i) {
        double a = u(rng), b = u(rng), c = u(rng);
        if (a > b + c) a = b + c;
        if (b > a + c) b = a + c;
        if (c > a + b) c = a + b;
        const auto tt = ComparisonTriangle::from_lengths(a, b, c);
        CHECK(std::abs((tt.v[1] - tt.v[0]).norm() - a) <= 1e-12);
        CHECK(std::abs((tt.v[2] - tt.v[0]).norm() - b) <= 1e-12);
        CHECK(std::abs((tt.v[2] - tt.v[1]).norm() - c) <= 1e-12);
    }

    // collinear degenerate accepted, genuine violation rejected
    CHECK_NOTHROW(ComparisonTriangle::from_lengths(1.0, 2.0, 3.0));
    CHECK_THROWS_AS(ComparisonTriangle::from_lengths(1.0, 1.0, 3.0), InputError);
}

TEST_CASE("cat0 slack: flat equality, negative curvature surplus, spherical violation") {
    const MetricModel flat = MetricModel::euclidean_block(2);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 5; ++i) {
        const auto tri = make_triangle(flat, plane4(u(rng), u(rng), u(rng), u(rng)),
                                       plane4(u(rng), u(rng), u(rng), u(rng)),
                                       plane4(u(rng), u(rng), u(rng), u(rng)));
        const auto chk = cat0_check(flat, tri, 5);
        CHECK(std::abs(chk.min_slack) <= 1e-8);
        CHECK(chk.skipped == 0);
    }

    const MetricModel cusp = MetricModel::cuspidal_plane(1.0);
    std::uniform_real_distribution<double> ur(0.5, 1.5), uth(0.0, 0.4);
    for (int i = 0; i < 5; ++i) {
        const auto tri = make_triangle(cusp, ChartPoint::polar(ur(rng), uth(rng)),
                                       ChartPoint::polar(ur(rng), uth(rng)),
                                       ChartPoint::polar(ur(rng), uth(rng)));
        const auto chk = cat0_check(cusp, tri, 7);
        CHECK(chk.min_slack >= -1e-6);
    }

    const MetricModel sph = MetricModel::sphere_patch(1.0);
    const auto tri = make_triangle(sph, ChartPoint::polar(1.0, 0.0), ChartPoint::polar(2.1, 1.2),
                                   ChartPoint::polar(0.9, 1.5));
    const auto chk = cat0_check(sph, tri, 7);
    CHECK(chk.min_slack < -1e-6);  // fat spherical triangle detected
}

TEST_CASE("alexandrov angles") {
    const MetricModel flat = MetricModel::euclidean_block(1);
    const auto perp = alexandrov_angle(flat, ChartPoint::plane(0, 0), ChartPoint::plane(1, 0),
                                       ChartPoint::plane(0, 1));
    CHECK(perp.angle == doctest::Approx(kPi / 2.0).epsilon(1e-9));
    const auto ray = alexandrov_angle(flat, ChartPoint::plane(0, 0), ChartPoint::plane(1, 0),
                                      ChartPoint::plane(2, 0));
    CHECK(std::abs(ray.angle) <= 1e-9);

    const auto ang = alexandrov_angle(MetricModel::cuspidal_plane(1.0), ChartPoint::polar(1.0, 0.0),
                                      ChartPoint::polar(1.4, 0.3), ChartPoint::polar(0.7, 0.5));
    CHECK(ang.monotone);
    CHECK(ang.stabilized);
    for (std::size_t j = 1; j < ang.table.size(); ++j)
        CHECK(ang.table[j].second <= ang.table[j - 1].second + 1e-6);
}

TEST_CASE("convexity of displacement") {
    const MetricModel flat = MetricModel::euclidean_block(1);
    Curve a = Curve::segment(flat, ChartPoint::plane(0, 0), ChartPoint::plane(1, 0), 9);
    Curve b = Curve::segment(flat, ChartPoint::plane(0, 1), ChartPoint::plane(1, 1), 9);
    a.proportional_arclength = b.proportional_arclength = true;
    const auto flatres = convexity_check(flat, a, b);
    CHECK(std::abs(flatres.min_second_difference) <= 1e-12);
    CHECK(std::abs(flatres.max_second_difference) <= 1e-12);

    const MetricModel cusp = MetricModel::cuspidal_plane(1.0);
    const Curve g1 = connect(cusp, ChartPoint::polar(1.2, 0.0), ChartPoint::polar(0.8, 0.2));
    const Curve g2 = connect(cusp, ChartPoint::polar(1.1, 0.9), ChartPoint::polar(0.7, 1.2));
    const auto res = convexity_check(cusp, g1, g2);
    CHECK(res.min_second_difference > 0.0);  // strictly convex witness

    const MetricModel sph = MetricModel::sphere_patch(1.0);
    const Curve s1 = connect(sph, ChartPoint::polar(0.6, 0.0), ChartPoint::polar(2.4, 0.25));
    const Curve s2 = connect(sph, ChartPoint::polar(0.6, kPi), ChartPoint::polar(2.4, kPi - 0.25));
    CHECK(convexity_check(sph, s1, s2).min_second_difference < 0.0);
}

TEST_CASE("flat triangles: verdicts and factor projections") {
    const MetricModel flat = MetricModel::euclidean_block(2);
    const auto tri = make_triangle(flat, plane4(0, 0, 0, 0), plane4(1, 0, 0.5, 0),
                                   plane4(0.3, 0.6, 0.2, 0.4));
    const auto chk = flat_triangle_check(flat, tri);
    CHECK(chk.flat);
    CHECK(chk.factor_projections_geodesic);

    const MetricModel cusp = MetricModel::cuspidal_plane(1.0);
    const auto tric = make_triangle(cusp, ChartPoint::polar(0.6, 0.0), ChartPoint::polar(1.4, 0.1),
                                    ChartPoint::polar(1.0, 0.6));
    const auto chkc = flat_triangle_check(cusp, tric);
    CHECK_FALSE(chkc.flat);
    CHECK(chkc.max_deviation > 1e-3);

    // cross-check: flat verdict iff all three displacement functions linear
    CHECK(chk.max_deviation <= chk.tol);
}

TEST_CASE("thinness: inradius of scaled flats") {
    const MetricModel flat = MetricModel::euclidean_block(2);
    const auto eq = thinness_probe(flat, 1.0, 1.0);
    CHECK(eq.unit_insize == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));
    CHECK(eq.smallest_scale_exceeding == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-10));

    const auto eq2 = thinness_probe(flat, 1.0, 2.0);
    CHECK(eq2.insize == doctest::Approx(2.0 * eq.insize).epsilon(1e-12));

    // planar computational-geometry oracle for the right isosceles triangle:
    // grid search for the deepest interior point
    const std::array<Eigen::Vector2d, 3> shape = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0),
                                                  Eigen::Vector2d(0, 1)};
    auto seg_dist = [](const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b) {
        const Eigen::Vector2d d = b - a;
        const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
        return (p - (a + t * d)).norm();
    };
    double best = 0.0;
    const int G = 400;
    for (int i = 1; i < G; ++i)
        for (int j = 1; j < G - i; ++j) {
            const Eigen::Vector2d p(static_cast<double>(i) / G, static_cast<double>(j) / G);
            const double d = std::min({seg_dist(p, shape[0], shape[1]),
                                       seg_dist(p, shape[1], shape[2]),
                                       seg_dist(p, shape[2], shape[0])});
            best = std::max(best, d);
        }
    const auto ri = thinness_probe(flat, 1.0, 1.0, shape);
    CHECK(ri.insize == doctest::Approx(best).epsilon(5e-3));  // grid oracle is O(1/G)
    CHECK(ri.insize == doctest::Approx(0.5 / (1.0 + std::sqrt(0.5))).epsilon(1e-8));
}

TEST_CASE("maximal flat rank: closed form equals the decomposition search") {
    CHECK(max_flat_rank(2, 0) == 2);
    CHECK(max_flat_rank(1, 1) == 1);
    CHECK(max_flat_rank(0, 6) == 2);
    CHECK(max_flat_rank_search(0, 6) == 2);

    for (int g = 0; g <= 3; ++g)
        for (int n = 0; n <= 9; ++n) {
            const int cx = 3 * g - 3 + n;
            if (cx < 1 || cx > 6) continue;
            CHECK(max_flat_rank(g, n) == max_flat_rank_search(g, n));
        }

    CHECK_THROWS_AS(max_flat_rank(0, 3), InputError);
    CHECK_THROWS_AS(max_flat_rank_search(1, 0), InputError);
}
