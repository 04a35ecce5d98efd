#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cusplab/quotient.hpp"
#include "oracles.hpp"

using namespace cusplab;

TEST_CASE("clairaut: radial and turning solutions") {
    // dtheta = 0: radial, unit radial speed
    const auto rad = clairaut_connect(1.0, 0.5, 0.0);
    CHECK(rad.c == 0.0);
    CHECK(rad.length == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rad.monotone);

    // equal radii with one winding: positive constant, length below 2
    const auto res = clairaut_connect(1.0, 1.0, 1.0);
    CHECK(res.c > 0.0);
    CHECK(res.length < 2.0);
    CHECK_FALSE(res.monotone);
    CHECK(res.turning_radius == doctest::Approx(std::cbrt(res.c)).epsilon(1e-12));
    CHECK(res.endpoint_miss <= 1e-7);

    // conservation along the returned samples, measured from the stored
    // velocities of the integrated curve
    double dev = 0.0;
    for (int i = 0; i < res.curve.size(); ++i) {
        const auto& q = res.curve.points[static_cast<std::size_t>(i)];
        const auto& v = res.curve.velocities[static_cast<std::size_t>(i)];
        dev = std::max(dev, std::abs(std::pow(q[0], 6) * v[1] - res.c));
    }
    CHECK(dev <= 1e-8 * std::max(1.0, res.c));

    // cross-check against the generic polyline solver on the cover (the cover
    // is simply connected, so no winding-class bookkeeping is needed)
    const MetricModel cover = MetricModel::quotient_cover();
    ConnectOptions opts;
    opts.strategy = ConnectOptions::Strategy::Energy;
    const Curve poly = connect(cover, ChartPoint::polar(1.0, 0.0), ChartPoint::polar(1.0, 1.0), opts);
    CHECK(std::abs(curve_length(poly).length - res.length) <= 1e-4);

    CHECK_THROWS_AS(clairaut_connect(0.0, 1.0, 0.5), InputError);
}

TEST_CASE("clairaut: wide radius ratios and windings stay consistent") {
    // the integrated curve must land on the quadrature-predicted endpoint
    // across both branches, including monotone legs with c far below rlo^3
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ur(0.05, 1.9), uth(1e-4, 6.0);
    double worst = 0.0;
    for (int i = 0; i < 120; ++i) {
        const double r0 = ur(rng), r1 = ur(rng);
        const double dth = uth(rng) * (i % 2 ? 1.0 : -1.0);
        const auto res = clairaut_connect(r0, r1, dth);
        worst = std::max(worst, res.endpoint_miss);
        CHECK(res.length >= std::abs(r0 - r1) - 1e-9);  // radial projection
        CHECK(res.length <= r0 + r1 + 1e-9);            // through-cusp comparison
    }
    CHECK(worst <= 1e-7);

    // ODE cross-validation: integrating the returned initial velocity for the
    // returned length reproduces the endpoint
    const auto res = clairaut_connect(1.3, 0.4, 2.2);
    const MetricModel cover = MetricModel::quotient_cover();
    const auto ode = integrate_geodesic(
        cover, cover.unflatten(res.curve.points.front()),
        cover.unflatten_tangent(res.curve.velocities.front()), res.length);
    CHECK((ode.curve.points.back() - res.curve.points.back()).norm() <= 1e-8);
}

TEST_CASE("quotient distance: deck invariance and cusp handling") {
    const QuotientPoint p = QuotientPoint::make(0.4, 0.15);
    const QuotientPoint q = QuotientPoint::make(0.3, 0.75);
    // the deck map is theta -> theta + 1, already factored out by the
    // representative normalization
    const QuotientPoint Tp = QuotientPoint::make(0.4, 0.15 + 1.0);
    const QuotientPoint Tq = QuotientPoint::make(0.3, 0.75 + 1.0);
    CHECK(std::abs(quotient_distance(p, q) - quotient_distance(Tp, Tq)) <= 1e-10);

    CHECK(quotient_distance(p, QuotientPoint::make(0.0, 0.0)) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(quotient_distance(p, p) == 0.0);
    // never worse than the through-cusp path
    CHECK(quotient_distance(p, q) <= 0.7 + 1e-12);
}

TEST_CASE("linking loops: class one wins under the circle bound") {
    const auto loop = minimal_linking_loop(QuotientPoint::make(0.5, 0.2));
    CHECK(loop.length <= 0.125);
    CHECK(std::abs(loop.best_class) == 1);
    // lengths grow with the class and match under reflection
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
    for (const auto& cl : loop.classes) {
        if (cl.winding == 1) l1 = cl.length;
        if (cl.winding == 2) l2 = cl.length;
        if (cl.winding == 3) l3 = cl.length;
        for (const auto& cl2 : loop.classes)
            if (cl2.winding == -cl.winding) CHECK(std::abs(cl.length - cl2.length) <= 1e-8);
        // rigorous projection bounds: the radial and angular costs alone,
        // and the winding-forces-a-deep-dive bound
        CHECK(cl.length >= cl.radial_bound - 1e-9);
        CHECK(cl.length >= cl.winding_bound - 1e-9);
        CHECK(cl.length >= cl.dive_bound - 1e-9);
    }
    CHECK(l1 < l2);
    CHECK(l2 < l3);
    CHECK_THROWS_AS(minimal_linking_loop(QuotientPoint::make(0.0, 0.0)), InputError);
}

TEST_CASE("nonunique geodesics at the quotient cusp") {
    const auto res = nonunique_geodesics(QuotientPoint::make(0.2, 0.1), 6, 19);
    CHECK(std::abs(res.len1 - res.len2) <= 1e-6 * std::max(res.len1, res.len2));
    // identical endpoints in the quotient
    const auto& h1 = res.half1;
    const auto& h2 = res.half2;
    CHECK(h1.points.front()[0] == doctest::Approx(h2.points.front()[0]).epsilon(1e-12));
    CHECK(h1.points.back()[0] == doctest::Approx(h2.points.back()[0]).epsilon(1e-9));
    // distinct curves: they wind in opposite directions
    CHECK(res.separation >= res.separation_threshold);
    CHECK(res.certified);
}

TEST_CASE("polygonal paths and approximating concatenations") {
    PolygonalPath path;
    path.vertices = {ChartPoint::polar(1.0, 0.0), ChartPoint::polar(0.0, 0.0),
                     ChartPoint::polar(1.0, 0.0)};
    path.params = {0.0, 1.0, 2.0};
    CHECK(path.length_residual() <= 1e-6);
    CHECK(path.joint_labels_admissible());

    // all twists trivial: the concatenation is the vertex concatenation
    const Curve plain = approximating_concatenation(path, {0, 0});
    CHECK(plain.points.front()[1] == doctest::Approx(0.0));
    CHECK(plain.points.back()[1] == doctest::Approx(0.0));
    CHECK(curve_length(plain).length == doctest::Approx(2.0).epsilon(1e-9));

    // twists (0, n): endpoint carried to theta - n
    for (int n : {1, 5}) {
        const Curve tw = approximating_concatenation(path, {0, n});
        CHECK(tw.points.back()[1] == doctest::Approx(-static_cast<double>(n)).epsilon(1e-12));
        CHECK(curve_length(tw).length == doctest::Approx(2.0).epsilon(1e-9));
    }

    CHECK_THROWS_AS(approximating_concatenation(path, {0}), InputError);

    // twisting a joint whose vertex is off the stratum breaks continuity
    PolygonalPath bad;
    bad.vertices = {ChartPoint::polar(1.0, 0.0), ChartPoint::polar(0.5, 0.2),
                    ChartPoint::polar(1.0, 0.4)};
    bad.params = {0.0, 0.5, 1.0};
    CHECK_THROWS_AS(approximating_concatenation(bad, {0, 3}), InputError);
}

TEST_CASE("twist family: lengths, deficits, deviations") {
    const auto ex = geodesic_limit_experiment(QuotientPoint::make(1.0, 0.0),
                                              QuotientPoint::make(1.0, 0.0), 24);
    CHECK(ex.lengths_increasing);
    CHECK(ex.lengths_bounded);
    CHECK(ex.first_dev_monotone);
    CHECK(std::abs(ex.deficit_slope + 0.5) <= 0.1);
    CHECK(ex.rows.back().length < 2.0);
    // deficit * sqrt(n) settles to a constant
    const double d12 = (2.0 - ex.rows[11].length) * std::sqrt(12.0);
    const double d24 = (2.0 - ex.rows[23].length) * std::sqrt(24.0);
    CHECK(std::abs(d24 - d12) <= 0.1 * d12);

    // limit polygonal path bookkeeping
    CHECK(ex.limit_path.length_residual() <= 1e-6);
    CHECK(ex.limit_path.joint_labels_admissible());
    int max_twist = 0;
    for (const auto& tw : ex.twists)
        for (int m : tw) max_twist = std::max(max_twist, std::abs(m));
    CHECK(max_twist == 24);

    // asymmetric radii still converge from below to r0 + r1
    const auto ex2 = geodesic_limit_experiment(QuotientPoint::make(0.8, 0.3),
                                               QuotientPoint::make(1.3, 0.7), 12);
    CHECK(ex2.lengths_increasing);
    CHECK(ex2.lengths_bounded);
    CHECK(ex2.rows.back().length < 2.1);
}
