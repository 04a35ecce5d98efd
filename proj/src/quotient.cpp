#include "cusplab/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace cusplab {

namespace {

// 1 - c^2 / r^6 evaluated stably; near the turning point rmin = |c|^{1/3} the
// distance-to-endpoint xc is used to avoid cancellation.
double one_minus_c2r6(double c, double r) {
    return -std::expm1(6.0 * (std::log(std::abs(c)) / 3.0 - std::log(r)));
}

// One monotone leg of a geodesic with Clairaut constant c between radii
// a < b (a >= rmin = |c|^{1/3}).  The leg is split where c^2/r^6 = 1/2:
// below the split the substitution u^2 = 1 - (rmin/r)^6 removes the
// inverse-square-root turning singularity,
//   dtheta-leg = (1/(3 rmin^2)) int (1-u^2)^{-1/6} du
//   length-leg = (rmin/3)      int (1-u^2)^{-7/6} du
// over u in [u(a), u(r)] subset [0, 2^{-1/2}]; above the split the raw
// integrands in r are smooth with (1 - c^2/r^6)^{-1/2} <= sqrt(2) and go to
// adaptive Gauss-Kronrod.  (A single u-parameterization would compress the
// far region into a boundary layer at u = 1 and lose digits.)
struct Legs {
    double c;

    // u at radius x: sqrt(1 - (rmin/x)^6), computed without cancellation
    static double u_at(double rmin, double x) {
        return std::sqrt(std::max(0.0, -std::expm1(6.0 * (std::log(rmin) - std::log(x)))));
    }

    template <typename PowerU, typename FarR>
    double leg(double a, double b, PowerU pw, FarR far) const {
        if (!(b > a)) return 0.0;
        const double rmin = std::cbrt(std::abs(c));
        const double rs = rmin * std::pow(2.0, 1.0 / 6.0);
        double total = 0.0;
        if (a < rs) {
            const double top = std::min(rs, b);
            const double ua = a <= rmin ? 0.0 : u_at(rmin, a);
            const double ub = u_at(rmin, top);
            boost::math::quadrature::tanh_sinh<double> integ;
            auto f = [&](double u) {
                const double w = std::max(1.0 - u * u, 1e-300);
                return pw(w);
            };
            total += integ.integrate(f, ua, ub, 1e-12);
        }
        if (b > rs) {
            const double lo = std::max(rs, a);
            double err = 0.0;
            total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                far, lo, b, 12, 1e-13, &err);
        }
        return total;
    }

    double theta(double a, double b) const {
        const double rmin = std::cbrt(std::abs(c));
        const double cc = std::abs(c);
        const double sign = c >= 0.0 ? 1.0 : -1.0;
        auto pw = [&](double w) { return std::pow(w, -1.0 / 6.0) / (3.0 * rmin * rmin); };
        auto far = [&](double r) {
            return (cc / std::pow(r, 6)) / std::sqrt(one_minus_c2r6(cc, r));
        };
        return sign * leg(a, b, pw, far);
    }
    double length(double a, double b) const {
        const double rmin = std::cbrt(std::abs(c));
        const double cc = std::abs(c);
        auto pw = [&](double w) { return (rmin / 3.0) * std::pow(w, -7.0 / 6.0); };
        auto far = [&](double r) { return 1.0 / std::sqrt(one_minus_c2r6(cc, r)); };
        return leg(a, b, pw, far);
    }
};

// total winding of the down-up profile with turning radius c^{1/3}
double winding_downup(double c, double r0, double r1) {
    const double rmin = std::cbrt(c);
    Legs lg{c};
    return lg.theta(rmin, r0) + lg.theta(rmin, r1);
}

double winding_monotone(double c, double r0, double r1) {
    Legs lg{c};
    return lg.theta(std::min(r0, r1), std::max(r0, r1));
}

Curve integrate_cover_geodesic(double r0, double theta0, double c, double rdir, double L) {
    const MetricModel cover = MetricModel::quotient_cover();
    const double tp = c / std::pow(r0, 6);
    const double w = std::max(0.0, one_minus_c2r6(c, r0));
    TangentVector v = TangentVector::polar(rdir * std::sqrt(w), tp);
    if (c == 0.0) v = TangentVector::polar(rdir, 0.0);
    IntegrateOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-12;
    opts.initial_dt = std::min(1e-3, L / 16.0);
    auto res = integrate_geodesic(cover, ChartPoint::polar(r0, theta0), v, L, opts);
    return std::move(res.curve);
}

} // namespace

QuotientPoint QuotientPoint::make(double r, double theta) {
    if (!(r >= 0.0) || !std::isfinite(r) || !std::isfinite(theta))
        throw InputError("QuotientPoint: need finite r >= 0");
    QuotientPoint p;
    p.r = r;
    p.theta = r == 0.0 ? 0.0 : theta - std::floor(theta);
    return p;
}

ClairautResult clairaut_connect(double r0, double r1, double dtheta, double theta0,
                                bool build_curve) {
    if (!(r0 > 0.0) || !(r1 > 0.0))
        throw InputError("clairaut_connect: need r0, r1 > 0");

    ClairautResult out;
    const double sign = dtheta >= 0.0 ? 1.0 : -1.0;
    const double target = std::abs(dtheta);
    const double rlo = std::min(r0, r1);
    const double rhi = std::max(r0, r1);

    if (target < 1e-14) {
        // radial segment
        out.c = 0.0;
        out.length = std::abs(r0 - r1);
        out.monotone = true;
        out.turning_radius = rlo;
        if (!build_curve) return out;
        if (out.length == 0.0) {
            out.curve = Curve::segment(MetricModel::quotient_cover(), ChartPoint::polar(r0, theta0),
                                       ChartPoint::polar(r1, theta0), 2);
            out.curve.proportional_arclength = true;
            return out;
        }
        out.curve = integrate_cover_geodesic(r0, theta0, 0.0, r1 > r0 ? 1.0 : -1.0, out.length);
        out.endpoint_miss = std::abs(out.curve.points.back()[0] - r1);
        return out;
    }

    const double clim = rlo * rlo * rlo;
    // winding of the limit monotone profile (c -> rlo^3)
    const double wlim = r0 == r1 ? 0.0 : winding_monotone(clim * (1.0 - 1e-13), r0, r1);
    const std::uintmax_t max_iter_budget = 200;

    if (r0 != r1 && target < wlim) {
        // monotone branch: winding increases with c on (0, rlo^3)
        auto f = [&](double c) { return winding_monotone(c, r0, r1) - target; };
        double lo = clim * 1e-6;
        while (f(lo) > 0.0 && lo > 1e-280) lo *= 1e-3;
        std::uintmax_t it = max_iter_budget;
        auto sol = boost::math::tools::toms748_solve(
            f, lo, clim * (1.0 - 1e-13), boost::math::tools::eps_tolerance<double>(50), it);
        out.c = 0.5 * (sol.first + sol.second);
        out.monotone = true;
        out.turning_radius = rlo;
        Legs lg{out.c};
        out.length = lg.length(rlo, rhi);
    } else {
        // down-up branch: winding decreases with c on (0, rlo^3)
        auto f = [&](double c) { return winding_downup(c, r0, r1) - target; };
        double lo = clim * 0.5;
        while (f(lo) < 0.0 && lo > 1e-280) lo *= 0.5;
        double hi = clim * (1.0 - 1e-13);
        std::uintmax_t it = max_iter_budget;
        auto sol = boost::math::tools::toms748_solve(
            [&](double c) { return -f(c); }, lo, hi,
            boost::math::tools::eps_tolerance<double>(50), it);
        out.c = 0.5 * (sol.first + sol.second);
        out.monotone = false;
        out.turning_radius = std::cbrt(out.c);
        Legs lg{out.c};
        out.length = lg.length(out.turning_radius, r0) + lg.length(out.turning_radius, r1);
    }

    if (build_curve) {
        // Integrate from the higher-radius endpoint, where |r'| = (1-c^2/r^6)^{1/2}
        // stays away from zero.  Starting tangent to the turning circle (the
        // low endpoint of a near-limit monotone profile) is branch-unstable.
        if (r0 >= r1) {
            out.curve = integrate_cover_geodesic(r0, theta0, out.c, -1.0, out.length);
        } else {
            Curve rev =
                integrate_cover_geodesic(r1, theta0 + target, -out.c, -1.0, out.length);
            Curve fwd;
            fwd.model = rev.model;
            fwd.proportional_arclength = true;
            for (int i = rev.size() - 1; i >= 0; --i) {
                fwd.params.push_back(out.length - rev.params[static_cast<std::size_t>(i)]);
                fwd.points.push_back(rev.points[static_cast<std::size_t>(i)]);
                fwd.velocities.push_back(-rev.velocities[static_cast<std::size_t>(i)]);
            }
            out.curve = std::move(fwd);
        }
    }

    // mirror for negative winding
    if (sign < 0.0) {
        for (auto& pt : out.curve.points) pt[1] = 2.0 * theta0 - pt[1];
        for (auto& vv : out.curve.velocities) vv[1] = -vv[1];
        out.c = -out.c;
    }
    if (!build_curve) return out;
    const Eigen::VectorXd& end = out.curve.points.back();
    const Eigen::VectorXd& start = out.curve.points.front();
    out.endpoint_miss =
        std::max({std::abs(end[0] - r1), std::abs(start[0] - r0),
                  std::abs(end[1] - (theta0 + dtheta)) * std::pow(rlo, 3),
                  std::abs(start[1] - theta0) * std::pow(rlo, 3)});
    if (out.endpoint_miss > 1e-6 * std::max(1.0, rhi))
        throw SolverError("clairaut_connect: integrated endpoint mismatch", out.endpoint_miss);
    return out;
}

double quotient_distance(const QuotientPoint& a, const QuotientPoint& b) {
    if (a.is_origin() && b.is_origin()) return 0.0;
    if (a.is_origin()) return b.r;
    if (b.is_origin()) return a.r;
    double best = a.r + b.r;  // through the cusp
    double base = b.theta - a.theta;
    base -= std::round(base);  // representative in [-1/2, 1/2]
    for (int k = -1; k <= 1; ++k) {
        const double dth = base + k;
        try {
            const auto res = clairaut_connect(a.r, b.r, dth, 0.0, /*build_curve=*/false);
            best = std::min(best, res.length);
        } catch (const std::exception&) {
            // class skipped; the through-cusp bound stands
        }
    }
    return best;
}

double PolygonalPath::length_residual() const {
    const MetricModel cover = MetricModel::quotient_cover();
    double worst = 0.0;
    for (int j = 0; j + 1 < static_cast<int>(vertices.size()); ++j) {
        const ChartPoint& a = vertices[static_cast<std::size_t>(j)];
        const ChartPoint& b = vertices[static_cast<std::size_t>(j + 1)];
        double L;
        if (a.r[0] == 0.0 || b.r[0] == 0.0 || a.theta[0] == b.theta[0]) {
            L = curve_length(Curve::segment(cover, a, b, 2)).length;
        } else {
            L = clairaut_connect(a.r[0], b.r[0], b.theta[0] - a.theta[0], a.theta[0]).length;
        }
        worst = std::max(worst, std::abs(L - (params[static_cast<std::size_t>(j + 1)] -
                                              params[static_cast<std::size_t>(j)])));
    }
    return worst;
}

bool PolygonalPath::joint_labels_admissible() const {
    const MetricModel cover = MetricModel::quotient_cover();
    const int k = segments();
    for (int j = 0; j + 1 < k; ++j) {
        // interior vertex v_{j+1}: the adjacent-segment label
        // tau = label(v_j) ^ label(v_{j+1}) must strictly precede label(v_{j+1})
        const StratumLabel lj = label(cover, vertices[static_cast<std::size_t>(j)]);
        const StratumLabel lj1 = label(cover, vertices[static_cast<std::size_t>(j + 1)]);
        const StratumLabel tau = lj.intersect(lj1);
        if (!(tau.precedes(lj1) && tau.mask != lj1.mask)) return false;
    }
    return true;
}

Curve approximating_concatenation(const PolygonalPath& path, const TwistSequence& twists) {
    if (static_cast<int>(twists.size()) != path.segments())
        throw InputError("approximating_concatenation: one twist per segment required");
    const MetricModel cover = MetricModel::quotient_cover();

    Curve out;
    out.model = cover;
    double t_acc = 0.0;
    int twist_acc = 0;
    Eigen::VectorXd prev_end;
    for (int j = 0; j < path.segments(); ++j) {
        twist_acc += twists[static_cast<std::size_t>(j)];
        const ChartPoint& a0 = path.vertices[static_cast<std::size_t>(j)];
        const ChartPoint& b0 = path.vertices[static_cast<std::size_t>(j + 1)];
        // deck transform T^{-twist_acc}
        auto shift = [&](const ChartPoint& p) {
            ChartPoint q = p;
            if (q.r[0] > 0.0) q.theta[0] -= twist_acc;
            return q;
        };
        const ChartPoint a = shift(a0), b = shift(b0);
        Curve seg;
        if (a.r[0] == 0.0 || b.r[0] == 0.0) {
            ChartPoint aa = a, bb = b;
            if (aa.r[0] == 0.0) aa.theta[0] = bb.theta[0];
            if (bb.r[0] == 0.0) bb.theta[0] = aa.theta[0];
            seg = Curve::segment(cover, aa, bb, 17);
        } else {
            seg = clairaut_connect(a.r[0], b.r[0], b.theta[0] - a.theta[0], a.theta[0]).curve;
        }
        if (j > 0) {
            // at the cusp every theta names the same point
            const Eigen::VectorXd& s0 = seg.points.front();
            const double jump = (s0[0] <= 1e-12 && prev_end[0] <= 1e-12)
                                    ? std::abs(s0[0] - prev_end[0])
                                    : (s0 - prev_end).norm();
            if (jump > 1e-9)
                throw InputError("approximating_concatenation: twisted joints do not meet");
        }
        const double Lseg = curve_length(seg).length;
        for (int i = (j == 0 ? 0 : 1); i < seg.size(); ++i) {
            const double frac = seg.params[static_cast<std::size_t>(i)] /
                                std::max(seg.params.back(), 1e-300);
            out.params.push_back(t_acc + frac * Lseg);
            out.points.push_back(seg.points[static_cast<std::size_t>(i)]);
        }
        prev_end = seg.points.back();
        t_acc += Lseg;
    }
    out.proportional_arclength = true;
    return out;
}

LimitExperiment geodesic_limit_experiment(const QuotientPoint& p0, const QuotientPoint& p1,
                                          int nmax, double collar_frac) {
    if (!(p0.r > 0.0) || !(p1.r > 0.0))
        throw InputError("geodesic_limit_experiment: base points must be off the cusp");
    if (nmax < 2) throw InputError("geodesic_limit_experiment: need nmax >= 2");

    LimitExperiment out;
    const double r0 = p0.r, r1 = p1.r;
    const double rcut = collar_frac * std::min(r0, r1);
    double prev_len = -1.0, prev_dev = std::numeric_limits<double>::infinity();
    std::vector<double> ns, deficits;
    for (int n = 1; n <= nmax; ++n) {
        const double dth = n + (p1.theta - p0.theta);
        const auto res = clairaut_connect(r0, r1, dth, p0.theta, /*build_curve=*/false);
        Legs lg{res.c};
        LimitRow row;
        row.n = n;
        row.c = res.c;
        row.length = res.length;
        const double lo = std::max(res.turning_radius, rcut);
        row.dev_first = lg.theta(lo, r0);
        row.dev_second = lg.theta(lo, r1);
        out.rows.push_back(row);

        if (row.length <= prev_len) out.lengths_increasing = false;
        if (!(row.length < r0 + r1)) out.lengths_bounded = false;
        if (row.dev_first > prev_dev + 1e-12) out.first_dev_monotone = false;
        prev_len = row.length;
        prev_dev = row.dev_first;
        if (n >= std::max(4, nmax / 8)) {
            ns.push_back(n);
            deficits.push_back(r0 + r1 - row.length);
        }
        out.twists.push_back({0, -n});  // untwisting the second segment needs T^{+n}
    }

    // least squares slope of log deficit vs log n over the asymptotic range
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double lx = std::log(ns[i]), ly = std::log(std::max(deficits[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(ns.size());
    out.deficit_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    out.limit_path.vertices = {ChartPoint::polar(r0, p0.theta), ChartPoint::polar(0.0, 0.0),
                               ChartPoint::polar(r1, p1.theta)};
    out.limit_path.params = {0.0, r0, r0 + r1};
    return out;
}

LinkingLoop minimal_linking_loop(const QuotientPoint& p, int max_class) {
    if (!(p.r > 0.0)) throw InputError("minimal_linking_loop: need r > 0");
    if (max_class < 1) throw InputError("minimal_linking_loop: need max_class >= 1");
    LinkingLoop out;
    out.circle_bound = std::pow(p.r, 3);
    double best = std::numeric_limits<double>::infinity();
    for (int cls = 1; cls <= max_class; ++cls) {
        for (int sgn : {+1, -1}) {
            const auto res = clairaut_connect(p.r, p.r, sgn * cls, p.theta);
            LinkingClass record;
            record.winding = sgn * cls;
            record.length = res.length;
            record.turning_radius = res.turning_radius;
            record.radial_bound = 2.0 * (p.r - res.turning_radius);
            record.winding_bound = cls * std::pow(res.turning_radius, 3);
            record.dive_bound = 2.0 * (p.r - std::cbrt(2.0 * p.r / cls));
            out.classes.push_back(record);
            if (res.length < best) {
                best = res.length;
                out.best_class = sgn * cls;
                out.loop = res.curve;
                out.length = res.length;
            }
        }
    }
    return out;
}

NonUniqueResult nonunique_geodesics(const QuotientPoint& p, int perturbations,
                                    std::uint64_t seed) {
    if (!(p.r > 0.0) || p.r > 0.5)
        throw InputError("nonunique_geodesics: need 0 < r <= 0.5");
    const MetricModel cover = MetricModel::quotient_cover();

    const auto res = clairaut_connect(p.r, p.r, 1.0, p.theta);
    const double rmin = res.turning_radius;

    NonUniqueResult out;
    out.midpoint = QuotientPoint::make(rmin, p.theta + 0.5);

    // bisect the loop at its arc midpoint (the turning point, by symmetry)
    const int M = 257;
    auto slice = [&](double u0, double u1) {
        Curve c;
        c.model = cover;
        for (int i = 0; i < M; ++i) {
            const double u = u0 + (u1 - u0) * static_cast<double>(i) / (M - 1);
            c.params.push_back(static_cast<double>(i) / (M - 1));
            c.points.push_back(res.curve.at_param(u * res.length));
        }
        c.proportional_arclength = true;
        return c;
    };
    out.half1 = slice(0.0, 0.5);
    // second half runs q -> T p; reverse and shift by T^{-1} so it starts at p
    Curve h2 = slice(1.0, 0.5);
    for (auto& pt : h2.points) pt[1] -= 1.0;
    out.half2 = h2;

    out.len1 = curve_length(out.half1).length;
    out.len2 = curve_length(out.half2).length;

    // sup separation in the quotient metric at matched fractions
    const int S = 33;
    double sep = 0.0;
    for (int i = 1; i < S; ++i) {
        const double u = static_cast<double>(i) / S;
        const Eigen::VectorXd a = out.half1.at_arclength_fraction(u);
        const Eigen::VectorXd b = out.half2.at_arclength_fraction(u);
        sep = std::max(sep, quotient_distance(QuotientPoint::make(a[0], a[1]),
                                              QuotientPoint::make(b[0], b[1])));
    }
    out.separation = sep;
    out.separation_threshold = 0.1 * std::pow(p.r, 3);

    // certify local minimality: energy descent from perturbed copies returns
    // to the same length
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    out.certification_failures = 0;
    for (const Curve* half : {&out.half1, &out.half2}) {
        const double L = curve_length(*half).length;
        for (int trial = 0; trial < perturbations; ++trial) {
            Curve init = *half;
            const int NP = init.size();
            const double ar = 0.25 * rmin, at = 0.25;
            const double z1 = gauss(rng), z2 = gauss(rng), z3 = gauss(rng), z4 = gauss(rng);
            for (int i = 1; i + 1 < NP; ++i) {
                const double u = static_cast<double>(i) / (NP - 1);
                const double bump1 = std::sin(3.14159265358979323846 * u);
                const double bump2 = std::sin(2.0 * 3.14159265358979323846 * u);
                auto& pt = init.points[static_cast<std::size_t>(i)];
                pt[0] = std::max(1e-9, pt[0] + ar * (z1 * bump1 + z3 * bump2));
                pt[1] += at * (z2 * bump1 + z4 * bump2);
            }
            ConnectOptions opts;
            opts.strategy = ConnectOptions::Strategy::Energy;
            opts.initial_path = &init;
            opts.initial_segments = 64;
            opts.max_vertices = 1 << 11;
            opts.length_tol = 1e-9;
            try {
                const Curve rec = connect_energy(cover, cover.unflatten(half->points.front()),
                                                 cover.unflatten(half->points.back()), opts);
                const double Lr = curve_length(rec).length;
                if (Lr < L - 1e-7 * std::max(1.0, L) ||
                    std::abs(Lr - L) > 1e-5 * std::max(1.0, L))
                    ++out.certification_failures;
            } catch (const std::exception&) {
                ++out.certification_failures;
            }
        }
    }
    out.certified = out.certification_failures == 0;
    return out;
}

} // namespace cusplab
