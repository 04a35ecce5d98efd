#include "cusplab/cat0.hpp"

#include <algorithm>
#include <cmath>

namespace cusplab {

ComparisonTriangle ComparisonTriangle::from_lengths(double l_ab, double l_ac, double l_bc) {
    if (l_ab < 0.0 || l_ac < 0.0 || l_bc < 0.0)
        throw InputError("comparison triangle: negative side length");
    const double slack = 1e-12 * std::max({1.0, l_ab, l_ac, l_bc});
    if (l_ab > l_ac + l_bc + slack || l_ac > l_ab + l_bc + slack || l_bc > l_ab + l_ac + slack)
        throw InputError("comparison triangle: triangle inequality violated");
    ComparisonTriangle t;
    t.v[0] = Eigen::Vector2d(0.0, 0.0);
    t.v[1] = Eigen::Vector2d(l_ab, 0.0);
    double x = 0.0, y = 0.0;
    if (l_ab > 0.0) {
        x = (l_ab * l_ab + l_ac * l_ac - l_bc * l_bc) / (2.0 * l_ab);
        y = std::sqrt(std::max(0.0, l_ac * l_ac - x * x));
    } else {
        x = l_ac;  // degenerate base: place C on the axis
    }
    t.v[2] = Eigen::Vector2d(x, y);
    return t;
}

GeodesicTriangle make_triangle(const MetricModel& model, const ChartPoint& a, const ChartPoint& b,
                               const ChartPoint& c, const ConnectOptions& opts) {
    GeodesicTriangle t;
    t.vertex = {a, b, c};
    for (int i = 0; i < 3; ++i) {
        t.side[static_cast<std::size_t>(i)] =
            connect(model, t.vertex[static_cast<std::size_t>(i)],
                    t.vertex[static_cast<std::size_t>((i + 1) % 3)], opts);
        t.side_length[static_cast<std::size_t>(i)] =
            curve_length(t.side[static_cast<std::size_t>(i)]).length;
    }
    return t;
}

Cat0Check cat0_check(const MetricModel& model, const GeodesicTriangle& tri, int grid,
                     const ConnectOptions& opts) {
    if (grid < 2) throw InputError("cat0_check: need grid >= 2");
    // comparison triangle matched to vertices (0,1,2)
    const ComparisonTriangle comp = ComparisonTriangle::from_lengths(
        tri.side_length[0], tri.side_length[2], tri.side_length[1]);
    // side i joins vertex i to vertex i+1; in the comparison triangle the
    // matching segment joins comp.v[i] to comp.v[i+1]
    auto comp_point = [&](int side, double frac) {
        return comp.side_point(side, (side + 1) % 3, frac);
    };
    Cat0Check out;
    out.min_slack = std::numeric_limits<double>::infinity();
    for (int sa = 0; sa < 3; ++sa) {
        for (int sb = sa + 1; sb < 3; ++sb) {
            for (int i = 1; i <= grid; ++i) {
                for (int j = 1; j <= grid; ++j) {
                    const double u = static_cast<double>(i) / (grid + 1);
                    const double w = static_cast<double>(j) / (grid + 1);
                    const Eigen::VectorXd x =
                        tri.side[static_cast<std::size_t>(sa)].at_arclength_fraction(u);
                    const Eigen::VectorXd y =
                        tri.side[static_cast<std::size_t>(sb)].at_arclength_fraction(w);
                    ++out.pairs;
                    double dm = 0.0;
                    try {
                        dm = distance(model, model.unflatten(x), model.unflatten(y), opts);
                    } catch (const std::exception&) {
                        ++out.skipped;
                        continue;
                    }
                    const double dc = (comp_point(sa, u) - comp_point(sb, w)).norm();
                    out.min_slack = std::min(out.min_slack, dc - dm);
                }
            }
        }
    }
    return out;
}

AngleResult alexandrov_angle(const MetricModel& model, const ChartPoint& o, const ChartPoint& p,
                             const ChartPoint& q, double t0, int levels,
                             const ConnectOptions& opts) {
    if (!(t0 > 0.0) || t0 > 1.0) throw InputError("alexandrov_angle: need 0 < t0 <= 1");
    // sample the sides densely: points near the vertex sit at arc t0 2^{-j}
    // and chord interpolation error must stay far below that scale
    ConnectOptions side_opts = opts;
    side_opts.output_samples = std::max(opts.output_samples, 2049);
    const Curve s1 = connect(model, o, p, side_opts);
    const Curve s2 = connect(model, o, q, side_opts);
    const double L1 = curve_length(s1).length;
    const double L2 = curve_length(s2).length;
    if (!(L1 > 0.0) || !(L2 > 0.0))
        throw InputError("alexandrov_angle: degenerate side");

    AngleResult out;
    double t = t0;
    for (int j = 0; j < levels; ++j, t *= 0.5) {
        const Eigen::VectorXd x = s1.at_arclength_fraction(t);
        const Eigen::VectorXd y = s2.at_arclength_fraction(t);
        const double a = t * L1;  // geodesic side: arc length from o is exact
        const double b = t * L2;
        const double c = distance(model, model.unflatten(x), model.unflatten(y), opts);
        const double cosang = std::clamp((a * a + b * b - c * c) / (2.0 * a * b), -1.0, 1.0);
        out.table.emplace_back(t, std::acos(cosang));
    }
    for (std::size_t j = 1; j < out.table.size(); ++j)
        if (out.table[j].second > out.table[j - 1].second + 1e-6) out.monotone = false;

    // first-order convergence in t: two-point Richardson on the last levels
    if (out.table.size() >= 3) {
        const double r2 = 2.0 * out.table[out.table.size() - 1].second -
                          out.table[out.table.size() - 2].second;
        const double r1 = 2.0 * out.table[out.table.size() - 2].second -
                          out.table[out.table.size() - 3].second;
        out.angle = r2;
        out.stabilized = std::abs(r2 - r1) < 5e-4 * std::max(1.0, std::abs(r2));
    }
    return out;
}

ConvexityResult convexity_check(const MetricModel& model, const Curve& gamma, const Curve& gammap,
                                int samples, const ConnectOptions& opts) {
    if (samples < 3) throw InputError("convexity_check: need samples >= 3");
    ConvexityResult out;
    out.values.resize(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        const double u = static_cast<double>(i) / (samples - 1);
        out.values[static_cast<std::size_t>(i)] =
            distance(model, model.unflatten(gamma.at_arclength_fraction(u)),
                     model.unflatten(gammap.at_arclength_fraction(u)), opts);
    }
    out.min_second_difference = std::numeric_limits<double>::infinity();
    out.max_second_difference = -std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < samples; ++i) {
        const double d2 = out.values[static_cast<std::size_t>(i - 1)] -
                          2.0 * out.values[static_cast<std::size_t>(i)] +
                          out.values[static_cast<std::size_t>(i + 1)];
        out.min_second_difference = std::min(out.min_second_difference, d2);
        out.max_second_difference = std::max(out.max_second_difference, d2);
    }
    return out;
}

FlatCheck flat_triangle_check(const MetricModel& model, const GeodesicTriangle& tri, int samples,
                              double tol, const ConnectOptions& opts) {
    FlatCheck out;
    out.tol = tol;
    out.max_deviation = 0.0;
    // for each vertex v, the displacement between the two sides leaving v must
    // be linear in the common arc-length fraction
    for (int v = 0; v < 3; ++v) {
        // sides leaving vertex v: side[v] (v -> v+1) and reversed side[(v+2)%3] (v -> v+2)
        const Curve& sa = tri.side[static_cast<std::size_t>(v)];
        const Curve& sb = tri.side[static_cast<std::size_t>((v + 2) % 3)];
        const double dpq = distance(model, tri.vertex[static_cast<std::size_t>((v + 1) % 3)],
                                    tri.vertex[static_cast<std::size_t>((v + 2) % 3)], opts);
        for (int i = 1; i < samples; ++i) {
            const double u = static_cast<double>(i) / samples;
            const Eigen::VectorXd x = sa.at_arclength_fraction(u);
            const Eigen::VectorXd y = sb.at_arclength_fraction(1.0 - u);  // reversed side
            const double f = distance(model, model.unflatten(x), model.unflatten(y), opts);
            const double chord = u * dpq;
            const double dev = std::abs(f - chord);
            if (dev > out.max_deviation) {
                out.max_deviation = dev;
                out.witness_pair = v;
                out.witness_t = u;
            }
        }
    }
    out.flat = out.max_deviation <= tol;

    // Euclidean-block factor projections of the sides must be straight
    if (model.xdim() >= 2) {
        for (int pl = 0; pl + 1 < model.xdim() && out.factor_projections_geodesic; pl += 2) {
            for (const Curve& s : tri.side) {
                const Eigen::VectorXd a = s.points.front(), b = s.points.back();
                const Eigen::Vector2d pa(a[pl], a[pl + 1]), pb(b[pl], b[pl + 1]);
                const double span = (pb - pa).norm();
                for (const Eigen::VectorXd& pt : s.points) {
                    const Eigen::Vector2d pp(pt[pl], pt[pl + 1]);
                    double off;
                    if (span < 1e-14) {
                        off = (pp - pa).norm();
                    } else {
                        const Eigen::Vector2d dir = (pb - pa) / span;
                        const Eigen::Vector2d rel = pp - pa;
                        off = std::abs(dir.x() * rel.y() - dir.y() * rel.x());
                    }
                    if (off > tol * std::max(1.0, span)) {
                        out.factor_projections_geodesic = false;
                        break;
                    }
                }
            }
        }
    }
    return out;
}

ThinnessResult thinness_probe(const MetricModel& model, double delta, double scale,
                              const std::array<Eigen::Vector2d, 3>& shape) {
    if (model.xdim() < 2)
        throw InputError("thinness_probe: model needs a Euclidean 2-plane");
    if (!(delta > 0.0) || !(scale > 0.0))
        throw InputError("thinness_probe: delta and scale must be positive");

    auto embed = [&](const Eigen::Vector2d& s) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(model.xdim());
        x[0] = scale * s.x();
        x[1] = scale * s.y();
        return ChartPoint(x, Eigen::VectorXd::Zero(model.n()),
                          Eigen::VectorXd::Zero(model.n()));
    };
    const ChartPoint A = embed(shape[0]), B = embed(shape[1]), C = embed(shape[2]);
    const double lab = distance(model, A, B);
    const double lac = distance(model, A, C);
    const double lbc = distance(model, B, C);
    // inradius from the side lengths: largest ball inside the flat triangle
    const double s = 0.5 * (lab + lac + lbc);
    const double area2 = std::max(0.0, s * (s - lab) * (s - lac) * (s - lbc));
    const double inradius = std::sqrt(area2) / s;

    ThinnessResult out;
    out.insize = inradius;
    out.unit_insize = inradius / scale;
    out.smallest_scale_exceeding = delta / out.unit_insize;
    return out;
}

int max_flat_rank(int g, int n) {
    if (g < 0 || n < 0 || 3 * g - 3 + n <= 0)
        throw InputError("max_flat_rank: need 3g-3+n > 0");
    return g - 1 + (g + n) / 2;
}

namespace {

struct Piece {
    int g, c, p;  // genus, cut boundaries, punctures
    bool operator<=(const Piece& o) const {
        return std::tie(g, c, p) <= std::tie(o.g, o.c, o.p);
    }
};

// Depth-first enumeration of piece multisets.  A multiset is admissible when
// the glued surface is connected of type (g,n): Euler characteristics add up,
// the cut boundaries pair into k curves, and a connected gluing multigraph
// with the prescribed degrees exists (k >= pieces-1, every degree >= 1 when
// there is more than one piece).
void search(int g, int n, int chi_left, int punct_left, const Piece& minp,
            std::vector<Piece>& acc, int& best) {
    if (chi_left == 0 && punct_left == 0) {
        const int P = static_cast<int>(acc.size());
        int csum = 0, nu = 0;
        for (const auto& pc : acc) {
            csum += pc.c;
            if (3 * pc.g - 3 + pc.c + pc.p >= 1) ++nu;
        }
        if (csum % 2 != 0) return;
        const int k = csum / 2;
        if (k < P - 1) return;
        if (P > 1)
            for (const auto& pc : acc)
                if (pc.c < 1) return;
        int gsum = 0;
        for (const auto& pc : acc) gsum += pc.g;
        if (gsum + k - P + 1 != g) return;
        best = std::max(best, nu);
        return;
    }
    if (chi_left >= 0) return;  // every extra piece consumes chi
    // candidate next piece, canonical nondecreasing order avoids duplicates
    for (int pg = minp.g; pg <= g; ++pg) {
        for (int pc = (pg == minp.g ? minp.c : 0); pc <= -chi_left + 2; ++pc) {
            const int pp_min = (pg == minp.g && pc == minp.c) ? minp.p : 0;
            for (int pp = pp_min; pp <= punct_left; ++pp) {
                const int chi = 2 - 2 * pg - pc - pp;
                if (chi >= 0) continue;                    // needs negative Euler characteristic
                if (pg == 0 && pc + pp < 3) continue;      // no disks or annuli
                if (chi_left - chi > 0) continue;          // cannot overshoot
                acc.push_back({pg, pc, pp});
                search(g, n, chi_left - chi, punct_left - pp, {pg, pc, pp}, acc, best);
                acc.pop_back();
            }
        }
    }
}

} // namespace

int max_flat_rank_search(int g, int n) {
    if (g < 0 || n < 0 || 3 * g - 3 + n <= 0)
        throw InputError("max_flat_rank_search: need 3g-3+n > 0");
    int best = 0;
    std::vector<Piece> acc;
    search(g, n, 2 - 2 * g - n, n, {0, 0, 0}, acc, best);
    return best;
}

} // namespace cusplab
