#pragma once

#include <array>
#include <optional>

#include "cusplab/strata.hpp"

namespace cusplab {

// Planar triangle realizing three side lengths: vertex A at the origin, B on
// the positive horizontal axis; |AB| = l_ab, |AC| = l_ac, |BC| = l_bc.
struct ComparisonTriangle {
    std::array<Eigen::Vector2d, 3> v;

    static ComparisonTriangle from_lengths(double l_ab, double l_ac, double l_bc);
    Eigen::Vector2d side_point(int from, int to, double frac) const {
        return v[static_cast<std::size_t>(from)] +
               frac * (v[static_cast<std::size_t>(to)] - v[static_cast<std::size_t>(from)]);
    }
};

struct GeodesicTriangle {
    std::array<ChartPoint, 3> vertex;
    std::array<Curve, 3> side;        // side[i] joins vertex[i] to vertex[(i+1)%3]
    std::array<double, 3> side_length;
};
GeodesicTriangle make_triangle(const MetricModel& model, const ChartPoint& a, const ChartPoint& b,
                               const ChartPoint& c, const ConnectOptions& opts = {});

struct Cat0Check {
    double min_slack;  // min over sampled pairs of comparison minus model distance
    int pairs = 0;
    int skipped = 0;   // pairs dropped because the inner solve failed
    bool holds(double tol = 1e-6) const { return min_slack >= -tol; }
};
// Samples a grid x grid family of side-point pairs on each of the three side
// pairs and compares model distances with the flat comparison triangle.
Cat0Check cat0_check(const MetricModel& model, const GeodesicTriangle& tri, int grid = 9,
                     const ConnectOptions& opts = {});

struct AngleResult {
    double angle = 0.0;                          // extrapolated limit
    bool stabilized = false;
    bool monotone = true;                        // comparison angles nonincreasing under refinement
    std::vector<std::pair<double, double>> table;  // (t, comparison angle)
};
// Comparison angle at o between the geodesics to p and to q, on the geometric
// grid t = t0 * 2^{-j} with two-point Richardson extrapolation.
AngleResult alexandrov_angle(const MetricModel& model, const ChartPoint& o, const ChartPoint& p,
                             const ChartPoint& q, double t0 = 0.5, int levels = 9,
                             const ConnectOptions& opts = {});

struct ConvexityResult {
    double min_second_difference;
    double max_second_difference;
    std::vector<double> values;  // sampled t -> d(gamma(t), gamma'(t))
    bool strictly_positive() const { return min_second_difference > 0.0; }
};
ConvexityResult convexity_check(const MetricModel& model, const Curve& gamma, const Curve& gammap,
                                int samples = 17, const ConnectOptions& opts = {});

struct FlatCheck {
    bool flat;
    double max_deviation;       // of the displacement functions from their chords
    double tol;
    int witness_pair = -1;      // vertex index of the worst pairing
    double witness_t = 0.0;
    bool factor_projections_geodesic = true;  // Euclidean-block projections collinear
};
FlatCheck flat_triangle_check(const MetricModel& model, const GeodesicTriangle& tri,
                              int samples = 17, double tol = 1e-6,
                              const ConnectOptions& opts = {});

struct ThinnessResult {
    double insize;                   // largest radius of a ball inside the triangle
    double unit_insize;              // insize at scale 1
    double smallest_scale_exceeding; // first scale with insize > delta
};
inline std::array<Eigen::Vector2d, 3> equilateral_shape() {
    return {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0),
            Eigen::Vector2d(0.5, 0.86602540378443864676)};
}
// Scales a planar triangle shape inside the Euclidean block of the model.
ThinnessResult thinness_probe(const MetricModel& model, double delta, double scale,
                              const std::array<Eigen::Vector2d, 3>& shape = equilateral_shape());

// Closed form g - 1 + floor((g+n)/2) for the largest number of positive
// dimensional pieces over all multicurve decompositions of S_{g,n}.
int max_flat_rank(int g, int n);
// Exhaustive search over decompositions into pieces (g_i, boundary, punctures).
int max_flat_rank_search(int g, int n);

} // namespace cusplab
