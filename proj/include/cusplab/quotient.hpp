#pragma once

#include "cusplab/strata.hpp"

namespace cusplab {

// Point of the identification space R_{>=0} x R / {(0,a) ~ (0,b)} with metric
// dr^2 + r^6 dtheta^2, quotiented by the deck map T: (r, theta) -> (r, theta+1).
// Representatives are normalized to theta in [0,1); the cusp r = 0 is the
// single point O.
struct QuotientPoint {
    double r = 0.0;
    double theta = 0.0;

    static QuotientPoint make(double r, double theta);
    bool is_origin() const { return r == 0.0; }
};

struct ClairautResult {
    double c = 0.0;           // conserved r^6 theta'
    double length = 0.0;
    double turning_radius = 0.0;  // |c|^{1/3} when the path turns, else min(r0,r1)
    bool monotone = false;        // no turning point
    double endpoint_miss = 0.0;   // cross-check of the integrated curve
    Curve curve;                  // cover coordinates, unit speed
};

// Geodesic of dr^2 + r^6 dtheta^2 from (r0, theta0) to (r1, theta0 + dtheta),
// solved by bracketing the Clairaut constant and quadrature of the reduced
// integrals (tanh-sinh near the turning point).  build_curve = false skips
// the sample integration when only c and the length are needed.
ClairautResult clairaut_connect(double r0, double r1, double dtheta, double theta0 = 0.0,
                                bool build_curve = true);

// Metric of the quotient: minimum over small winding classes and the
// through-cusp path.
double quotient_distance(const QuotientPoint& a, const QuotientPoint& b);

// Piecewise-geodesic curve through strata with the per-joint twist data of a
// convergent family.
struct PolygonalPath {
    std::vector<ChartPoint> vertices;  // on the quotient-cover chart (m=0, n=1)
    std::vector<double> params;        // t_0 < ... < t_k, L(segment j) = t_{j+1} - t_j

    int segments() const { return static_cast<int>(vertices.size()) - 1; }
    // max |L(segment j) - (t_{j+1} - t_j)|
    double length_residual() const;
    // labels tau_j = label(v_j) ^ label(v_{j+1}) must strictly precede the
    // joint labels; true when the ordering conditions hold
    bool joint_labels_admissible() const;
};

// One member of the twist family: integer twist exponents per segment joint.
using TwistSequence = std::vector<int>;

// Segments transformed by the composed inverse twists; continuity at every
// joint is required (twisted vertices must be fixed by their twists).
Curve approximating_concatenation(const PolygonalPath& path, const TwistSequence& twists);

struct LimitRow {
    int n;
    double c;
    double length;
    double dev_first;   // winding of the first leg outside the cusp collar
    double dev_second;  // same for the second leg after untwisting
};

struct LimitExperiment {
    std::vector<LimitRow> rows;
    PolygonalPath limit_path;           // (p0, O, p1)
    std::vector<TwistSequence> twists;  // per n; the nontrivial entry grows with n
    double deficit_slope = 0.0;         // log-log slope of (r0 + r1 - L_n) vs n
    bool lengths_increasing = true;
    bool lengths_bounded = true;        // L_n < r0 + r1 for every n
    bool first_dev_monotone = true;
};

// The spiraling family gamma_n joining p0 to T^n p1; lengths increase to
// r0 + r1 and the curves converge to the polygonal path through O.
LimitExperiment geodesic_limit_experiment(const QuotientPoint& p0, const QuotientPoint& p1,
                                          int nmax, double collar_frac = 0.9);

struct LinkingClass {
    int winding = 0;
    double length = 0.0;
    double turning_radius = 0.0;
    // rigorous pieces of the length from the radial and angular projections:
    //   length >= 2 (r - r_min)  and  length >= |winding| r_min^3,
    // and the dive bound r_min <= (2 r / |winding|)^{1/3} from length <= 2r.
    double radial_bound = 0.0;
    double winding_bound = 0.0;
    double dive_bound = 0.0;
};

struct LinkingLoop {
    int best_class = 0;
    double length = 0.0;
    double circle_bound = 0.0;  // theta-circle through p has length r^3
    Curve loop;                 // cover coordinates for the best class
    std::vector<LinkingClass> classes;
};
// Shortest geodesic loop at p linking the cusp, over classes |n| <= max_class.
LinkingLoop minimal_linking_loop(const QuotientPoint& p, int max_class = 3);

struct NonUniqueResult {
    Curve half1;  // p -> q winding +1/2
    Curve half2;  // p -> q winding -1/2
    QuotientPoint midpoint;
    double len1 = 0.0;
    double len2 = 0.0;
    double separation = 0.0;
    double separation_threshold = 0.0;
    bool certified = false;  // both halves survive perturbed re-minimization
    int certification_failures = 0;
};
// Bisects the minimal linking loop: two distinct geodesics with the same
// endpoints and equal length.
NonUniqueResult nonunique_geodesics(const QuotientPoint& p, int perturbations = 20,
                                    std::uint64_t seed = 17);

} // namespace cusplab
