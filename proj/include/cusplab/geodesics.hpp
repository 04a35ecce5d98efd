#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cusplab/metrics.hpp"

namespace cusplab {

// A parameterized polyline in the chart.  Points are stored in the flat
// layout (x.., r.., theta..); velocities, when present, come from the ODE
// integrator and share the parameterization.
struct Curve {
    MetricModel model;
    std::vector<double> params;
    std::vector<Eigen::VectorXd> points;
    std::vector<Eigen::VectorXd> velocities;  // empty, or one per sample
    bool proportional_arclength = false;

    int size() const { return static_cast<int>(points.size()); }
    ChartPoint point(int i) const { return model.unflatten(points[static_cast<std::size_t>(i)]); }
    ChartPoint front() const { return point(0); }
    ChartPoint back() const { return point(size() - 1); }

    // Linear interpolation in the chart at parameter t (clamped to the range).
    Eigen::VectorXd at_param(double t) const;
    // Point at fraction u in [0,1] of total polyline arc length.
    Eigen::VectorXd at_arclength_fraction(double u) const;

    static Curve segment(const MetricModel& model, const ChartPoint& a, const ChartPoint& b,
                         int samples = 2);
};

// Per-segment masking: along a segment whose endpoint lies on {r_k = 0} the
// theta_k displacement is dropped (the cusp identifies the theta-line).
Eigen::VectorXd masked_delta(const MetricModel& model, const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b);

struct LengthResult {
    double length;
    double error;  // difference of the last two refinements
};
// Midpoint-quadrature polyline length, refined until the change is below tol.
LengthResult curve_length(const Curve& curve, double tol = 1e-10);

// Sum of endpoint distances over a K-partition of the curve (uses connect).
double partition_length_check(const Curve& curve, int K);

struct IntegrateOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double r_floor = 1e-12;     // stop when a cusp factor drops to the floor
    double initial_dt = 1e-3;
    double max_dt = std::numeric_limits<double>::infinity();  // sample density cap
    int max_steps = 2'000'000;
};

enum class StopCause { ReachedTime, HitStratumFloor, StepUnderflow };

struct IntegrationResult {
    Curve curve;
    StopCause cause;
    double time;  // parameter reached
};

// Integrates the geodesic equation q'' + Gamma(q', q') = 0 from (p, v) up to
// parameter T or the first exit of the smooth locus, whichever comes first.
IntegrationResult integrate_geodesic(const MetricModel& model, const ChartPoint& p,
                                     const TangentVector& v, double T,
                                     const IntegrateOptions& opts = {});

struct ShootingResult {
    Eigen::VectorXd initial_velocity;
    double miss = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct ConnectOptions {
    enum class Strategy { Auto, Energy, Shooting };
    Strategy strategy = Strategy::Auto;
    // energy minimization (strategy A)
    int initial_segments = 8;
    int max_vertices = 1 << 14;
    double length_tol = 1e-8;       // refinement stops when |L_N - L_{N/2}| < length_tol
    double r_floor = 1e-12;         // clamp for interior vertices
    int max_level_iterations = 600;
    const Curve* initial_path = nullptr;  // optional warm start / homotopy class pick
    // shooting (strategy B)
    double shoot_tol = 1e-11;
    int shoot_max_iterations = 64;
    int output_samples = 257;
};

// Two-point geodesic boundary value problem.  Both strategies produce a curve
// parameterized proportional to arc length on [0,1].
Curve connect(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
              const ConnectOptions& opts = {});

struct ShootOutcome {
    ShootingResult info;
    Curve curve;
};
ShootOutcome shoot_geodesic(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
                            const ConnectOptions& opts = {});

// Strategy A driver, exposed for cross-checks and local-minimality probes.
Curve connect_energy(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
                     const ConnectOptions& opts = {});

double distance(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
                const ConnectOptions& opts = {});

// Sup of pointwise chart distance between two curves sampled at matching
// arc-length fractions (both must span the same endpoints).
double sup_separation(const Curve& a, const Curve& b, int samples = 65);

struct SecondVariation {
    double second_difference;  // centered second difference of s -> L(beta(.,s))
    double formula;            // integral of |(D_T V)^perp|^2 - <R(V,T)T, V>
};

// end0 and end1 are geodesics parameterized proportional to arc length; the
// family member at parameter s joins end0(s) to end1(s).
SecondVariation second_variation_check(const MetricModel& model, const Curve& end0,
                                       const Curve& end1, double s_center, double h,
                                       int time_nodes = 65,
                                       const ConnectOptions& opts = {});

} // namespace cusplab
