#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cusplab/geodesics.hpp"

namespace cusplab {

// Subset of the cuspidal index set {0,...,n-1}: the factors with r_k = 0.
// Ordered by inclusion (a label precedes every label containing it).
struct StratumLabel {
    std::uint32_t mask = 0;

    static StratumLabel of(std::initializer_list<int> ks) {
        StratumLabel s;
        for (int k : ks) s.mask |= (1u << k);
        return s;
    }
    static StratumLabel full(int n) { return {n >= 32 ? ~0u : ((1u << n) - 1u)}; }

    bool empty() const { return mask == 0; }
    bool contains(int k) const { return (mask >> k) & 1u; }
    int count() const { return __builtin_popcount(mask); }
    bool precedes(const StratumLabel& other) const { return (mask & ~other.mask) == 0; }
    StratumLabel intersect(const StratumLabel& other) const { return {mask & other.mask}; }
    bool operator==(const StratumLabel&) const = default;
    std::vector<int> indices() const {
        std::vector<int> out;
        for (int k = 0; k < 32; ++k)
            if (contains(k)) out.push_back(k);
        return out;
    }
    std::string to_string() const;
};

// Exact-zero label; callers snap solver output first.
StratumLabel label(const MetricModel& model, const ChartPoint& p);

// Solver outputs carry r-noise below snap_tol; snap it to the stratum.
ChartPoint snap_to_strata(const MetricModel& model, const ChartPoint& p, double snap_tol = 1e-9);

struct LabelRun {
    double t0;
    double t1;
    StratumLabel lab;
};
std::vector<LabelRun> label_trace(const Curve& curve, double snap_tol = 1e-9);

// The plumbing-parameter dictionary: r = (-log|t|)^{-1/2},
// ell = 2 pi^2 / (-log|t|), varrho^2 = 4 pi^3 / (-log|t|), lambda = (2 pi ell)^{1/2}.
// Exactly: varrho = lambda = 2 pi^{3/2} r.
struct LengthProxy {
    double abs_t;
    double r;
    double ell;
    double varrho;
    double lambda;

    static LengthProxy from_t(double abs_t);
    static LengthProxy from_r(double r);
};

// Distance from p to the closed set {r_k = 0 for all k in sigma}.
double stratum_distance(const MetricModel& model, const ChartPoint& p, const StratumLabel& sigma,
                        const ConnectOptions& opts = {});

// Metric gradient of lambda_k = 2 pi^{3/2} r_k.
TangentVector grad_lambda(const MetricModel& model, const ChartPoint& p, int k);

struct IntegralCurveProbe {
    ChartPoint endpoint;
    double length;
    double end_stratum_distance;
};
// Time-one integral curve of v = -sum_k c_k grad lambda_k started where
// lambda_k = c_k for every k.
IntegralCurveProbe integral_curve_probe(const MetricModel& model, const ChartPoint& start,
                                        const Eigen::VectorXd& c, int steps = 400);

struct RefractionResult {
    double through;   // d(a,o) + d(o,b)
    double shortcut;  // length of the curve with radial cusp projection
    double gap;       // through - shortcut, strictly positive off the stratum
};
// a off-stratum with exactly one positive cusp coordinate; b and o on the
// stratum, b != o.
RefractionResult refraction_experiment(const MetricModel& model, const ChartPoint& a,
                                       const ChartPoint& b, const ChartPoint& o);

struct CornerResult {
    double through;  // varrho_- + varrho_+ via the corner point
    double direct;   // (varrho_-^2 + varrho_+^2)^{1/2}
    double gap;
};
CornerResult corner_experiment(const MetricModel& model, const ChartPoint& a_minus,
                               const ChartPoint& a_plus);

struct ScalingProbe {
    std::vector<double> rgrid;
    std::vector<double> dist_dev;   // |stratum distance - (2 pi ell)^{1/2}|
    std::vector<double> ratio_dev;  // |metric ratio to the base - 1|
    double dist_slope = 0.0;        // log-log least squares
    double ratio_slope = 0.0;
    bool exact = false;             // eps = 0: deviations at the noise floor
};
// Perturbed-family probe over an r grid spanning at least one decade.
ScalingProbe perturbation_scaling_probe(double scale, double eps,
                                        const PerturbationProfile& profile,
                                        const std::vector<double>& rgrid,
                                        const ConnectOptions& opts = {});

} // namespace cusplab
