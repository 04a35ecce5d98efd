#include "cusplab/strata.hpp"

#include <cmath>
#include <sstream>

namespace cusplab {

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kTwoPi32 = 2.0 * std::pow(kPi, 1.5);
} // namespace

std::string StratumLabel::to_string() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (int k : indices()) {
        if (!first) os << ",";
        os << k;
        first = false;
    }
    os << "}";
    return os.str();
}

StratumLabel label(const MetricModel& model, const ChartPoint& p) {
    model.check_point(p);
    StratumLabel s;
    for (int k = 0; k < model.n(); ++k)
        if (p.r[k] == 0.0) s.mask |= (1u << k);
    return s;
}

ChartPoint snap_to_strata(const MetricModel& model, const ChartPoint& p, double snap_tol) {
    model.check_point(p);
    ChartPoint out = p;
    for (int k = 0; k < model.n(); ++k)
        if (out.r[k] < snap_tol) out.r[k] = 0.0;
    return out;
}

std::vector<LabelRun> label_trace(const Curve& curve, double snap_tol) {
    std::vector<LabelRun> runs;
    for (int i = 0; i < curve.size(); ++i) {
        const StratumLabel lab =
            label(curve.model, snap_to_strata(curve.model, curve.point(i), snap_tol));
        const double t = curve.params[static_cast<std::size_t>(i)];
        if (!runs.empty() && runs.back().lab == lab) {
            runs.back().t1 = t;
        } else {
            runs.push_back({t, t, lab});
        }
    }
    return runs;
}

LengthProxy LengthProxy::from_t(double abs_t) {
    if (!(abs_t > 0.0) || !(abs_t < 1.0)) throw InputError("LengthProxy: need 0 < |t| < 1");
    const double k = -std::log(abs_t);
    LengthProxy lp;
    lp.abs_t = abs_t;
    lp.r = 1.0 / std::sqrt(k);
    lp.ell = 2.0 * kPi * kPi / k;
    lp.varrho = std::sqrt(4.0 * kPi * kPi * kPi / k);
    lp.lambda = std::sqrt(2.0 * kPi * lp.ell);
    return lp;
}

LengthProxy LengthProxy::from_r(double r) {
    if (!(r > 0.0)) throw InputError("LengthProxy: need r > 0");
    LengthProxy lp;
    lp.abs_t = std::exp(-1.0 / (r * r));
    lp.r = r;
    lp.ell = 2.0 * kPi * kPi * r * r;
    lp.varrho = kTwoPi32 * r;
    lp.lambda = std::sqrt(2.0 * kPi * lp.ell);
    return lp;
}

double stratum_distance(const MetricModel& model, const ChartPoint& p, const StratumLabel& sigma,
                        const ConnectOptions& opts) {
    model.check_point(p);
    if (sigma.empty()) throw InputError("stratum_distance: sigma must be nonempty");
    for (int k : sigma.indices())
        if (k >= model.n()) throw InputError("stratum_distance: label outside the index set");

    switch (model.kind()) {
        case MetricModel::Kind::CuspidalPlane:
        case MetricModel::Kind::ProductCuspidal: {
            // metric product: the radial projection is the exact minimizer
            double s2 = 0.0;
            for (int k : sigma.indices()) s2 += p.r[k] * p.r[k];
            return 2.0 * std::sqrt(model.scale()) * std::sqrt(s2);
        }
        case MetricModel::Kind::QuotientCover: {
            double s2 = 0.0;
            for (int k : sigma.indices()) s2 += p.r[k] * p.r[k];
            return std::sqrt(s2);
        }
        case MetricModel::Kind::PerturbedProduct: {
            // start from the radial foot, then relax the foot along the stratum
            ChartPoint foot = p;
            for (int k : sigma.indices()) foot.r[k] = 0.0;
            ConnectOptions o = opts;
            o.strategy = ConnectOptions::Strategy::Energy;
            double best = distance(model, p, foot, o);
            // coordinate relaxation of the foot (x and surviving r stay free)
            const double base = 2.0 * std::sqrt(model.scale()) *
                                std::sqrt([&] {
                                    double s2 = 0.0;
                                    for (int k : sigma.indices()) s2 += p.r[k] * p.r[k];
                                    return s2;
                                }());
            double step = 0.1 * base;
            for (int pass = 0; pass < 3 && step > 1e-6 * base; ++pass, step *= 0.25) {
                for (int c = 0; c < model.xdim(); ++c) {
                    for (double dir : {+1.0, -1.0}) {
                        ChartPoint trial = foot;
                        trial.x[c] += dir * step;
                        const double d = distance(model, p, trial, o);
                        if (d < best) {
                            best = d;
                            foot = trial;
                        }
                    }
                }
            }
            return best;
        }
        default:
            throw InputError("stratum_distance: model has no strata");
    }
}

TangentVector grad_lambda(const MetricModel& model, const ChartPoint& p, int k) {
    model.check_point(p);
    if (k < 0 || k >= model.n()) throw InputError("grad_lambda: factor index out of range");
    if (!(p.r[k] > 0.0)) throw SingularPointError("grad_lambda: point on the stratum");
    const Eigen::VectorXd q = model.flatten(p);
    const int D = model.dim();
    Eigen::VectorXd g(D);
    model.metric_diag({q.data(), static_cast<std::size_t>(D)},
                      {g.data(), static_cast<std::size_t>(D)});
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(D);
    grad[model.ir(k)] = kTwoPi32 / g[model.ir(k)];
    return model.unflatten_tangent(grad);
}

IntegralCurveProbe integral_curve_probe(const MetricModel& model, const ChartPoint& start,
                                        const Eigen::VectorXd& c, int steps) {
    model.check_point(start);
    if (c.size() != model.n()) throw InputError("integral_curve_probe: c has wrong length");
    for (int k = 0; k < model.n(); ++k) {
        if (!(c[k] > 0.0)) throw InputError("integral_curve_probe: coefficients must be positive");
        const double lam = kTwoPi32 * start.r[k];
        if (std::abs(lam - c[k]) > 1e-9 * std::max(1.0, c[k]))
            throw InputError("integral_curve_probe: start must satisfy lambda_k = c_k");
    }

    const int D = model.dim();
    auto field = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd g(D);
        model.metric_diag({q.data(), static_cast<std::size_t>(D)},
                          {g.data(), static_cast<std::size_t>(D)});
        Eigen::VectorXd v = Eigen::VectorXd::Zero(D);
        for (int k = 0; k < model.n(); ++k) v[model.ir(k)] = -c[k] * kTwoPi32 / g[model.ir(k)];
        return v;
    };
    auto speed = [&](const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
        Eigen::VectorXd g(D);
        model.metric_diag({q.data(), static_cast<std::size_t>(D)},
                          {g.data(), static_cast<std::size_t>(D)});
        double s = 0.0;
        for (int i = 0; i < D; ++i) s += g[i] * v[i] * v[i];
        return std::sqrt(std::max(0.0, s));
    };

    Eigen::VectorXd q = model.flatten(start);
    const double h = 1.0 / steps;
    double length = 0.0;
    const double guard = 1e-14;
    for (int i = 0; i < steps; ++i) {
        // classical RK4, with trapezoid accumulation of the speed
        const Eigen::VectorXd k1 = field(q);
        length += 0.5 * h * speed(q, k1);
        const Eigen::VectorXd k2 = field(q + 0.5 * h * k1);
        const Eigen::VectorXd k3 = field(q + 0.5 * h * k2);
        const Eigen::VectorXd k4 = field(q + h * k3);
        q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        for (int k = 0; k < model.n(); ++k) q[model.ir(k)] = std::max(q[model.ir(k)], guard);
        const Eigen::VectorXd ke = field(q);
        length += 0.5 * h * speed(q, ke);
    }

    IntegralCurveProbe out;
    out.endpoint = model.unflatten(q);
    out.length = length;
    // The endpoint sits at r = O(||c||^4); the radial drop to the stratum is
    // the minimizer there up to a relative O(eps r^3) correction, so its
    // length under the model metric is the distance.
    ChartPoint foot = out.endpoint;
    for (int k = 0; k < model.n(); ++k) foot.r[k] = 0.0;
    out.end_stratum_distance = curve_length(Curve::segment(model, out.endpoint, foot, 33)).length;
    return out;
}

namespace {

double xdist(const ChartPoint& a, const ChartPoint& b) { return (a.x - b.x).norm(); }

int single_positive_factor(const MetricModel& model, const ChartPoint& p) {
    int idx = -1;
    for (int k = 0; k < model.n(); ++k) {
        if (p.r[k] > 0.0) {
            if (idx >= 0) return -2;  // more than one
            idx = k;
        }
    }
    return idx;
}

} // namespace

RefractionResult refraction_experiment(const MetricModel& model, const ChartPoint& a,
                                       const ChartPoint& b, const ChartPoint& o) {
    if (model.kind() != MetricModel::Kind::ProductCuspidal)
        throw InputError("refraction_experiment: model must be a product cuspidal metric");
    model.check_point(a);
    model.check_point(b);
    model.check_point(o);
    const int ka = single_positive_factor(model, a);
    if (ka < 0) throw InputError("refraction_experiment: a needs exactly one positive r_k");
    if (!label(model, b).operator==(StratumLabel::full(model.n())) ||
        !label(model, o).operator==(StratumLabel::full(model.n())))
        throw InputError("refraction_experiment: b and o must lie on the stratum");
    if ((b.x - o.x).norm() == 0.0) throw InputError("refraction_experiment: need b != o");
    const double rho_a = 2.0 * std::sqrt(model.scale()) * a.r[ka];
    if (xdist(a, o) == 0.0 && xdist(a, b) == 0.0 && rho_a == 0.0)
        throw InputError("refraction_experiment: degenerate configuration");

    // exact metric-product reductions (the x block is Euclidean, each cusp
    // factor contributes its radial distance)
    const double through = std::hypot(xdist(a, o), rho_a) + xdist(o, b);
    const double shortcut = std::hypot(xdist(a, b), rho_a);
    return {through, shortcut, through - shortcut};
}

CornerResult corner_experiment(const MetricModel& model, const ChartPoint& a_minus,
                               const ChartPoint& a_plus) {
    if (model.kind() != MetricModel::Kind::ProductCuspidal || model.n() < 2)
        throw InputError("corner_experiment: need a product cuspidal metric with n >= 2");
    model.check_point(a_minus);
    model.check_point(a_plus);
    const int km = single_positive_factor(model, a_minus);
    const int kp = single_positive_factor(model, a_plus);
    if (km < 0 || kp < 0 || km == kp)
        throw InputError("corner_experiment: points must be supported on distinct single factors");
    if (!(a_minus.r[km] > 0.0) || !(a_plus.r[kp] > 0.0))
        throw InputError("corner_experiment: zero input");
    const double rm = 2.0 * std::sqrt(model.scale()) * a_minus.r[km];
    const double rp = 2.0 * std::sqrt(model.scale()) * a_plus.r[kp];
    const double through = rm + rp;
    const double direct = std::hypot(rm, rp);
    return {through, direct, through - direct};
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

ScalingProbe perturbation_scaling_probe(double scale, double eps,
                                        const PerturbationProfile& profile,
                                        const std::vector<double>& rgrid,
                                        const ConnectOptions& opts) {
    if (rgrid.size() < 4) throw InputError("perturbation_scaling_probe: grid too small");
    const auto [mn, mx] = std::minmax_element(rgrid.begin(), rgrid.end());
    if (!(*mx / *mn >= 10.0 * (1.0 - 1e-12)))
        throw InputError("perturbation_scaling_probe: grid must span at least one decade");

    const MetricModel base = MetricModel::product_cuspidal(1, 1, scale);
    const MetricModel pert = MetricModel::perturbed_product(base, eps, profile);

    ScalingProbe out;
    out.rgrid = rgrid;
    // fixed off-stratum placement where the profile does not vanish
    const double x0 = 0.4, x1 = -0.2, th = 0.7;
    for (double r : rgrid) {
        ChartPoint p(Eigen::Vector2d(x0, x1), Eigen::VectorXd::Constant(1, r),
                     Eigen::VectorXd::Constant(1, th));
        // metric ratio to the base at p (conformal: identical over all entries)
        const Eigen::VectorXd q = pert.flatten(p);
        const double ratio = pert.conformal_factor({q.data(), static_cast<std::size_t>(q.size())});
        out.ratio_dev.push_back(std::abs(ratio - 1.0));
        // stratum distance against (2 pi ell)^{1/2} = 2 s^{1/2} r at scale pi^3
        const double ref = 2.0 * std::sqrt(scale) * r;
        const double d = stratum_distance(pert, p, StratumLabel::of({0}), opts);
        out.dist_dev.push_back(std::abs(d - ref));
    }
    const double floor_dev = 1e-11;
    out.exact = eps == 0.0;
    if (!out.exact) {
        out.ratio_slope = loglog_slope(out.rgrid, out.ratio_dev);
        out.dist_slope = loglog_slope(out.rgrid, out.dist_dev);
    } else {
        bool quiet = true;
        for (double d : out.dist_dev) quiet = quiet && d < 1e-6;
        for (double d : out.ratio_dev) quiet = quiet && d < floor_dev;
        out.exact = quiet;
        out.ratio_slope = std::numeric_limits<double>::quiet_NaN();
        out.dist_slope = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

} // namespace cusplab
