#include "cusplab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

namespace cusplab {

namespace {

constexpr double kPi = 3.14159265358979323846;

using State = std::vector<double>;  // [q(D), v(D)]

bool below_floor(const MetricModel& model, const State& y, double floor) {
    for (int k = 0; k < model.n(); ++k)
        if (y[static_cast<std::size_t>(model.ir(k))] <= floor) return true;
    if (model.kind() == MetricModel::Kind::SpherePatch && y[0] >= kPi - floor) return true;
    return false;
}

Eigen::VectorXd head_vec(const State& y, int D) {
    Eigen::VectorXd q(D);
    for (int i = 0; i < D; ++i) q[i] = y[static_cast<std::size_t>(i)];
    return q;
}

Eigen::VectorXd tail_vec(const State& y, int D) {
    Eigen::VectorXd v(D);
    for (int i = 0; i < D; ++i) v[i] = y[static_cast<std::size_t>(D + i)];
    return v;
}

double metric_dot(const MetricModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& a,
                  const Eigen::VectorXd& b) {
    const int D = model.dim();
    Eigen::VectorXd g(D);
    model.metric_diag({q.data(), static_cast<std::size_t>(D)},
                      {g.data(), static_cast<std::size_t>(D)});
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += g[i] * a[i] * b[i];
    return s;
}

} // namespace

Eigen::VectorXd masked_delta(const MetricModel& model, const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b) {
    Eigen::VectorXd d = b - a;
    for (int k = 0; k < model.n(); ++k) {
        if (a[model.ir(k)] <= 0.0 || b[model.ir(k)] <= 0.0) d[model.itheta(k)] = 0.0;
    }
    return d;
}

Eigen::VectorXd Curve::at_param(double t) const {
    if (points.empty()) throw InputError("empty curve");
    if (points.size() == 1 || t <= params.front()) return points.front();
    if (t >= params.back()) return points.back();
    const auto it = std::upper_bound(params.begin(), params.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - params.begin());
    const std::size_t lo = hi - 1;
    const double span = params[hi] - params[lo];
    const double u = span > 0.0 ? (t - params[lo]) / span : 0.0;
    return points[lo] + u * (points[hi] - points[lo]);
}

Eigen::VectorXd Curve::at_arclength_fraction(double u) const {
    if (points.empty()) throw InputError("empty curve");
    if (proportional_arclength) {
        return at_param(params.front() + u * (params.back() - params.front()));
    }
    const int N = size() - 1;
    std::vector<double> cum(static_cast<std::size_t>(N) + 1, 0.0);
    for (int i = 0; i < N; ++i) {
        const Eigen::VectorXd mid = 0.5 * (points[static_cast<std::size_t>(i)] +
                                           points[static_cast<std::size_t>(i) + 1]);
        const Eigen::VectorXd d = masked_delta(model, points[static_cast<std::size_t>(i)],
                                               points[static_cast<std::size_t>(i) + 1]);
        cum[static_cast<std::size_t>(i) + 1] =
            cum[static_cast<std::size_t>(i)] + std::sqrt(metric_dot(model, mid, d, d));
    }
    const double target = u * cum.back();
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    std::size_t hi = static_cast<std::size_t>(it - cum.begin());
    if (hi == 0) return points.front();
    if (hi > static_cast<std::size_t>(N)) return points.back();
    const std::size_t lo = hi - 1;
    const double span = cum[hi] - cum[lo];
    const double w = span > 0.0 ? (target - cum[lo]) / span : 0.0;
    return points[lo] + w * (points[hi] - points[lo]);
}

Curve Curve::segment(const MetricModel& model, const ChartPoint& a, const ChartPoint& b,
                     int samples) {
    if (samples < 2) throw InputError("segment: need at least 2 samples");
    Curve c;
    c.model = model;
    const Eigen::VectorXd qa = model.flatten(a), qb = model.flatten(b);
    for (int i = 0; i < samples; ++i) {
        const double u = static_cast<double>(i) / (samples - 1);
        c.params.push_back(u);
        c.points.push_back(qa + u * (qb - qa));
    }
    return c;
}

LengthResult curve_length(const Curve& curve, double tol) {
    const MetricModel& model = curve.model;
    const int N = curve.size() - 1;
    if (N < 1) return {0.0, 0.0};
    for (const auto& p : curve.points)
        if (!p.allFinite()) throw InputError("curve_length: non-finite coordinates");

    double total = 0.0, total_err = 0.0;
    const double seg_tol = tol / std::max(1, N);
    for (int i = 0; i < N; ++i) {
        const Eigen::VectorXd& a = curve.points[static_cast<std::size_t>(i)];
        const Eigen::VectorXd& b = curve.points[static_cast<std::size_t>(i) + 1];
        const Eigen::VectorXd d = masked_delta(model, a, b);
        // composite midpoint rule along the chart-straight segment, doubling
        // the panel count until stable
        double prev = std::numeric_limits<double>::quiet_NaN();
        double value = 0.0;
        for (int panels = 1; panels <= 4096; panels *= 2) {
            double acc = 0.0;
            for (int j = 0; j < panels; ++j) {
                const double u = (j + 0.5) / panels;
                const Eigen::VectorXd mid = a + u * (b - a);
                acc += std::sqrt(std::max(0.0, metric_dot(model, mid, d, d)));
            }
            value = acc / panels;
            if (!std::isnan(prev) && std::abs(value - prev) < seg_tol) break;
            prev = value;
        }
        total += value;
        total_err += std::isnan(prev) ? 0.0 : std::abs(value - prev);
    }
    return {total, total_err};
}

IntegrationResult integrate_geodesic(const MetricModel& model, const ChartPoint& p,
                                     const TangentVector& v, double T,
                                     const IntegrateOptions& opts) {
    const Eigen::VectorXd q0 = model.flatten(p);
    const Eigen::VectorXd v0 = model.flatten(v);
    if (!model.smooth_at({q0.data(), static_cast<std::size_t>(q0.size())}))
        throw SingularPointError("integrate_geodesic: start on the singular locus");
    if (!(metric_dot(model, q0, v0, v0) > 0.0))
        throw InputError("integrate_geodesic: zero initial velocity");
    if (!(T > 0.0)) throw InputError("integrate_geodesic: need T > 0");

    const int D = model.dim();
    // q'' + Gamma(q',q') = 0 for a diagonal metric:
    //   a_i = -(2 v_i sum_j d_j(g_i) v_j - sum_j d_i(g_j) v_j^2) / (2 g_i)
    auto sys = [&](const State& y, State& dydt, double /*t*/) {
        const std::span<const double> q(y.data(), static_cast<std::size_t>(D));
        Eigen::VectorXd g(D);
        model.metric_diag(q, {g.data(), static_cast<std::size_t>(D)});
        Eigen::MatrixXd dg(D, D);
        std::vector<double> buf(static_cast<std::size_t>(D));
        for (int c = 0; c < D; ++c) {
            model.metric_diag_partial(q, c, buf);
            for (int i = 0; i < D; ++i) dg(c, i) = buf[static_cast<std::size_t>(i)];
        }
        dydt.resize(static_cast<std::size_t>(2 * D));
        for (int i = 0; i < D; ++i) dydt[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(D + i)];
        for (int i = 0; i < D; ++i) {
            double s1 = 0.0, s2 = 0.0;
            const double vi = y[static_cast<std::size_t>(D + i)];
            for (int j = 0; j < D; ++j) {
                const double vj = y[static_cast<std::size_t>(D + j)];
                s1 += dg(j, i) * vj;
                s2 += dg(i, j) * vj * vj;
            }
            dydt[static_cast<std::size_t>(D + i)] = -(2.0 * vi * s1 - s2) / (2.0 * g[i]);
        }
    };
    namespace ode = boost::numeric::odeint;
    // Cash-Karp rather than dopri5: the floor guard below rolls the state
    // back, which an FSAL stepper's cached derivative cannot survive.
    auto stepper = ode::make_controlled(opts.abs_tol, opts.rel_tol,
                                        ode::runge_kutta_cash_karp54<State>());

    State y(static_cast<std::size_t>(2 * D));
    for (int i = 0; i < D; ++i) y[static_cast<std::size_t>(i)] = q0[i];
    for (int i = 0; i < D; ++i) y[static_cast<std::size_t>(D + i)] = v0[i];

    Curve curve;
    curve.model = model;
    curve.proportional_arclength = true;  // geodesics run at constant speed
    auto record = [&](double t, const State& s) {
        curve.params.push_back(t);
        curve.points.push_back(head_vec(s, D));
        curve.velocities.push_back(tail_vec(s, D));
    };

    double t = 0.0;
    double dt = std::min(opts.initial_dt, T);
    const double dt_min = 1e-14 * std::max(1.0, T);
    record(t, y);

    StopCause cause = StopCause::ReachedTime;
    for (int step = 0; step < opts.max_steps; ++step) {
        if (t >= T * (1.0 - 1e-15)) {
            cause = StopCause::ReachedTime;
            break;
        }
        dt = std::min({dt, opts.max_dt, T - t});
        const State y_saved = y;
        const double t_saved = t;
        const auto res = stepper.try_step(sys, y, t, dt);
        if (res == ode::fail) {
            if (dt < dt_min) {
                cause = StopCause::StepUnderflow;
                break;
            }
            continue;  // dt has been reduced by the controller
        }
        if (below_floor(model, y, opts.r_floor)) {
            // halve the step actually taken, not the controller's grown
            // suggestion, so the retries genuinely shrink
            const double dt_taken = t - t_saved;
            const State y_trial = y;
            y = y_saved;
            t = t_saved;
            if (dt_taken <= dt_min * 4.0) {
                // land on the crossing by linear interpolation of the last step
                double xi = 1.0;
                for (int k = 0; k < model.n(); ++k) {
                    const double ra = y_saved[static_cast<std::size_t>(model.ir(k))];
                    const double rb = y_trial[static_cast<std::size_t>(model.ir(k))];
                    if (rb <= opts.r_floor && ra > rb)
                        xi = std::min(xi, (ra - opts.r_floor) / (ra - rb));
                }
                State yc(y_saved.size());
                for (std::size_t i = 0; i < yc.size(); ++i)
                    yc[i] = y_saved[i] + xi * (y_trial[i] - y_saved[i]);
                record(t_saved + xi * dt_taken, yc);
                cause = StopCause::HitStratumFloor;
                t = t_saved + xi * dt_taken;
                break;
            }
            dt = dt_taken / 2.0;
            continue;
        }
        record(t, y);
        if (step == opts.max_steps - 1) cause = StopCause::StepUnderflow;
    }
    if (cause == StopCause::ReachedTime && std::abs(curve.params.back() - T) > 1e-12 * std::max(1.0, T)) {
        // loop exhausted without reaching T
        if (curve.params.back() < T) cause = StopCause::StepUnderflow;
    }
    return {std::move(curve), cause, t};
}

namespace {

// One full integration of the flow, endpoint only.
Eigen::VectorXd flow_endpoint(const MetricModel& model, const Eigen::VectorXd& q0,
                              const Eigen::VectorXd& v0, const IntegrateOptions& opts,
                              bool& ok) {
    IntegrationResult res;
    try {
        res = integrate_geodesic(model, model.unflatten(q0), model.unflatten_tangent(v0), 1.0,
                                 opts);
    } catch (const std::exception&) {
        ok = false;
        return q0;
    }
    ok = (res.cause == StopCause::ReachedTime);
    return res.curve.points.back();
}

Curve resample_uniform(const MetricModel& model, const Curve& in, int samples) {
    Curve out;
    out.model = model;
    out.proportional_arclength = in.proportional_arclength;
    const double t0 = in.params.front(), t1 = in.params.back();
    const bool with_vel = in.velocities.size() == in.points.size();
    for (int i = 0; i < samples; ++i) {
        const double u = static_cast<double>(i) / (samples - 1);
        const double t = t0 + u * (t1 - t0);
        out.params.push_back(u);
        out.points.push_back(in.at_param(t));
        if (with_vel) {
            // linear interpolation of stored velocities
            const auto it = std::upper_bound(in.params.begin(), in.params.end(), t);
            std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - in.params.begin()),
                                                   in.params.size() - 1);
            std::size_t lo = hi == 0 ? 0 : hi - 1;
            const double span = in.params[hi] - in.params[lo];
            const double w = span > 0.0 ? (t - in.params[lo]) / span : 0.0;
            out.velocities.push_back(in.velocities[lo] +
                                     w * (in.velocities[hi] - in.velocities[lo]));
        }
    }
    return out;
}

} // namespace

ShootOutcome shoot_geodesic(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
                            const ConnectOptions& opts) {
    const Eigen::VectorXd qp = model.flatten(p);
    const Eigen::VectorXd qq = model.flatten(q);
    if (!model.smooth_at({qp.data(), static_cast<std::size_t>(qp.size())}) ||
        !model.smooth_at({qq.data(), static_cast<std::size_t>(qq.size())}))
        throw InputError("shoot_geodesic: both endpoints must be interior");

    const int D = model.dim();
    IntegrateOptions iopts;
    iopts.abs_tol = 1e-12;
    iopts.rel_tol = 1e-12;

    ShootingResult info;
    info.initial_velocity = qq - qp;
    const double qscale = 1.0 + qq.lpNorm<Eigen::Infinity>();

    if (info.initial_velocity.lpNorm<Eigen::Infinity>() == 0.0) {
        info.converged = true;
        Curve c = Curve::segment(model, p, q, 2);
        c.proportional_arclength = true;
        return {info, std::move(c)};
    }

    bool ok = true;
    Eigen::VectorXd F = flow_endpoint(model, qp, info.initial_velocity, iopts, ok) - qq;
    info.miss = F.lpNorm<Eigen::Infinity>();

    for (int it = 0; it < opts.shoot_max_iterations && info.miss > opts.shoot_tol * qscale; ++it) {
        info.iterations = it + 1;
        // finite-difference Jacobian of the endpoint w.r.t. initial velocity
        Eigen::MatrixXd J(D, D);
        const double h = 1e-7 * std::max(1.0, info.initial_velocity.lpNorm<Eigen::Infinity>());
        for (int c = 0; c < D; ++c) {
            Eigen::VectorXd vp = info.initial_velocity;
            vp[c] += h;
            bool okc = true;
            const Eigen::VectorXd Fp = flow_endpoint(model, qp, vp, iopts, okc) - qq;
            J.col(c) = (Fp - F) / h;
        }
        Eigen::VectorXd delta = J.partialPivLu().solve(-F);
        if (!delta.allFinite()) break;
        bool improved = false;
        for (double lam = 1.0; lam >= 1.0 / 64.0; lam /= 2.0) {
            const Eigen::VectorXd v_try = info.initial_velocity + lam * delta;
            bool okt = true;
            const Eigen::VectorXd Ft = flow_endpoint(model, qp, v_try, iopts, okt) - qq;
            if (okt && Ft.lpNorm<Eigen::Infinity>() < info.miss) {
                info.initial_velocity = v_try;
                F = Ft;
                info.miss = Ft.lpNorm<Eigen::Infinity>();
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    info.converged = info.miss <= opts.shoot_tol * qscale;

    Curve curve;
    if (info.converged) {
        IntegrateOptions dense = iopts;
        dense.max_dt = 1.0 / std::max(16, opts.output_samples - 1);
        const auto res = integrate_geodesic(model, p, model.unflatten_tangent(info.initial_velocity),
                                            1.0, dense);
        curve = resample_uniform(model, res.curve, opts.output_samples);
        curve.proportional_arclength = true;
        // pin the endpoint exactly
        curve.points.back() = qq;
    }
    return {info, std::move(curve)};
}

namespace {

// ---- strategy A: discrete energy minimization -------------------------------

struct EnergyWork {
    const MetricModel& model;
    int D;
    std::vector<Eigen::VectorXd>& V;  // N+1 vertices, endpoints fixed

    double energy(std::vector<Eigen::VectorXd>* grad) const {
        const int N = static_cast<int>(V.size()) - 1;
        if (grad) {
            grad->assign(V.size(), Eigen::VectorXd::Zero(D));
        }
        Eigen::VectorXd g(D);
        std::vector<double> buf(static_cast<std::size_t>(D));
        double E = 0.0;
        for (int i = 0; i < N; ++i) {
            const Eigen::VectorXd& a = V[static_cast<std::size_t>(i)];
            const Eigen::VectorXd& b = V[static_cast<std::size_t>(i) + 1];
            const Eigen::VectorXd d = masked_delta(model, a, b);
            const Eigen::VectorXd mid = 0.5 * (a + b);
            model.metric_diag({mid.data(), static_cast<std::size_t>(D)},
                              {g.data(), static_cast<std::size_t>(D)});
            double e = 0.0;
            for (int c = 0; c < D; ++c) e += g[c] * d[c] * d[c];
            E += e;
            if (!grad) continue;
            Eigen::VectorXd& ga = (*grad)[static_cast<std::size_t>(i)];
            Eigen::VectorXd& gb = (*grad)[static_cast<std::size_t>(i) + 1];
            for (int c = 0; c < D; ++c) {
                // metric-derivative part, shared by both endpoints via the midpoint
                model.metric_diag_partial({mid.data(), static_cast<std::size_t>(D)}, c, buf);
                double mpart = 0.0;
                for (int a2 = 0; a2 < D; ++a2) mpart += buf[static_cast<std::size_t>(a2)] * d[a2] * d[a2];
                mpart *= 0.5;
                ga[c] += mpart - 2.0 * g[c] * d[c];
                gb[c] += mpart + 2.0 * g[c] * d[c];
            }
        }
        if (grad) {
            (*grad)[0].setZero();
            (*grad)[V.size() - 1].setZero();
            for (auto& v : *grad) v *= static_cast<double>(N);
        }
        return E * N;
    }

    double polyline_length() const {
        double L = 0.0;
        for (std::size_t i = 0; i + 1 < V.size(); ++i) {
            const Eigen::VectorXd d = masked_delta(model, V[i], V[i + 1]);
            const Eigen::VectorXd mid = 0.5 * (V[i] + V[i + 1]);
            L += std::sqrt(std::max(0.0, metric_dot(model, mid, d, d)));
        }
        return L;
    }

    void clamp_interior(double r_floor) const {
        for (std::size_t i = 1; i + 1 < V.size(); ++i)
            for (int k = 0; k < model.n(); ++k)
                V[i][model.ir(k)] = std::max(V[i][model.ir(k)], r_floor);
    }

    // Preconditions the gradient with the dominant (tridiagonal) part of the
    // energy Hessian, one Thomas solve per coordinate.  Without this the
    // descent stalls on the smooth modes (condition number grows like N^2).
    void precondition(const std::vector<Eigen::VectorXd>& grad,
                      std::vector<Eigen::VectorXd>& dir) const {
        const int N = static_cast<int>(V.size()) - 1;
        const int M = N - 1;  // interior vertices
        dir.assign(V.size(), Eigen::VectorXd::Zero(D));
        if (M <= 0) return;
        Eigen::VectorXd g(D);
        // midpoint coefficients with the cusp masking applied per segment
        std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) {
            const Eigen::VectorXd mid = 0.5 * (V[static_cast<std::size_t>(i)] +
                                               V[static_cast<std::size_t>(i) + 1]);
            model.metric_diag({mid.data(), static_cast<std::size_t>(D)},
                              {g.data(), static_cast<std::size_t>(D)});
            w[static_cast<std::size_t>(i)] = g;
            for (int k = 0; k < model.n(); ++k)
                if (V[static_cast<std::size_t>(i)][model.ir(k)] <= 0.0 ||
                    V[static_cast<std::size_t>(i) + 1][model.ir(k)] <= 0.0)
                    w[static_cast<std::size_t>(i)][model.itheta(k)] = 0.0;
        }
        std::vector<double> a(static_cast<std::size_t>(M)), b(static_cast<std::size_t>(M)),
            rhs(static_cast<std::size_t>(M));
        for (int c = 0; c < D; ++c) {
            for (int i = 0; i < M; ++i) {
                const double wl = w[static_cast<std::size_t>(i)][c];
                const double wr = w[static_cast<std::size_t>(i + 1)][c];
                a[static_cast<std::size_t>(i)] = std::max(2.0 * N * (wl + wr), 1e-30);
                b[static_cast<std::size_t>(i)] = -2.0 * N * wr;  // coupling (i, i+1)
                rhs[static_cast<std::size_t>(i)] = grad[static_cast<std::size_t>(i + 1)][c];
            }
            // Thomas elimination
            for (int i = 1; i < M; ++i) {
                const double m = b[static_cast<std::size_t>(i - 1)] / a[static_cast<std::size_t>(i - 1)];
                a[static_cast<std::size_t>(i)] -= m * b[static_cast<std::size_t>(i - 1)];
                a[static_cast<std::size_t>(i)] = std::max(a[static_cast<std::size_t>(i)], 1e-30);
                rhs[static_cast<std::size_t>(i)] -= m * rhs[static_cast<std::size_t>(i - 1)];
            }
            dir[static_cast<std::size_t>(M)][c] = rhs[static_cast<std::size_t>(M - 1)] /
                                                  a[static_cast<std::size_t>(M - 1)];
            for (int i = M - 2; i >= 0; --i)
                dir[static_cast<std::size_t>(i + 1)][c] =
                    (rhs[static_cast<std::size_t>(i)] -
                     b[static_cast<std::size_t>(i)] * dir[static_cast<std::size_t>(i + 2)][c]) /
                    a[static_cast<std::size_t>(i)];
        }
    }
};

void refine_path(std::vector<Eigen::VectorXd>& V) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(2 * V.size());
    for (std::size_t i = 0; i + 1 < V.size(); ++i) {
        out.push_back(V[i]);
        out.push_back(0.5 * (V[i] + V[i + 1]));
    }
    out.push_back(V.back());
    V = std::move(out);
}

} // namespace

Curve connect_energy(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
                     const ConnectOptions& opts) {
    const Eigen::VectorXd qp = model.flatten(p);
    const Eigen::VectorXd qq = model.flatten(q);
    const int D = model.dim();

    std::vector<Eigen::VectorXd> V;
    int N = opts.initial_segments;
    if (opts.initial_path != nullptr) {
        const Curve& init = *opts.initial_path;
        N = std::max(opts.initial_segments, init.size() - 1);
        for (int i = 0; i <= N; ++i)
            V.push_back(init.at_arclength_fraction(static_cast<double>(i) / N));
        V.front() = qp;
        V.back() = qq;
    } else {
        for (int i = 0; i <= N; ++i)
            V.push_back(qp + (static_cast<double>(i) / N) * (qq - qp));
    }

    EnergyWork work{model, D, V};
    work.clamp_interior(opts.r_floor);

    double L_prev = std::numeric_limits<double>::quiet_NaN();
    std::vector<Eigen::VectorXd> grad, dir, trial;
    while (true) {
        // minimize at this resolution: preconditioned descent with backtracking
        double E = work.energy(&grad);
        for (int it = 0; it < opts.max_level_iterations; ++it) {
            double gmax = 0.0;
            for (const auto& gv : grad) gmax = std::max(gmax, gv.lpNorm<Eigen::Infinity>());
            if (gmax < 1e-13 * (1.0 + E) * N) break;
            work.precondition(grad, dir);
            double slope = 0.0;
            for (std::size_t i = 0; i < grad.size(); ++i) slope += grad[i].dot(dir[i]);
            if (!(slope > 0.0)) break;
            bool accepted = false;
            double alpha = 1.0;
            for (int bt = 0; bt < 40 && !accepted; ++bt) {
                trial = V;
                for (std::size_t i = 1; i + 1 < trial.size(); ++i)
                    trial[i] -= alpha * dir[i];
                EnergyWork tw{model, D, trial};
                tw.clamp_interior(opts.r_floor);
                const double Et = tw.energy(nullptr);
                if (std::isfinite(Et) && Et <= E - 1e-4 * alpha * slope) {
                    V = trial;
                    const double drop = E - Et;
                    E = Et;
                    accepted = true;
                    if (drop < 1e-14 * (1.0 + std::abs(E))) it = opts.max_level_iterations;
                } else {
                    alpha *= 0.5;
                }
            }
            if (!accepted) break;
            work.energy(&grad);
        }

        const double L = work.polyline_length();
        const int segs = static_cast<int>(V.size()) - 1;
        if (!std::isnan(L_prev) && std::abs(L - L_prev) < opts.length_tol) break;
        if (2 * segs > opts.max_vertices) break;
        L_prev = L;
        refine_path(V);
        work.clamp_interior(opts.r_floor);
    }

    {
        EnergyWork final_work{model, D, V};
        const double Lfin = final_work.polyline_length();
        if (!std::isfinite(Lfin))
            throw SolverError("connect_energy: descent left the chart", Lfin);
    }
    Curve out;
    out.model = model;
    out.points = std::move(V);
    // parameterize by cumulative polyline length
    out.params.resize(out.points.size());
    out.params[0] = 0.0;
    for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
        const Eigen::VectorXd d = masked_delta(model, out.points[i], out.points[i + 1]);
        const Eigen::VectorXd mid = 0.5 * (out.points[i] + out.points[i + 1]);
        out.params[i + 1] = out.params[i] + std::sqrt(std::max(0.0, metric_dot(model, mid, d, d)));
    }
    const double total = out.params.back();
    if (total > 0.0)
        for (auto& t : out.params) t /= total;
    out.proportional_arclength = true;
    return out;
}

namespace {

Curve sphere_great_circle(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
                          int samples) {
    const double R = model.sphere_radius();
    auto embed = [&](double phi, double th) {
        return Eigen::Vector3d(std::sin(phi) * std::cos(th), std::sin(phi) * std::sin(th),
                               std::cos(phi));
    };
    const Eigen::Vector3d u0 = embed(p.r[0], p.theta[0]);
    const Eigen::Vector3d u1 = embed(q.r[0], q.theta[0]);
    const double ang = std::atan2(u0.cross(u1).norm(), u0.dot(u1));
    Curve c;
    c.model = model;
    c.proportional_arclength = true;
    double prev_theta = p.theta[0];
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / (samples - 1);
        Eigen::Vector3d u;
        if (ang < 1e-14) {
            u = u0;
        } else {
            u = (std::sin((1.0 - t) * ang) * u0 + std::sin(t * ang) * u1) / std::sin(ang);
            u.normalize();
        }
        const double phi = std::acos(std::clamp(u.z(), -1.0, 1.0));
        double th = std::atan2(u.y(), u.x());
        // unwrap onto the real line for chart continuity
        while (th - prev_theta > kPi) th -= 2.0 * kPi;
        while (th - prev_theta < -kPi) th += 2.0 * kPi;
        prev_theta = th;
        Eigen::VectorXd pt(2);
        pt << phi, th;
        c.params.push_back(t);
        c.points.push_back(pt);
    }
    (void)R;
    return c;
}

} // namespace

Curve connect(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
              const ConnectOptions& opts) {
    model.check_point(p);
    model.check_point(q);
    const Eigen::VectorXd qp = model.flatten(p), qq = model.flatten(q);
    if ((qp - qq).lpNorm<Eigen::Infinity>() == 0.0) {
        Curve c = Curve::segment(model, p, q, 2);
        c.proportional_arclength = true;
        return c;
    }
    using Strategy = ConnectOptions::Strategy;
    if (opts.strategy == Strategy::Energy) return connect_energy(model, p, q, opts);
    if (opts.strategy == Strategy::Shooting) {
        auto out = shoot_geodesic(model, p, q, opts);
        if (!out.info.converged)
            throw SolverError("shooting did not converge", out.info.miss);
        return std::move(out.curve);
    }
    // Auto
    if (model.kind() == MetricModel::Kind::EuclideanBlock) {
        Curve c = Curve::segment(model, p, q, 2);
        c.proportional_arclength = true;
        return c;
    }
    if (model.kind() == MetricModel::Kind::SpherePatch)
        return sphere_great_circle(model, p, q, opts.output_samples);
    const bool interior = model.smooth_at({qp.data(), static_cast<std::size_t>(qp.size())}) &&
                          model.smooth_at({qq.data(), static_cast<std::size_t>(qq.size())});
    if (interior) {
        auto out = shoot_geodesic(model, p, q, opts);
        if (out.info.converged) return std::move(out.curve);
    }
    return connect_energy(model, p, q, opts);
}

double distance(const MetricModel& model, const ChartPoint& p, const ChartPoint& q,
                const ConnectOptions& opts) {
    model.check_point(p);
    model.check_point(q);
    const Eigen::VectorXd qp = model.flatten(p), qq = model.flatten(q);
    if ((qp - qq).lpNorm<Eigen::Infinity>() == 0.0) return 0.0;
    if (model.kind() == MetricModel::Kind::EuclideanBlock) return (qq - qp).norm();
    if (model.kind() == MetricModel::Kind::SpherePatch) {
        auto embed = [&](const ChartPoint& a) {
            return Eigen::Vector3d(std::sin(a.r[0]) * std::cos(a.theta[0]),
                                   std::sin(a.r[0]) * std::sin(a.theta[0]), std::cos(a.r[0]));
        };
        const Eigen::Vector3d u = embed(p), w = embed(q);
        return model.sphere_radius() * std::atan2(u.cross(w).norm(), u.dot(w));
    }
    using Strategy = ConnectOptions::Strategy;
    const bool interior = model.smooth_at({qp.data(), static_cast<std::size_t>(qp.size())}) &&
                          model.smooth_at({qq.data(), static_cast<std::size_t>(qq.size())});
    if (interior && opts.strategy != Strategy::Energy) {
        auto out = shoot_geodesic(model, p, q, opts);
        if (out.info.converged) {
            // constant-speed parameterization on [0,1]: length equals the speed
            return std::sqrt(metric_dot(model, qp, out.info.initial_velocity,
                                        out.info.initial_velocity));
        }
    }
    const Curve c = connect_energy(model, p, q, opts);
    return curve_length(c).length;
}

double sup_separation(const Curve& a, const Curve& b, int samples) {
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double u = static_cast<double>(i) / samples;
        m = std::max(m, (a.at_arclength_fraction(u) - b.at_arclength_fraction(u))
                            .lpNorm<Eigen::Infinity>());
    }
    return m;
}

double partition_length_check(const Curve& curve, int K) {
    if (K < 1) throw InputError("partition_length_check: need K >= 1");
    const MetricModel& model = curve.model;
    double total = 0.0;
    Eigen::VectorXd prev = curve.at_arclength_fraction(0.0);
    for (int j = 1; j <= K; ++j) {
        const Eigen::VectorXd cur = curve.at_arclength_fraction(static_cast<double>(j) / K);
        total += distance(model, model.unflatten(prev), model.unflatten(cur));
        prev = cur;
    }
    return total;
}

SecondVariation second_variation_check(const MetricModel& model, const Curve& end0,
                                       const Curve& end1, double s_center, double h,
                                       int time_nodes, const ConnectOptions& opts) {
    if (!(h > 0.0) || s_center - h < 0.0 || s_center + h > 1.0)
        throw InputError("second_variation_check: need [s-h, s+h] inside [0,1]");
    if (time_nodes < 5 || time_nodes % 2 == 0)
        throw InputError("second_variation_check: time_nodes must be odd and >= 5");

    auto member = [&](double s) {
        const ChartPoint a = model.unflatten(end0.at_arclength_fraction(s));
        const ChartPoint b = model.unflatten(end1.at_arclength_fraction(s));
        return connect(model, a, b, opts);
    };
    const Curve beta_m = member(s_center - h);
    const Curve beta_0 = member(s_center);
    const Curve beta_p = member(s_center + h);

    // constant-speed geodesics on [0,1]: the stored initial speed is the exact
    // length, free of polyline sampling bias
    auto geo_len = [&](const Curve& c) {
        if (c.velocities.size() == c.points.size() && !c.points.empty())
            return std::sqrt(metric_dot(model, c.points.front(), c.velocities.front(),
                                        c.velocities.front()));
        return curve_length(c).length;
    };
    const double Lm = geo_len(beta_m);
    const double L0 = geo_len(beta_0);
    const double Lp = geo_len(beta_p);
    const double second_difference = (Lp - 2.0 * L0 + Lm) / (h * h);

    const int M = time_nodes;
    const int D = model.dim();
    std::vector<Eigen::VectorXd> P0(static_cast<std::size_t>(M)), Vf(static_cast<std::size_t>(M)),
        Tf(static_cast<std::size_t>(M));
    double vmax = 0.0;
    for (int i = 0; i < M; ++i) {
        const double t = static_cast<double>(i) / (M - 1);
        P0[static_cast<std::size_t>(i)] = beta_0.at_arclength_fraction(t);
        Vf[static_cast<std::size_t>(i)] = (beta_p.at_arclength_fraction(t) -
                                           beta_m.at_arclength_fraction(t)) /
                                          (2.0 * h);
        vmax = std::max(vmax, Vf[static_cast<std::size_t>(i)].lpNorm<Eigen::Infinity>());
    }
    if (vmax < 1e-14) throw InputError("second_variation_check: zero variation field");
    const double dt = 1.0 / (M - 1);
    for (int i = 0; i < M; ++i) {
        if (i == 0)
            Tf[0] = (-3.0 * P0[0] + 4.0 * P0[1] - P0[2]) / (2.0 * dt);
        else if (i == M - 1)
            Tf[static_cast<std::size_t>(M - 1)] =
                (3.0 * P0[static_cast<std::size_t>(M - 1)] - 4.0 * P0[static_cast<std::size_t>(M - 2)] +
                 P0[static_cast<std::size_t>(M - 3)]) /
                (2.0 * dt);
        else
            Tf[static_cast<std::size_t>(i)] =
                (P0[static_cast<std::size_t>(i + 1)] - P0[static_cast<std::size_t>(i - 1)]) /
                (2.0 * dt);
    }

    std::vector<double> integrand(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
        // dV/dt
        Eigen::VectorXd dV(D);
        if (i == 0)
            dV = (-3.0 * Vf[0] + 4.0 * Vf[1] - Vf[2]) / (2.0 * dt);
        else if (i == M - 1)
            dV = (3.0 * Vf[static_cast<std::size_t>(M - 1)] - 4.0 * Vf[static_cast<std::size_t>(M - 2)] +
                  Vf[static_cast<std::size_t>(M - 3)]) /
                 (2.0 * dt);
        else
            dV = (Vf[static_cast<std::size_t>(i + 1)] - Vf[static_cast<std::size_t>(i - 1)]) /
                 (2.0 * dt);

        const ChartPoint qi = model.unflatten(P0[static_cast<std::size_t>(i)]);
        const auto gam = christoffel(model, qi);
        // (D_T V)^c = dV^c/dt + Gamma^c_{ab} T^a V^b
        Eigen::VectorXd DTV = dV;
        for (int c = 0; c < D; ++c)
            DTV[c] += Tf[static_cast<std::size_t>(i)].dot(gam[static_cast<std::size_t>(c)] *
                                                          Vf[static_cast<std::size_t>(i)]);

        const Eigen::VectorXd& q = P0[static_cast<std::size_t>(i)];
        const double tt = metric_dot(model, q, Tf[static_cast<std::size_t>(i)],
                                     Tf[static_cast<std::size_t>(i)]);
        const double wt = metric_dot(model, q, DTV, Tf[static_cast<std::size_t>(i)]);
        const double ww = metric_dot(model, q, DTV, DTV);
        const double perp2 = ww - (tt > 0.0 ? wt * wt / tt : 0.0);

        // curvature term, factor by factor (Euclidean block contributes zero)
        double rterm = 0.0;
        for (int k = 0; k < model.n(); ++k) {
            const int irk = model.ir(k), itk = model.itheta(k);
            Eigen::VectorXd g(D);
            model.metric_diag({q.data(), static_cast<std::size_t>(D)},
                              {g.data(), static_cast<std::size_t>(D)});
            const double K = model.factor_curvature({q.data(), static_cast<std::size_t>(D)}, k);
            const double vv_f = g[irk] * Vf[static_cast<std::size_t>(i)][irk] *
                                    Vf[static_cast<std::size_t>(i)][irk] +
                                g[itk] * Vf[static_cast<std::size_t>(i)][itk] *
                                    Vf[static_cast<std::size_t>(i)][itk];
            const double tt_f = g[irk] * Tf[static_cast<std::size_t>(i)][irk] *
                                    Tf[static_cast<std::size_t>(i)][irk] +
                                g[itk] * Tf[static_cast<std::size_t>(i)][itk] *
                                    Tf[static_cast<std::size_t>(i)][itk];
            const double vt_f = g[irk] * Vf[static_cast<std::size_t>(i)][irk] *
                                    Tf[static_cast<std::size_t>(i)][irk] +
                                g[itk] * Vf[static_cast<std::size_t>(i)][itk] *
                                    Tf[static_cast<std::size_t>(i)][itk];
            rterm += K * (vv_f * tt_f - vt_f * vt_f);
        }
        integrand[static_cast<std::size_t>(i)] = perp2 - rterm;
    }

    // Simpson over [0,1], then divide by the constant speed c = L0
    double I = 0.0;
    for (int i = 0; i + 2 < M; i += 2)
        I += dt / 3.0 *
             (integrand[static_cast<std::size_t>(i)] + 4.0 * integrand[static_cast<std::size_t>(i + 1)] +
              integrand[static_cast<std::size_t>(i + 2)]);
    const double formula = I / L0;

    return {second_difference, formula};
}

} // namespace cusplab
