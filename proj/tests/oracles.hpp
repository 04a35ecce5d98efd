// Test-side oracles, independent of the library's computation paths: they
// reach the models only through eval_metric and plain arithmetic.
#pragma once

#include <cmath>
#include <functional>

#include "cusplab/metrics.hpp"

namespace oracles {

// Christoffel symbols from central differences of eval_metric with step
// h = 1e-5 max(1, r_min) and one Richardson pass.
inline std::vector<Eigen::MatrixXd> christoffel_fd(const cusplab::MetricModel& model,
                                                   const cusplab::ChartPoint& p) {
    const Eigen::VectorXd q = model.flatten(p);
    const int D = model.dim();
    const double h =
        1e-5 * std::max(1.0, model.rmin_at({q.data(), static_cast<std::size_t>(D)}));
    auto metric = [&](int c, double step) {
        Eigen::VectorXd qq = q;
        qq[c] += step;
        return cusplab::eval_metric(model, model.unflatten(qq));
    };
    std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(D));
    for (int c = 0; c < D; ++c) {
        const Eigen::MatrixXd d1 = (metric(c, h) - metric(c, -h)) / (2.0 * h);
        const Eigen::MatrixXd d2 = (metric(c, h / 2.0) - metric(c, -h / 2.0)) / h;
        dg[static_cast<std::size_t>(c)] = (4.0 * d2 - d1) / 3.0;
    }
    const Eigen::MatrixXd g = cusplab::eval_metric(model, p);
    const Eigen::MatrixXd ginv = g.inverse();
    std::vector<Eigen::MatrixXd> gamma(static_cast<std::size_t>(D), Eigen::MatrixXd::Zero(D, D));
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            for (int k = 0; k < D; ++k) {
                double s = 0.0;
                for (int l = 0; l < D; ++l)
                    s += ginv(i, l) * (dg[static_cast<std::size_t>(j)](l, k) +
                                       dg[static_cast<std::size_t>(k)](l, j) -
                                       dg[static_cast<std::size_t>(l)](j, k));
                gamma[static_cast<std::size_t>(i)](j, k) = 0.5 * s;
            }
    return gamma;
}

// Brioschi curvature for a diagonal 2D metric through nested central
// differences of eval_metric.
inline double brioschi_fd(const cusplab::MetricModel& model, const cusplab::ChartPoint& p) {
    const Eigen::VectorXd q = model.flatten(p);
    const double h = 1e-4 * std::max(0.5, q[0]);
    auto EG = [&](double dr, double dth, double& E, double& G) {
        Eigen::VectorXd qq = q;
        qq[0] += dr;
        qq[1] += dth;
        const Eigen::MatrixXd g = cusplab::eval_metric(model, model.unflatten(qq));
        E = g(0, 0);
        G = g(1, 1);
    };
    auto Gr_over = [&](double dr) {
        double E0, G0, Ep, Gp, Em, Gm;
        EG(dr, 0, E0, G0);
        EG(dr + h, 0, Ep, Gp);
        EG(dr - h, 0, Em, Gm);
        return (Gp - Gm) / (2.0 * h) / std::sqrt(E0 * G0);
    };
    auto Eth_over = [&](double dth) {
        double E0, G0, Ep, Gp, Em, Gm;
        EG(0, dth, E0, G0);
        EG(0, dth + h, Ep, Gp);
        EG(0, dth - h, Em, Gm);
        return (Ep - Em) / (2.0 * h) / std::sqrt(E0 * G0);
    };
    double E0, G0;
    EG(0, 0, E0, G0);
    return -((Gr_over(h) - Gr_over(-h)) / (2.0 * h) + (Eth_over(h) - Eth_over(-h)) / (2.0 * h)) /
           (2.0 * std::sqrt(E0 * G0));
}

// Composite Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    double s = 0.0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + i * h;
        s += (h / 6.0) * (f(x0) + 4.0 * f(x0 + 0.5 * h) + f(x0 + h));
    }
    return s;
}

} // namespace oracles
