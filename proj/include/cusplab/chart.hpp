#pragma once

#include <Eigen/Dense>

namespace cusplab {

// A point of the mixed chart: a Euclidean block x (length 2m), and n polar
// cuspidal factors (r_k, theta_k).  Angles live on the real line (universal
// cover); quotienting by a deck transformation is a separate model.  At
// r_k = 0 the value theta_k is semantically irrelevant: the whole theta-line
// is identified to a single cusp point.
struct ChartPoint {
    Eigen::VectorXd x;      // size 2m
    Eigen::VectorXd r;      // size n, entries >= 0
    Eigen::VectorXd theta;  // size n

    ChartPoint() = default;
    ChartPoint(Eigen::VectorXd x_, Eigen::VectorXd r_, Eigen::VectorXd theta_)
        : x(std::move(x_)), r(std::move(r_)), theta(std::move(theta_)) {}

    // 2D factor conveniences (m = 0, n = 1)
    static ChartPoint polar(double r, double theta) {
        return ChartPoint(Eigen::VectorXd(0), Eigen::VectorXd::Constant(1, r),
                          Eigen::VectorXd::Constant(1, theta));
    }
    static ChartPoint plane(double x0, double x1) {
        Eigen::VectorXd x(2);
        x << x0, x1;
        return ChartPoint(x, Eigen::VectorXd(0), Eigen::VectorXd(0));
    }
};

struct TangentVector {
    Eigen::VectorXd dx;
    Eigen::VectorXd dr;
    Eigen::VectorXd dtheta;

    TangentVector() = default;
    TangentVector(Eigen::VectorXd dx_, Eigen::VectorXd dr_, Eigen::VectorXd dtheta_)
        : dx(std::move(dx_)), dr(std::move(dr_)), dtheta(std::move(dtheta_)) {}

    static TangentVector polar(double dr, double dtheta) {
        return TangentVector(Eigen::VectorXd(0), Eigen::VectorXd::Constant(1, dr),
                             Eigen::VectorXd::Constant(1, dtheta));
    }
};

} // namespace cusplab
