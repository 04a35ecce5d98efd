#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "cusplab/errors.hpp"

namespace cusplab {

// (2/pi) int_{|t|/c}^{c} (log|t| sin(pi log r / log|t|))^2 r^{2 alpha} dlog r
// with |t| = exp(-k).  For alpha = 0 the value is k^3/pi - 4pi/3 + O(k^3 eps^5)
// at the default cutoff c = 1/e (eps = 1/k); for alpha = 1 it stays bounded.
double collar_norm_integral(double k, int alpha, double cutoff = 0.36787944117144232160);

// Smooth plateau cutoff psi on [0,1]: 0 below u0, 1 above u1, C-infinity ramp.
struct PairingProfile {
    std::string name;
    double u0 = 0.25;
    double u1 = 0.75;

    static PairingProfile plateau(double u0, double u1, std::string name = "plateau");
    double psi(double u) const;
    double dpsi(double u) const;
};

// Quadrature of int (z^alpha / (2 z zbar)) d(beta_dot log r)/dlog r dE over the
// annulus {|t| < |z| < 1} with the boundary-normalized radial test profile
// beta_dot(r) = psi(log r / log|t|) / (t log|t|).  Equals -pi/t at alpha = 0
// and 0 otherwise.
std::complex<double> plumbing_pairing(std::complex<double> t, int alpha,
                                      const PairingProfile& profile = PairingProfile::plateau(0.25, 0.75));

// Symmetric (n+m) x (n+m) matrix with a large diagonal head lambda_1..lambda_n,
// bounded couplings, and a bounded symmetric tail block B.
struct BlockMatrix {
    Eigen::VectorXd lambda;   // n large diagonal entries
    Eigen::MatrixXd coupling; // (n+m)^2 symmetric, zero on the head diagonal and the tail block
    Eigen::MatrixXd tail;     // m x m symmetric block B

    int n() const { return static_cast<int>(lambda.size()); }
    int m() const { return static_cast<int>(tail.rows()); }
    double rho() const { return lambda.cwiseInverse().sum(); }
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> assemble() const;

    // Ensemble member: lambda log-uniform in [1e2, 1e6], couplings uniform in
    // [-1, 1], tail symmetric with |det| floored away from zero.
    static BlockMatrix random(int n, int m, std::mt19937_64& rng);
};

struct DetAsymptotics {
    double ratio;      // det A / (det B prod lambda_k)
    double deviation;  // |ratio - 1|
    double rho;
};
DetAsymptotics block_det_asymptotics(const BlockMatrix& A);

// Fitted per-sample constants for the four inverse entry classes:
//   |alpha_kk lambda_k - 1| <= c_diag rho
//   |alpha_jl|             <= c_head / (lambda_j lambda_l),  j < l <= n
//   |alpha_jl|             <= c_cross / lambda_j,            j <= n < l
//   |alpha_tail - b^{jl}|  <= c_tail rho max(1, |B^{-1}|_max)
struct InverseCheck {
    double c_diag;
    double c_head;
    double c_cross;
    double c_tail;
    double rho;
};
InverseCheck block_inverse_check(const BlockMatrix& A);

// pi^3 / (|t|^2 (-log|t|)^3); the product with |t|^2 (-log|t|)^3 is pi^3.
double wp_entry_model(std::complex<double> t);

struct NormalFormCheck {
    double t_chart;   // entry model times |dt|^2
    double r_chart;   // pi^3 (4 dr^2 + r^6 dtheta^2) on the pushed tangent
    double residual;  // relative difference
};
// r = (-log|t|)^{-1/2}, theta = arg t; the two quadratic forms agree exactly.
NormalFormCheck normal_form_check(std::complex<double> t, std::complex<double> dt);

} // namespace cusplab
