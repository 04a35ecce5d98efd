#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cusplab/chart.hpp"
#include "cusplab/errors.hpp"

namespace cusplab {

// Scalar field p(x, r, theta) multiplying a product metric as (1 + eps * p).
// Smooth on {r_k > 0} and bounded by |p| <= bound * ||r||^3.
struct PerturbationProfile {
    std::string name;
    double bound = 0.0;
    // p(x, r, theta)
    std::function<double(std::span<const double> x, std::span<const double> r,
                         std::span<const double> th)>
        value;
    // gradient of p appended into (gx, gr, gth); empty -> central differences
    std::function<void(std::span<const double> x, std::span<const double> r,
                       std::span<const double> th, std::span<double> gx,
                       std::span<double> gr, std::span<double> gth)>
        gradient;

    // Named profiles selectable from the CLI.
    //   "cubic-wave": sum_k r_k^3 (1 + cos theta_k + sin x_0), bound 3
    //   "radial":     sum_k r_k^3, bound 1
    static PerturbationProfile named(const std::string& name);
};

// The closed family of model metrics, all diagonal in the fixed coordinate
// ordering x_0..x_{2m-1}, r_0..r_{n-1}, theta_0..theta_{n-1}.
class MetricModel {
public:
    enum class Kind {
        EuclideanBlock,    // dx^2 on R^{2m}
        CuspidalPlane,     // s (4 dr^2 + r^6 dtheta^2)
        ProductCuspidal,   // dx^2 + s sum_k (4 dr_k^2 + r_k^6 dtheta_k^2)
        PerturbedProduct,  // product cuspidal times (1 + eps p)
        SpherePatch,       // R^2 (dr^2 + sin^2 r dtheta^2), negative control
        QuotientCover,     // dr^2 + r^6 dtheta^2 (half-plane cover of the twist quotient)
    };

    // Default-constructed models are empty placeholders (dimension zero).
    MetricModel() = default;

    static MetricModel euclidean_block(int m);
    static MetricModel cuspidal_plane(double scale);
    static MetricModel product_cuspidal(int m, int n, double scale);
    static MetricModel perturbed_product(const MetricModel& base, double epsilon,
                                         PerturbationProfile profile);
    static MetricModel sphere_patch(double radius);
    static MetricModel quotient_cover();

    Kind kind() const { return kind_; }
    int m() const { return m_; }
    int n() const { return n_; }
    int dim() const { return 2 * m_ + 2 * n_; }
    int xdim() const { return 2 * m_; }
    int ir(int k) const { return 2 * m_ + k; }          // flat index of r_k
    int itheta(int k) const { return 2 * m_ + n_ + k; } // flat index of theta_k
    double scale() const { return scale_; }
    double epsilon() const { return eps_; }
    double sphere_radius() const { return radius_; }
    const PerturbationProfile& profile() const { return profile_; }

    bool is_product_family() const {
        return kind_ == Kind::EuclideanBlock || kind_ == Kind::CuspidalPlane ||
               kind_ == Kind::ProductCuspidal || kind_ == Kind::QuotientCover;
    }
    bool two_dimensional() const { return dim() == 2; }

    // Diagonal metric coefficients in the flat layout.  theta_k entries vanish
    // at r_k = 0 (the degenerate direction keeps its slot).
    void metric_diag(std::span<const double> q, std::span<double> g) const;
    // d/dq_c of the diagonal coefficients.
    void metric_diag_partial(std::span<const double> q, int c, std::span<double> dg) const;
    // Conformal factor relative to the unperturbed product (1 for pure models).
    double conformal_factor(std::span<const double> q) const;

    bool smooth_at(std::span<const double> q) const;
    // Smallest r over the cusp factors (sphere: the polar angle), used for
    // finite-difference step selection near the singular locus.
    double rmin_at(std::span<const double> q) const;

    // Gaussian curvature of one 2D factor at q: factor -1 is the Euclidean
    // block (0); factor k in [0, n) is the k-th cuspidal/spherical plane.
    double factor_curvature(std::span<const double> q, int factor) const;

    // flat layout <-> structured point
    Eigen::VectorXd flatten(const ChartPoint& p) const;
    Eigen::VectorXd flatten(const TangentVector& v) const;
    ChartPoint unflatten(const Eigen::VectorXd& q) const;
    TangentVector unflatten_tangent(const Eigen::VectorXd& v) const;
    void check_point(const ChartPoint& p) const;   // throws InputError
    void check_tangent(const TangentVector& v) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::EuclideanBlock;
    int m_ = 0;
    int n_ = 0;
    double scale_ = 1.0;
    double eps_ = 0.0;
    double radius_ = 1.0;
    PerturbationProfile profile_;
};

// ---- module operations ------------------------------------------------------

// Full (2m+2n)x(2m+2n) metric matrix at p; symmetric, PSD, positive definite
// on the smooth locus.
Eigen::MatrixXd eval_metric(const MetricModel& model, const ChartPoint& p);

// Christoffel symbols Gamma^i_{jk}; tensor[i](j,k).  Closed forms where the
// model has them, assembled from metric_diag_partial otherwise.
std::vector<Eigen::MatrixXd> christoffel(const MetricModel& model, const ChartPoint& p);

// Gaussian curvature of a two-dimensional model at p.
double gaussian_curvature(const MetricModel& model, const ChartPoint& p);

// Hyperbolic metric density of the annulus {|t| < |z| < 1} relative to |dz|,
// with the degenerate branch at t = 0 on the punctured disc:
//   t != 0:  (pi / |log|t||) csc(pi log|z| / log|t|) / |z|
//   t  = 0:  1 / (|z| |log|z||)
double annulus_density(std::complex<double> t, std::complex<double> z);

struct SeriesCheck {
    double exact;      // (Theta csc Theta)^2
    double truncated;  // 1 + Theta^2/3 + Theta^4/15
    double residual;   // exact - truncated
};
SeriesCheck density_series_check(double Theta);

struct RevolutionCompare {
    double rr_ratio;    // (1 + 9 x^4 / 64) with x = 2r, against the 4 dr^2 term
    double thth_ratio;  // exactly 1
};
RevolutionCompare revolution_surface_compare(double r);

} // namespace cusplab
