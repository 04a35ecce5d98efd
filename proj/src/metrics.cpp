#include "cusplab/metrics.hpp"

#include <cmath>
#include <sstream>

namespace cusplab {

namespace {

constexpr double kPi = 3.14159265358979323846;

} // namespace

PerturbationProfile PerturbationProfile::named(const std::string& name) {
    PerturbationProfile p;
    p.name = name;
    if (name == "cubic-wave") {
        p.bound = 3.0;
        p.value = [](std::span<const double> x, std::span<const double> r,
                     std::span<const double> th) {
            const double w = x.empty() ? 0.0 : std::sin(x[0]);
            double s = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k)
                s += r[k] * r[k] * r[k] * (1.0 + std::cos(th[k]) + w);
            return s;
        };
        p.gradient = [](std::span<const double> x, std::span<const double> r,
                        std::span<const double> th, std::span<double> gx,
                        std::span<double> gr, std::span<double> gth) {
            for (auto& v : gx) v = 0.0;
            const double w = x.empty() ? 0.0 : std::sin(x[0]);
            double cubes = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) {
                const double r2 = r[k] * r[k];
                gr[k] = 3.0 * r2 * (1.0 + std::cos(th[k]) + w);
                gth[k] = -r2 * r[k] * std::sin(th[k]);
                cubes += r2 * r[k];
            }
            if (!x.empty()) gx[0] = cubes * std::cos(x[0]);
        };
        return p;
    }
    if (name == "radial") {
        p.bound = 1.0;
        p.value = [](std::span<const double>, std::span<const double> r,
                     std::span<const double>) {
            double s = 0.0;
            for (double v : r) s += v * v * v;
            return s;
        };
        p.gradient = [](std::span<const double>, std::span<const double> r,
                        std::span<const double>, std::span<double> gx,
                        std::span<double> gr, std::span<double> gth) {
            for (auto& v : gx) v = 0.0;
            for (auto& v : gth) v = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) gr[k] = 3.0 * r[k] * r[k];
        };
        return p;
    }
    throw InputError("unknown perturbation profile: " + name);
}

MetricModel MetricModel::euclidean_block(int m) {
    if (m <= 0) throw InputError("euclidean_block: m must be positive");
    MetricModel mm;
    mm.kind_ = Kind::EuclideanBlock;
    mm.m_ = m;
    return mm;
}

MetricModel MetricModel::cuspidal_plane(double scale) {
    if (!(scale > 0.0)) throw InputError("cuspidal_plane: scale must be positive");
    MetricModel mm;
    mm.kind_ = Kind::CuspidalPlane;
    mm.n_ = 1;
    mm.scale_ = scale;
    return mm;
}

MetricModel MetricModel::product_cuspidal(int m, int n, double scale) {
    if (m < 0 || n < 1) throw InputError("product_cuspidal: need m >= 0, n >= 1");
    if (!(scale > 0.0)) throw InputError("product_cuspidal: scale must be positive");
    MetricModel mm;
    mm.kind_ = Kind::ProductCuspidal;
    mm.m_ = m;
    mm.n_ = n;
    mm.scale_ = scale;
    return mm;
}

MetricModel MetricModel::perturbed_product(const MetricModel& base, double epsilon,
                                           PerturbationProfile profile) {
    if (base.kind_ != Kind::ProductCuspidal && base.kind_ != Kind::CuspidalPlane)
        throw InputError("perturbed_product: base must be a (product) cuspidal metric");
    if (!profile.value) throw InputError("perturbed_product: profile has no value function");
    MetricModel mm = base;
    mm.kind_ = Kind::PerturbedProduct;
    mm.eps_ = epsilon;
    mm.profile_ = std::move(profile);
    return mm;
}

MetricModel MetricModel::sphere_patch(double radius) {
    if (!(radius > 0.0)) throw InputError("sphere_patch: radius must be positive");
    MetricModel mm;
    mm.kind_ = Kind::SpherePatch;
    mm.n_ = 1;
    mm.radius_ = radius;
    return mm;
}

MetricModel MetricModel::quotient_cover() {
    MetricModel mm;
    mm.kind_ = Kind::QuotientCover;
    mm.n_ = 1;
    return mm;
}

double MetricModel::conformal_factor(std::span<const double> q) const {
    if (kind_ != Kind::PerturbedProduct) return 1.0;
    const auto x = q.subspan(0, static_cast<std::size_t>(xdim()));
    const auto r = q.subspan(static_cast<std::size_t>(xdim()), static_cast<std::size_t>(n_));
    const auto th = q.subspan(static_cast<std::size_t>(xdim() + n_), static_cast<std::size_t>(n_));
    return 1.0 + eps_ * profile_.value(x, r, th);
}

void MetricModel::metric_diag(std::span<const double> q, std::span<double> g) const {
    switch (kind_) {
        case Kind::EuclideanBlock:
            for (int i = 0; i < dim(); ++i) g[i] = 1.0;
            return;
        case Kind::CuspidalPlane: {
            const double r = q[0];
            g[0] = 4.0 * scale_;
            g[1] = scale_ * std::pow(r, 6);
            return;
        }
        case Kind::QuotientCover: {
            const double r = q[0];
            g[0] = 1.0;
            g[1] = std::pow(r, 6);
            return;
        }
        case Kind::SpherePatch: {
            const double s = std::sin(q[0]);
            g[0] = radius_ * radius_;
            g[1] = radius_ * radius_ * s * s;
            return;
        }
        case Kind::ProductCuspidal:
        case Kind::PerturbedProduct: {
            for (int i = 0; i < xdim(); ++i) g[i] = 1.0;
            for (int k = 0; k < n_; ++k) {
                g[ir(k)] = 4.0 * scale_;
                g[itheta(k)] = scale_ * std::pow(q[ir(k)], 6);
            }
            if (kind_ == Kind::PerturbedProduct) {
                const double f = conformal_factor(q);
                for (int i = 0; i < dim(); ++i) g[i] *= f;
            }
            return;
        }
    }
}

void MetricModel::metric_diag_partial(std::span<const double> q, int c,
                                      std::span<double> dg) const {
    for (int i = 0; i < dim(); ++i) dg[i] = 0.0;
    switch (kind_) {
        case Kind::EuclideanBlock:
            return;
        case Kind::CuspidalPlane:
            if (c == 0) dg[1] = 6.0 * scale_ * std::pow(q[0], 5);
            return;
        case Kind::QuotientCover:
            if (c == 0) dg[1] = 6.0 * std::pow(q[0], 5);
            return;
        case Kind::SpherePatch:
            if (c == 0) dg[1] = 2.0 * radius_ * radius_ * std::sin(q[0]) * std::cos(q[0]);
            return;
        case Kind::ProductCuspidal:
            for (int k = 0; k < n_; ++k)
                if (c == ir(k)) dg[itheta(k)] = 6.0 * scale_ * std::pow(q[ir(k)], 5);
            return;
        case Kind::PerturbedProduct: {
            // d[(1+eps p) g0] = eps (d_c p) g0 + (1+eps p) d_c g0
            const int D = dim();
            std::vector<double> g0(static_cast<std::size_t>(D));
            for (int i = 0; i < xdim(); ++i) g0[static_cast<std::size_t>(i)] = 1.0;
            for (int k = 0; k < n_; ++k) {
                g0[static_cast<std::size_t>(ir(k))] = 4.0 * scale_;
                g0[static_cast<std::size_t>(itheta(k))] = scale_ * std::pow(q[ir(k)], 6);
            }
            const auto x = q.subspan(0, static_cast<std::size_t>(xdim()));
            const auto r = q.subspan(static_cast<std::size_t>(xdim()), static_cast<std::size_t>(n_));
            const auto th =
                q.subspan(static_cast<std::size_t>(xdim() + n_), static_cast<std::size_t>(n_));
            const double f = 1.0 + eps_ * profile_.value(x, r, th);

            double dp_c = 0.0;
            if (profile_.gradient) {
                std::vector<double> gx(static_cast<std::size_t>(xdim())),
                    gr(static_cast<std::size_t>(n_)), gth(static_cast<std::size_t>(n_));
                profile_.gradient(x, r, th, gx, gr, gth);
                if (c < xdim()) dp_c = gx[static_cast<std::size_t>(c)];
                else if (c < xdim() + n_) dp_c = gr[static_cast<std::size_t>(c - xdim())];
                else dp_c = gth[static_cast<std::size_t>(c - xdim() - n_)];
            } else {
                // central differences with Richardson on the profile alone
                std::vector<double> qp(q.begin(), q.end());
                const double h = 1e-5 * std::max(1.0, rmin_at(q));
                auto eval = [&](double step) {
                    qp[static_cast<std::size_t>(c)] = q[static_cast<std::size_t>(c)] + step;
                    const std::span<const double> qq(qp);
                    const auto xx = qq.subspan(0, static_cast<std::size_t>(xdim()));
                    const auto rr =
                        qq.subspan(static_cast<std::size_t>(xdim()), static_cast<std::size_t>(n_));
                    const auto tt = qq.subspan(static_cast<std::size_t>(xdim() + n_),
                                               static_cast<std::size_t>(n_));
                    return profile_.value(xx, rr, tt);
                };
                const double d1 = (eval(h) - eval(-h)) / (2.0 * h);
                const double d2 = (eval(h / 2.0) - eval(-h / 2.0)) / h;
                dp_c = (4.0 * d2 - d1) / 3.0;
            }

            for (int i = 0; i < D; ++i) dg[i] = eps_ * dp_c * g0[static_cast<std::size_t>(i)];
            for (int k = 0; k < n_; ++k)
                if (c == ir(k)) dg[itheta(k)] += f * 6.0 * scale_ * std::pow(q[ir(k)], 5);
            return;
        }
    }
}

bool MetricModel::smooth_at(std::span<const double> q) const {
    if (kind_ == Kind::EuclideanBlock) return true;
    if (kind_ == Kind::SpherePatch) return q[0] > 0.0 && q[0] < kPi;
    for (int k = 0; k < n_; ++k)
        if (!(q[static_cast<std::size_t>(ir(k))] > 0.0)) return false;
    return true;
}

double MetricModel::rmin_at(std::span<const double> q) const {
    if (kind_ == Kind::EuclideanBlock) return 1.0;
    double rmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_; ++k)
        rmin = std::min(rmin, q[static_cast<std::size_t>(ir(k))]);
    if (kind_ == Kind::SpherePatch) rmin = std::min(rmin, kPi - q[0]);
    return rmin;
}

double MetricModel::factor_curvature(std::span<const double> q, int factor) const {
    if (factor < 0) return 0.0;  // Euclidean block
    switch (kind_) {
        case Kind::EuclideanBlock:
            return 0.0;
        case Kind::CuspidalPlane: {
            const double r = q[static_cast<std::size_t>(ir(factor))];
            return -1.5 / (scale_ * r * r);
        }
        case Kind::ProductCuspidal: {
            const double r = q[static_cast<std::size_t>(ir(factor))];
            return -1.5 / (scale_ * r * r);
        }
        case Kind::QuotientCover: {
            const double r = q[0];
            return -6.0 / (r * r);
        }
        case Kind::SpherePatch:
            return 1.0 / (radius_ * radius_);
        case Kind::PerturbedProduct:
            throw InputError("factor_curvature: perturbed metric is not a product");
    }
    return 0.0;
}

Eigen::VectorXd MetricModel::flatten(const ChartPoint& p) const {
    check_point(p);
    Eigen::VectorXd q(dim());
    q.head(xdim()) = p.x;
    q.segment(xdim(), n_) = p.r;
    q.tail(n_) = p.theta;
    return q;
}

Eigen::VectorXd MetricModel::flatten(const TangentVector& v) const {
    check_tangent(v);
    Eigen::VectorXd q(dim());
    q.head(xdim()) = v.dx;
    q.segment(xdim(), n_) = v.dr;
    q.tail(n_) = v.dtheta;
    return q;
}

ChartPoint MetricModel::unflatten(const Eigen::VectorXd& q) const {
    if (q.size() != dim()) throw InputError("unflatten: dimension mismatch");
    return ChartPoint(q.head(xdim()), q.segment(xdim(), n_), q.tail(n_));
}

TangentVector MetricModel::unflatten_tangent(const Eigen::VectorXd& q) const {
    if (q.size() != dim()) throw InputError("unflatten_tangent: dimension mismatch");
    return TangentVector(q.head(xdim()), q.segment(xdim(), n_), q.tail(n_));
}

void MetricModel::check_point(const ChartPoint& p) const {
    if (p.x.size() != xdim() || p.r.size() != n_ || p.theta.size() != n_) {
        std::ostringstream os;
        os << "chart point dimensions (" << p.x.size() << "," << p.r.size() << ","
           << p.theta.size() << ") do not match model (" << xdim() << "," << n_ << "," << n_
           << ")";
        throw InputError(os.str());
    }
    for (int k = 0; k < n_; ++k) {
        if (!std::isfinite(p.r[k]) || p.r[k] < 0.0)
            throw InputError("chart point has r_k < 0 or non-finite");
        if (!std::isfinite(p.theta[k])) throw InputError("chart point has non-finite theta");
    }
    for (int i = 0; i < xdim(); ++i)
        if (!std::isfinite(p.x[i])) throw InputError("chart point has non-finite x");
}

void MetricModel::check_tangent(const TangentVector& v) const {
    if (v.dx.size() != xdim() || v.dr.size() != n_ || v.dtheta.size() != n_)
        throw InputError("tangent vector dimensions do not match model");
}

std::string MetricModel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::EuclideanBlock: os << "euclidean-block(m=" << m_ << ")"; break;
        case Kind::CuspidalPlane: os << "cuspidal-plane(s=" << scale_ << ")"; break;
        case Kind::ProductCuspidal:
            os << "product-cuspidal(m=" << m_ << ",n=" << n_ << ",s=" << scale_ << ")";
            break;
        case Kind::PerturbedProduct:
            os << "perturbed-product(m=" << m_ << ",n=" << n_ << ",s=" << scale_
               << ",eps=" << eps_ << ",profile=" << profile_.name << ")";
            break;
        case Kind::SpherePatch: os << "sphere-patch(R=" << radius_ << ")"; break;
        case Kind::QuotientCover: os << "quotient-cover"; break;
    }
    return os.str();
}

// ---- operations -------------------------------------------------------------

Eigen::MatrixXd eval_metric(const MetricModel& model, const ChartPoint& p) {
    const Eigen::VectorXd q = model.flatten(p);
    Eigen::VectorXd g(model.dim());
    model.metric_diag({q.data(), static_cast<std::size_t>(q.size())},
                      {g.data(), static_cast<std::size_t>(g.size())});
    return g.asDiagonal();
}

std::vector<Eigen::MatrixXd> christoffel(const MetricModel& model, const ChartPoint& p) {
    const Eigen::VectorXd q = model.flatten(p);
    const std::span<const double> qs(q.data(), static_cast<std::size_t>(q.size()));
    if (!model.smooth_at(qs))
        throw SingularPointError("christoffel: point on the singular locus");

    const int D = model.dim();
    Eigen::VectorXd g(D);
    model.metric_diag(qs, {g.data(), static_cast<std::size_t>(g.size())});

    std::vector<Eigen::VectorXd> dg(static_cast<std::size_t>(D));
    for (int c = 0; c < D; ++c) {
        dg[static_cast<std::size_t>(c)].resize(D);
        model.metric_diag_partial(qs, c,
                                  {dg[static_cast<std::size_t>(c)].data(),
                                   static_cast<std::size_t>(D)});
    }

    // Diagonal metric: Gamma^i_{jk} = (d_j g_ii delta_ik + d_k g_ii delta_ij
    //                                  - d_i g_jj delta_jk) / (2 g_ii)
    std::vector<Eigen::MatrixXd> gamma(static_cast<std::size_t>(D),
                                       Eigen::MatrixXd::Zero(D, D));
    for (int i = 0; i < D; ++i) {
        const double inv2g = 0.5 / g[i];
        for (int j = 0; j < D; ++j) {
            for (int k = j; k < D; ++k) {
                double val = 0.0;
                if (i == k) val += dg[static_cast<std::size_t>(j)][i];
                if (i == j) val += dg[static_cast<std::size_t>(k)][i];
                if (j == k) val -= dg[static_cast<std::size_t>(i)][j];
                val *= inv2g;
                gamma[static_cast<std::size_t>(i)](j, k) = val;
                gamma[static_cast<std::size_t>(i)](k, j) = val;
            }
        }
    }
    return gamma;
}

namespace {

// Brioschi formula for a diagonal 2D metric E dr^2 + G dtheta^2 via central
// differences on metric_diag; used for 2D models without a closed form.
double brioschi_fd(const MetricModel& model, const Eigen::VectorXd& q) {
    const double h = 1e-4 * std::max(0.25,
        model.rmin_at({q.data(), static_cast<std::size_t>(q.size())}));
    auto EG = [&](double dr, double dth, double& E, double& G) {
        Eigen::VectorXd qq = q;
        qq[0] += dr;
        qq[1] += dth;
        Eigen::VectorXd g(2);
        model.metric_diag({qq.data(), 2}, {g.data(), 2});
        E = g[0];
        G = g[1];
    };
    // K = -(1/(2 sqrt(EG))) [ d_r (G_r / sqrt(EG)) + d_th (E_th / sqrt(EG)) ]
    auto Gr_over = [&](double dr) {
        double E0, G0, E1, G1, E2, G2;
        EG(dr, 0.0, E0, G0);
        EG(dr + h, 0.0, E1, G1);
        EG(dr - h, 0.0, E2, G2);
        const double Gr = (G1 - G2) / (2.0 * h);
        return Gr / std::sqrt(E0 * G0);
    };
    auto Eth_over = [&](double dth) {
        double E0, G0, E1, G1, E2, G2;
        EG(0.0, dth, E0, G0);
        EG(0.0, dth + h, E1, G1);
        EG(0.0, dth - h, E2, G2);
        const double Eth = (E1 - E2) / (2.0 * h);
        return Eth / std::sqrt(E0 * G0);
    };
    double E0, G0;
    EG(0.0, 0.0, E0, G0);
    const double term_r = (Gr_over(h) - Gr_over(-h)) / (2.0 * h);
    const double term_th = (Eth_over(h) - Eth_over(-h)) / (2.0 * h);
    return -(term_r + term_th) / (2.0 * std::sqrt(E0 * G0));
}

} // namespace

double gaussian_curvature(const MetricModel& model, const ChartPoint& p) {
    if (!model.two_dimensional())
        throw InputError("gaussian_curvature: model is not two-dimensional");
    const Eigen::VectorXd q = model.flatten(p);
    if (!model.smooth_at({q.data(), static_cast<std::size_t>(q.size())}))
        throw SingularPointError("gaussian_curvature: point on the singular locus");
    switch (model.kind()) {
        case MetricModel::Kind::CuspidalPlane:
        case MetricModel::Kind::QuotientCover:
        case MetricModel::Kind::SpherePatch:
            return model.factor_curvature({q.data(), static_cast<std::size_t>(q.size())}, 0);
        default:
            return brioschi_fd(model, q);
    }
}

double annulus_density(std::complex<double> t, std::complex<double> z) {
    const double az = std::abs(z);
    if (!(az > 0.0) || !(az < 1.0)) throw InputError("annulus_density: need 0 < |z| < 1");
    const double at = std::abs(t);
    if (at == 0.0) return 1.0 / (az * std::abs(std::log(az)));
    if (!(at < az)) throw InputError("annulus_density: need |t| < |z|");
    const double Theta = kPi * std::log(az) / std::log(at);
    return (kPi / std::abs(std::log(at))) / (std::sin(Theta) * az);
}

SeriesCheck density_series_check(double Theta) {
    if (!(Theta > 0.0) || !(Theta < kPi))
        throw InputError("density_series_check: need 0 < Theta < pi");
    const double csc = 1.0 / std::sin(Theta);
    const double exact = Theta * csc * Theta * csc;
    const double t2 = Theta * Theta;
    const double truncated = 1.0 + t2 / 3.0 + t2 * t2 / 15.0;
    return {exact, truncated, exact - truncated};
}

RevolutionCompare revolution_surface_compare(double r) {
    if (r < 0.0) throw InputError("revolution_surface_compare: need r >= 0");
    const double x = 2.0 * r;
    const double x2 = x * x;
    return {1.0 + 9.0 * x2 * x2 / 64.0, 1.0};
}

} // namespace cusplab
