#include "cusplab/asymptotics.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cusplab {

namespace {
constexpr double kPi = 3.14159265358979323846;

double bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
} // namespace

double collar_norm_integral(double k, int alpha, double cutoff) {
    if (!(cutoff > 0.0) || !(cutoff < 1.0))
        throw InputError("collar_norm_integral: need 0 < c < 1");
    if (alpha < 0) throw InputError("collar_norm_integral: need alpha >= 0");
    const double logc = std::log(cutoff);
    if (!(k > -2.0 * logc))
        throw InputError("collar_norm_integral: need k > 2 |log c| (|t| < c^2)");
    // substitute l = log r on [-k - log c, log c]; log|t| = -k
    const double lo = -k - logc;
    const double hi = logc;
    auto f = [&](double l) {
        const double s = k * std::sin(kPi * l / k);
        return (2.0 / kPi) * s * s * std::exp(2.0 * alpha * l);
    };
    double err = 0.0;
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, lo, hi, 12, 1e-12, &err);
    return I;
}

PairingProfile PairingProfile::plateau(double u0, double u1, std::string name) {
    if (!(0.0 < u0 && u0 < u1 && u1 < 1.0))
        throw InputError("PairingProfile: need 0 < u0 < u1 < 1");
    PairingProfile p;
    p.name = std::move(name);
    p.u0 = u0;
    p.u1 = u1;
    return p;
}

double PairingProfile::psi(double u) const {
    const double x = (u - u0) / (u1 - u0);
    const double a = bump(x), b = bump(1.0 - x);
    return a / (a + b);
}

double PairingProfile::dpsi(double u) const {
    const double w = u1 - u0;
    const double x = (u - u0) / w;
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double a = bump(x), b = bump(1.0 - x);
    const double da = a / (x * x);
    const double db = -b / ((1.0 - x) * (1.0 - x));
    return (da * b - a * db) / ((a + b) * (a + b)) / w;
}

std::complex<double> plumbing_pairing(std::complex<double> t, int alpha,
                                      const PairingProfile& profile) {
    const double at = std::abs(t);
    if (!(at > 0.0) || !(at < 1.0)) throw InputError("plumbing_pairing: need 0 < |t| < 1");
    if (alpha < 0) throw InputError("plumbing_pairing: need alpha >= 0");
    const double logt = std::log(at);

    // boundary normalization t log|t| beta_dot(|t|) = 1 <=> psi(1) = 1, and
    // beta_dot log r -> 0 at r = 1 <=> psi(0) = 0
    if (std::abs(profile.psi(1.0) - 1.0) > 1e-12 || std::abs(profile.psi(0.0)) > 1e-12)
        throw InputError("plumbing_pairing: profile violates the boundary normalization");

    // With g(l) = beta_dot(e^l) l = psi(l/log|t|) l / (t log|t|), the integrand
    // in (log r, theta) coordinates is (1/2) e^{alpha(l + i theta)} g'(l).
    // Radial factor by adaptive quadrature:
    auto gprime_scaled = [&](double l) {
        const double u = l / logt;
        return (profile.dpsi(u) * u + profile.psi(u)) * std::exp(alpha * l);
    };
    double err = 0.0;
    const double radial = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        gprime_scaled, logt, 0.0, 12, 1e-13, &err);

    // Angular factor: uniform trapezoid of e^{i alpha theta} over one period
    // (exact for any alpha with enough nodes).
    const int M = 256;
    std::complex<double> ang(0.0, 0.0);
    for (int j = 0; j < M; ++j) {
        const double th = 2.0 * kPi * j / M;
        ang += std::exp(std::complex<double>(0.0, alpha * th));
    }
    ang *= 2.0 * kPi / M;

    const std::complex<double> scale = 0.5 / (t * logt);
    return scale * radial * ang;
}

Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> BlockMatrix::assemble() const {
    const int N = n() + m();
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> A(N, N);
    A.setZero();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (i != j && (i < n() || j < n())) A(i, j) = static_cast<long double>(coupling(i, j));
    for (int k = 0; k < n(); ++k) A(k, k) = static_cast<long double>(lambda[k]);
    for (int i = 0; i < m(); ++i)
        for (int j = 0; j < m(); ++j) A(n() + i, n() + j) = static_cast<long double>(tail(i, j));
    return A;
}

BlockMatrix BlockMatrix::random(int n, int m, std::mt19937_64& rng) {
    if (n < 1 || m < 0) throw InputError("BlockMatrix::random: need n >= 1, m >= 0");
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> loglam(std::log(1e2), std::log(1e6));
    BlockMatrix A;
    A.lambda.resize(n);
    for (int k = 0; k < n; ++k) A.lambda[k] = std::exp(loglam(rng));
    const int N = n + m;
    A.coupling = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
            if (i < n || j < n) {
                const double v = unif(rng);
                A.coupling(i, j) = v;
                A.coupling(j, i) = v;
            }
    // bounded symmetric tail with determinant floored away from zero
    A.tail = Eigen::MatrixXd::Zero(m, m);
    if (m > 0) {
        for (int tries = 0; tries < 1000; ++tries) {
            for (int i = 0; i < m; ++i)
                for (int j = i; j < m; ++j) {
                    const double v = unif(rng);
                    A.tail(i, j) = v;
                    A.tail(j, i) = v;
                }
            if (std::abs(A.tail.determinant()) >= 0.1) break;
        }
    }
    return A;
}

DetAsymptotics block_det_asymptotics(const BlockMatrix& A) {
    using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const LMat M = A.assemble();
    const int m = A.m();
    if (m > 0) {
        const LMat B = M.bottomRightCorner(m, m);
        const long double detB = Eigen::FullPivLU<LMat>(B).determinant();
        if (std::abs(static_cast<double>(detB)) < 1e-300)
            throw InputError("block_det_asymptotics: singular tail block");
    }
    long double reference = 1.0L;
    for (int k = 0; k < A.n(); ++k) reference *= static_cast<long double>(A.lambda[k]);
    if (m > 0) {
        const LMat B = M.bottomRightCorner(m, m);
        reference *= Eigen::FullPivLU<LMat>(B).determinant();
    }
    const long double det = Eigen::FullPivLU<LMat>(M).determinant();
    DetAsymptotics out;
    out.ratio = static_cast<double>(det / reference);
    out.deviation = std::abs(out.ratio - 1.0);
    out.rho = A.rho();
    return out;
}

InverseCheck block_inverse_check(const BlockMatrix& A) {
    using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const LMat M = A.assemble();
    const int n = A.n(), m = A.m(), N = n + m;
    Eigen::FullPivLU<LMat> lu(M);
    if (!lu.isInvertible()) throw InputError("block_inverse_check: singular matrix");
    const LMat Minv = lu.inverse();

    InverseCheck out{0.0, 0.0, 0.0, 0.0, A.rho()};
    for (int k = 0; k < n; ++k) {
        const double dev = std::abs(static_cast<double>(Minv(k, k)) * A.lambda[k] - 1.0);
        out.c_diag = std::max(out.c_diag, dev / out.rho);
    }
    for (int j = 0; j < n; ++j)
        for (int l = j + 1; l < n; ++l)
            out.c_head = std::max(out.c_head, std::abs(static_cast<double>(Minv(j, l))) *
                                                  A.lambda[j] * A.lambda[l]);
    for (int j = 0; j < n; ++j)
        for (int l = n; l < N; ++l)
            out.c_cross =
                std::max(out.c_cross, std::abs(static_cast<double>(Minv(j, l))) * A.lambda[j]);
    if (m > 0) {
        const Eigen::MatrixXd Binv = A.tail.inverse();
        const double bscale = std::max(1.0, Binv.cwiseAbs().maxCoeff());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const double dev = std::abs(static_cast<double>(Minv(n + i, n + j)) - Binv(i, j));
                out.c_tail = std::max(out.c_tail, dev / (out.rho * bscale));
            }
    }
    return out;
}

double wp_entry_model(std::complex<double> t) {
    const double at = std::abs(t);
    if (!(at > 0.0) || !(at < 1.0)) throw InputError("wp_entry_model: need 0 < |t| < 1");
    const double L = -std::log(at);
    return kPi * kPi * kPi / (at * at * L * L * L);
}

NormalFormCheck normal_form_check(std::complex<double> t, std::complex<double> dt) {
    const double at = std::abs(t);
    if (!(at > 0.0) || !(at < 1.0)) throw InputError("normal_form_check: need 0 < |t| < 1");
    NormalFormCheck out;
    out.t_chart = wp_entry_model(t) * std::norm(dt);

    // pushforward: w = dt/t, dlog|t| = Re w, dtheta = Im w, dr = r^3 dlog|t| / 2
    const std::complex<double> w = dt / t;
    const double r = 1.0 / std::sqrt(-std::log(at));
    const double dr = 0.5 * r * r * r * w.real();
    const double dth = w.imag();
    const double pi3 = kPi * kPi * kPi;
    out.r_chart = pi3 * (4.0 * dr * dr + std::pow(r, 6) * dth * dth);

    const double scale = std::max({std::abs(out.t_chart), std::abs(out.r_chart), 1e-300});
    out.residual = std::abs(out.t_chart - out.r_chart) / scale;
    return out;
}

} // namespace cusplab
