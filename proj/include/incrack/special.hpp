/**
 * \file special.hpp
 *
 * \brief Branch-correct special functions of the segment factorization:
 * sqrt(1 - z^2), Lambda, beta, R, the factor matrices X(t +- i0) and the
 * jump functions chi.
 *
 * On-segment quantities are evaluated from explicit closed forms. A point on
 * the segment carries its distances to both endpoints so that values close to
 * an endpoint keep full relative precision.
 */
#pragma once

#include "incrack/params.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace incrack {

using Mat2 = Eigen::Matrix2cd;

/// Point t of the open segment (-kappa, kappa) with exact endpoint distances.
struct SegmentPoint {
    double t = 0.0;
    double to_plus = 1.0;   ///< kappa - t
    double to_minus = 1.0;  ///< kappa + t
    double kappa = 1.0;

    /// Raw abscissa. Points within a relative margin 1e-8 of an endpoint are
    /// refused because kappa - t would carry cancellation error; use the
    /// distance constructors there.
    static SegmentPoint at(double t, double kappa) {
        if (!(kappa > 0.0)) throw std::domain_error("SegmentPoint: kappa must be positive");
        if (!(std::abs(t) < kappa * (1.0 - 1e-8)))
            throw std::domain_error("SegmentPoint: t too close to (or outside) the segment end");
        return {t, kappa - t, kappa + t, kappa};
    }

    /// Point at distance d > 0 to the left of +kappa.
    static SegmentPoint from_plus(double d, double kappa) {
        if (!(d > 0.0) || !(d < 2.0 * kappa))
            throw std::domain_error("SegmentPoint: distance outside (0, 2 kappa)");
        return {kappa - d, d, 2.0 * kappa - d, kappa};
    }

    /// Point at distance d > 0 to the right of -kappa.
    static SegmentPoint from_minus(double d, double kappa) {
        if (!(d > 0.0) || !(d < 2.0 * kappa))
            throw std::domain_error("SegmentPoint: distance outside (0, 2 kappa)");
        return {d - kappa, 2.0 * kappa - d, d, kappa};
    }

    /// Unchecked construction from already exact distances.
    static SegmentPoint with_distances(double t, double to_plus, double to_minus, double kappa) {
        return {t, to_plus, to_minus, kappa};
    }

    /// 1 - t^2 from the endpoint distances, 1 -+ t = (1 - kappa) + distance,
    /// so it keeps full precision near +-1 when kappa = 1.
    double one_minus_t2() const { return ((1.0 - kappa) + to_plus) * ((1.0 - kappa) + to_minus); }
    double sqrt_one_minus_t2() const { return std::sqrt(one_minus_t2()); }
};

/// Endpoint exponents of an on-segment density: value ~ (kappa - t)^{at_plus_k}
/// near +kappa and ~ (kappa + t)^{at_minus_k} near -kappa.
struct EndpointExponents {
    cplx at_plus_k;
    cplx at_minus_k;
};

inline EndpointExponents density_exponents(const DerivedConstants& c) {
    return {cplx(-0.5, -2.0 * c.gamma), cplx(-0.5, 2.0 * c.gamma)};
}

/// Principal-value power w^p = exp(p log w) for w > 0.
inline cplx rpow(double w, cplx p) { return std::exp(p * std::log(w)); }

// ---------------------------------------------------------------------------
// sqrt(1 - z^2): the branch equal to 1 at z = 0, cut along the real axis
// outside (-1, 1). That is exactly the principal square root of 1 - z^2.

inline cplx sqrt_one_minus_z2(cplx z) {
    if (z.imag() == 0.0 && std::abs(z.real()) >= 1.0)
        throw std::domain_error("sqrt_one_minus_z2: z lies on the branch cut");
    return std::sqrt((1.0 - z) * (1.0 + z));
}

// ---------------------------------------------------------------------------
// R(t) = R+(t)/R-(t). The radicand (1-t^2) +- 2t(k +- t) - (k +- t)^2 reduces
// identically to 1 - k^2, which leaves R+-(t) = 1 +- k t + sqrt((1-t^2)(1-k^2)).

struct RParts {
    double r_plus;
    double r_minus;
    double r;
};

inline RParts r_parts(const SegmentPoint& p) {
    const double k = p.kappa;
    const double root = std::sqrt(p.one_minus_t2() * (1.0 - k) * (1.0 + k));
    const double rp = 1.0 + k * p.t + root;
    const double rm = 1.0 - k * p.t + root;
    if (!(rp > 0.0) || !(rm > 0.0)) throw std::logic_error("r_parts: lost positivity");
    return {rp, rm, rp / rm};
}

/// log[(k - t) R(t) / (k + t)]
inline double log_q(const SegmentPoint& p) {
    const RParts rp = r_parts(p);
    return std::log(p.to_plus) + std::log(rp.r_plus) - std::log(p.to_minus) - std::log(rp.r_minus);
}

/// Principal value of the Cauchy integral of 1/sqrt(1 - tau^2) over (-k, k).
inline double I_fn(const SegmentPoint& p) { return log_q(p) / p.sqrt_one_minus_t2(); }

// ---------------------------------------------------------------------------
// Lambda

/// Boundary values Lambda(t + i0), Lambda(t - i0).
inline std::pair<cplx, cplx> lambda_pm(const SegmentPoint& p, const DerivedConstants& c) {
    const cplx common = rpow(p.to_plus, cplx(-0.75, -c.gamma)) * rpow(p.to_minus, cplx(-0.25, c.gamma));
    return {-c.e0 * common, -common / c.e0};
}

/// Lambda(z) off the segment, normalised so that Lambda ~ 1/z at infinity.
/// Written as ((z-k)/(z+k))^{1/4 - i gamma} / (z - k); the ratio maps the
/// slit plane onto the plane cut along the negative axis, so the principal
/// power is continuous everywhere off [-k, k].
inline cplx lambda_offsegment(cplx z, double k, double gamma) {
    if (z.imag() == 0.0 && std::abs(z.real()) <= k)
        throw std::domain_error("lambda_offsegment: z lies on the segment");
    return std::pow((z - k) / (z + k), cplx(0.25, -gamma)) / (z - k);
}

// ---------------------------------------------------------------------------
// beta

inline std::pair<cplx, cplx> beta_pm(const SegmentPoint& p, const DerivedConstants& c) {
    const double lq = log_q(p);
    const cplx f(0.25, -c.gamma);
    const double s = p.sqrt_one_minus_t2();
    return {f * cplx(lq, pi) / s, f * cplx(lq, -pi) / s};
}

/// Cauchy integral beta(z) = ln sqrt(lambda1)/(2 pi i) * int dtau / (sqrt(1-tau^2)(tau - z))
/// evaluated by Gauss-Kronrod after subtracting f(x0)/(tau - z), x0 = Re z
/// clamped to the segment, so points close to the segment stay cheap.
/// Valid off [-k, k] for k < 1.
inline cplx beta_offsegment(cplx z, const DerivedConstants& c, double rel_tol = 1e-12) {
    const double k = c.kappa;
    if (!(k < 1.0)) throw std::domain_error("beta_offsegment: requires kappa < 1");
    if (z.imag() == 0.0 && std::abs(z.real()) <= k)
        throw std::domain_error("beta_offsegment: z lies on the segment");
    auto w = [](double tau) { return 1.0 / std::sqrt((1.0 - tau) * (1.0 + tau)); };
    const double x0 = std::clamp(z.real(), -k, k);
    const double w0 = w(x0);
    auto f = [&](double tau) -> cplx { return (w(tau) - w0) / (tau - z); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err = 0.0;
    cplx integral = w0 * (std::log(cplx(k) - z) - std::log(cplx(-k) - z));
    if (x0 > -k) integral += GK::integrate(f, -k, x0, 20, rel_tol, &err);
    if (x0 < k) integral += GK::integrate(f, x0, k, 20, rel_tol, &err);
    return c.log_sqrt_lambda1() / (2.0 * pi * I) * integral;
}

// ---------------------------------------------------------------------------
// G(t) and its factorization

/// Matrix coefficient of the vector Riemann-Hilbert problem.
inline Mat2 g_matrix(const SegmentPoint& p, const DerivedConstants& c) {
    const double s = p.sqrt_one_minus_t2();
    Mat2 g;
    g << c.nu - 1.0, -2.0 / s, -2.0 * s, c.nu - 1.0;
    return g / (c.nu + 1.0);
}

struct FactorPair {
    Mat2 x_plus;
    Mat2 x_minus;
    SegmentPoint point;
};

/// X(t +- i0) = Lambda(t +- i0) [[c, s+], [s-, c]] with c = cosh(sqrt(1-t^2) beta),
/// s+- = (1-t^2)^{-+1/2} sinh(sqrt(1-t^2) beta).
inline FactorPair factor_matrices(const SegmentPoint& p, const DerivedConstants& c) {
    const auto [lp, lm] = lambda_pm(p, c);
    const auto [bp, bm] = beta_pm(p, c);
    const double s = p.sqrt_one_minus_t2();
    auto build = [&](cplx lam, cplx beta) {
        const cplx arg = s * beta;
        const cplx ch = std::cosh(arg);
        const cplx sh = std::sinh(arg);
        Mat2 x;
        x << ch, sh / s, s * sh, ch;
        return Mat2(lam * x);
    };
    return {build(lp, bp), build(lm, bm), p};
}

/// X(z) off the segment, from Lambda(z) and the Cauchy integral beta(z).
inline Mat2 factor_matrix_offsegment(cplx z, const DerivedConstants& c) {
    const cplx root = sqrt_one_minus_z2(z);
    const cplx arg = root * beta_offsegment(z, c);
    Mat2 x;
    x << std::cosh(arg), std::sinh(arg) / root, root * std::sinh(arg), std::cosh(arg);
    return lambda_offsegment(z, c.kappa, c.gamma) * x;
}

// ---------------------------------------------------------------------------
// chi

/// chi(t) = -2i/((1+nu) sqrt(nu0)) (k-t)^{-1/2-2i gamma} (k+t)^{-1/2+2i gamma} R^{1/4-i gamma}
inline cplx chi(const SegmentPoint& p, const DerivedConstants& c) {
    const double r = r_parts(p).r;
    return -2.0 * I / ((1.0 + c.nu) * std::sqrt(c.nu0)) * rpow(p.to_plus, cplx(-0.5, -2.0 * c.gamma)) *
           rpow(p.to_minus, cplx(-0.5, 2.0 * c.gamma)) * rpow(r, cplx(0.25, -c.gamma));
}

struct ChiJump {
    cplx chi1_plus, chi1_minus;
    cplx chi2_plus, chi2_minus;
    cplx chi;
};

/// Entries chi_j(t +- i0) of X(t +- i0) in the explicit form, and the jump chi(t).
inline ChiJump chi_jump(const SegmentPoint& p, const DerivedConstants& c) {
    const double r = r_parts(p).r;
    const double s = p.sqrt_one_minus_t2();
    const cplx osc = rpow(p.to_plus, cplx(-0.5, -2.0 * c.gamma)) * rpow(p.to_minus, cplx(-0.5, 2.0 * c.gamma)) *
                     rpow(r, cplx(0.25, -c.gamma));
    const cplx tail = rpow(r, cplx(-0.25, c.gamma)) / p.to_plus;
    const cplx e2 = c.e0 * c.e0;
    ChiJump j;
    // (-1)^j = -1 for j = 1, +1 for j = 2
    j.chi1_plus = -0.5 * (e2 * osc + tail);
    j.chi1_minus = -0.5 * (osc / e2 + tail);
    j.chi2_plus = -0.5 / s * (e2 * osc - tail);
    j.chi2_minus = -0.5 / s * (osc / e2 - tail);
    j.chi = chi(p, c);
    return j;
}

}  // namespace incrack
