/**
 * \file oracle.hpp
 *
 * \brief Independent checks: residual of the governing singular integral
 * equation for a black-box density, the matrix factorization identity, the
 * iterated principal-value relation for Theta, classical PV identities and
 * continuity of the k -> 0 and k -> 1 limits.
 *
 * The residual and identity checks only see densities as callables and use
 * their own quadrature (graded Gauss-Legendre panels), so they do not reuse
 * the machinery that produced the density.
 */
#pragma once

#include "incrack/quadrature.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace incrack {

using PointFn = std::function<cplx(const SegmentPoint&)>;

namespace detail {
/// 1 - tau^2 from the distances when the segment is the whole (-1, 1).
inline double one_minus_sq(const SegmentPoint& p) {
    return p.one_minus_t2();
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Residual of the governing equation

struct ResidualReport {
    double kappa = 0.5;
    double nu = 0.3;
    std::vector<SegmentPoint> nodes;
    std::vector<cplx> lhs;
    std::vector<cplx> rhs;
    std::vector<cplx> residuals;
    double max_rel = 0.0;  ///< max |lhs - g| / max |g|
    double depth = 0.0;    ///< innermost panel distance of the graded rule
    std::size_t rule_size = 0;
};

struct ResidualOptions {
    int nodes = 20;
    /// most singular real part of the endpoint exponents of the density
    double min_exponent = -0.5;
    /// neglected endpoint mass depth^{1 + min_exponent}
    double tail = 1e-13;
};

/// (1/pi) PV int_{-k}^{k} (1 + sqrt((1-tau^2)/(1-t^2))) rho(tau) dtau/(tau - t) - i(1-nu) rho(t) - g(t)
/// at first-kind Chebyshev nodes, on a graded composite Gauss-Legendre rule.
inline ResidualReport residual_sie(const PointFn& density, const PointFn& g, double kappa, double nu,
                                   const ResidualOptions& opt = {}) {
    if (!(opt.min_exponent > -1.0)) throw std::domain_error("residual_sie: density not integrable");
    ResidualReport r;
    r.kappa = kappa;
    r.nu = nu;
    GradedRuleOptions go;
    go.depth = std::pow(opt.tail, 1.0 / (1.0 + opt.min_exponent));
    r.depth = go.depth;
    const auto rule = graded_rule(kappa, go);
    r.rule_size = rule.size();
    std::vector<cplx> rho(rule.size());
    std::vector<double> root(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rho[i] = density(rule[i].point);
        root[i] = std::sqrt(detail::one_minus_sq(rule[i].point));
    }
    r.nodes = chebyshev_nodes(kappa, opt.nodes);
    double gmax = 0.0;
    std::vector<cplx> f(rule.size());
    for (const auto& t : r.nodes) {
        const double st = std::sqrt(detail::one_minus_sq(t));
        const cplx rt = density(t);
        for (std::size_t i = 0; i < rule.size(); ++i) f[i] = (1.0 + root[i] / st) * rho[i];
        const cplx pv = pv_on_rule(rule, f, 2.0 * rt, t);
        const cplx lhs = pv / pi - I * (1.0 - nu) * rt;
        const cplx gt = g(t);
        r.lhs.push_back(lhs);
        r.rhs.push_back(gt);
        r.residuals.push_back(lhs - gt);
        gmax = std::max(gmax, std::abs(gt));
    }
    double rmax = 0.0;
    for (const auto& v : r.residuals) rmax = std::max(rmax, std::abs(v));
    r.max_rel = gmax > 0.0 ? rmax / gmax : rmax;
    return r;
}

// ---------------------------------------------------------------------------
// Factorization

struct FactorizationReport {
    double max_deviation = 0.0;  ///< max || X+ X-^{-1} - G ||
    double max_det_deviation = 0.0;  ///< max |det X+- - Lambda+-^2| / |Lambda+-|^2
    int samples = 0;
};

/// Random interior points with a fixed seed, kept away from the ends by margin*kappa.
inline FactorizationReport verify_factorization(double kappa, double nu, int samples = 50,
                                                std::optional<double> gamma = std::nullopt, double margin = 1e-3,
                                                unsigned seed = 12345) {
    const DerivedConstants c = derive_constants(nu, kappa, gamma);
    // G itself is built from the unperturbed constants
    const DerivedConstants c_true = derive_constants(nu, kappa);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0 + margin, 1.0 - margin);
    FactorizationReport rep;
    rep.samples = samples;
    for (int i = 0; i < samples; ++i) {
        const auto p = SegmentPoint::at(kappa * u(gen), kappa);
        const auto fp = factor_matrices(p, c);
        const Mat2 G = g_matrix(p, c_true);
        const Mat2 prod = fp.x_plus * fp.x_minus.inverse();
        rep.max_deviation = std::max(rep.max_deviation, (prod - G).norm());
        const auto [lp, lm] = lambda_pm(p, c);
        rep.max_det_deviation = std::max(rep.max_det_deviation, std::abs(fp.x_plus.determinant() - lp * lp) / std::norm(lp));
        rep.max_det_deviation = std::max(rep.max_det_deviation, std::abs(fp.x_minus.determinant() - lm * lm) / std::norm(lm));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Theta relation

struct ThetaReport {
    std::vector<double> points;
    std::vector<cplx> theta;
    std::vector<cplx> expected;
    double max_rel = 0.0;
};

/// Theta(at) = 1/(pi sqrt(1-t^2)) PV int_{-1}^{1} sqrt(1-s^2)/(s-t) (1/pi) PV int_{-k}^{k} psi(au) du/(u-s) ds
/// against -psi(at) + i P*/(pi a sqrt(1-t^2)). The inner transform is sampled on three
/// DE grids split at +-k; the outer PV reuses them.
inline ThetaReport verify_theta_identity(const PointFn& psi, double kappa, double a, cplx p_star,
                                         const std::vector<double>& points) {
    const double k = kappa;
    const SampledFunction inner(
        [psi, k](double x, double dl, double dh) { return psi(SegmentPoint::with_distances(x, dh, dl, k)); }, -k, k);
    // H(s) = (1/pi) int psi du/(u - s) with signed distances of s to -k, +k
    auto H = [inner](double s, double to_mk, double to_pk) { return inner.cauchy(s, to_mk, to_pk).value / pi; };
    const std::array<double, 4> br{-1.0, -k, k, 1.0};
    std::array<SampledFunction, 3> outer;
    for (int i = 0; i < 3; ++i) {
        outer[i] = SampledFunction(
            [H, i, k](double x, double dl, double dh) {
                switch (i) {
                case 0: return H(x, -dh, 2.0 * k + dh);
                case 1: return H(x, dl, dh);
                default: return H(x, 2.0 * k + dl, -dl);
                }
            },
            br[i], br[i + 1]);
    }
    auto outer_w = [](int piece, double k_, double dl, double dh) {
        double one_m, one_p;
        switch (piece) {
        case 0: one_p = dl; one_m = 2.0 - dl; break;
        case 1: one_m = (1.0 - k_) + dh; one_p = (1.0 - k_) + dl; break;
        default: one_m = dh; one_p = 2.0 - dh; break;
        }
        return std::sqrt(one_m * one_p);
    };
    ThetaReport rep;
    double scale = 0.0;
    std::vector<cplx> diffs;
    for (double t : points) {
        const auto p = SegmentPoint::at(t, k);
        cplx sum = 0.0;
        sum += outer[1].cauchy(t, p.to_minus, p.to_plus,
                               [&](double, double dl, double dh) { return outer_w(1, k, dl, dh); }).value;
        sum += outer[0].cauchy(t, p.to_minus + (1.0 - k), -p.to_minus,
                               [&](double, double dl, double dh) { return outer_w(0, k, dl, dh); }).value;
        sum += outer[2].cauchy(t, -p.to_plus, p.to_plus + (1.0 - k),
                               [&](double, double dl, double dh) { return outer_w(2, k, dl, dh); }).value;
        const double st = p.sqrt_one_minus_t2();
        const cplx theta = sum / (pi * st);
        const cplx expect = -psi(p) + I * p_star / (pi * a * st);
        rep.points.push_back(t);
        rep.theta.push_back(theta);
        rep.expected.push_back(expect);
        diffs.push_back(theta - expect);
        scale = std::max(scale, std::abs(expect));
    }
    double dmax = 0.0;
    for (const auto& d : diffs) dmax = std::max(dmax, std::abs(d));
    rep.max_rel = scale > 0.0 ? dmax / scale : dmax;
    return rep;
}

// ---------------------------------------------------------------------------
// Classical identities

struct IdentityCheck {
    std::string name;
    std::string parameters;
    cplx computed;
    cplx expected;
    double error = 0.0;  ///< |computed - expected| / max(1, |expected|)
    double tolerance = 0.0;
    bool pass() const { return error <= tolerance; }
};

namespace detail {
inline DeOptions identity_de() {
    DeOptions o;
    o.rel_tol = 1e-14;
    o.min_level = 4;
    o.max_level = kDeMaxLevel;
    return o;
}

inline IdentityCheck make_check(std::string name, std::string params, cplx computed, cplx expected, double tol) {
    IdentityCheck c{std::move(name), std::move(params), computed, expected, 0.0, tol};
    c.error = std::abs(computed - expected) / std::max(1.0, std::abs(expected));
    return c;
}

inline std::string fmt_params(std::initializer_list<std::pair<const char*, cplx>> kv) {
    std::string s;
    char buf[96];
    for (const auto& [k, v] : kv) {
        if (!s.empty()) s += ", ";
        if (v.imag() == 0.0)
            std::snprintf(buf, sizeof buf, "%s=%.6g", k, v.real());
        else
            std::snprintf(buf, sizeof buf, "%s=%.6g%+.6gi", k, v.real(), v.imag());
        s += buf;
    }
    return s;
}
}  // namespace detail

/// PV int_{-1}^{1} dx / (sqrt(1-x^2)(x - xi)) = 0
inline IdentityCheck check_identity_arcsine(double xi, double tol = 1e-9) {
    const auto p = SegmentPoint::at(xi, 1.0);
    const auto r = pv_integral([](const SegmentPoint& s) { return cplx(1.0 / std::sqrt(s.to_plus * s.to_minus)); }, p,
                               detail::identity_de());
    return detail::make_check("arcsine_pv", detail::fmt_params({{"xi", xi}}), r.value, 0.0, tol);
}

/// (1/pi) PV int_{-1}^{1} sqrt(1-xi^2) dxi / ((xi - x)(eta - xi)) = 1, by partial fractions
/// into two single principal values of sqrt(1-xi^2)/(xi - s).
inline IdentityCheck check_identity_double_pole(double x, double eta, double tol = 1e-9) {
    auto C = [](double s) {
        const auto p = SegmentPoint::at(s, 1.0);
        return pv_integral([](const SegmentPoint& q) { return cplx(std::sqrt(q.to_plus * q.to_minus)); }, p,
                           detail::identity_de())
            .value;
    };
    const cplx val = (C(x) - C(eta)) / (pi * (eta - x));
    return detail::make_check("double_pole", detail::fmt_params({{"x", x}, {"eta", eta}}), val, 1.0, tol);
}

/// PV int_{-1}^{1} (1-tau)^alpha (1+tau)^{-alpha} dtau/(tau - t) = pi cot(pi alpha) ((1-t)/(1+t))^alpha - pi/sin(pi alpha),
/// |Re alpha| < 1, alpha != 0.
inline IdentityCheck check_identity_jacobi0(cplx alpha, double t, double tol = 1e-9) {
    if (!(std::abs(alpha.real()) < 1.0) || alpha == 0.0) throw std::domain_error("jacobi0: need |Re alpha| < 1, alpha != 0");
    const auto p = SegmentPoint::at(t, 1.0);
    const auto r = pv_integral(
        [alpha](const SegmentPoint& q) { return rpow(q.to_plus, alpha) * rpow(q.to_minus, -alpha); }, p,
        detail::identity_de());
    const cplx expect = pi / std::tan(pi * alpha) * rpow(p.to_plus / p.to_minus, alpha) - pi / std::sin(pi * alpha);
    return detail::make_check("jacobi_alpha_minus_alpha", detail::fmt_params({{"alpha", alpha}, {"t", t}}), r.value,
                              expect, tol);
}

/// PV int_{-1}^{1} (1-tau)^alpha (1+tau)^{-alpha-1} dtau/(tau - t) = pi cot(pi alpha) (1-t)^alpha (1+t)^{-alpha-1},
/// -1 < Re alpha < 0 (both endpoint powers integrable).
/// The DE nodes stop at distance 1e-64 from the ends, so exponents with real part
/// closer to -1 than about -0.8 lose digits to the neglected tail.
inline IdentityCheck check_identity_jacobi1(cplx alpha, double t, double tol = 1e-9) {
    if (!(alpha.real() > -1.0 && alpha.real() < 0.0))
        throw std::domain_error("jacobi1: need -1 < Re alpha < 0 for integrability");
    const auto p = SegmentPoint::at(t, 1.0);
    const auto r = pv_integral(
        [alpha](const SegmentPoint& q) { return rpow(q.to_plus, alpha) * rpow(q.to_minus, -alpha - 1.0); }, p,
        detail::identity_de());
    const cplx expect = pi / std::tan(pi * alpha) * rpow(p.to_plus, alpha) * rpow(p.to_minus, -alpha - 1.0);
    return detail::make_check("jacobi_alpha_minus_alpha_minus_one", detail::fmt_params({{"alpha", alpha}, {"t", t}}),
                              r.value, expect, tol);
}

/// e-/e+ + e+/e- = 1 - nu and
/// (nu-1)/(nu1 e+-) - 2i e+-/((1+nu) sqrt(nu0)) = +-1/((1+nu) e0^2 e+-).
inline std::vector<IdentityCheck> check_identity_e_pm(double nu, double tol = 1e-12) {
    const DerivedConstants c = derive_constants(nu, 1.0);
    const auto pr = detail::fmt_params({{"nu", nu}});
    std::vector<IdentityCheck> out;
    out.push_back(detail::make_check("e_ratio_sum", pr, c.e_minus / c.e_plus + c.e_plus / c.e_minus, 1.0 - nu, tol));
    for (int s : {1, -1}) {
        const cplx e = s > 0 ? c.e_plus : c.e_minus;
        const cplx lhs = (nu - 1.0) / (c.nu1 * e) - 2.0 * I * e / ((1.0 + nu) * std::sqrt(c.nu0));
        const cplx rhs = double(s) / ((1.0 + nu) * c.e0 * c.e0 * e);
        out.push_back(detail::make_check(s > 0 ? "e_plus_relation" : "e_minus_relation", pr, lhs, rhs, tol));
    }
    return out;
}

/// The default identity suite: at least ten parameter points per identity.
inline std::vector<IdentityCheck> identity_suite(double tol = 1e-9, double tol_algebraic = 1e-12) {
    std::vector<IdentityCheck> out;
    const std::vector<double> ts{-0.97, -0.8, -0.55, -0.3, -0.05, 0.0, 0.12, 0.4, 0.66, 0.9, 0.995};
    for (double t : ts) out.push_back(check_identity_arcsine(t, tol));
    const std::vector<std::pair<double, double>> pairs{{-0.9, 0.3},  {-0.5, 0.5}, {0.0, 0.7},  {0.2, -0.6},
                                                       {0.8, 0.95}, {-0.3, -0.1}, {0.45, 0.1}, {0.99, -0.99},
                                                       {0.05, 0.6}, {-0.75, 0.25}};
    for (const auto& [x, eta] : pairs) out.push_back(check_identity_double_pole(x, eta, tol));
    const double g = derive_constants(0.3, 1.0).gamma;
    const std::vector<cplx> alphas0{0.25, -0.25, 0.5, -0.6, cplx(0.25, -g), cplx(-0.25, g), cplx(0.75, 0.1), cplx(-0.4, -0.3)};
    const std::vector<double> t0{-0.7, 0.1, 0.85};
    for (std::size_t i = 0; i < alphas0.size(); ++i)
        for (std::size_t j = 0; j < t0.size(); ++j)
            if ((i + j) % 2 == 0) out.push_back(check_identity_jacobi0(alphas0[i], t0[j], tol));
    const std::vector<cplx> alphas1{-0.25, -0.75, -0.5, cplx(-0.25, -g), cplx(-0.75, g), cplx(-0.2, 0.2), cplx(-0.8, -0.05)};
    const std::vector<double> t1{-0.6, 0.0, 0.7};
    for (std::size_t i = 0; i < alphas1.size(); ++i)
        for (std::size_t j = 0; j < t1.size(); ++j)
            if ((i + j) % 2 == 0) out.push_back(check_identity_jacobi1(alphas1[i], t1[j], tol));
    for (double nu : {-0.9, -0.5, -0.2, 0.0, 0.05, 0.1, 0.25, 0.3, 0.4, 0.45, 0.5})
        for (auto& c : check_identity_e_pm(nu, tol_algebraic)) out.push_back(std::move(c));
    return out;
}

// ---------------------------------------------------------------------------
// Limit continuity

struct LimitRow {
    double k = 0.0;
    double distance = 0.0;
};

struct LimitTable {
    std::string quantity;
    std::vector<LimitRow> rows;

    /// distances strictly decrease along the sequence
    bool monotone() const {
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i].distance < rows[i - 1].distance)) return false;
        return true;
    }
};

/// Tabulates distance(k) for a caller-supplied measure along a k sequence.
inline LimitTable verify_limit_continuity(std::string quantity, const std::vector<double>& ks,
                                          const std::function<double(double)>& distance) {
    LimitTable t{std::move(quantity), {}};
    for (double k : ks) t.rows.push_back({k, distance(k)});
    return t;
}

/// sup over |t| <= window of |rho(t) - limit(t)| on a uniform grid of n points;
/// grid points on or beyond the ends of rho's segment are skipped.
inline double sup_distance(const PointFn& rho, const PointFn& limit, double kappa_rho, double window, int n = 181) {
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = -window + 2.0 * window * i / (n - 1);
        if (!(std::abs(t) < kappa_rho * (1.0 - 1e-8))) continue;
        d = std::max(d, std::abs(rho(SegmentPoint::at(t, kappa_rho)) - limit(SegmentPoint::at(t, 1.0))));
    }
    return d;
}

}  // namespace incrack
