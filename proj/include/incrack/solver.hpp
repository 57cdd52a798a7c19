/**
 * \file solver.hpp
 *
 * \brief Right-hand sides and the closed-form density of the governing
 * singular integral equation
 *
 *   (1/pi) int_{-k}^{k} (1 + sqrt((1-tau^2)/(1-t^2))) rho(tau) dtau/(tau - t)
 *     - i(1-nu) rho(t) = g(t),          int rho = moment,
 *
 * evaluated generically in the segment half-length k, the right-hand side g
 * and the moment. Model 1 (crack longer) solves for the traction jump psi(at),
 * Model 2 (inclusion longer) for the displacement-derivative jump phi(bt) on
 * the same kernel. The k -> 1 and k -> 0 limits are provided separately.
 */
#pragma once

#include "incrack/quadrature.hpp"

#include <array>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace incrack {

// ---------------------------------------------------------------------------
// Hilbert transform with the sqrt weight for smooth profiles

/// H(t) = PV int_{-1}^{1} sqrt(1 - tau^2) f(tau) dtau / (tau - t) for smooth f, from the
/// U-expansion of f and int sqrt(1-tau^2) U_m(tau) dtau/(tau - t) = -pi T_{m+1}(t).
class SqrtWeightHilbert {
public:
    SqrtWeightHilbert() = default;

    template <class F>
    SqrtWeightHilbert(F&& f, const QuadratureConfig& q)
        : series_(cheb2_coeffs([&](const SegmentPoint& p) { return cplx(f(p.t)); }, 1.0, q)) {}

    cplx operator()(double t) const {
        if (!series_) return 0.0;
        return -pi * cheb_T_shifted_eval(*series_, t);
    }

    /// Reconstruction of f itself.
    cplx profile(double t) const { return series_ ? cheb2_eval(*series_, t) : cplx{}; }

    bool empty() const { return !series_; }

private:
    std::optional<ChebSeries> series_;
};

// ---------------------------------------------------------------------------
// Right-hand sides

enum class RhsKind { model1_general, model1_point_load, model2_general };

inline std::string to_string(RhsKind k) {
    switch (k) {
    case RhsKind::model1_general: return "model1_general";
    case RhsKind::model1_point_load: return "model1_point_load";
    case RhsKind::model2_general: return "model2_general";
    }
    return "?";
}

struct RhsFunction {
    std::function<cplx(const SegmentPoint&)> g;
    RhsKind provenance = RhsKind::model1_point_load;
    double kappa = 0.5;
    double length = 1.0;  ///< a for Model 1, b for Model 2: x = length * t
    /// Set when g(t) = amplitude / sqrt(1 - t^2) exactly.
    std::optional<cplx> point_amplitude;
    /// sqrt-weight Hilbert transform of the loading entering g (sigma0 for
    /// Model 1, w- = i h' - w0 for Model 2); empty for the point load.
    SqrtWeightHilbert hilbert;

    cplx operator()(const SegmentPoint& t) const { return g(t); }
};

inline void require_valid(const ProblemConfig& cfg) {
    const auto v = validate_config(cfg);
    if (!v.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : v) msg += " [" + e.field + ": " + e.message + "]";
        throw std::invalid_argument(msg);
    }
}

/// g(t) on (-k, k), k = b/a:
///   -iE h'(at) + E w0(at) + i(1-nu) sigma0(at)
///   - 2/(pi sqrt(1-t^2)) PV int_{-1}^{1} sqrt(1-tau^2) sigma0(a tau)/(tau - t) dtau
///   + (1-nu) P* / (2 pi a sqrt(1-t^2)).
inline RhsFunction build_rhs_model1(const ProblemConfig& cfg, const QuadratureConfig& q = {}) {
    require_valid(cfg);
    if (cfg.model == Model::model2) throw std::invalid_argument("build_rhs_model1: configuration is model2");
    RhsFunction r;
    r.kappa = cfg.model == Model::equal ? 1.0 : cfg.kappa();
    r.length = cfg.a;
    const double a = cfg.a, nu = cfg.nu, E = cfg.E;
    const cplx amp = (1.0 - nu) * cfg.p_star() / (2.0 * pi * a);
    if (cfg.point_load()) {
        r.provenance = RhsKind::model1_point_load;
        r.point_amplitude = amp;
        r.g = [amp](const SegmentPoint& p) { return amp / p.sqrt_one_minus_t2(); };
        return r;
    }
    r.provenance = RhsKind::model1_general;
    const LoadProfiles prof = cfg.profiles;
    if (prof.sigma0) r.hilbert = SqrtWeightHilbert([prof, a](double t) { return prof.sigma0_at(a * t); }, q);
    const SqrtWeightHilbert h = r.hilbert;
    r.g = [prof, h, a, nu, E, amp](const SegmentPoint& p) {
        const double x = a * p.t;
        const double s = p.sqrt_one_minus_t2();
        return -I * E * prof.h_prime_at(x) + E * prof.w0_at(x) + I * (1.0 - nu) * prof.sigma0_at(x) -
               2.0 / (pi * s) * h(p.t) + amp / s;
    };
    return r;
}

/// g1(t) on (-k, k), k = a/b:
///   -nu1 sigma0(bt) - E(1-nu)[h'(bt) + i w0(bt)]
///   - 2E/(pi sqrt(1-t^2)) PV int_{-1}^{1} sqrt(1-tau^2)[i h'(b tau) - w0(b tau)]/(tau - t) dtau
///   - i P* nu1 / (2 pi b sqrt(1-t^2)).
inline RhsFunction build_rhs_model2(const ProblemConfig& cfg, const QuadratureConfig& q = {}) {
    require_valid(cfg);
    if (cfg.model != Model::model2) throw std::invalid_argument("build_rhs_model2: configuration is not model2");
    RhsFunction r;
    r.provenance = RhsKind::model2_general;
    r.kappa = cfg.kappa();
    r.length = cfg.b;
    const double b = cfg.b, nu = cfg.nu, E = cfg.E;
    const double nu1 = (3.0 - nu) * (1.0 + nu);
    const cplx amp = -I * cfg.p_star() * nu1 / (2.0 * pi * b);
    if (cfg.point_load()) {
        r.point_amplitude = amp;
        r.g = [amp](const SegmentPoint& p) { return amp / p.sqrt_one_minus_t2(); };
        return r;
    }
    const LoadProfiles prof = cfg.profiles;
    if (prof.h_prime || prof.w0)
        r.hilbert = SqrtWeightHilbert([prof, b](double t) { return I * prof.h_prime_at(b * t) - prof.w0_at(b * t); }, q);
    const SqrtWeightHilbert h = r.hilbert;
    r.g = [prof, h, b, nu, nu1, E, amp](const SegmentPoint& p) {
        const double x = b * p.t;
        const double s = p.sqrt_one_minus_t2();
        return -nu1 * prof.sigma0_at(x) - E * (1.0 - nu) * (prof.h_prime_at(x) + I * prof.w0_at(x)) -
               2.0 * E / (pi * s) * h(p.t) + amp / s;
    };
    return r;
}

// ---------------------------------------------------------------------------
// Densities

enum class DensityKind { psi, phi };

inline std::string to_string(DensityKind k) { return k == DensityKind::psi ? "psi" : "phi"; }

/// Sampled density: values at interior nodes plus endpoint metadata.
struct DensitySolution {
    DensityKind kind = DensityKind::psi;
    double kappa = 0.5;
    std::vector<SegmentPoint> nodes;
    std::vector<cplx> values;
    EndpointExponents endpoint_exponents;
    cplx moment;
};

/// A density on (-kappa, kappa) as a callable with a shared cache of samples
/// on the nested DE grid (used for its integrals and Cauchy transforms).
class Density {
public:
    using Fn = std::function<cplx(const SegmentPoint&)>;

    Density() = default;
    Density(Fn f, double kappa, EndpointExponents exps, DensityKind kind)
        : f_(std::move(f)), kappa_(kappa), exps_(exps), kind_(kind) {
        Fn fc = f_;
        const double k = kappa;
        samples_ = SampledFunction(
            [fc, k](double x, double dl, double dh) { return fc(SegmentPoint::with_distances(x, dh, dl, k)); }, -k, k);
    }

    cplx operator()(const SegmentPoint& p) const { return f_(p); }
    double kappa() const { return kappa_; }
    const EndpointExponents& exponents() const { return exps_; }
    DensityKind kind() const { return kind_; }
    const SampledFunction& samples() const { return samples_; }

    /// int_{-k}^{k} rho(t) dt
    cplx moment() const { return samples_.integrate().value; }

    /// int rho(tau) weight(tau) dtau / (tau - t) for t on or off the segment
    /// (signed distances d_lo = t + k, d_hi = k - t).
    template <class W>
    cplx cauchy(double t, double d_lo, double d_hi, W&& weight) const {
        return samples_.cauchy(t, d_lo, d_hi, std::forward<W>(weight)).value;
    }

    DensitySolution sample(const std::vector<SegmentPoint>& nodes) const {
        DensitySolution s;
        s.kind = kind_;
        s.kappa = kappa_;
        s.nodes = nodes;
        s.values.reserve(nodes.size());
        for (const auto& n : nodes) s.values.push_back(f_(n));
        s.endpoint_exponents = exps_;
        s.moment = moment();
        return s;
    }

private:
    Fn f_;
    double kappa_ = 1.0;
    EndpointExponents exps_{};
    DensityKind kind_ = DensityKind::psi;
    SampledFunction samples_;
};

/// Default interior nodes: Chebyshev points of the first kind on (-kappa, kappa).
inline std::vector<SegmentPoint> default_nodes(double kappa, int n = 20) { return chebyshev_nodes(kappa, n); }

// ---------------------------------------------------------------------------
// Closed form

enum class PsiRoute {
    direct,  ///< Psi_j(t) by principal-value quadrature, Psi_j(k) by DE quadrature
    series   ///< Chebyshev-U series for Psi_j(t), endpoint Gauss rule for Psi_j(k)
};

inline std::string to_string(PsiRoute r) { return r == PsiRoute::direct ? "direct" : "series"; }

/// rho(t) = -i(1-nu) g(t)/nu1 + chi(t) B(t),
/// B(t) = Psi_1(t) + sqrt((1-k^2)/(1-t^2)) Psi_1(k) + (Psi_2(t) - Psi_2(k))/sqrt(1-t^2)
///        + C0 (cos beta0 + ((t-k) sin beta0 + sqrt(1-k^2) cos beta0)/sqrt(1-t^2)),
/// Psi_j(t) = 1/(2 pi (nu+1) e0^2) PV int w(tau) sqrt(1-tau^2)^{j-1} g(tau) dtau/(tau - t),
/// w(tau) = (k-tau)^{1/2+2i gamma}(k+tau)^{1/2-2i gamma} R^{-1/4+i gamma},
/// C0 = i moment / (2 pi).
class ClosedFormSolution {
public:
    ClosedFormSolution(RhsFunction rhs, cplx moment, const DerivedConstants& c, const QuadratureConfig& q = {},
                       PsiRoute route = PsiRoute::direct)
        : rhs_(std::move(rhs)), moment_(moment), c_(c), q_(q), route_(route) {
        q_.validate();
        const double k = rhs_.kappa;
        if (!(k > 0.0 && k < 1.0)) throw std::domain_error("ClosedFormSolution: kappa must lie in (0, 1)");
        if (std::abs(c_.kappa - k) > 1e-14) throw std::invalid_argument("ClosedFormSolution: constants built for another kappa");
        if (k > 0.995)
            std::cerr << "warning: kappa = " << k
                      << " is close to 1; endpoint exponents merge and the k = 1 closed form is preferable\n";
        pref_ = 1.0 / (2.0 * pi * (c_.nu + 1.0) * c_.e0 * c_.e0);
        c0_ = I * moment_ / (2.0 * pi);
        if (route_ == PsiRoute::series) {
            for (int j = 0; j < 2; ++j)
                series_[j] = cheb2_coeffs([&](const SegmentPoint& p) { return G(p, j); }, k, q_);
            const cplx sigma(0.0, 2.0 * c_.gamma);
            for (int j = 0; j < 2; ++j) {
                // Psi_j(k) = -pref int sqrt((k+tau)/(k-tau)) G_j(tau) dtau
                psi_k_[j] = -pref_ * endpoint_integral([&](const SegmentPoint& p) { return G(p, j); }, k, q_, sigma).value;
            }
        } else {
            DeOptions opt;
            opt.rel_tol = 1e-14;
            opt.max_level = kDeMaxLevel;
            auto res = de_integrate_segment(
                [&](const SegmentPoint& p) {
                    const cplx v = rpow(p.to_plus, cplx(-0.5, 2.0 * c_.gamma)) * rpow(p.to_minus, cplx(0.5, -2.0 * c_.gamma)) *
                                   rpow(r_parts(p).r, cplx(-0.25, c_.gamma)) * rhs_(p);
                    return Eigen::Vector2cd(v, v * p.sqrt_one_minus_t2());
                },
                k, opt);
            if (!res.converged) throw ConvergenceError("ClosedFormSolution: Psi_j(k) quadrature did not converge");
            psi_k_[0] = -pref_ * res.value[0];
            psi_k_[1] = -pref_ * res.value[1];
        }
    }

    double kappa() const { return rhs_.kappa; }
    const RhsFunction& rhs() const { return rhs_; }
    const DerivedConstants& constants() const { return c_; }
    const QuadratureConfig& quadrature() const { return q_; }
    PsiRoute route() const { return route_; }
    cplx moment_target() const { return moment_; }
    cplx c0() const { return c0_; }
    /// 1/(2 pi (nu+1) e0^2)
    cplx prefactor() const { return pref_; }
    const std::array<cplx, 2>& psi_j_at_kappa() const { return psi_k_; }
    const std::optional<ChebSeries>& series(int j) const { return series_[j]; }

    /// G_j(tau) = ((k-tau)/(k+tau))^{2i gamma} R^{-1/4+i gamma} sqrt(1-tau^2)^j g(tau), j = 0, 1.
    cplx G(const SegmentPoint& p, int j) const {
        const cplx v = rpow(p.to_plus / p.to_minus, cplx(0.0, 2.0 * c_.gamma)) * rpow(r_parts(p).r, cplx(-0.25, c_.gamma)) *
                       rhs_(p);
        return j == 0 ? v : v * p.sqrt_one_minus_t2();
    }

    std::array<cplx, 2> psi_j(const SegmentPoint& t) const {
        if (route_ == PsiRoute::series) return {psi_series(t, *series_[0], pref_), psi_series(t, *series_[1], pref_)};
        DeOptions opt;
        opt.rel_tol = 1e-13;
        opt.max_level = 9;
        const auto res = pv_integral(
            [&](const SegmentPoint& p) {
                const cplx v = rpow(p.to_plus, cplx(0.5, 2.0 * c_.gamma)) * rpow(p.to_minus, cplx(0.5, -2.0 * c_.gamma)) *
                               rpow(r_parts(p).r, cplx(-0.25, c_.gamma)) * rhs_(p);
                return Eigen::Vector2cd(v, v * p.sqrt_one_minus_t2());
            },
            t, opt);
        return {pref_ * res.value[0], pref_ * res.value[1]};
    }

    cplx bracket(const SegmentPoint& t) const { return bracket(t, psi_j(t)); }

    /// B(t) from precomputed Psi_1(t), Psi_2(t).
    cplx bracket(const SegmentPoint& t, const std::array<cplx, 2>& ps) const {
        const double k = kappa();
        const double s = t.sqrt_one_minus_t2();
        const double sk = std::sqrt((1.0 - k) * (1.0 + k));
        const cplx cb = std::cos(c_.beta0), sb = std::sin(c_.beta0);
        return ps[0] + sk / s * psi_k_[0] + (ps[1] - psi_k_[1]) / s + c0_ * (cb + (-t.to_plus * sb + sk * cb) / s);
    }

    cplx operator()(const SegmentPoint& t) const {
        return -I * (1.0 - c_.nu) * rhs_(t) / c_.nu1 + chi(t, c_) * bracket(t);
    }

    Density density(DensityKind kind) const {
        auto self = std::make_shared<ClosedFormSolution>(*this);
        return Density([self](const SegmentPoint& p) { return (*self)(p); }, kappa(), density_exponents(c_), kind);
    }

private:
    RhsFunction rhs_;
    cplx moment_;
    DerivedConstants c_;
    QuadratureConfig q_;
    PsiRoute route_;
    cplx pref_;
    cplx c0_;
    std::array<cplx, 2> psi_k_{};
    std::array<std::optional<ChebSeries>, 2> series_;
};

inline ClosedFormSolution solve_closed_form(const RhsFunction& rhs, cplx moment, const DerivedConstants& c,
                                            const QuadratureConfig& q = {}, PsiRoute route = PsiRoute::direct) {
    return ClosedFormSolution(rhs, moment, c, q, route);
}

/// Model 1: psi(at) on (-b/a, b/a) with int psi(at) dt = i P* / a.
inline ClosedFormSolution solve_model1(const ProblemConfig& cfg, const QuadratureConfig& q = {},
                                       PsiRoute route = PsiRoute::direct) {
    if (cfg.model != Model::model1) throw std::invalid_argument("solve_model1: configuration is not model1");
    return solve_closed_form(build_rhs_model1(cfg, q), I * cfg.p_star() / cfg.a, derive_constants(cfg), q, route);
}

/// Model 2: phi(bt) on (-a/b, a/b) with int phi(bt) dt = 0. The kernel and the
/// solve routine are those of Model 1; only g and the moment differ.
inline ClosedFormSolution solve_model2(const ProblemConfig& cfg, const QuadratureConfig& q = {},
                                       PsiRoute route = PsiRoute::direct) {
    return solve_closed_form(build_rhs_model2(cfg, q), 0.0, derive_constants(cfg), q, route);
}

// ---------------------------------------------------------------------------
// Piecewise densities on (-1, 1) with interior break points +-kappa

/// Density on (-1, 1) given piecewise on (-1, -k), (-k, k), (k, 1). Each piece
/// receives exact distances to its own end points.
class PiecewiseDensity {
public:
    using PieceFn = std::function<cplx(int piece, double x, double d_lo, double d_hi)>;

    PiecewiseDensity() = default;
    PiecewiseDensity(PieceFn f, double kappa, DensityKind kind) : f_(std::move(f)), kappa_(kappa), kind_(kind) {
        const std::array<double, 4> br{-1.0, -kappa, kappa, 1.0};
        for (int i = 0; i < 3; ++i) {
            PieceFn fc = f_;
            pieces_[i] = SampledFunction([fc, i](double x, double dl, double dh) { return fc(i, x, dl, dh); }, br[i],
                                         br[i + 1]);
        }
    }

    double kappa() const { return kappa_; }
    DensityKind kind() const { return kind_; }
    const SampledFunction& piece(int i) const { return pieces_[i]; }

    /// Value at t in (-1, 1), |t| != kappa.
    cplx operator()(double t) const {
        const int i = locate(t);
        return f_(i, t, t - pieces_[i].lo(), pieces_[i].hi() - t);
    }

    /// Value at a point of the inner segment given with exact distances to +-kappa.
    cplx inner(const SegmentPoint& p) const { return f_(1, p.t, p.to_minus, p.to_plus); }

    /// Value at distance d from +1 (d > 0) or from -1 (d < 0).
    cplx near_outer_end(double d) const {
        if (d > 0) return f_(2, 1.0 - d, 1.0 - d - kappa_, d);
        return f_(0, -1.0 - d, -d, 1.0 + d - kappa_);
    }

    cplx integral() const {
        cplx s = 0.0;
        for (const auto& p : pieces_) s += p.integrate().value;
        return s;
    }

    template <class W>
    cplx integral(W&& weight) const {
        cplx s = 0.0;
        for (const auto& p : pieces_) s += p.integrate(weight).value;
        return s;
    }

    /// int rho(tau) weight(tau) dtau / (tau - t) over (-1, 1).
    template <class W>
    cplx cauchy(double t, W&& weight) const {
        cplx s = 0.0;
        for (const auto& p : pieces_) s += p.cauchy(t, t - p.lo(), p.hi() - t, weight).value;
        return s;
    }

    cplx cauchy(double t) const {
        return cauchy(t, [](double, double, double) { return 1.0; });
    }

    /// Cauchy transform at a point of the inner segment with exact distances.
    template <class W>
    cplx cauchy_inner(const SegmentPoint& p, W&& weight) const {
        const double k = kappa_;
        cplx s = pieces_[1].cauchy(p.t, p.to_minus, p.to_plus, weight).value;
        s += pieces_[0].cauchy(p.t, p.to_minus + (1.0 - k), -p.to_minus, weight).value;
        s += pieces_[2].cauchy(p.t, -p.to_plus, p.to_plus + (1.0 - k), weight).value;
        return s;
    }

private:
    int locate(double t) const {
        if (!(std::abs(t) < 1.0) || std::abs(t) == kappa_) throw std::domain_error("PiecewiseDensity: bad abscissa");
        return t < -kappa_ ? 0 : (t < kappa_ ? 1 : 2);
    }

    PieceFn f_;
    double kappa_ = 0.5;
    DensityKind kind_ = DensityKind::phi;
    std::array<SampledFunction, 3> pieces_;
};

/// Outer density from an inner one by the common inversion structure
///   out(t) = alpha/sqrt(1-t^2) [beta C(t) + H(t) + delta] + eps inner(t) [|t| < k],
///   C(t) = int_{-k}^{k} sqrt(1-tau^2) inner(tau) dtau / (tau - t).
struct OuterForm {
    cplx alpha, beta, delta, eps;
    std::function<cplx(double)> H;  ///< smooth part, may be empty
};

inline PiecewiseDensity recover_outer(const Density& inner, OuterForm form, DensityKind kind) {
    const double k = inner.kappa();
    if (!(k < 1.0)) throw std::domain_error("recover_outer: inner segment must be shorter");
    auto fn = [inner, form, k](int piece, double x, double dl, double dh) -> cplx {
        // signed distances of x to -k and +k, and 1 -+ x
        double to_mk, to_pk, one_m, one_p;
        switch (piece) {
        case 0: to_mk = -dh; to_pk = 2.0 * k + dh; one_p = dl; one_m = 2.0 - dl; break;
        case 1: to_mk = dl; to_pk = dh; one_m = (1.0 - k) + dh; one_p = (1.0 - k) + dl; break;
        default: to_mk = 2.0 * k + dl; to_pk = -dl; one_m = dh; one_p = 2.0 - dh; break;
        }
        const double s = std::sqrt(one_m * one_p);
        const cplx C = inner.cauchy(x, to_mk, to_pk, [](double tau, double, double) {
            return std::sqrt((1.0 - tau) * (1.0 + tau));
        });
        cplx val = form.alpha / s * (form.beta * C + (form.H ? form.H(x) : cplx{}) + form.delta);
        if (piece == 1) val += form.eps * inner(SegmentPoint::with_distances(x, dh, dl, k));
        return val;
    };
    return PiecewiseDensity(fn, k, kind);
}

/// phi(at) on (-1, 1) from psi(at) on (-k, k):
///   phi = 1/(pi a sqrt(1-t^2)) [2a int sqrt(1-tau^2) psi dtau/(tau-t)
///         + 4a int_{-1}^{1} sqrt(1-tau^2) sigma0(a tau) dtau/(tau-t) - (1-nu) P*]
///         - i(1-nu) psi(at) [|t| < k]
inline PiecewiseDensity recover_phi(const Density& psi, const RhsFunction& rhs, const ProblemConfig& cfg) {
    const double a = cfg.a, nu = cfg.nu;
    OuterForm f;
    f.alpha = 1.0 / (pi * a);
    f.beta = 2.0 * a;
    f.delta = -(1.0 - nu) * cfg.p_star();
    f.eps = -I * (1.0 - nu);
    if (!rhs.hilbert.empty()) {
        const SqrtWeightHilbert h = rhs.hilbert;
        f.H = [h, a](double t) { return 4.0 * a * h(t); };
    }
    return recover_outer(psi, f, DensityKind::phi);
}

/// psi(bt) on (-1, 1) from the Model 2 density phi(bt) on (-k, k):
///   psi = 2/(pi nu1 sqrt(1-t^2)) int_{-1}^{1} sqrt(1-tau^2)[phi + 2E w-](b tau) dtau/(tau-t)
///         - i(1-nu)/nu1 phi(bt) [|t| < k] + i P*/(pi b sqrt(1-t^2)),   w- = i h' - w0.
inline PiecewiseDensity recover_psi_model2(const Density& phi, const RhsFunction& rhs, const ProblemConfig& cfg) {
    const double b = cfg.b, nu = cfg.nu, E = cfg.E;
    const double nu1 = (3.0 - nu) * (1.0 + nu);
    OuterForm f;
    f.alpha = 2.0 / (pi * nu1);
    f.beta = 1.0;
    f.delta = I * cfg.p_star() * nu1 / (2.0 * b);
    f.eps = -I * (1.0 - nu) / nu1;
    if (!rhs.hilbert.empty()) {
        const SqrtWeightHilbert h = rhs.hilbert;
        f.H = [h, E](double t) { return 2.0 * E * h(t); };
    }
    return recover_outer(phi, f, DensityKind::psi);
}

// ---------------------------------------------------------------------------
// Limits

struct SifResult {
    cplx plus;   ///< K_II^+ + i K_I^+
    cplx minus;  ///< K_II^- + i K_I^-
    double scale = 1.0;  ///< sqrt(a)/P

    double K1_plus() const { return plus.imag(); }
    double K1_minus() const { return minus.imag(); }
    double K2_plus() const { return plus.real(); }
    double K2_minus() const { return minus.real(); }
    double K1_plus_norm() const { return scale * plus.imag(); }
    double K1_minus_norm() const { return scale * minus.imag(); }
    double K2_plus_norm() const { return scale * plus.real(); }
    double K2_minus_norm() const { return scale * minus.real(); }
};

/// k -> 0: sqrt(a) K_I/P = 1/(2 sqrt(pi)), sqrt(a) K_II^+-/P = +-(1-nu)/(4 sqrt(pi)).
inline SifResult limit_k0_sifs(double nu, double P, double a) {
    if (!(a > 0.0) || P == 0.0) throw std::invalid_argument("limit_k0_sifs: need a > 0 and P != 0");
    const double kI = 1.0 / (2.0 * std::sqrt(pi));
    const double kII = (1.0 - nu) / (4.0 * std::sqrt(pi));
    const double f = P / std::sqrt(a);
    return {cplx(kII, kI) * f, cplx(-kII, kI) * f, std::sqrt(a) / P};
}

/// k = 1, point load:
///   psi(at) = -P*/(2 pi a (1+nu) sqrt(nu0)) [ (1/e-)(1-t)^{-1/4-i gamma}(1+t)^{-3/4+i gamma}
///                                            - (i/e+)(1-t)^{-3/4-i gamma}(1+t)^{-1/4+i gamma} ]
inline Density limit_k1_point_density(const ProblemConfig& cfg) {
    const DerivedConstants c = derive_constants(cfg.nu, 1.0);
    const double Ps = cfg.p_star(), a = cfg.a;
    const cplx pre = -Ps / (2.0 * pi * a * (1.0 + c.nu) * std::sqrt(c.nu0));
    auto f = [c, pre](const SegmentPoint& p) {
        const double om = p.to_plus, op = p.to_minus;  // 1 - t, 1 + t
        return pre * (rpow(om, cplx(-0.25, -c.gamma)) * rpow(op, cplx(-0.75, c.gamma)) / c.e_minus -
                      I / c.e_plus * rpow(om, cplx(-0.75, -c.gamma)) * rpow(op, cplx(-0.25, c.gamma)));
    };
    return Density(f, 1.0, {cplx(-0.75, -c.gamma), cplx(-0.75, c.gamma)}, DensityKind::psi);
}

/// k = 1, general g:
///   psi(at) = i(nu-1) g/nu1 - 1/(pi w1) [1/nu1 PV int w1 g/(tau-t) - i P* e+/(a(1+nu) sqrt(nu0))]
///                           - 1/(pi w2) [1/nu1 PV int w2 g/(tau-t) - P* e-/(a(1+nu) sqrt(nu0))]
///   w1 = (1-t)^{3/4+i gamma}(1+t)^{1/4-i gamma},  w2 = (1-t)^{1/4+i gamma}(1+t)^{3/4-i gamma}.
inline Density limit_k1_general_density(const RhsFunction& rhs, const ProblemConfig& cfg) {
    if (rhs.kappa != 1.0) throw std::invalid_argument("limit_k1_general_density: rhs must live on (-1, 1)");
    const DerivedConstants c = derive_constants(cfg.nu, 1.0);
    const double Ps = cfg.p_star(), a = cfg.a;
    const double den = a * (1.0 + c.nu) * std::sqrt(c.nu0);
    auto w1 = [c](const SegmentPoint& p) { return rpow(p.to_plus, cplx(0.75, c.gamma)) * rpow(p.to_minus, cplx(0.25, -c.gamma)); };
    auto w2 = [c](const SegmentPoint& p) { return rpow(p.to_plus, cplx(0.25, c.gamma)) * rpow(p.to_minus, cplx(0.75, -c.gamma)); };
    auto f = [rhs, c, Ps, den, w1, w2](const SegmentPoint& t) {
        DeOptions opt;
        opt.rel_tol = 1e-13;
        opt.max_level = 9;
        const auto pv = pv_integral(
            [&](const SegmentPoint& p) {
                const cplx g = rhs(p);
                return Eigen::Vector2cd(w1(p) * g, w2(p) * g);
            },
            t, opt);
        return I * (c.nu - 1.0) * rhs(t) / c.nu1 - (pv.value[0] / c.nu1 - I * Ps * c.e_plus / den) / (pi * w1(t)) -
               (pv.value[1] / c.nu1 - Ps * c.e_minus / den) / (pi * w2(t));
    };
    return Density(f, 1.0, {cplx(-0.75, -c.gamma), cplx(-0.75, c.gamma)}, DensityKind::psi);
}

/// k -> 1 density: the closed form for the point load, the general-g route otherwise.
inline Density limit_k1_density(const RhsFunction& rhs, const ProblemConfig& cfg) {
    if (rhs.point_amplitude) return limit_k1_point_density(cfg);
    return limit_k1_general_density(rhs, cfg);
}

/// Model 1 or Equal configuration: the psi density on (-k, k) through the
/// appropriate route.
inline Density solve_psi(const ProblemConfig& cfg, const QuadratureConfig& q = {}, PsiRoute route = PsiRoute::direct) {
    if (cfg.model == Model::equal) return limit_k1_density(build_rhs_model1(cfg, q), cfg);
    return solve_model1(cfg, q, route).density(DensityKind::psi);
}

}  // namespace incrack
