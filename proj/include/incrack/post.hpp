/**
 * \file post.hpp
 *
 * \brief Stress intensity factors at the crack tips, contact tractions under
 * the inclusion, boundary values of stresses and displacement derivatives on
 * y = 0 and endpoint reports.
 *
 * All positions are in the scaled variable t = x/a of Model 1.
 */
#pragma once

#include "incrack/solver.hpp"

namespace incrack {

// ---------------------------------------------------------------------------
// SIFs

namespace detail {

/// Weight ((1+t)/(1-t))^{+-1/2} on the segment (-k, k) from the distances to +-k.
inline double tip_weight(double dl, double dh, double k, int sign) {
    const double one_m = (1.0 - k) + dh;
    const double one_p = (1.0 - k) + dl;
    return std::sqrt(sign > 0 ? one_p / one_m : one_m / one_p);
}

/// int_{-1}^{1} ((1+t)/(1-t))^{+-1/2} sigma0(at) dt
inline cplx sigma0_tip_integral(const ProblemConfig& cfg, int sign) {
    if (!cfg.profiles.sigma0) return 0.0;
    DeOptions opt;
    opt.rel_tol = 1e-13;
    opt.max_level = kDeMaxLevel;
    const auto r = de_integrate(
        [&](double x, double dl, double dh) {
            return std::sqrt(sign > 0 ? dl / dh : dh / dl) * cfg.profiles.sigma0_at(cfg.a * x);
        },
        -1.0, 1.0, opt);
    return r.value;
}

}  // namespace detail

/// K_II^+- + i K_I^+- = 1/(2 sqrt(pi a)) [ a int_{-k}^{k} ((1+t)/(1-t))^{+-1/2} psi(at) dt
///     + 2a int_{-1}^{1} ((1+t)/(1-t))^{+-1/2} sigma0(at) dt +- (1-nu) P*/2 ].
inline SifResult sif_general(const Density& psi, const ProblemConfig& cfg) {
    const double k = psi.kappa();
    if (!(k < 1.0)) throw std::domain_error("sif_general: crack and inclusion tips coincide for k = 1");
    const double a = cfg.a;
    std::array<cplx, 2> out;
    for (int i = 0; i < 2; ++i) {
        const int sign = i == 0 ? 1 : -1;
        const auto Ipsi = psi.samples().integrate(
            [k, sign](double, double dl, double dh) { return detail::tip_weight(dl, dh, k, sign); });
        if (!Ipsi.converged) throw ConvergenceError("sif_general: tip integral did not converge");
        const cplx Isig = detail::sigma0_tip_integral(cfg, sign);
        out[i] = (a * Ipsi.value + 2.0 * a * Isig + sign * 0.5 * (1.0 - cfg.nu) * cfg.p_star()) / (2.0 * std::sqrt(pi * a));
    }
    return {out[0], out[1], std::sqrt(a) / cfg.P};
}

enum class SifRule {
    gauss,    ///< Chebyshev-U series, endpoint rule and Gauss-Chebyshev with extrapolation
    adaptive  ///< principal-value Psi_j and DE quadrature of the same integrand
};

inline std::string to_string(SifRule r) { return r == SifRule::gauss ? "gauss" : "adaptive"; }

/// chi^+-(t) / B(t) = -2ia/((1+nu) sqrt(nu0) g2(t)) ((1+t)/(1-t))^{+-1/2},
/// g2(t) = ((k-t)/(k+t))^{2i gamma} R^{-1/4+i gamma}(t).
inline cplx chi_tip_factor(const DerivedConstants& c, const SegmentPoint& p, double a, int sign) {
    const cplx inv_g2 = rpow(p.to_plus / p.to_minus, cplx(0.0, -2.0 * c.gamma)) * rpow(r_parts(p).r, cplx(0.25, -c.gamma));
    return -2.0 * I * a / ((1.0 + c.nu) * std::sqrt(c.nu0)) * inv_g2 *
           detail::tip_weight(p.to_minus, p.to_plus, c.kappa, sign);
}

inline cplx chi_tip(const ClosedFormSolution& sol, const SegmentPoint& p, double a, int sign) {
    return chi_tip_factor(sol.constants(), p, a, sign) * sol.bracket(p);
}

namespace detail {
/// Both tip integrals int chi^+- dtau / sqrt(k^2 - tau^2) by the L-point Gauss-Chebyshev
/// rule, with Psi_j on all nodes from one FFT of the Chebyshev series.
inline std::array<cplx, 2> gauss_tip_integrals(const ClosedFormSolution& sol, double a, int L) {
    const double k = sol.kappa();
    const cplx f = -pi * k * sol.prefactor();
    const auto s1 = cheb_T_shifted_on_gauss_nodes(*sol.series(0), L);
    const auto s2 = cheb_T_shifted_on_gauss_nodes(*sol.series(1), L);
    const auto nodes = chebyshev_nodes(k, L);
    std::array<cplx, 2> acc{};
    for (int l = 0; l < L; ++l) {
        const cplx B = sol.bracket(nodes[l], {f * s1[l], f * s2[l]});
        acc[0] += chi_tip_factor(sol.constants(), nodes[l], a, 1) * B;
        acc[1] += chi_tip_factor(sol.constants(), nodes[l], a, -1) * B;
    }
    return {pi / L * acc[0], pi / L * acc[1]};
}
}  // namespace detail

/// Point-load SIFs through the rearranged form
///   K^+- = 1/(2 sqrt(pi a)) [ +-(1-nu)P*/2 - i(1-nu)^2 P*/(2 pi nu1) ln((1+k)/(1-k))
///                             + int_{-k}^{k} chi^+-(tau) dtau / sqrt(k^2 - tau^2) ].
inline SifResult sif_point_load(const ProblemConfig& cfg, const QuadratureConfig& q = {}, SifRule rule = SifRule::gauss) {
    if (cfg.model != Model::model1) throw std::invalid_argument("sif_point_load: requires a model1 configuration");
    if (!cfg.point_load()) throw std::invalid_argument("sif_point_load: configuration carries load profiles");
    const ClosedFormSolution sol = solve_model1(cfg, q, rule == SifRule::gauss ? PsiRoute::series : PsiRoute::direct);
    const DerivedConstants& c = sol.constants();
    const double k = sol.kappa(), a = cfg.a, nu = cfg.nu, Ps = cfg.p_star();
    const cplx log_term = -I * (1.0 - nu) * (1.0 - nu) * Ps / (2.0 * pi * c.nu1) * std::log((1.0 + k) / (1.0 - k));
    std::array<cplx, 2> integral;
    if (rule == SifRule::gauss) {
        // the integrand is known to the series accuracy only; the L-rule
        // convergence test uses that tolerance
        QuadratureConfig qg = q;
        qg.rel_tol = std::min(1e-6, std::max(q.rel_tol, 1e-2 * q.series_rel_tol));
        const cplx sigma(0.0, 2.0 * c.gamma);
        const std::vector<cplx> exps{1.0 + 2.0 * sigma, 1.0 - 2.0 * sigma, cplx(2.0), 3.0 + 2.0 * sigma, 3.0 - 2.0 * sigma};
        // one extrapolation for the pair: the scalar rule carries both through a
        // combination with incommensurate weights
        std::array<std::vector<cplx>, 2> raw;
        const std::size_t need = exps.size() + 2, most = need + static_cast<std::size_t>(q.max_doublings);
        bool done = false;
        int L = q.L;
        for (std::size_t i = 0; i < most && !done; ++i, L *= 2) {
            const auto v = detail::gauss_tip_integrals(sol, a, L);
            raw[0].push_back(v[0]);
            raw[1].push_back(v[1]);
            if (raw[0].size() < need) continue;
            done = true;
            for (int s = 0; s < 2; ++s) {
                const auto col = richardson_table(raw[s], exps);
                integral[s] = col.back();
                if (std::abs(col.back() - col[col.size() - 2]) > qg.rel_tol * std::abs(col.back())) done = false;
            }
        }
        if (!done) throw ConvergenceError("sif_point_load: Gauss-Chebyshev rule did not converge within max_doublings");
    } else {
        DeOptions opt;
        opt.rel_tol = 1e-12;
        opt.max_level = kDeMaxLevel;
        for (int s = 0; s < 2; ++s) {
            const int sign = s == 0 ? 1 : -1;
            const auto r = de_integrate_segment(
                [&](const SegmentPoint& p) { return chi_tip(sol, p, a, sign) / std::sqrt(p.to_plus * p.to_minus); }, k, opt);
            if (!r.converged) throw ConvergenceError("sif_point_load: adaptive quadrature did not converge");
            integral[s] = r.value;
        }
    }
    std::array<cplx, 2> out;
    for (int s = 0; s < 2; ++s) {
        const int sign = s == 0 ? 1 : -1;
        out[s] = (sign * 0.5 * (1.0 - nu) * Ps + log_term + integral[s]) / (2.0 * std::sqrt(pi * a));
    }
    return {out[0], out[1], std::sqrt(a) / cfg.P};
}

// ---------------------------------------------------------------------------
// Boundary values on y = 0

struct BoundaryValues {
    cplx sigma_plus;   ///< sigma12 + i sigma22 at y = 0+
    cplx sigma_minus;  ///< at y = 0-
    cplx Ew_plus;      ///< E d(u1 + i u2)/dx at y = 0+
    cplx Ew_minus;
};

namespace detail {
inline BoundaryValues assemble_boundary(cplx psi, cplx phi, cplx Cpsi, cplx Cphi, double nu) {
    const double nu1 = (3.0 - nu) * (1.0 + nu);
    const cplx common_s = I * (1.0 - nu) / (4.0 * pi) * Cpsi + Cphi / (4.0 * pi);
    const cplx common_w = -I * (1.0 - nu) / (4.0 * pi) * Cphi - nu1 / (4.0 * pi) * Cpsi;
    return {0.5 * psi + common_s, -0.5 * psi + common_s, 0.5 * phi + common_w, -0.5 * phi + common_w};
}
}  // namespace detail

/// sigma+-(at) = +-psi(at)/2 + i(1-nu)/(4 pi) int psi(a tau) dtau/(tau - t) + 1/(4 pi) int phi(a tau) dtau/(tau - t)
/// E w+-(at)   = +-phi(at)/2 - i(1-nu)/(4 pi) int phi dtau/(tau - t) - nu1/(4 pi) int psi dtau/(tau - t)
/// at a point under the inclusion.
inline BoundaryValues boundary_values(const Density& psi, const PiecewiseDensity& phi, const ProblemConfig& cfg,
                                      const SegmentPoint& p) {
    const auto one = [](double, double, double) { return 1.0; };
    const cplx Cpsi = psi.cauchy(p.t, p.to_minus, p.to_plus, one);
    const cplx Cphi = phi.cauchy_inner(p, one);
    return detail::assemble_boundary(psi(p), phi.inner(p), Cpsi, Cphi, cfg.nu);
}

/// Same on the crack faces outside the inclusion, kappa < |t| < 1 (psi = 0 there).
inline BoundaryValues boundary_values(const Density& psi, const PiecewiseDensity& phi, const ProblemConfig& cfg,
                                      double t) {
    const double k = psi.kappa();
    if (!(std::abs(t) > k && std::abs(t) < 1.0)) throw std::domain_error("boundary_values: t must satisfy k < |t| < 1");
    const auto one = [](double, double, double) { return 1.0; };
    const cplx Cpsi = psi.cauchy(t, t + k, k - t, one);
    return detail::assemble_boundary(0.0, phi(t), Cpsi, phi.cauchy(t), cfg.nu);
}

// ---------------------------------------------------------------------------
// Contact tractions

struct TractionSample {
    double t = 0.0;
    cplx sigma;    ///< sigma12 + i sigma22 at y = 0-
    cplx bounded;  ///< sigma / ((k-t)^{-1/2-2i gamma}(k+t)^{-1/2+2i gamma})
};

struct TractionTrace {
    std::vector<TractionSample> samples;
    EndpointExponents endpoint_exponent;
    double P = 1.0;
};

enum class TractionRoute {
    closed_form,    ///< explicit expression with chi and the bracket of the closed form
    boundary_value  ///< sigma+(x) - psi(x) with sigma+ evaluated from the boundary integrals
};

namespace detail {
inline cplx endpoint_factor(const SegmentPoint& p, double gamma) {
    return rpow(p.to_plus, cplx(-0.5, -2.0 * gamma)) * rpow(p.to_minus, cplx(-0.5, 2.0 * gamma));
}
}  // namespace detail

/// sigma12 + i sigma22 at y = 0- under the inclusion:
///   -4 sigma0/nu1 + (1-nu)/nu1 [E h' + iE w0 - 2i/(pi sqrt(1-t^2)) PV int sqrt(1-tau^2) sigma0 dtau/(tau-t)
///                               + i(1-nu) P*/(2 pi a sqrt(1-t^2))] - chi(t) B(t).
inline cplx contact_traction_at(const ClosedFormSolution& sol, const ProblemConfig& cfg, const SegmentPoint& p) {
    const DerivedConstants& c = sol.constants();
    const double a = cfg.a, nu = cfg.nu, E = cfg.E;
    const double x = a * p.t, s = p.sqrt_one_minus_t2();
    const auto& prof = cfg.profiles;
    const cplx H = sol.rhs().hilbert(p.t);
    const cplx inner = E * prof.h_prime_at(x) + I * E * prof.w0_at(x) - 2.0 * I / (pi * s) * H +
                       I * (1.0 - nu) * cfg.p_star() / (2.0 * pi * a * s);
    return -4.0 * prof.sigma0_at(x) / c.nu1 + (1.0 - nu) / c.nu1 * inner - chi(p, c) * sol.bracket(p);
}

inline TractionTrace contact_traction(const ClosedFormSolution& sol, const ProblemConfig& cfg,
                                      const std::vector<SegmentPoint>& nodes) {
    TractionTrace tr;
    tr.endpoint_exponent = density_exponents(sol.constants());
    tr.P = cfg.P;
    for (const auto& p : nodes) {
        const cplx s = contact_traction_at(sol, cfg, p);
        tr.samples.push_back({p.t, s, s / detail::endpoint_factor(p, sol.constants().gamma)});
    }
    return tr;
}

/// sigma(x, 0-) = sigma+(x) - psi(x) with sigma+ from the boundary integrals.
inline TractionTrace contact_traction(const Density& psi, const PiecewiseDensity& phi, const ProblemConfig& cfg,
                                      const std::vector<SegmentPoint>& nodes) {
    const DerivedConstants c = derive_constants(cfg);
    TractionTrace tr;
    tr.endpoint_exponent = density_exponents(c);
    tr.P = cfg.P;
    for (const auto& p : nodes) {
        const BoundaryValues bv = boundary_values(psi, phi, cfg, p);
        const cplx s = bv.sigma_plus - psi(p);
        tr.samples.push_back({p.t, s, s / detail::endpoint_factor(p, c.gamma)});
    }
    return tr;
}

/// Chebyshev trace nodes on (-k, k) in increasing order, denser towards the tips.
inline std::vector<SegmentPoint> trace_nodes(double kappa, int n) {
    auto out = chebyshev_nodes(kappa, n);
    std::reverse(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Endpoint report

struct EndpointReport {
    cplx crack_tip_exponent;      ///< exponent of phi at x = +-a
    EndpointExponents inclusion;  ///< exponents at x = +b, -b
    cplx phi0_plus;               ///< phi ~ phi0+ (a - x)^{-1/2}
    cplx phi0_minus;              ///< phi ~ phi0- (a + x)^{-1/2}
};

/// phi0+- = -+(1/pi) sqrt(2/a) [ int ((a+x)/(a-x))^{+-1/2} psi dx + 2 int ((a+x)/(a-x))^{+-1/2} sigma0 dx
///          +- (1-nu) P*/2 ] = -+ 2 sqrt(2/pi) K^+-.
inline EndpointReport endpoint_report(const Density& psi, const ProblemConfig& cfg) {
    const DerivedConstants c = derive_constants(cfg);
    EndpointReport r;
    if (cfg.model == Model::equal) {
        // crack and inclusion tips coincide; the two terms of the k = 1 density
        // carry (1-t)^{-1/4-i gamma} and (1-t)^{-3/4-i gamma} at t = 1
        r.crack_tip_exponent = cplx(-0.75, -c.gamma);
        r.inclusion = {cplx(-0.75, -c.gamma), cplx(-0.75, c.gamma)};
        r.phi0_plus = r.phi0_minus = cplx(std::nan(""), std::nan(""));
        return r;
    }
    r.crack_tip_exponent = -0.5;
    r.inclusion = density_exponents(c);
    const SifResult k = sif_general(psi, cfg);
    const double f = 2.0 * std::sqrt(2.0 / pi);
    r.phi0_plus = -f * k.plus;
    r.phi0_minus = f * k.minus;
    return r;
}

}  // namespace incrack
