/**
 * \file quadrature.hpp
 *
 * \brief Integration machinery: a double-exponential (tanh-sinh) rule with
 * exact endpoint distances, principal values by singularity subtraction,
 * graded Gauss-Legendre composites, the three Gauss formulas used for the
 * point-load case (Chebyshev-U coefficients, the endpoint rule for Psi_j(k)
 * and Gauss-Chebyshev for the SIF integral) and the Chebyshev series for
 * Psi_j.
 */
#pragma once

#include "incrack/special.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace incrack {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureConfig {
    int N = 200;  ///< Chebyshev-U coefficient rule order
    int M = 200;  ///< endpoint rule order for Psi_j(k)
    int L = 200;  ///< Gauss-Chebyshev order for the SIF integral
    double rel_tol = 1e-10;
    /// Tolerance of the Chebyshev-U series route. The coefficients of the
    /// oscillating integrands decay only algebraically, so the series is
    /// held to a looser target than the other rules.
    double series_rel_tol = 2e-9;
    int max_doublings = 7;
    /// Largest order of the Chebyshev-U series; doubling from N continues up to it.
    int max_series_order = 25600;

    void validate() const {
        if (N < 8 || M < 8 || L < 8) throw std::invalid_argument("QuadratureConfig: orders must be >= 8");
        if (!(rel_tol > 0.0) || rel_tol > 1e-6)
            throw std::invalid_argument("QuadratureConfig: rel_tol must lie in (0, 1e-6]");
        if (!(series_rel_tol > 0.0) || series_rel_tol > 1e-4)
            throw std::invalid_argument("QuadratureConfig: series_rel_tol must lie in (0, 1e-4]");
        if (max_doublings < 0) throw std::invalid_argument("QuadratureConfig: max_doublings < 0");
        if (max_series_order < N) throw std::invalid_argument("QuadratureConfig: max_series_order < N");
    }
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(cplx v) { return std::abs(v); }
template <class D>
double magnitude(const Eigen::MatrixBase<D>& v) {
    return v.cwiseAbs().maxCoeff();
}

template <class T>
T zero_like() {
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, cplx>)
        return T{};
    else
        return T::Zero();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Double-exponential rule on [-1, 1]
//
// x = tanh(pi/2 sinh u). Node tables are nested: level 0 has step 1, every
// further level halves the step and only stores the new (odd) nodes. Nodes are
// kept while both endpoint distances exceed kDeCutoff (in units of the half
// length), which bounds the neglected tail by kDeCutoff^{1/4} even for the
// strongest (-3/4) endpoint singularity that occurs.

inline constexpr double kDeCutoff = 1e-64;
inline constexpr int kDeMaxLevel = 10;

struct DeNode {
    int m;         ///< u = m * 2^-kDeMaxLevel
    double x;      ///< abscissa in (-1, 1)
    double d_lo;   ///< 1 + x, exact
    double d_hi;   ///< 1 - x, exact
    double w;      ///< weight excluding the step h
};

inline const std::vector<std::vector<DeNode>>& de_tables() {
    static const std::vector<std::vector<DeNode>> tables = [] {
        std::vector<std::vector<DeNode>> out(kDeMaxLevel + 1);
        auto make = [](int m) {
            const double u = std::ldexp(double(m), -kDeMaxLevel);
            const double s = 0.5 * pi * std::sinh(u);
            const double e = std::exp(-2.0 * std::abs(s));
            const double small = 2.0 * e / (1.0 + e);  // 1 - tanh|s|
            const double large = 2.0 / (1.0 + e);      // 1 + tanh|s|
            DeNode n;
            n.m = m;
            n.d_lo = s >= 0 ? large : small;
            n.d_hi = s >= 0 ? small : large;
            n.x = s >= 0 ? 1.0 - n.d_hi : n.d_lo - 1.0;
            // cosh(u) / cosh(s)^2 = 4 cosh(u) e / (1 + e)^2
            n.w = 0.5 * pi * std::cosh(u) * 4.0 * e / ((1.0 + e) * (1.0 + e));
            return n;
        };
        for (int level = 0; level <= kDeMaxLevel; ++level) {
            auto& tab = out[level];
            const int stride = level == 0 ? 1 : 2;
            const int first = level == 0 ? 0 : 1;
            const int scale = 1 << (kDeMaxLevel - level);
            for (int j = first;; j += stride) {
                const DeNode n = make(j * scale);
                if (std::min(n.d_lo, n.d_hi) < kDeCutoff) break;
                tab.push_back(n);
                if (j != 0) tab.push_back(make(-j * scale));
            }
        }
        return out;
    }();
    return tables;
}

struct DeOptions {
    double rel_tol = 1e-13;
    double abs_tol = 0.0;
    int min_level = 3;
    int max_level = 8;
};

template <class T>
struct DeResult {
    T value;
    double error = 0.0;
    int level = 0;
    bool converged = false;
};

/// Integrates f(x, x - lo, hi - x) over [lo, lo + length]; f receives exact
/// endpoint distances. Levels are refined until successive estimates agree.
template <class F>
auto de_integrate_len(F&& f, double lo, double length, const DeOptions& opt = {}) {
    using T = std::decay_t<decltype(f(0.0, 1.0, 1.0))>;
    const double hi = lo + length;
    const double half = 0.5 * length;
    const auto& tables = de_tables();
    T sum = detail::zero_like<T>();
    T prev = detail::zero_like<T>();
    double sum_abs = 0.0;
    DeResult<T> res{detail::zero_like<T>()};
    const int max_level = std::min(opt.max_level, kDeMaxLevel);
    for (int level = 0; level <= max_level; ++level) {
        for (const DeNode& n : tables[level]) {
            const double dl = half * n.d_lo;
            const double dh = half * n.d_hi;
            const double x = dl < dh ? lo + dl : hi - dh;
            const T term = (n.w * half) * f(x, dl, dh);
            sum += term;
            sum_abs += detail::magnitude(term);
        }
        const T est = std::ldexp(1.0, -level) * sum;
        res.value = est;
        res.level = level;
        if (level > 0) {
            res.error = detail::magnitude(T(est - prev));
            // cancellation floor: results that are zero up to rounding converge too
            const double scale = std::max(detail::magnitude(est), 1e-3 * std::ldexp(sum_abs, -level));
            if (level >= opt.min_level && (res.error <= opt.rel_tol * scale || res.error <= opt.abs_tol)) {
                res.converged = true;
                return res;
            }
        }
        prev = est;
    }
    return res;
}

/// de_integrate_len over [lo, hi].
template <class F>
auto de_integrate(F&& f, double lo, double hi, const DeOptions& opt = {}) {
    return de_integrate_len(std::forward<F>(f), lo, hi - lo, opt);
}

/// de_integrate over the symmetric segment (-kappa, kappa) with a SegmentPoint integrand.
template <class F>
auto de_integrate_segment(F&& f, double kappa, const DeOptions& opt = {}) {
    return de_integrate(
        [&](double x, double dl, double dh) { return f(SegmentPoint::with_distances(x, dh, dl, kappa)); },
        -kappa, kappa, opt);
}

/// Principal value PV int_{-kappa}^{kappa} f(tau) / (tau - t) dtau by subtraction,
///   int (f(tau) - f(t)) / (tau - t) dtau + f(t) ln((kappa - t) / (kappa + t)),
/// with the regular integral split at t.
template <class F>
auto pv_integral(F&& f, const SegmentPoint& t, const DeOptions& opt = {}) {
    using T = std::decay_t<decltype(f(t))>;
    const double k = t.kappa;
    const T ft = f(t);
    auto left = de_integrate_len(
        [&](double x, double dl, double dh) -> T {
            // tau in (-k, t): distance to t is dh
            const auto p = SegmentPoint::with_distances(x, t.to_plus + dh, dl, k);
            return T(f(p) - ft) / (-dh);
        },
        -k, t.to_minus, opt);
    auto right = de_integrate_len(
        [&](double x, double dl, double dh) -> T {
            const auto p = SegmentPoint::with_distances(x, dh, t.to_minus + dl, k);
            return T(f(p) - ft) / dl;
        },
        t.t, t.to_plus, opt);
    DeResult<T> out{detail::zero_like<T>()};
    out.value = left.value + right.value + ft * std::log(t.to_plus / t.to_minus);
    out.error = left.error + right.error;
    out.level = std::max(left.level, right.level);
    out.converged = left.converged && right.converged;
    return out;
}

// ---------------------------------------------------------------------------
// Graded Gauss-Legendre composite on (-kappa, kappa)
//
// Uniform panels in the middle and geometrically shrinking panels towards both
// endpoints, down to distance depth * kappa. Accurate for endpoint behaviour
// (kappa -+ t)^alpha with complex alpha, Re alpha > -1.

struct WeightedNode {
    SegmentPoint point;
    double weight;
    int panel;
};

struct GradedRuleOptions {
    double grading = 0.15;
    double depth = 1e-32;
    int middle_panels = 4;
};

inline std::vector<WeightedNode> graded_rule(double kappa, const GradedRuleOptions& opt = {}) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    const auto& xs = GL::abscissa();
    const auto& ws = GL::weights();
    std::vector<WeightedNode> out;
    int panel = 0;
    // panel given by distances from +kappa: [d_near, d_far] (towards the plus end)
    // or absolute coordinates in the middle
    auto emit = [&](auto&& make_point, double half) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (int sgn : {-1, 1}) {
                if (xs[i] == 0.0 && sgn == 1) continue;
                out.push_back({make_point(sgn * xs[i]), ws[i] * half, panel});
            }
        }
        ++panel;
    };
    const double edge = 0.5 * kappa;  // graded zones cover distances (0, edge] from each end
    const double mid_lo = -kappa + edge, mid_hi = kappa - edge;
    const double width = (mid_hi - mid_lo) / opt.middle_panels;
    for (int p = 0; p < opt.middle_panels; ++p) {
        const double a = mid_lo + p * width;
        const double c = a + 0.5 * width;
        emit([&](double x) { const double t = c + 0.5 * width * x; return SegmentPoint::with_distances(t, kappa - t, kappa + t, kappa); },
             0.5 * width);
    }
    for (double far = edge; far > opt.depth * kappa; far *= opt.grading) {
        const double nearer = far * opt.grading;
        const double c = 0.5 * (far + nearer), h = 0.5 * (far - nearer);
        emit([&](double x) { const double d = c + h * x; return SegmentPoint::with_distances(kappa - d, d, 2 * kappa - d, kappa); }, h);
        emit([&](double x) { const double d = c + h * x; return SegmentPoint::with_distances(d - kappa, 2 * kappa - d, d, kappa); }, h);
    }
    return out;
}

/// PV of sampled values on a graded rule: sum w (f_i - f(t)) / (tau_i - t) + f(t) ln((k-t)/(k+t)).
/// Nodes that nearly coincide with t take the mean quotient of their two panel neighbours.
inline cplx pv_on_rule(const std::vector<WeightedNode>& rule, const std::vector<cplx>& f, cplx ft,
                       const SegmentPoint& t) {
    cplx acc = 0.0;
    const std::size_t n = rule.size();
    auto quotient = [&](std::size_t i) { return (f[i] - ft) / (rule[i].point.t - t.t); };
    for (std::size_t i = 0; i < n; ++i) {
        const double dist = std::abs(rule[i].point.t - t.t);
        cplx q;
        if (dist < 1e-9 * std::max(rule[i].weight, 1e-300)) {
            cplx sum = 0.0;
            int cnt = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || rule[j].panel != rule[i].panel) continue;
                if (std::abs(rule[j].point.t - t.t) < 1e-9 * rule[j].weight) continue;
                if (cnt == 2) break;
                sum += quotient(j);
                ++cnt;
            }
            q = cnt ? sum / double(cnt) : cplx{};
        } else {
            q = quotient(i);
        }
        acc += rule[i].weight * q;
    }
    return acc + ft * std::log(t.to_plus / t.to_minus);
}

// ---------------------------------------------------------------------------
// Chebyshev-U expansion g(tau) = sum_m c_m U_m(tau / kappa)

struct ChebSeries {
    std::vector<cplx> coeffs;
    double kappa = 1.0;
    int order = 0;  ///< quadrature order N the coefficients came from
};

/// Coefficients from the N-point Gauss rule for the weight sqrt(kappa^2 - tau^2):
///   c_m = 2/(N+1) sum_l sin(l pi/(N+1)) sin(l (m+1) pi/(N+1)) g(kappa cos(l pi/(N+1))),
/// a type-I sine transform, done as one FFT of the odd extension of length 2(N+1).
template <class G>
std::vector<cplx> cheb2_coeffs_rule(G&& g, double kappa, int N) {
    const int P = 2 * (N + 1);
    std::vector<cplx> x(P, 0.0);
    for (int l = 1; l <= N; ++l) {
        const double half = 0.5 * pi * l / (N + 1);
        const double sh = std::sin(half), ch = std::cos(half);
        const double tp = 2.0 * kappa * sh * sh, tm = 2.0 * kappa * ch * ch;
        const double t = tp < tm ? kappa - tp : tm - kappa;
        const cplx h = g(SegmentPoint::with_distances(t, tp, tm, kappa)) * (2.0 * sh * ch);
        x[l] = h;
        x[P - l] = -h;
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> X;
    fft.fwd(X, x);  // X[m] = -2i sum_l h_l sin(pi l m/(N+1))
    std::vector<cplx> c(N);
    for (int m = 0; m < N; ++m) c[m] = 2.0 / (N + 1) * (0.5 * I) * X[m + 1];
    return c;
}

/// sum_m c_m U_m(t / kappa) by Clenshaw.
inline cplx cheb2_eval(const ChebSeries& s, double t);
/// sum_m c_m T_{m+1}(t / kappa) by Clenshaw.
inline cplx cheb_T_shifted_eval(const ChebSeries& s, double t);

/// Doubles N until the transformed series sum_m c_m T_{m+1}(t/k), which is what
/// enters Psi_j, changes by less than series_rel_tol (relative to its largest value)
/// at 16 probe points. Coefficients of the oscillating g_j decay only
/// algebraically, so the change of the sum is the meaningful measure rather
/// than the size of the trailing coefficients.
template <class G>
ChebSeries cheb2_coeffs(G&& g, double kappa, const QuadratureConfig& q) {
    q.validate();
    std::vector<double> probes;
    for (int i = 0; i < 16; ++i) probes.push_back(kappa * std::cos((i + 0.5) * pi / 16.0));
    std::vector<cplx> prev;
    int N = q.N;
    for (; N <= q.max_series_order; N *= 2) {
        ChebSeries s{cheb2_coeffs_rule(g, kappa, N), kappa, N};
        std::vector<cplx> cur;
        double scale = 0.0;
        for (double x : probes) {
            cur.push_back(cheb_T_shifted_eval(s, x));
            scale = std::max(scale, std::abs(cur.back()));
        }
        if (!prev.empty()) {
            double change = 0.0;
            for (std::size_t i = 0; i < cur.size(); ++i) change = std::max(change, std::abs(cur[i] - prev[i]));
            if (change <= q.series_rel_tol * scale) return s;
        }
        prev = std::move(cur);
    }
    throw ConvergenceError("cheb2_coeffs: Chebyshev series did not converge up to max_series_order");
}

/// sum_m c_m U_m(t / kappa) by Clenshaw.
inline cplx cheb2_eval(const ChebSeries& s, double t) {
    const double x = t / s.kappa;
    cplx b1 = 0.0, b2 = 0.0;
    for (auto it = s.coeffs.rbegin(); it != s.coeffs.rend(); ++it) {
        const cplx b0 = *it + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return b1;  // U_0 = 1, U_1 = 2x: sum = b0
}

/// sum_m c_m T_{m+1}(t / kappa) by Clenshaw on the shifted coefficients.
inline cplx cheb_T_shifted_eval(const ChebSeries& s, double t) {
    const double x = t / s.kappa;
    // sum_{n=1}^{N} a_n T_n(x), a_n = c_{n-1}
    cplx b1 = 0.0, b2 = 0.0;
    for (std::size_t n = s.coeffs.size(); n >= 1; --n) {
        const cplx b0 = s.coeffs[n - 1] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    // sum_{n>=1} a_n T_n = b1' - x b2' evaluated with a_0 = 0: result = b1*x... handled below
    // Clenshaw for T: S = a_0 + x b_1 - b_2 where b_k from a_k..a_N. Here loop ended with
    // b1 = b_1, b2 = b_2.
    return x * b1 - b2;
}

/// Psi_j(t) = -pi kappa P0 sum_m c_m T_{m+1}(t/kappa), from
/// int sqrt(k^2 - tau^2) U_m(tau/k) dtau / (tau - t) = -pi k T_{m+1}(t/k).
inline cplx psi_series(const SegmentPoint& t, const ChebSeries& s, cplx prefactor) {
    return -pi * s.kappa * prefactor * cheb_T_shifted_eval(s, t.t);
}

/// sum_m c_m T_{m+1}(t_l / k) at the L Gauss-Chebyshev nodes t_l = k cos((2l - 1) pi / (2L)),
/// l = 1..L, in one FFT of length 4L: T_n(cos theta) = (e^{i n theta} + e^{-i n theta})/2
/// and theta_l = (2l - 1) 2 pi / (4L), so folding n modulo 4L is exact.
inline std::vector<cplx> cheb_T_shifted_on_gauss_nodes(const ChebSeries& s, int L) {
    const int P = 4 * L;
    std::vector<cplx> A(P, 0.0);
    for (std::size_t m = 0; m < s.coeffs.size(); ++m) {
        const long n = static_cast<long>(m) + 1;
        A[n % P] += 0.5 * s.coeffs[m];
        A[(P - n % P) % P] += 0.5 * s.coeffs[m];
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> B;
    fft.inv(B, A);  // normalised by 1/P
    std::vector<cplx> out(L);
    for (int l = 1; l <= L; ++l) out[l - 1] = static_cast<double>(P) * B[2 * l - 1];
    return out;
}

// ---------------------------------------------------------------------------
// Endpoint rule
//   int_{-k}^{k} sqrt((k + tau)/(k - tau)) g(tau) dtau
//     ~ 4 pi k / (2M + 1) sum_l x_l g(-k + 2 k x_l),  x_l = cos^2((2l - 1) pi / (2(2M + 1)))

template <class G>
cplx endpoint_rule(G&& g, double kappa, int M) {
    cplx acc = 0.0;
    for (int l = 1; l <= M; ++l) {
        const double ang = (2.0 * l - 1.0) * pi / (2.0 * (2.0 * M + 1.0));
        const double c = std::cos(ang), s = std::sin(ang);
        const double xl = c * c;
        const double tm = 2.0 * kappa * xl;      // tau + k
        const double tp = 2.0 * kappa * s * s;   // k - tau
        const double t = tp < tm ? kappa - tp : tm - kappa;
        acc += xl * g(SegmentPoint::with_distances(t, tp, tm, kappa));
    }
    return 4.0 * pi * kappa / (2.0 * M + 1.0) * acc;
}

struct EndpointRuleResult {
    cplx value;
    int order = 0;        ///< largest rule order used
    double change = 0.0;  ///< difference of the last two extrapolated estimates
};

/// Generalised Richardson elimination on values v_i = Q(n0 2^i) whose error
/// expands in n^{-p_1}, n^{-p_2}, ...; returns the fully eliminated column.
inline std::vector<cplx> richardson_table(std::vector<cplx> v, const std::vector<cplx>& exponents) {
    for (const cplx& p : exponents) {
        if (v.size() < 2) break;
        const cplx r = std::pow(2.0, p);
        std::vector<cplx> w;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) w.push_back((r * v[i + 1] - v[i]) / (r - 1.0));
        v = std::move(w);
    }
    return v;
}

/// Rule orders n0, 2 n0, 4 n0, ... with Richardson elimination of the given
/// error exponents until two successive extrapolated estimates agree to rel_tol.
template <class Rule>
EndpointRuleResult extrapolated_rule(Rule&& rule, int n0, const std::vector<cplx>& exponents, const QuadratureConfig& q,
                                     const char* what) {
    std::vector<cplx> raw;
    const std::size_t need = exponents.size() + 2;
    const std::size_t most = need + static_cast<std::size_t>(q.max_doublings);
    int n = n0;
    for (std::size_t i = 0; i < most; ++i, n *= 2) {
        raw.push_back(rule(n));
        if (raw.size() < need) continue;
        const auto col = richardson_table(raw, exponents);
        const cplx est = col.back();
        const double change = std::abs(col.back() - col[col.size() - 2]);
        if (change <= q.rel_tol * std::abs(est)) return {est, n, change};
    }
    throw ConvergenceError(std::string(what) + ": no convergence within max_doublings");
}

/// Endpoint rule with M doubled until converged. When g ~ (k - tau)^sigma at +k
/// the rule error expands in M^{-(1 + 2 sigma)}, M^{-(2 + 2 sigma)}, ...; these
/// terms are removed by generalised Richardson extrapolation.
template <class G>
EndpointRuleResult endpoint_integral(G&& g, double kappa, const QuadratureConfig& q, cplx sigma,
                                     bool extrapolate = true) {
    q.validate();
    std::vector<cplx> exps;
    if (extrapolate) exps = {1.0 + 2.0 * sigma, 2.0 + 2.0 * sigma, 3.0 + 2.0 * sigma};
    return extrapolated_rule([&](int M) { return endpoint_rule(g, kappa, M); }, q.M, exps, q, "endpoint_integral");
}

// ---------------------------------------------------------------------------
// Gauss-Chebyshev (first kind): int_{-k}^{k} f(tau) / sqrt(k^2 - tau^2) dtau

template <class F>
cplx gauss_chebyshev1(F&& f, double kappa, int L) {
    cplx acc = 0.0;
    for (int l = 1; l <= L; ++l) {
        const double half = 0.5 * (2.0 * l - 1.0) * pi / (2.0 * L);
        const double sh = std::sin(half), ch = std::cos(half);
        const double tp = 2.0 * kappa * sh * sh, tm = 2.0 * kappa * ch * ch;
        const double t = tp < tm ? kappa - tp : tm - kappa;
        acc += f(SegmentPoint::with_distances(t, tp, tm, kappa));
    }
    return pi / L * acc;
}

/// Gauss-Chebyshev with L doubled until converged. For f ~ (k -+ tau)^{-+sigma}
/// at the two ends (sigma = 2 i gamma in the SIF integrand) the error expands in
/// L^{-1-+2 sigma}, L^{-2}, L^{-3-+2 sigma}, ...; the leading five terms are
/// eliminated by generalised Richardson extrapolation.
template <class F>
EndpointRuleResult gauss_chebyshev1_integral(F&& f, double kappa, const QuadratureConfig& q, cplx sigma,
                                            bool extrapolate = true) {
    q.validate();
    std::vector<cplx> exps;
    if (extrapolate)
        exps = {1.0 + 2.0 * sigma, 1.0 - 2.0 * sigma, cplx(2.0), 3.0 + 2.0 * sigma, 3.0 - 2.0 * sigma};
    return extrapolated_rule([&](int L) { return gauss_chebyshev1(f, kappa, L); }, q.L, exps, q,
                             "gauss_chebyshev1_integral");
}

/// Interior Chebyshev points of the first kind on (-kappa, kappa).
inline std::vector<SegmentPoint> chebyshev_nodes(double kappa, int n) {
    std::vector<SegmentPoint> out;
    out.reserve(n);
    for (int l = 1; l <= n; ++l) {
        const double half = 0.5 * (2.0 * l - 1.0) * pi / (2.0 * n);
        const double sh = std::sin(half), ch = std::cos(half);
        const double tp = 2.0 * kappa * sh * sh, tm = 2.0 * kappa * ch * ch;
        double t = tp < tm ? kappa - tp : tm - kappa;
        if (2 * l - 1 == n) t = 0.0;  // centre node of an odd rule
        out.push_back(SegmentPoint::with_distances(t, tp, tm, kappa));
    }
    return out;
}


// ---------------------------------------------------------------------------
// Cached samples of an expensive function on the nested DE grid of [lo, hi].
// Integrals and Cauchy transforms of the same function at many points reuse
// the samples; levels are filled on demand.

class SampledFunction {
public:
    using Fn = std::function<cplx(double x, double d_lo, double d_hi)>;

    SampledFunction() = default;
    SampledFunction(Fn f, double lo, double hi) : st_(std::make_shared<State>()) {
        if (!(hi > lo)) throw std::invalid_argument("SampledFunction: empty interval");
        st_->f = std::move(f);
        st_->lo = lo;
        st_->hi = hi;
        int mmax = 0;
        for (const auto& tab : de_tables())
            for (const auto& n : tab) mmax = std::max(mmax, std::abs(n.m));
        st_->offset = mmax;
        st_->samples.resize(2 * static_cast<std::size_t>(mmax) + 1);
    }

    explicit operator bool() const { return static_cast<bool>(st_); }
    double lo() const { return st_->lo; }
    double hi() const { return st_->hi; }
    cplx operator()(double x, double d_lo, double d_hi) const { return st_->f(x, d_lo, d_hi); }

    /// int weight(tau) f(tau) dtau over [lo, hi].
    template <class W>
    DeResult<cplx> integrate(W&& weight, const DeOptions& opt = sampled_defaults()) const {
        const auto& tables = de_tables();
        const double half = 0.5 * (hi() - lo());
        cplx sum = 0.0;
        double mag = 0.0;
        return refine(opt, [&](int level) {
            ensure(level);
            for (const DeNode& n : tables[level]) {
                const Sample& s = sample(n.m);
                const cplx term = (n.w * half) * (weight(s.x, s.dl, s.dh) * s.v);
                sum += term;
                mag += std::abs(term);
            }
            const double h = std::ldexp(1.0, -level);
            return std::pair<cplx, double>{h * sum, h * mag};
        });
    }

    DeResult<cplx> integrate(const DeOptions& opt = sampled_defaults()) const {
        return integrate([](double, double, double) { return 1.0; }, opt);
    }

    /// int weight(tau) f(tau) / (tau - x) dtau, as a principal value when
    /// lo < x < hi. x is passed with signed distances d_lo = x - lo, d_hi = hi - x.
    template <class W>
    DeResult<cplx> cauchy(double x, double d_lo, double d_hi, W&& weight,
                          const DeOptions& opt = sampled_defaults()) const {
        const auto& tables = de_tables();
        const double half = 0.5 * (hi() - lo());
        const bool near_lo = d_lo < d_hi;
        auto diff = [&](const Sample& s) { return near_lo ? s.dl - d_lo : d_hi - s.dh; };
        if (!(d_lo > 0.0 && d_hi > 0.0)) {
            cplx sum = 0.0;
            double mag = 0.0;
            return refine(opt, [&](int level) {
                ensure(level);
                for (const DeNode& n : tables[level]) {
                    const Sample& s = sample(n.m);
                    const cplx term = (n.w * half) * (weight(s.x, s.dl, s.dh) * s.v) / diff(s);
                    sum += term;
                    mag += std::abs(term);
                }
                const double h = std::ldexp(1.0, -level);
                return std::pair<cplx, double>{h * sum, h * mag};
            });
        }
        // principal value by subtraction on the fixed grid
        // thresholds scale with the distance to the nearer end, where the
        // integrand varies on that length
        const double dmin = std::min({d_lo, d_hi, half});
        const double coincide = 1e-13 * dmin;
        const double close = 1e-7 * dmin;
        int mc = std::numeric_limits<int>::min();  // grid node sitting on x
        int coincide_level = -1;
        double wc = 0.0;
        cplx gx;
        bool have_gx = false;
        cplx fresh_deriv;
        bool have_fresh_deriv = false;
        cplx sum = 0.0;
        double mag = 0.0;
        auto g_at = [&](const Sample& s) { return weight(s.x, s.dl, s.dh) * s.v; };
        auto result = refine(opt, [&](int level) {
            ensure(level);
            for (const DeNode& n : tables[level]) {
                const Sample& s = sample(n.m);
                const double dx = diff(s);
                if (std::abs(dx) <= coincide && mc == std::numeric_limits<int>::min()) {
                    mc = n.m;
                    coincide_level = level;
                    wc = n.w * half;
                    continue;
                }
                if (std::abs(dx) <= close) {
                    if (!have_gx) {
                        gx = weight(x, d_lo, d_hi) * (*this)(x, d_lo, d_hi);
                        have_gx = true;
                    }
                    if (!have_fresh_deriv) {
                        fresh_deriv = fresh_derivative(x, d_lo, d_hi, weight);
                        have_fresh_deriv = true;
                    }
                    sum += (n.w * half) * fresh_deriv;
                    mag += std::abs((n.w * half) * fresh_deriv);
                    continue;
                }
                if (!have_gx) {
                    if (mc != std::numeric_limits<int>::min())
                        gx = g_at(sample(mc));
                    else
                        gx = weight(x, d_lo, d_hi) * (*this)(x, d_lo, d_hi);
                    have_gx = true;
                }
                const cplx term = (n.w * half) * ((g_at(s) - gx) / dx);
                sum += term;
                mag += std::abs(term);
            }
            cplx total = sum;
            if (mc != std::numeric_limits<int>::min() && level >= coincide_level) {
                total += wc * coincident_derivative(mc, level, half, weight);
            }
            const double h = std::ldexp(1.0, -level);
            return std::pair<cplx, double>{h * total, h * mag};
        });
        if (!have_gx) gx = weight(x, d_lo, d_hi) * (*this)(x, d_lo, d_hi);
        result.value += gx * std::log(d_hi / d_lo);
        return result;
    }

    DeResult<cplx> cauchy(double x, double d_lo, double d_hi) const {
        return cauchy(x, d_lo, d_hi, [](double, double, double) { return 1.0; });
    }

    static DeOptions sampled_defaults() {
        DeOptions o;
        o.rel_tol = 1e-12;
        o.min_level = 4;
        o.max_level = kDeMaxLevel;
        return o;
    }

private:
    struct Sample {
        double x = 0.0, dl = 0.0, dh = 0.0, w = 0.0;
        cplx v;
        bool filled = false;
    };
    struct State {
        Fn f;
        double lo = -1.0, hi = 1.0;
        int offset = 0;
        int filled_level = -1;
        std::vector<Sample> samples;
        std::mutex mu;
    };

    const Sample& sample(int m) const { return st_->samples[static_cast<std::size_t>(m + st_->offset)]; }

    void ensure(int level) const {
        std::lock_guard<std::mutex> lock(st_->mu);
        const double half = 0.5 * (st_->hi - st_->lo);
        for (int l = st_->filled_level + 1; l <= level; ++l) {
            for (const DeNode& n : de_tables()[l]) {
                Sample& s = st_->samples[static_cast<std::size_t>(n.m + st_->offset)];
                s.dl = half * n.d_lo;
                s.dh = half * n.d_hi;
                s.x = s.dl < s.dh ? st_->lo + s.dl : st_->hi - s.dh;
                s.w = n.w;
                s.v = st_->f(s.x, s.dl, s.dh);
                s.filled = true;
            }
            st_->filled_level = l;
        }
    }

    template <class Step>
    static DeResult<cplx> refine(const DeOptions& opt, Step&& step) {
        DeResult<cplx> res{cplx{}};
        cplx prev = 0.0;
        const int max_level = std::min(opt.max_level, kDeMaxLevel);
        for (int level = 0; level <= max_level; ++level) {
            const auto [est, mag] = step(level);
            res.value = est;
            res.level = level;
            if (level > 0) {
                res.error = std::abs(est - prev);
                const double scale = std::max(std::abs(est), 1e-3 * mag);
                if (level >= opt.min_level && (res.error <= opt.rel_tol * scale || res.error <= opt.abs_tol)) {
                    res.converged = true;
                    return res;
                }
            }
            prev = est;
        }
        return res;
    }

    /// d(weight f)/dx at a grid node from a five-point difference in the DE variable u.
    template <class W>
    cplx coincident_derivative(int m, int level, double half, W&& weight) const {
        const int step = 1 << (kDeMaxLevel - level);
        const int lim = st_->offset;
        auto ok = [&](int mm) { return std::abs(mm) <= lim && sample(mm).filled; };
        const Sample& c = sample(m);
        if (!(ok(m - 2 * step) && ok(m + 2 * step) && ok(m - step) && ok(m + step)))
            return fresh_derivative(c.x, c.dl, c.dh, weight);
        auto g = [&](int mm) {
            const Sample& s = sample(mm);
            return weight(s.x, s.dl, s.dh) * s.v;
        };
        const double h = std::ldexp(1.0, -level);
        const cplx dgdu = (8.0 * (g(m + step) - g(m - step)) - (g(m + 2 * step) - g(m - 2 * step))) / (12.0 * h);
        return dgdu / (half * c.w);
    }

    /// d(weight f)/dx at an arbitrary interior point from fresh evaluations.
    template <class W>
    cplx fresh_derivative(double x, double d_lo, double d_hi, W&& weight) const {
        const double d = 1e-3 * std::min(d_lo, d_hi);
        auto g = [&](double s) {
            return weight(x + s, d_lo + s, d_hi - s) * (*this)(x + s, d_lo + s, d_hi - s);
        };
        return (8.0 * (g(d) - g(-d)) - (g(2 * d) - g(-2 * d))) / (12.0 * d);
    }

    std::shared_ptr<State> st_;
};

}  // namespace incrack
