/**
 * \file params.hpp
 *
 * \brief Problem configuration for the crack / thin rigid inclusion problem
 * and the scalar material constants that feed the closed-form solution.
 *
 * Model 1 is a crack (-a, a) penetrating past an inclusion (-b, b), b < a.
 * Model 2 is an inclusion longer than the crack, a < b. The Equal model is
 * the a = b limit. All lengths share one unit; Young's modulus E only scales
 * the displacement-type loading and defaults to 1.
 */
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace incrack {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

enum class Model { model1, model2, equal };

inline std::string to_string(Model m) {
    switch (m) {
    case Model::model1: return "model1";
    case Model::model2: return "model2";
    case Model::equal: return "equal";
    }
    return "?";
}

inline Model model_from_string(const std::string& s) {
    if (s == "model1" || s == "1") return Model::model1;
    if (s == "model2" || s == "2") return Model::model2;
    if (s == "equal" || s == "model_equal") return Model::equal;
    throw std::invalid_argument("unknown model '" + s + "'");
}

/// Barycentric interpolant on Chebyshev points of the second kind,
/// x_j = mid + half*cos(j*pi/n), j = 0..n.
class ChebInterpolant {
public:
    ChebInterpolant() = default;

    ChebInterpolant(double lo, double hi, std::vector<cplx> values)
        : lo_(lo), hi_(hi), values_(std::move(values)) {
        if (!(hi > lo)) throw std::invalid_argument("ChebInterpolant: empty interval");
        if (values_.empty()) throw std::invalid_argument("ChebInterpolant: no samples");
    }

    template <class F>
    static ChebInterpolant sample(F&& f, double lo, double hi, int n = 64) {
        std::vector<cplx> v(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j <= n; ++j) v[j] = cplx(f(node(lo, hi, n, j)));
        return {lo, hi, std::move(v)};
    }

    static double node(double lo, double hi, int n, int j) {
        if (n == 0) return 0.5 * (lo + hi);
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(pi * j / n);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::span<const cplx> values() const { return values_; }

    cplx operator()(double x) const {
        const int n = static_cast<int>(values_.size()) - 1;
        if (n == 0) return values_[0];
        if (x < lo_ - 1e-12 * (hi_ - lo_) || x > hi_ + 1e-12 * (hi_ - lo_))
            throw std::out_of_range("ChebInterpolant: x outside sampled interval");
        cplx num = 0.0;
        double den = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double xj = node(lo_, hi_, n, j);
            const double diff = x - xj;
            if (diff == 0.0) return values_[j];
            double w = (j % 2 == 0) ? 1.0 : -1.0;
            if (j == 0 || j == n) w *= 0.5;
            w /= diff;
            num += w * values_[j];
            den += w;
        }
        return num / den;
    }

private:
    double lo_ = -1.0;
    double hi_ = 1.0;
    std::vector<cplx> values_;
};

/// Optional load profiles. Absent entries are identically zero.
///   h_prime : slope of the inclusion profile on (-b, b)
///   w0      : d/dx (u1 + i u2) of the unperturbed field on (-b, b)
///   sigma0  : sigma12 + i sigma22 of the unperturbed field on (-a, a)
struct LoadProfiles {
    std::optional<ChebInterpolant> h_prime;
    std::optional<ChebInterpolant> w0;
    std::optional<ChebInterpolant> sigma0;

    bool empty() const { return !h_prime && !w0 && !sigma0; }

    cplx h_prime_at(double x) const { return h_prime ? (*h_prime)(x) : cplx{}; }
    cplx w0_at(double x) const { return w0 ? (*w0)(x) : cplx{}; }
    cplx sigma0_at(double x) const { return sigma0 ? (*sigma0)(x) : cplx{}; }
};

struct ProblemConfig {
    Model model = Model::model1;
    double a = 1.0;  ///< crack half-length
    double b = 0.5;  ///< inclusion half-length
    double nu = 0.3;
    double P = 1.0;      ///< total normal force on the inclusion centre
    double sigma = 0.0;  ///< resultant of the remote sigma22 over the inclusion
    double E = 1.0;
    LoadProfiles profiles;

    double p_star() const { return P + sigma; }

    /// Segment ratio min(a,b)/max(a,b).
    double kappa() const { return std::min(a, b) / std::max(a, b); }

    bool point_load() const { return profiles.empty(); }
};

/// Scalar constants of the closed form. gamma may be overridden (tests inject
/// perturbations through it); everything else follows from nu and kappa.
struct DerivedConstants {
    double nu = 0.3;
    double kappa = 0.5;
    double nu0 = 0.0;    ///< (3 - nu) / (1 + nu)
    double nu1 = 0.0;    ///< (3 - nu)(1 + nu)
    double gamma = 0.0;  ///< ln(nu0) / (4 pi)
    cplx e0;             ///< exp(i pi/4 + pi gamma)
    cplx e_plus;         ///< (e0 + 1/e0) / 2
    cplx e_minus;        ///< (e0 - 1/e0) / 2
    cplx beta0;          ///< (2 i gamma - 1/2) asin(kappa)

    /// sqrt(lambda_1) = i sqrt(nu0)
    cplx sqrt_lambda1() const { return I * std::sqrt(nu0); }
    /// ln sqrt(lambda_1) = ln(nu0)/2 + i pi/2
    cplx log_sqrt_lambda1() const { return cplx(0.5 * std::log(nu0), 0.5 * pi); }
};

inline DerivedConstants derive_constants(double nu, double kappa,
                                         std::optional<double> gamma_override = std::nullopt) {
    if (!(nu > -1.0) || !(nu < 3.0))
        throw std::domain_error("derive_constants: nu must lie in (-1, 3) for nu0 > 0");
    if (!(kappa > 0.0) || !(kappa <= 1.0))
        throw std::domain_error("derive_constants: segment ratio must lie in (0, 1]");
    DerivedConstants c;
    c.nu = nu;
    c.kappa = kappa;
    c.nu0 = (3.0 - nu) / (1.0 + nu);
    c.nu1 = (3.0 - nu) * (1.0 + nu);
    c.gamma = gamma_override ? *gamma_override : std::log(c.nu0) / (4.0 * pi);
    c.e0 = std::exp(cplx(pi * c.gamma, 0.25 * pi));
    c.e_plus = 0.5 * (c.e0 + 1.0 / c.e0);
    c.e_minus = 0.5 * (c.e0 - 1.0 / c.e0);
    c.beta0 = cplx(-0.5, 2.0 * c.gamma) * std::asin(kappa);
    return c;
}

inline DerivedConstants derive_constants(const ProblemConfig& cfg) {
    return derive_constants(cfg.nu, cfg.model == Model::equal ? 1.0 : cfg.kappa());
}

struct Violation {
    std::string field;
    std::string message;
};

inline std::vector<Violation> validate_config(const ProblemConfig& cfg) {
    std::vector<Violation> out;
    auto add = [&](std::string f, std::string m) { out.push_back({std::move(f), std::move(m)}); };
    if (!(cfg.a > 0.0) || !std::isfinite(cfg.a)) add("a", "crack half-length must be positive");
    if (!(cfg.b > 0.0) || !std::isfinite(cfg.b)) add("b", "inclusion half-length must be positive");
    if (!(cfg.nu > -1.0) || !(cfg.nu <= 0.5)) add("nu", "Poisson ratio must lie in (-1, 0.5]");
    if (!std::isfinite(cfg.P)) add("P", "load must be finite");
    if (!std::isfinite(cfg.sigma)) add("sigma", "resultant must be finite");
    if (!(cfg.E > 0.0) || !std::isfinite(cfg.E)) add("E", "Young's modulus must be positive");
    if (cfg.a > 0.0 && cfg.b > 0.0) {
        switch (cfg.model) {
        case Model::model1:
            if (!(cfg.b < cfg.a)) add("ratio", "model1 requires b < a");
            break;
        case Model::model2:
            if (!(cfg.a < cfg.b)) add("ratio", "model2 requires a < b");
            break;
        case Model::equal:
            if (cfg.a != cfg.b) add("ratio", "equal model requires a = b");
            break;
        }
    }
    const auto check_profile = [&](const std::optional<ChebInterpolant>& p, const char* name,
                                   double need) {
        if (!p) return;
        const double tol = 1e-12 * need;
        if (p->lo() > -need + tol || p->hi() < need - tol)
            add(name, "profile does not cover its segment");
    };
    check_profile(cfg.profiles.h_prime, "h_prime", cfg.b);
    check_profile(cfg.profiles.w0, "w0", cfg.b);
    check_profile(cfg.profiles.sigma0, "sigma0", cfg.a);
    return out;
}

}  // namespace incrack
