/**
 * \file report.hpp
 *
 * \brief Row-level computations behind the command-line verbs: SIF rows with
 * their residual certificate, contact traction traces, k -> 0 limits and the
 * verification suite. Each returns plain data; formatting lives in io.hpp.
 */
#pragma once

#include "incrack/io.hpp"
#include "incrack/oracle.hpp"
#include "incrack/post.hpp"

#include <future>
#include <thread>

namespace incrack {

// ---------------------------------------------------------------------------
// SIF rows

struct SifRow {
    double k = 0.0;
    double nu = 0.0;
    SifResult sif;
    double residual = std::nan("");
    bool ok = false;
    std::string error;
};

/// Residual of the governing equation for the Model 1 density of cfg.
inline ResidualReport model1_residual(const ProblemConfig& cfg, const QuadratureConfig& q = {}) {
    const ClosedFormSolution sol = solve_model1(cfg, q);
    const Density psi = sol.density(DensityKind::psi);
    return residual_sie([&](const SegmentPoint& p) { return psi(p); }, sol.rhs().g, sol.kappa(), cfg.nu);
}

/// SIFs of a Model 1 configuration: the rearranged Gauss-Chebyshev form for a
/// point load (or the adaptive variant), the direct tip integrals otherwise.
inline SifRow compute_sif(const ProblemConfig& cfg, const QuadratureConfig& q = {}, SifRule rule = SifRule::gauss,
                          bool with_residual = true) {
    SifRow row;
    row.k = cfg.kappa();
    row.nu = cfg.nu;
    require_valid(cfg);
    if (cfg.model != Model::model1)
        throw std::invalid_argument("stress intensity factors are defined for model1 (crack tips outside the inclusion)");
    if (cfg.point_load()) {
        row.sif = sif_point_load(cfg, q, rule);
    } else {
        const ClosedFormSolution sol = solve_model1(cfg, q);
        row.sif = sif_general(sol.density(DensityKind::psi), cfg);
    }
    if (with_residual) row.residual = model1_residual(cfg, q).max_rel;
    row.ok = true;
    return row;
}

/// Rows in parallel, merged in input order. Failures are kept as rows with ok = false.
inline std::vector<SifRow> compute_sif_rows(const std::vector<ProblemConfig>& cfgs, const QuadratureConfig& q,
                                            SifRule rule, bool with_residual, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<SifRow> out(cfgs.size());
    auto one = [&](std::size_t i) {
        try {
            out[i] = compute_sif(cfgs[i], q, rule, with_residual);
        } catch (const std::exception& e) {
            out[i].k = cfgs[i].kappa();
            out[i].nu = cfgs[i].nu;
            out[i].ok = false;
            out[i].error = e.what();
        }
    };
    for (std::size_t start = 0; start < cfgs.size(); start += threads) {
        std::vector<std::future<void>> jobs;
        for (std::size_t i = start; i < std::min(cfgs.size(), start + threads); ++i)
            jobs.push_back(std::async(std::launch::async, one, i));
        for (auto& j : jobs) j.get();
    }
    return out;
}

inline CsvTable sif_table(const std::vector<SifRow>& rows) {
    CsvTable t;
    t.columns = {"k", "nu", "K1p_norm", "K1m_norm", "K2p_norm", "K2m_norm", "residual"};
    t.units = {"1", "1", "sqrt(a)/P", "sqrt(a)/P", "sqrt(a)/P", "sqrt(a)/P", "rel"};
    for (const auto& r : rows) {
        const double nan = std::nan("");
        t.add({fmt_num(r.k), fmt_num(r.nu), fmt_num(r.ok ? r.sif.K1_plus_norm() : nan),
               fmt_num(r.ok ? r.sif.K1_minus_norm() : nan), fmt_num(r.ok ? r.sif.K2_plus_norm() : nan),
               fmt_num(r.ok ? r.sif.K2_minus_norm() : nan), fmt_num(r.residual)});
    }
    return t;
}

/// k values lo, ..., hi (n >= 2 points, inclusive).
inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("linspace: need at least one point");
    if (n == 1) return {lo};
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

// ---------------------------------------------------------------------------
// Traces

inline TractionTrace compute_trace(const ProblemConfig& cfg, const QuadratureConfig& q = {}, int nodes = 41) {
    require_valid(cfg);
    if (cfg.model != Model::model1) throw std::invalid_argument("contact traction traces are implemented for model1");
    const ClosedFormSolution sol = solve_model1(cfg, q);
    return contact_traction(sol, cfg, trace_nodes(sol.kappa(), nodes));
}

inline CsvTable trace_table(const TractionTrace& tr) {
    CsvTable t;
    t.columns = {"t", "sig12_over_P", "sig22_over_P", "bounded_factor_re", "bounded_factor_im"};
    t.units = {"x/a", "1/length", "1/length", "1/length", "1/length"};
    for (const auto& s : tr.samples) {
        const cplx v = s.sigma / tr.P, b = s.bounded / tr.P;
        t.add({fmt_num(s.t), fmt_num(v.real()), fmt_num(v.imag()), fmt_num(b.real()), fmt_num(b.imag())});
    }
    return t;
}

// ---------------------------------------------------------------------------
// k -> 0 limits

inline CsvTable limits_table(const std::vector<double>& nus) {
    CsvTable t;
    t.columns = {"nu", "K1_norm", "K2p_norm", "K2m_norm"};
    t.units = {"1", "sqrt(a)/P", "sqrt(a)/P", "sqrt(a)/P"};
    for (double nu : nus) {
        const SifResult s = limit_k0_sifs(nu, 1.0, 1.0);
        t.add({fmt_num(nu), fmt_num(s.K1_plus_norm()), fmt_num(s.K2_plus_norm()), fmt_num(s.K2_minus_norm())});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Verification suite

struct CheckOutcome {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double tolerance = 0.0;
    json detail;
};

struct VerifyOptions {
    std::vector<std::string> checks;       ///< empty: all
    std::optional<double> gamma_scale;     ///< multiplies gamma inside the factorization check
};

inline const std::vector<std::string>& verify_check_names() {
    static const std::vector<std::string> names{"residual", "factorization", "moment", "theta", "identities"};
    return names;
}

/// Runs the requested checks for cfg. The residual, moment and theta checks
/// need a model1 or model2 configuration; factorization and identities only nu and k.
inline std::vector<CheckOutcome> run_verify(const ProblemConfig& cfg, const QuadratureConfig& q,
                                            const VerifyOptions& opt = {}) {
    require_valid(cfg);
    auto wanted = [&](const std::string& n) {
        return opt.checks.empty() || std::find(opt.checks.begin(), opt.checks.end(), n) != opt.checks.end();
    };
    for (const auto& c : opt.checks)
        if (std::find(verify_check_names().begin(), verify_check_names().end(), c) == verify_check_names().end())
            throw std::invalid_argument("unknown check '" + c + "'");
    const double k = cfg.model == Model::equal ? 1.0 : cfg.kappa();
    std::vector<CheckOutcome> out;

    // density, right-hand side and the relevant moment for the configuration
    std::optional<ClosedFormSolution> sol;
    std::optional<Density> rho;
    PointFn g;
    cplx moment_target = 0.0;
    double min_exp = -0.5;
    auto need_density = [&]() {
        if (rho) return;
        if (cfg.model == Model::model1) {
            sol.emplace(solve_model1(cfg, q));
            rho.emplace(sol->density(DensityKind::psi));
            g = sol->rhs().g;
            moment_target = I * cfg.p_star() / cfg.a;
        } else if (cfg.model == Model::model2) {
            sol.emplace(solve_model2(cfg, q));
            rho.emplace(sol->density(DensityKind::phi));
            g = sol->rhs().g;
            moment_target = 0.0;
        } else {
            const RhsFunction rhs = build_rhs_model1(cfg, q);
            rho.emplace(limit_k1_density(rhs, cfg));
            g = rhs.g;
            moment_target = I * cfg.p_star() / cfg.a;
            min_exp = -0.75;
        }
    };

    if (wanted("residual")) {
        need_density();
        ResidualOptions ro;
        ro.min_exponent = min_exp;
        const Density d = *rho;
        const auto r = residual_sie([&](const SegmentPoint& p) { return d(p); }, g, k, cfg.nu, ro);
        json nodes = json::array(), res = json::array();
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            nodes.push_back(r.nodes[i].t);
            res.push_back(detail::complex_to_json(r.residuals[i]));
        }
        out.push_back({"residual", r.max_rel < 1e-6, r.max_rel, 1e-6,
                       {{"nodes", nodes}, {"residuals", res}, {"rule_size", r.rule_size}, {"depth", r.depth}}});
    }
    if (wanted("factorization")) {
        const double kf = std::min(k, 0.999);
        std::optional<double> gamma;
        if (opt.gamma_scale) gamma = derive_constants(cfg.nu, kf).gamma * *opt.gamma_scale;
        const auto f = verify_factorization(kf, cfg.nu, 50, gamma);
        const bool pass = f.max_deviation < 1e-10 && f.max_det_deviation < 1e-12;
        out.push_back({"factorization", pass, f.max_deviation, 1e-10,
                       {{"kappa", kf}, {"samples", f.samples}, {"det_deviation", f.max_det_deviation}}});
    }
    if (wanted("moment")) {
        need_density();
        const cplx m = rho->moment();
        const double scale = std::max(std::abs(moment_target), std::abs(cfg.p_star()) / cfg.a);
        double err = std::abs(m - moment_target) / (scale > 0.0 ? scale : 1.0);
        json detail{{"moment", detail::complex_to_json(m)}, {"target", detail::complex_to_json(moment_target)}};
        if (cfg.model == Model::model1) {
            // closure of the crack: int phi = 0
            const PiecewiseDensity phi = recover_phi(*rho, sol->rhs(), cfg);
            const cplx pi_ = phi.integral();
            const double e2 = std::abs(pi_) / (std::abs(cfg.p_star()) / cfg.a);
            detail["phi_integral"] = detail::complex_to_json(pi_);
            err = std::max(err, e2);
        }
        out.push_back({"moment", err < 1e-8, err, 1e-8, detail});
    }
    if (wanted("theta") && cfg.model == Model::model1) {
        need_density();
        const Density d = *rho;
        const auto th = verify_theta_identity([&](const SegmentPoint& p) { return d(p); }, k, cfg.a, cfg.p_star(),
                                              {-0.7 * k, -0.3 * k, 0.0, 0.25 * k, 0.6 * k});
        out.push_back({"theta", th.max_rel < 1e-5, th.max_rel, 1e-5, {{"points", th.points}}});
    }
    if (wanted("identities")) {
        const auto ids = identity_suite();
        double worst = 0.0;
        bool pass = true;
        json fails = json::array();
        for (const auto& c : ids) {
            worst = std::max(worst, c.error / c.tolerance);
            if (!c.pass()) {
                pass = false;
                fails.push_back({{"name", c.name}, {"parameters", c.parameters}, {"error", c.error}});
            }
        }
        out.push_back({"identities", pass, worst, 1.0, {{"count", ids.size()}, {"failures", fails}}});
    }
    return out;
}

inline json verify_report_json(const ProblemConfig& cfg, const QuadratureConfig& q,
                               const std::vector<CheckOutcome>& checks) {
    json arr = json::array();
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}});
    }
    const json cj = config_to_json(cfg, q);
    return {{"tool", kToolName}, {"version", kToolVersion}, {"config", cj}, {"fingerprint", fingerprint(cj)},
            {"pass", all},       {"checks", arr}};
}

}  // namespace incrack
