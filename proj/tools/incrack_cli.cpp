// Command-line front end.
//
//   incrack_cli sif     --nu 0.3 --k 0.5
//   incrack_cli sweep   --k 0.1:0.9:17 --nu 0.1 --nu 0.5 --format svg --out fig2.svg
//   incrack_cli trace   --k 0.7 --nodes 61
//   incrack_cli verify  --config cfg.json --check theta
//   incrack_cli limits  --nu 0.05 --nu 0.25 --nu 0.45
//
// Exit codes: 0 success, 2 invalid input, 3 convergence failure, 4 verification failure.

#include "incrack/incrack.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace incrack;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitOracle = 4;

struct Options {
    std::string config;
    std::vector<double> nu;
    std::string k;
    std::optional<double> a, b, P, sigma, E;
    std::string load;
    std::string profile_file;
    std::string model;
    std::optional<int> quad_n, quad_m, quad_l;
    std::optional<double> tol;
    std::string out;
    std::string format = "csv";
    std::string rule = "gauss";
    int nodes = 41;
    bool no_residual = false;
    std::vector<std::string> checks;
    bool perturb_gamma = false;
    unsigned threads = 0;
};

void add_common(CLI::App* c, Options& o) {
    c->add_option("--config", o.config, "JSON configuration file");
    c->add_option("--nu", o.nu, "Poisson ratio (repeatable)");
    c->add_option("--k", o.k, "segment ratio k, or a range lo:hi:n");
    c->add_option("--a", o.a, "crack half-length");
    c->add_option("--b", o.b, "inclusion half-length");
    c->add_option("--P", o.P, "normal force on the inclusion");
    c->add_option("--sigma", o.sigma, "resultant of the remote sigma22 over the inclusion");
    c->add_option("--E", o.E, "Young's modulus");
    c->add_option("--load", o.load, "point | profile")->check(CLI::IsMember({"point", "profile"}));
    c->add_option("--profile-file", o.profile_file, "JSON file with h_prime, w0, sigma0 profiles");
    c->add_option("--model", o.model, "1 | 2 | equal")->check(CLI::IsMember({"1", "2", "equal", "model1", "model2"}));
    c->add_option("--quad-n", o.quad_n, "Chebyshev-U series order");
    c->add_option("--quad-m", o.quad_m, "endpoint rule order");
    c->add_option("--quad-l", o.quad_l, "Gauss-Chebyshev order");
    c->add_option("--tol", o.tol, "relative tolerance of the quadrature rules");
    c->add_option("--out", o.out, "output file (default stdout)");
    c->add_option("--format", o.format, "csv | json | svg")->check(CLI::IsMember({"csv", "json", "svg"}));
}

struct Setup {
    ProblemConfig base;
    QuadratureConfig q;
    std::vector<double> ks;  // empty: keep the config geometry
    std::vector<double> nus;
};

std::vector<double> parse_k(const std::string& s) {
    if (s.empty()) return {};
    const auto c1 = s.find(':');
    try {
        if (c1 == std::string::npos) return {std::stod(s)};
        const auto c2 = s.find(':', c1 + 1);
        if (c2 == std::string::npos) throw ConfigError("--k range must be lo:hi:n");
        const double lo = std::stod(s.substr(0, c1)), hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
        const int n = std::stoi(s.substr(c2 + 1));
        if (n < 1) throw ConfigError("--k range needs n >= 1");
        return linspace(lo, hi, n);
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse --k '" + s + "'");
    }
}

Setup build_setup(const Options& o) {
    Setup s;
    if (!o.config.empty()) apply_json(read_json_file(o.config), s.base, s.q);
    if (!o.model.empty()) s.base.model = model_from_string(o.model);
    if (o.a) s.base.a = *o.a;
    if (o.b) s.base.b = *o.b;
    // defaults that fit the chosen model when lengths are not given
    if (s.base.model == Model::equal && !o.b) s.base.b = s.base.a;
    if (s.base.model == Model::model2 && o.config.empty() && !o.a && !o.b) {
        s.base.a = 0.5;
        s.base.b = 1.0;
    }
    if (o.P) s.base.P = *o.P;
    if (o.sigma) s.base.sigma = *o.sigma;
    if (o.E) s.base.E = *o.E;
    if (!o.profile_file.empty()) s.base.profiles = read_profile_file(o.profile_file);
    if (o.load == "point") s.base.profiles = LoadProfiles{};
    if (o.load == "profile" && s.base.profiles.empty())
        throw ConfigError("--load profile needs --profile-file or profiles in the config");
    if (o.quad_n) s.q.N = *o.quad_n;
    if (o.quad_m) s.q.M = *o.quad_m;
    if (o.quad_l) s.q.L = *o.quad_l;
    if (o.tol) s.q.rel_tol = *o.tol;
    s.ks = parse_k(o.k);
    s.nus = o.nu.empty() ? std::vector<double>{s.base.nu} : o.nu;
    for (double k : s.ks)
        if (!(k > 0.0 && k < 1.0) && s.base.model != Model::equal) throw ConfigError("k must lie in (0, 1)");
    return s;
}

/// Configuration at one (k, nu): k sets b = k a (model1) or a = k b (model2).
ProblemConfig at(const ProblemConfig& base, std::optional<double> k, double nu) {
    ProblemConfig c = base;
    c.nu = nu;
    if (k) {
        if (c.model == Model::model1) c.b = *k * c.a;
        else if (c.model == Model::model2) c.a = *k * c.b;
    }
    return c;
}

std::vector<ProblemConfig> grid(const Setup& s) {
    std::vector<ProblemConfig> out;
    for (double nu : s.nus) {
        if (s.ks.empty()) out.push_back(at(s.base, std::nullopt, nu));
        for (double k : s.ks) out.push_back(at(s.base, k, nu));
    }
    for (const auto& c : out) check_config(c, s.q);
    return out;
}

std::string run_fingerprint(const std::string& verb, const Setup& s, const json& extra = json::object()) {
    json j = config_to_json(s.base, s.q);
    j["verb"] = verb;
    j["k"] = s.ks;
    j["nu"] = s.nus;
    j["extra"] = extra;
    return fingerprint(j);
}

json rows_json(const std::vector<SifRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json o{{"k", r.k}, {"nu", r.nu}, {"ok", r.ok}};
        if (r.ok) {
            o["K1p_norm"] = r.sif.K1_plus_norm();
            o["K1m_norm"] = r.sif.K1_minus_norm();
            o["K2p_norm"] = r.sif.K2_plus_norm();
            o["K2m_norm"] = r.sif.K2_minus_norm();
            o["K_plus"] = detail::complex_to_json(r.sif.plus);
            o["K_minus"] = detail::complex_to_json(r.sif.minus);
            if (!std::isnan(r.residual)) o["residual"] = r.residual;
        } else {
            o["error"] = r.error;
        }
        arr.push_back(o);
    }
    return arr;
}

std::string sweep_svg(const std::vector<SifRow>& rows) {
    std::vector<PlotSeries> series;
    std::vector<double> nus;
    for (const auto& r : rows)
        if (std::find(nus.begin(), nus.end(), r.nu) == nus.end()) nus.push_back(r.nu);
    for (double nu : nus) {
        char lbl[64];
        PlotSeries k1, k2;
        std::snprintf(lbl, sizeof lbl, "KI+ nu=%g", nu);
        k1.label = lbl;
        std::snprintf(lbl, sizeof lbl, "KII+ nu=%g", nu);
        k2.label = lbl;
        for (const auto& r : rows) {
            if (r.nu != nu) continue;
            k1.x.push_back(r.k);
            k2.x.push_back(r.k);
            k1.y.push_back(r.ok ? r.sif.K1_plus_norm() : std::nan(""));
            k2.y.push_back(r.ok ? r.sif.K2_plus_norm() : std::nan(""));
        }
        series.push_back(k1);
        series.push_back(k2);
    }
    return svg_plot("Normalized stress intensity factors", "k = b/a", "sqrt(a) K / P", series);
}

int run_sif_like(const std::string& verb, const Options& o) {
    const Setup s = build_setup(o);
    const auto cfgs = grid(s);
    const SifRule rule = o.rule == "adaptive" ? SifRule::adaptive : SifRule::gauss;
    const auto rows = compute_sif_rows(cfgs, s.q, rule, !o.no_residual, o.threads);
    int code = kExitOk;
    for (const auto& r : rows) {
        if (r.ok) continue;
        std::cerr << "error at k=" << r.k << " nu=" << r.nu << ": " << r.error << '\n';
        // a convergence failure keeps exit code 3; anything else is an input problem
        code = std::max(code, r.error.find("converge") != std::string::npos ? kExitConvergence : kExitInvalid);
    }
    if (verb == "sif" && code == kExitInvalid) return code;
    const std::string fp = run_fingerprint(verb, s, {{"rule", o.rule}, {"residual", !o.no_residual}});
    if (o.format == "json")
        write_text(o.out, json{{"tool", kToolName}, {"version", kToolVersion}, {"fingerprint", fp}, {"rows", rows_json(rows)}}.dump(2) + "\n");
    else if (o.format == "svg")
        write_text(o.out, sweep_svg(rows));
    else
        write_text(o.out, to_csv(sif_table(rows), fp));
    return code;
}

int run_trace(const Options& o) {
    const Setup s = build_setup(o);
    if (s.nus.size() != 1 || s.ks.size() > 1) throw ConfigError("trace takes a single k and nu");
    const auto cfgs = grid(s);
    const TractionTrace tr = compute_trace(cfgs.front(), s.q, o.nodes);
    const std::string fp = run_fingerprint("trace", s, {{"nodes", o.nodes}});
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& x : tr.samples)
            arr.push_back({{"t", x.t},
                           {"sig12_over_P", x.sigma.real() / tr.P},
                           {"sig22_over_P", x.sigma.imag() / tr.P},
                           {"bounded_factor_re", x.bounded.real() / tr.P},
                           {"bounded_factor_im", x.bounded.imag() / tr.P}});
        json ex{{"at_plus_k", detail::complex_to_json(tr.endpoint_exponent.at_plus_k)},
                {"at_minus_k", detail::complex_to_json(tr.endpoint_exponent.at_minus_k)}};
        write_text(o.out, json{{"tool", kToolName}, {"fingerprint", fp}, {"endpoint_exponents", ex}, {"samples", arr}}.dump(2) + "\n");
    } else if (o.format == "svg") {
        PlotSeries s12{"sigma12/P", {}, {}}, s22{"sigma22/P", {}, {}};
        for (const auto& x : tr.samples) {
            s12.x.push_back(x.t);
            s22.x.push_back(x.t);
            s12.y.push_back(x.sigma.real() / tr.P);
            s22.y.push_back(x.sigma.imag() / tr.P);
        }
        write_text(o.out, svg_plot("Contact tractions under the inclusion", "x/a", "sigma / P", {s12, s22}));
    } else {
        write_text(o.out, to_csv(trace_table(tr), fp));
    }
    return kExitOk;
}

int run_verify_cmd(const Options& o) {
    const Setup s = build_setup(o);
    if (s.nus.size() != 1 || s.ks.size() > 1) throw ConfigError("verify takes a single k and nu");
    const auto cfgs = grid(s);
    VerifyOptions vo;
    vo.checks = o.checks;
    if (o.perturb_gamma) vo.gamma_scale = 1.01;
    const auto res = run_verify(cfgs.front(), s.q, vo);
    const json rep = verify_report_json(cfgs.front(), s.q, res);
    write_text(o.out, rep.dump(2) + "\n");
    for (const auto& c : res)
        if (!c.pass) std::cerr << "check '" << c.name << "' failed: " << c.value << " > " << c.tolerance << '\n';
    return rep["pass"].get<bool>() ? kExitOk : kExitOracle;
}

int run_limits(const Options& o) {
    const Setup s = build_setup(o);
    for (double nu : s.nus)
        if (!(nu > -1.0 && nu <= 0.5)) throw ConfigError("nu must lie in (-1, 0.5]");
    const CsvTable t = limits_table(s.nus);
    const std::string fp = run_fingerprint("limits", s);
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& r : t.rows)
            arr.push_back({{"nu", std::stod(r[0])}, {"K1_norm", std::stod(r[1])}, {"K2p_norm", std::stod(r[2])},
                           {"K2m_norm", std::stod(r[3])}});
        write_text(o.out, json{{"tool", kToolName}, {"fingerprint", fp}, {"k", 0}, {"rows", arr}}.dump(2) + "\n");
    } else {
        write_text(o.out, to_csv(t, fp));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crack / thin rigid inclusion interaction: SIFs, tractions, verification"};
    app.require_subcommand(1);
    Options o;
    auto* sif = app.add_subcommand("sif", "stress intensity factors at one or more points");
    auto* sweep = app.add_subcommand("sweep", "SIFs over a k range for one or more nu");
    auto* trace = app.add_subcommand("trace", "contact tractions under the inclusion");
    auto* verify = app.add_subcommand("verify", "residual, factorization and identity checks");
    auto* limits = app.add_subcommand("limits", "analytic k -> 0 SIFs");
    for (auto* c : {sif, sweep, trace, verify, limits}) add_common(c, o);
    for (auto* c : {sif, sweep}) {
        c->add_option("--rule", o.rule, "gauss | adaptive")->check(CLI::IsMember({"gauss", "adaptive"}));
        c->add_flag("--no-residual", o.no_residual, "skip the residual certificate column");
        c->add_option("--threads", o.threads, "worker threads (0: all cores)");
    }
    trace->add_option("--nodes", o.nodes, "number of trace nodes")->check(CLI::Range(2, 100000));
    verify->add_option("--check", o.checks, "run only these checks: residual factorization moment theta identities");
    verify->add_flag("--perturb-gamma", o.perturb_gamma, "scale gamma by 1.01 inside the factorization check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*sif) return run_sif_like("sif", o);
        if (*sweep) return run_sif_like("sweep", o);
        if (*trace) return run_trace(o);
        if (*verify) return run_verify_cmd(o);
        if (*limits) return run_limits(o);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitInvalid;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::domain_error& e) {
        std::cerr << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitInvalid;
}
