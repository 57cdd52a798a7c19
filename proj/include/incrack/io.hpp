/**
 * \file io.hpp
 *
 * \brief JSON configuration, load-profile files, CSV tables with a units and
 * fingerprint comment, and minimal SVG line plots.
 *
 * Config schema (all keys optional):
 *
 *     {
 *       "model": "model1" | "model2" | "equal" | "1" | "2",
 *       "a": 1.0, "b": 0.5, "nu": 0.3, "P": 1.0, "sigma": 0.0, "E": 1.0,
 *       "profiles": { "h_prime": PROFILE, "w0": PROFILE, "sigma0": PROFILE },
 *       "quadrature": { "N": 200, "M": 200, "L": 200, "rel_tol": 1e-10,
 *                       "series_rel_tol": 2e-9, "max_doublings": 7, "max_series_order": 25600 }
 *     }
 *
 * PROFILE is one of
 *     { "lo": -1, "hi": 1, "values": [[re, im], ...] }   samples on Chebyshev points
 *                                                       x_j = mid + half cos(j pi / n)
 *     { "lo": -1, "hi": 1, "poly": [[re, im], ...] }     monomial coefficients c_0, c_1, ...
 * A bare number in place of [re, im] is a real value.
 */
#pragma once

#include "incrack/params.hpp"
#include "incrack/quadrature.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace incrack {

using json = nlohmann::json;

/// Configuration input that fails to parse or validate.
struct ConfigError : std::runtime_error {
    std::vector<Violation> violations;
    explicit ConfigError(const std::string& what, std::vector<Violation> v = {})
        : std::runtime_error(what), violations(std::move(v)) {}
};

namespace detail {
inline cplx complex_from_json(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("expected a number or [re, im] pair, got " + v.dump());
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }
}  // namespace detail

inline ChebInterpolant profile_from_json(const json& j, const std::string& name) {
    if (!j.is_object()) throw ConfigError("profile '" + name + "' must be an object");
    const double lo = j.value("lo", -1.0), hi = j.value("hi", 1.0);
    if (!(hi > lo)) throw ConfigError("profile '" + name + "': hi must exceed lo");
    if (j.contains("values")) {
        std::vector<cplx> v;
        for (const auto& e : j.at("values")) v.push_back(detail::complex_from_json(e));
        if (v.empty()) throw ConfigError("profile '" + name + "': no values");
        return {lo, hi, std::move(v)};
    }
    if (j.contains("poly")) {
        std::vector<cplx> c;
        for (const auto& e : j.at("poly")) c.push_back(detail::complex_from_json(e));
        if (c.empty()) throw ConfigError("profile '" + name + "': no coefficients");
        const int n = std::max<int>(8, 2 * static_cast<int>(c.size()));
        return ChebInterpolant::sample(
            [&c](double x) {
                cplx acc = 0.0;
                for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
                return acc;
            },
            lo, hi, n);
    }
    throw ConfigError("profile '" + name + "' needs 'values' or 'poly'");
}

inline json profile_to_json(const ChebInterpolant& p) {
    json v = json::array();
    for (const cplx& z : p.values()) v.push_back(detail::complex_to_json(z));
    return {{"lo", p.lo()}, {"hi", p.hi()}, {"values", v}};
}

inline LoadProfiles profiles_from_json(const json& j) {
    LoadProfiles p;
    if (j.contains("h_prime")) p.h_prime = profile_from_json(j["h_prime"], "h_prime");
    if (j.contains("w0")) p.w0 = profile_from_json(j["w0"], "w0");
    if (j.contains("sigma0")) p.sigma0 = profile_from_json(j["sigma0"], "sigma0");
    for (const auto& [k, v] : j.items())
        if (k != "h_prime" && k != "w0" && k != "sigma0") throw ConfigError("unknown profile '" + k + "'");
    return p;
}

inline json profiles_to_json(const LoadProfiles& p) {
    json j = json::object();
    if (p.h_prime) j["h_prime"] = profile_to_json(*p.h_prime);
    if (p.w0) j["w0"] = profile_to_json(*p.w0);
    if (p.sigma0) j["sigma0"] = profile_to_json(*p.sigma0);
    return j;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline LoadProfiles read_profile_file(const std::string& path) { return profiles_from_json(read_json_file(path)); }

/// Fills cfg and q from j; keys not present keep their current values.
inline void apply_json(const json& j, ProblemConfig& cfg, QuadratureConfig& q) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known{"model", "a", "b", "nu", "P", "sigma", "E", "profiles", "quadrature"};
    for (const auto& [k, v] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
    try {
        if (j.contains("model")) {
            const auto& m = j["model"];
            cfg.model = model_from_string(m.is_number() ? std::to_string(m.get<int>()) : m.get<std::string>());
        }
        auto num = [&](const char* key, double& dst) {
            if (j.contains(key)) dst = j[key].get<double>();
        };
        num("a", cfg.a);
        num("b", cfg.b);
        num("nu", cfg.nu);
        num("P", cfg.P);
        num("sigma", cfg.sigma);
        num("E", cfg.E);
        if (j.contains("profiles")) cfg.profiles = profiles_from_json(j["profiles"]);
        if (j.contains("quadrature")) {
            const auto& qj = j["quadrature"];
            if (qj.contains("N")) q.N = qj["N"].get<int>();
            if (qj.contains("M")) q.M = qj["M"].get<int>();
            if (qj.contains("L")) q.L = qj["L"].get<int>();
            if (qj.contains("rel_tol")) q.rel_tol = qj["rel_tol"].get<double>();
            if (qj.contains("series_rel_tol")) q.series_rel_tol = qj["series_rel_tol"].get<double>();
            if (qj.contains("max_doublings")) q.max_doublings = qj["max_doublings"].get<int>();
            if (qj.contains("max_series_order")) q.max_series_order = qj["max_series_order"].get<int>();
            for (const auto& [k, v] : qj.items())
                if (k != "N" && k != "M" && k != "L" && k != "rel_tol" && k != "series_rel_tol" && k != "max_doublings" &&
                    k != "max_series_order")
                    throw ConfigError("unknown quadrature key '" + k + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

/// Throws ConfigError listing every violation.
inline void check_config(const ProblemConfig& cfg, const QuadratureConfig& q) {
    auto v = validate_config(cfg);
    try {
        q.validate();
    } catch (const std::invalid_argument& e) {
        v.push_back({"quadrature", e.what()});
    }
    if (v.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& x : v) msg += "\n  " + x.field + ": " + x.message;
    throw ConfigError(msg, std::move(v));
}

inline json config_to_json(const ProblemConfig& cfg, const QuadratureConfig& q) {
    json j{{"model", to_string(cfg.model)}, {"a", cfg.a},         {"b", cfg.b}, {"nu", cfg.nu},
           {"P", cfg.P},                    {"sigma", cfg.sigma}, {"E", cfg.E}};
    if (!cfg.profiles.empty()) j["profiles"] = profiles_to_json(cfg.profiles);
    j["quadrature"] = {{"N", q.N},
                       {"M", q.M},
                       {"L", q.L},
                       {"rel_tol", q.rel_tol},
                       {"series_rel_tol", q.series_rel_tol},
                       {"max_doublings", q.max_doublings},
                       {"max_series_order", q.max_series_order}};
    return j;
}

/// FNV-1a 64 of the canonical (key-sorted) JSON text.
inline std::string fingerprint(const json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kToolName = "incrack";
inline constexpr const char* kToolVersion = "1.0.0";

/// Fixed-format number so output is byte-stable.
inline std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::string> units;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) {
        if (row.size() != columns.size()) throw std::logic_error("CsvTable: row width mismatch");
        rows.push_back(std::move(row));
    }
};

/// Two comment lines (tool, fingerprint, units), the header, then rows.
inline std::string to_csv(const CsvTable& t, const std::string& fp) {
    std::ostringstream os;
    os << "# " << kToolName << ' ' << kToolVersion << " config=" << fp << '\n';
    os << "# units:";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : " ") << t.columns[i] << '[' << t.units[i] << ']';
    os << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// SVG

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

/// Static line plot: axes box, tick labels at the ends, one polyline per series and a legend.
inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series) {
    const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream os;
    char buf[128];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    std::snprintf(buf, sizeof buf, "%.4g", xmin);
    os << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", xmax);
    os << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", ymin);
    os << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", ymax);
    os << "<text x=\"" << L - 6 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\">" << buf << "</text>\n";
    if (ymin < 0.0 && ymax > 0.0)
        os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << py(0.0) << "\" y2=\"" << py(0.0)
           << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* col = colors[s % 6];
        os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (!std::isfinite(series[s].y[i])) continue;
            std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", first ? "" : " ", px(series[s].x[i]), py(series[s].y[i]));
            os << buf;
            first = false;
        }
        os << "\"/>\n";
        const double ly = T + 16 + 16 * s;
        os << "<line x1=\"" << W - R - 130 << "\" x2=\"" << W - R - 110 << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4
           << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - R - 104 << "\" y=\"" << ly << "\">" << series[s].label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

}  // namespace incrack
