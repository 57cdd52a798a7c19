// Acceptance checks. `acceptance <n>` runs criterion n and prints one
// PASS/FAIL line; the exit status is 0 on PASS.

#include "incrack/incrack.hpp"

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace incrack;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... v) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, v...);
    return buf;
}

std::string run_cli(const std::string& args, int& code) {
    const std::string cmd = std::string(INCRACK_CLI) + " " + args + " 2>/dev/null";
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        code = -1;
        return out;
    }
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    const int st = pclose(p);
    code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return out;
}

// column name -> value of the single data row of a CSV output
std::map<std::string, double> csv_row(const std::string& s, std::size_t index = 0) {
    std::istringstream in(s);
    std::string line;
    std::vector<std::string> header;
    std::size_t seen = 0;
    std::map<std::string, double> out;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::stringstream ls(l);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header.empty()) {
            header = split(line);
            continue;
        }
        if (seen++ != index) continue;
        const auto cells = split(line);
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) out[header[i]] = std::stod(cells[i]);
    }
    return out;
}

ProblemConfig model1(double k, double nu) {
    ProblemConfig cfg;
    cfg.a = 1.0;
    cfg.b = k;
    cfg.nu = nu;
    return cfg;
}

// 1. k -> 0 analytic limits through the CLI
Outcome criterion1() {
    const auto t0 = Clock::now();
    int code = 0;
    const std::string out = run_cli("limits --nu 0.05 --nu 0.25 --nu 0.45", code);
    const double dt = seconds_since(t0);
    const double K2[] = {0.1339950, 0.1057855, 0.07757607};
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto r = csv_row(out, i);
        if (r.empty()) return {false, "missing limits row"};
        worst = std::max(worst, std::abs(r.at("K1_norm") - 0.2820948));
        worst = std::max(worst, std::abs(r.at("K2p_norm") - K2[i]));
    }
    return {code == 0 && worst < 1e-7 && dt < 1.0, fmt("max |diff| %.2e (tol 1e-7), runtime %.3f s (< 1 s)", worst, dt)};
}

// 2. full pipeline at k = 0.005 against the quoted values
Outcome criterion2() {
    struct Ref {
        double nu;
        double K1, K2;  // NaN: not quoted
    };
    const double nan = std::nan("");
    const Ref refs[] = {{0.05, 0.2820933, 0.1335321}, {0.25, nan, 0.1054322}, {0.45, 0.2821035, 0.07732310}};
    bool pass = true;
    std::string detail;
    for (const Ref& r : refs) {
        const auto t0 = Clock::now();
        int code = 0;
        const auto row = csv_row(run_cli(fmt("sif --k 0.005 --nu %g --load point", r.nu), code));
        const double dt = seconds_since(t0);
        if (code != 0 || row.empty()) return {false, fmt("sif failed at nu=%g", r.nu)};
        const double k1 = row.at("K1p_norm"), k2 = row.at("K2p_norm");
        if (!std::isnan(r.K1)) {
            const bool ok = std::abs(k1 - r.K1) < 1e-6;
            pass = pass && ok;
            detail += fmt("nu=%g K1+ %.10f vs %.7f (%s); ", r.nu, k1, r.K1, ok ? "ok" : "off");
        }
        const bool ok2 = std::abs(k2 - r.K2) < 1e-6;
        pass = pass && ok2 && dt < 30.0;
        detail += fmt("nu=%g K2+ %.10f vs %.7f (%s), %.2f s; ", r.nu, k2, r.K2, ok2 ? "ok" : "off", dt);
    }
    return {pass, detail};
}

// 3. residual certificate on the (k, nu) grid
Outcome criterion3() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::string where;
    for (double k : {0.3, 0.5, 0.7, 0.9})
        for (double nu : {0.05, 0.3, 0.45}) {
            const auto r = model1_residual(model1(k, nu));
            if (r.nodes.size() != 20) return {false, "expected 20 nodes"};
            if (r.max_rel > worst) {
                worst = r.max_rel;
                where = fmt("k=%g nu=%g", k, nu);
            }
        }
    const double dt = seconds_since(t0);
    return {worst < 1e-6 && dt < 120.0, fmt("max residual %.2e at %s (tol 1e-6), runtime %.1f s", worst, where.c_str(), dt)};
}

// 4. factorization identity
Outcome criterion4() {
    double dev = 0.0, det = 0.0;
    int n = 0;
    for (double k : {0.3, 0.5, 0.7, 0.9, 0.99})
        for (double nu : {0.05, 0.3, 0.45}) {
            const auto r = verify_factorization(k, nu, 50);
            dev = std::max(dev, r.max_deviation);
            det = std::max(det, r.max_det_deviation);
            ++n;
        }
    return {dev < 1e-10 && det < 1e-12,
            fmt("%d parameter pairs x 50 points: max deviation %.2e (tol 1e-10), det %.2e (tol 1e-12)", n, dev, det)};
}

// 5. equilibrium and closure for every solve
Outcome criterion5() {
    double worst = 0.0;
    int solves = 0;
    auto check = [&](const ProblemConfig& cfg) {
        const auto sol = solve_model1(cfg);
        const Density psi = sol.density(DensityKind::psi);
        const cplx target = I * cfg.p_star() / cfg.a;
        worst = std::max(worst, std::abs(psi.moment() - target) / std::abs(target));
        const auto phi = recover_phi(psi, sol.rhs(), cfg);
        worst = std::max(worst, std::abs(phi.integral()) / std::abs(target));
        ++solves;
    };
    for (double k : {0.3, 0.5, 0.7, 0.9})
        for (double nu : {0.05, 0.3, 0.45}) check(model1(k, nu));
    ProblemConfig prof = model1(0.6, 0.25);
    prof.profiles.sigma0 = ChebInterpolant::sample([](double x) { return cplx(0.05 * x, 0.2); }, -1.0, 1.0, 8);
    prof.sigma = 0.24;
    check(prof);
    // Model 2: int phi = 0 on the crack, int psi = i P*/b on the inclusion
    ProblemConfig m2;
    m2.model = Model::model2;
    m2.a = 0.5;
    m2.b = 1.0;
    const auto sol2 = solve_model2(m2);
    const Density phi2 = sol2.density(DensityKind::phi);
    const cplx t2 = I * m2.p_star() / m2.b;
    worst = std::max(worst, std::abs(phi2.moment()) / std::abs(t2));
    worst = std::max(worst, std::abs(recover_psi_model2(phi2, sol2.rhs(), m2).integral() - t2) / std::abs(t2));
    ++solves;
    return {worst < 1e-8, fmt("%d solves: max relative moment error %.2e (tol 1e-8)", solves, worst)};
}

// 6. continuity as k -> 1
Outcome criterion6() {
    ProblemConfig eq;
    eq.model = Model::equal;
    eq.a = eq.b = 1.0;
    eq.nu = 0.3;
    const Density lim = solve_psi(eq);
    const PointFn lim_fn = [lim](const SegmentPoint& p) { return lim(p); };
    const auto table = verify_limit_continuity("psi", {0.9, 0.99, 0.999}, [&](double k) {
        const Density rho = solve_psi(model1(k, 0.3));
        return sup_distance([rho](const SegmentPoint& p) { return rho(p); }, lim_fn, k, 0.9);
    });
    ResidualOptions ro;
    ro.min_exponent = -0.75;
    const auto rhs = build_rhs_model1(eq);
    const double res = residual_sie(lim_fn, [rhs](const SegmentPoint& p) { return rhs(p); }, 1.0, eq.nu, ro).max_rel;
    const double last = table.rows.back().distance;
    std::string d = "sup distance";
    for (const auto& r : table.rows) d += fmt(" k=%g: %.4f", r.k, r.distance);
    d += fmt("; monotone %s; k=0.999 distance %.4f (tol 1e-2); unit-ratio residual %.2e (tol 1e-6)",
             table.monotone() ? "yes" : "no", last, res);
    return {table.monotone() && last < 1e-2 && res < 1e-6, d};
}

// 7. identity suite
Outcome criterion7() {
    const auto suite = identity_suite(1e-9, 1e-12);
    std::map<std::string, int> count;
    double worst = 0.0;
    bool pass = true;
    for (const auto& c : suite) {
        ++count[c.name];
        worst = std::max(worst, c.error / c.tolerance);
        pass = pass && c.pass();
    }
    std::string d = fmt("%zu checks, worst error/tolerance %.2e;", suite.size(), worst);
    for (const auto& [name, n] : count) {
        d += fmt(" %s=%d", name.c_str(), n);
        pass = pass && n >= 10;
    }
    return {pass, d};
}

// 8. route equivalences
Outcome criterion8() {
    double sif = 0.0, trac = 0.0, series = 0.0;
    for (double k : {0.2, 0.5, 0.8})
        for (double nu : {0.05, 0.45}) {
            const auto cfg = model1(k, nu);
            const SifResult g = sif_point_load(cfg);
            const SifResult t = sif_general(solve_psi(cfg), cfg);
            sif = std::max({sif, std::abs(g.plus - t.plus) / std::abs(t.plus), std::abs(g.minus - t.minus) / std::abs(t.minus)});
        }
    for (double k : {0.3, 0.7}) {
        const auto cfg = model1(k, 0.3);
        const auto sol = solve_model1(cfg);
        const Density psi = sol.density(DensityKind::psi);
        const auto phi = recover_phi(psi, sol.rhs(), cfg);
        const auto nodes = trace_nodes(k, 9);
        const auto a = contact_traction(sol, cfg, nodes);
        const auto b = contact_traction(psi, phi, cfg, nodes);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            trac = std::max(trac, std::abs(a.samples[i].sigma - b.samples[i].sigma) / std::abs(a.samples[i].sigma));
    }
    for (double k : {0.3, 0.6, 0.9}) {
        const auto cfg = model1(k, 0.3);
        const auto direct = solve_model1(cfg, {}, PsiRoute::direct);
        const auto ser = solve_model1(cfg, {}, PsiRoute::series);
        const auto nodes = default_nodes(k);
        for (int j = 0; j < 2; ++j) {
            double scale = 0.0, diff = 0.0;
            for (const auto& p : nodes) {
                const cplx d = direct.psi_j(p)[j], s = ser.psi_j(p)[j];
                scale = std::max(scale, std::abs(d));
                diff = std::max(diff, std::abs(d - s));
            }
            series = std::max(series, diff / scale);
        }
    }
    return {sif < 1e-7 && trac < 1e-7 && series < 1e-9,
            fmt("SIF routes %.2e (tol 1e-7); traction routes %.2e (tol 1e-7); series vs direct %.2e (tol 1e-9)", sif,
                trac, series)};
}

// 9. qualitative behaviour
Outcome criterion9() {
    bool increasing = true;
    double prev = 0.0;
    for (double k : linspace(0.3, 0.95, 14)) {
        const double v = sif_point_load(model1(k, 0.3)).K1_plus_norm();
        increasing = increasing && v > prev;
        prev = v;
    }
    const double a = sif_point_load(model1(0.9, 0.3)).K2_plus_norm();
    const double b = sif_point_load(model1(0.99, 0.3)).K2_plus_norm();
    const bool sign_change = a * b < 0.0;
    bool centre = true;
    for (double k : {0.5, 0.7, 0.9}) {
        const auto tr = compute_trace(model1(k, 0.3), {}, 41);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < tr.samples.size(); ++i)
            if (std::abs(tr.samples[i].sigma.imag()) < std::abs(tr.samples[arg].sigma.imag())) arg = i;
        centre = centre && tr.samples[arg].t == 0.0;
    }
    return {increasing && sign_change && centre,
            fmt("K1+ increasing on [0.3, 0.95]: %s; K2+ at k=0.9 %.4f, k=0.99 %.4f (sign change %s); |sig22| min at t=0: %s",
                increasing ? "yes" : "no", a, b, sign_change ? "yes" : "no", centre ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9};
    std::vector<int> which;
    if (argc > 1) {
        which.push_back(std::atoi(argv[1]));
    } else {
        for (int i = 1; i <= 9; ++i) which.push_back(i);
    }
    int failed = 0;
    for (int n : which) {
        if (n < 1 || n > 9) {
            std::cerr << "criterion must be 1..9\n";
            return 2;
        }
        Outcome o;
        try {
            o = criteria[n - 1]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail << std::endl;
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
