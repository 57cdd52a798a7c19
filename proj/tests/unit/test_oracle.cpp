#include "incrack/oracle.hpp"
#include "incrack/post.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace incrack;

namespace {
ProblemConfig model1(double k, double nu) {
    ProblemConfig cfg;
    cfg.a = 1.0;
    cfg.b = k;
    cfg.nu = nu;
    return cfg;
}

PointFn as_fn(const ClosedFormSolution& sol) {
    auto s = std::make_shared<ClosedFormSolution>(sol);
    return [s](const SegmentPoint& p) { return (*s)(p); };
}

PointFn rhs_fn(const RhsFunction& r) {
    return [r](const SegmentPoint& p) { return r(p); };
}
}  // namespace

TEST(Residual, ClosedFormSatisfiesEquation) {
    for (double k : {0.3, 0.8}) {
        const auto sol = solve_model1(model1(k, 0.3));
        const auto rep = residual_sie(as_fn(sol), rhs_fn(sol.rhs()), k, 0.3);
        EXPECT_LT(rep.max_rel, 1e-8) << k;
        EXPECT_EQ(rep.nodes.size(), 20u);
        EXPECT_GT(rep.rule_size, 100u);
    }
}

TEST(Residual, GeneralLoad) {
    ProblemConfig cfg = model1(0.6, 0.25);
    cfg.profiles.sigma0 = ChebInterpolant::sample([](double x) { return cplx(0.1 * x, 0.2 + 0.05 * x * x); }, -1, 1, 12);
    cfg.profiles.h_prime = ChebInterpolant::sample([](double x) { return cplx(0.01 * x); }, -0.6, 0.6, 8);
    const auto sol = solve_model1(cfg);
    EXPECT_LT(residual_sie(as_fn(sol), rhs_fn(sol.rhs()), 0.6, 0.25).max_rel, 1e-8);
}

TEST(Residual, Model2) {
    ProblemConfig cfg;
    cfg.model = Model::model2;
    cfg.a = 0.5;
    cfg.b = 1.0;
    const auto sol = solve_model2(cfg);
    EXPECT_LT(residual_sie(as_fn(sol), rhs_fn(sol.rhs()), 0.5, cfg.nu).max_rel, 1e-8);
}

TEST(Residual, DetectsPerturbedDensity) {
    const auto sol = solve_model1(model1(0.5, 0.3));
    auto f = as_fn(sol);
    const PointFn bad = [f](const SegmentPoint& p) { return 1.001 * f(p); };
    EXPECT_GT(residual_sie(bad, rhs_fn(sol.rhs()), 0.5, 0.3).max_rel, 1e-4);
}

TEST(Residual, ZeroDensityAndZeroLoad) {
    const PointFn zero = [](const SegmentPoint&) { return cplx{}; };
    const auto rep = residual_sie(zero, zero, 0.5, 0.3);
    for (const auto& r : rep.residuals) EXPECT_EQ(std::abs(r), 0.0);
}

TEST(Residual, UnitRatioDensity) {
    ProblemConfig eq;
    eq.model = Model::equal;
    eq.a = eq.b = 1.0;
    const Density psi = solve_psi(eq);
    const auto rhs = build_rhs_model1(eq);
    ResidualOptions opt;
    opt.min_exponent = -0.75;
    const auto rep = residual_sie([psi](const SegmentPoint& p) { return psi(p); }, rhs_fn(rhs), 1.0, eq.nu, opt);
    EXPECT_LT(rep.max_rel, 1e-8);
}

TEST(Factorization, HoldsAcrossParameters) {
    for (double k : {0.1, 0.5, 0.99})
        for (double nu : {0.05, 0.3, 0.5}) {
            const auto r = verify_factorization(k, nu, 40);
            EXPECT_LT(r.max_deviation, 1e-10) << k << " " << nu;
            EXPECT_LT(r.max_det_deviation, 1e-12) << k << " " << nu;
            EXPECT_EQ(r.samples, 40);
        }
}

TEST(Factorization, PerturbedGammaIsDetected) {
    const double g = derive_constants(0.3, 0.5).gamma;
    EXPECT_GT(verify_factorization(0.5, 0.3, 50, 1.01 * g).max_deviation, 1e-4);
}

TEST(Factorization, NuOneMakesLambdaOneMinusOne) {
    const auto c = derive_constants(1.0, 0.5);
    EXPECT_NEAR(std::abs(c.sqrt_lambda1() * c.sqrt_lambda1() + 1.0), 0.0, 1e-15);
}

TEST(Theta, IdentityForPointLoad) {
    const auto cfg = model1(0.5, 0.3);
    const auto sol = solve_model1(cfg);
    const auto rep = verify_theta_identity(as_fn(sol), 0.5, cfg.a, cfg.p_star(), {-0.3, 0.0, 0.25});
    EXPECT_LT(rep.max_rel, 1e-8);
    EXPECT_EQ(rep.theta.size(), 3u);
}

TEST(Theta, DetectsWrongResultant) {
    const auto cfg = model1(0.5, 0.3);
    const auto sol = solve_model1(cfg);
    EXPECT_GT(verify_theta_identity(as_fn(sol), 0.5, cfg.a, 1.1 * cfg.p_star(), {0.1}).max_rel, 1e-3);
}

TEST(Identities, SuiteCoversEachFamilyAndPasses) {
    const auto suite = identity_suite();
    std::map<std::string, int> count;
    for (const auto& c : suite) {
        EXPECT_TRUE(c.pass()) << c.name << " " << c.parameters << " err " << c.error;
        ++count[c.name];
    }
    EXPECT_GE(count["arcsine_pv"], 10);
    EXPECT_GE(count["double_pole"], 10);
    EXPECT_GE(count["jacobi_alpha_minus_alpha"], 10);
    EXPECT_GE(count["jacobi_alpha_minus_alpha_minus_one"], 10);
    EXPECT_GE(count["e_ratio_sum"], 10);
    EXPECT_GE(count["e_plus_relation"], 10);
    EXPECT_GE(count["e_minus_relation"], 10);
}

TEST(Identities, FailOnWrongExpectation) {
    auto c = check_identity_jacobi0(cplx(0.25, 0.1), 0.3);
    EXPECT_TRUE(c.pass());
    c.expected *= 1.0 + 1e-6;
    c.error = std::abs(c.computed - c.expected) / std::max(1.0, std::abs(c.expected));
    EXPECT_FALSE(c.pass());
}

TEST(Limits, ContinuityTableMonotone) {
    const auto t = verify_limit_continuity("K1", {0.1, 0.03, 0.01}, [](double k) {
        ProblemConfig cfg;
        cfg.b = k;
        return std::abs(sif_point_load(cfg).K1_plus_norm() - 1.0 / (2.0 * std::sqrt(pi)));
    });
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_TRUE(t.monotone());
    LimitTable bad{"x", {{0.1, 1.0}, {0.2, 2.0}}};
    EXPECT_FALSE(bad.monotone());
}

TEST(Limits, SupDistanceSkipsPointsOutsideSegment) {
    const PointFn one = [](const SegmentPoint&) { return cplx(1.0); };
    const PointFn two = [](const SegmentPoint&) { return cplx(2.0); };
    EXPECT_NEAR(sup_distance(one, two, 0.9, 0.9, 19), 1.0, 1e-16);
}
