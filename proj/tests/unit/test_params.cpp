#include "incrack/params.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace incrack;

TEST(DerivedConstants, ValuesAtNuPointThree) {
    const auto c = derive_constants(0.3, 0.5);
    EXPECT_NEAR(c.nu0, 27.0 / 13.0, 1e-15);
    EXPECT_NEAR(c.nu1, 3.51, 1e-15);
    EXPECT_NEAR(c.gamma, std::log(27.0 / 13.0) / (4.0 * pi), 1e-16);
    EXPECT_NEAR(std::abs(c.e0 - std::exp(cplx(pi * c.gamma, pi / 4))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.e_plus - 0.5 * (c.e0 + 1.0 / c.e0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.e_minus - 0.5 * (c.e0 - 1.0 / c.e0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.beta0 - cplx(-0.5, 2.0 * c.gamma) * std::asin(0.5)), 0.0, 1e-15);
}

TEST(DerivedConstants, E0SquaredIsISqrtNu0) {
    for (double nu : {-0.5, 0.0, 0.2, 0.45}) {
        const auto c = derive_constants(nu, 0.3);
        EXPECT_NEAR(std::abs(c.e0 * c.e0 - I * std::sqrt(c.nu0)), 0.0, 1e-14) << nu;
        EXPECT_NEAR(std::abs(c.sqrt_lambda1() * c.sqrt_lambda1() + c.nu0), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(std::exp(c.log_sqrt_lambda1()) - c.sqrt_lambda1()), 0.0, 1e-14);
    }
}

TEST(DerivedConstants, NuOneMakesGammaVanish) {
    const auto c = derive_constants(1.0, 0.5);
    EXPECT_NEAR(c.nu0, 1.0, 1e-15);
    EXPECT_NEAR(c.gamma, 0.0, 1e-16);
    EXPECT_NEAR(std::abs(c.e_plus - std::sqrt(0.5)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.e_minus - I * std::sqrt(0.5)), 0.0, 1e-15);
}

TEST(DerivedConstants, BetaZeroAtUnitKappa) {
    const auto c = derive_constants(0.3, 1.0);
    EXPECT_NEAR(std::abs(c.beta0 - pi * cplx(-0.25, c.gamma)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(derive_constants(0.3, 1e-12).beta0), 0.0, 1e-11);
}

TEST(DerivedConstants, GammaOverrideOnlyTouchesGammaDependents) {
    const auto c = derive_constants(0.3, 0.5);
    const auto d = derive_constants(0.3, 0.5, 1.01 * c.gamma);
    EXPECT_EQ(c.nu0, d.nu0);
    EXPECT_NEAR(d.gamma, 1.01 * c.gamma, 1e-17);
    EXPECT_GT(std::abs(c.e0 - d.e0), 1e-5);
}

TEST(DerivedConstants, RejectsOutOfRange) {
    EXPECT_THROW(derive_constants(-1.0, 0.5), std::domain_error);
    EXPECT_THROW(derive_constants(0.3, 0.0), std::domain_error);
    EXPECT_THROW(derive_constants(0.3, 1.5), std::domain_error);
}

TEST(ProblemConfig, KappaAndPStar) {
    ProblemConfig cfg;
    cfg.a = 2.0;
    cfg.b = 0.5;
    cfg.P = 1.5;
    cfg.sigma = 0.25;
    EXPECT_DOUBLE_EQ(cfg.kappa(), 0.25);
    EXPECT_DOUBLE_EQ(cfg.p_star(), 1.75);
    EXPECT_TRUE(cfg.point_load());
    cfg.model = Model::model2;
    cfg.a = 0.5;
    cfg.b = 2.0;
    EXPECT_DOUBLE_EQ(cfg.kappa(), 0.25);
}

TEST(ProblemConfig, ConstantsForEqualModelUseUnitKappa) {
    ProblemConfig cfg;
    cfg.model = Model::equal;
    cfg.a = cfg.b = 1.0;
    EXPECT_EQ(derive_constants(cfg).kappa, 1.0);
}

namespace {
bool has_field(const std::vector<Violation>& v, const std::string& f) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field == f; });
}
}  // namespace

TEST(ValidateConfig, AcceptsDefaults) { EXPECT_TRUE(validate_config(ProblemConfig{}).empty()); }

TEST(ValidateConfig, ModelRatios) {
    ProblemConfig cfg;
    cfg.b = 2.0;
    EXPECT_TRUE(has_field(validate_config(cfg), "ratio"));
    cfg.model = Model::model2;
    EXPECT_TRUE(validate_config(cfg).empty());
    cfg.b = 0.5;
    EXPECT_TRUE(has_field(validate_config(cfg), "ratio"));
    cfg.model = Model::equal;
    EXPECT_TRUE(has_field(validate_config(cfg), "ratio"));
    cfg.b = cfg.a;
    EXPECT_TRUE(validate_config(cfg).empty());
}

TEST(ValidateConfig, ReportsEveryBadField) {
    ProblemConfig cfg;
    cfg.a = -1.0;
    cfg.nu = 0.7;
    cfg.E = 0.0;
    cfg.P = std::nan("");
    const auto v = validate_config(cfg);
    EXPECT_TRUE(has_field(v, "a"));
    EXPECT_TRUE(has_field(v, "nu"));
    EXPECT_TRUE(has_field(v, "E"));
    EXPECT_TRUE(has_field(v, "P"));
}

TEST(ValidateConfig, ProfileCoverage) {
    ProblemConfig cfg;
    cfg.profiles.sigma0 = ChebInterpolant::sample([](double) { return cplx(1.0); }, -0.5, 1.0, 8);
    EXPECT_TRUE(has_field(validate_config(cfg), "sigma0"));
    cfg.profiles.sigma0 = ChebInterpolant::sample([](double) { return cplx(1.0); }, -1.0, 1.0, 8);
    cfg.profiles.h_prime = ChebInterpolant::sample([](double) { return cplx(1.0); }, -0.4, 0.4, 8);
    EXPECT_TRUE(has_field(validate_config(cfg), "h_prime"));
    EXPECT_FALSE(cfg.point_load());
}

TEST(ChebInterpolant, ReproducesPolynomials) {
    auto f = [](double x) { return cplx(1.0 - 2.0 * x + 3.0 * x * x * x, x * x); };
    const auto p = ChebInterpolant::sample(f, -0.7, 1.3, 12);
    for (double x : {-0.7, -0.2, 0.0, 0.55, 1.3}) EXPECT_NEAR(std::abs(p(x) - f(x)), 0.0, 1e-13) << x;
}

TEST(ChebInterpolant, RejectsPointsOutsideItsInterval) {
    const auto p = ChebInterpolant::sample([](double) { return cplx(1.0); }, -1.0, 1.0, 4);
    EXPECT_THROW(p(1.5), std::out_of_range);
}

TEST(ModelNames, RoundTrip) {
    for (Model m : {Model::model1, Model::model2, Model::equal}) EXPECT_EQ(model_from_string(to_string(m)), m);
    EXPECT_THROW(model_from_string("model3"), std::invalid_argument);
}
