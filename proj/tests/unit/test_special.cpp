#include "incrack/quadrature.hpp"
#include "incrack/special.hpp"

#include <gtest/gtest.h>

using namespace incrack;

TEST(SegmentPoint, DistanceConstructorsAreExact) {
    const auto p = SegmentPoint::from_plus(1e-14, 0.5);
    EXPECT_EQ(p.to_plus, 1e-14);
    EXPECT_DOUBLE_EQ(p.to_minus, 1.0 - 1e-14);
    const auto m = SegmentPoint::from_minus(1e-14, 0.5);
    EXPECT_EQ(m.to_minus, 1e-14);
    EXPECT_THROW(SegmentPoint::at(0.5, 0.5), std::domain_error);
    EXPECT_THROW(SegmentPoint::from_plus(0.0, 0.5), std::domain_error);
    EXPECT_NO_THROW(SegmentPoint::at(0.49, 0.5));
}

TEST(SqrtOneMinusZ2, BranchAndCut) {
    EXPECT_NEAR(std::abs(sqrt_one_minus_z2(0.0) - 1.0), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(sqrt_one_minus_z2(cplx(0.0, 2.0)) - std::sqrt(5.0)), 0.0, 1e-15);
    // opposite sides of the cut at x = 2
    const cplx up = sqrt_one_minus_z2(cplx(2.0, 1e-12));
    const cplx dn = sqrt_one_minus_z2(cplx(2.0, -1e-12));
    EXPECT_NEAR(std::abs(up + I * std::sqrt(3.0)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(dn - I * std::sqrt(3.0)), 0.0, 1e-9);
    EXPECT_THROW(sqrt_one_minus_z2(cplx(1.0, 0.0)), std::domain_error);
    EXPECT_THROW(sqrt_one_minus_z2(cplx(-3.0, 0.0)), std::domain_error);
}

TEST(RParts, ProductIdentity) {
    // R+ R- = (1 + sqrt((1-t^2)(1-k^2)))^2 - k^2 t^2
    for (double k : {0.1, 0.5, 0.95})
        for (double u : {-0.9, -0.3, 0.0, 0.6}) {
            const auto p = SegmentPoint::at(u * k, k);
            const auto r = r_parts(p);
            const double root = std::sqrt((1 - p.t * p.t) * (1 - k * k));
            EXPECT_NEAR(r.r_plus * r.r_minus, (1 + root) * (1 + root) - k * k * p.t * p.t, 1e-13);
            EXPECT_NEAR(r.r, r.r_plus / r.r_minus, 1e-15);
        }
}

TEST(IFn, MatchesPrincipalValueQuadrature) {
    for (double k : {0.2, 0.6, 0.97})
        for (double u : {-0.8, 0.0, 0.35, 0.99}) {
            const auto p = SegmentPoint::at(u * k, k);
            const auto pv =
                pv_integral([](const SegmentPoint& s) { return 1.0 / s.sqrt_one_minus_t2(); }, p);
            EXPECT_NEAR(I_fn(p), pv.value, 1e-11 * std::max(1.0, std::abs(pv.value))) << k << " " << u;
        }
}

TEST(Lambda, BoundaryRatioIsE0Squared) {
    const auto c = derive_constants(0.25, 0.6);
    for (double u : {-0.7, 0.1, 0.9}) {
        const auto [lp, lm] = lambda_pm(SegmentPoint::at(u * 0.6, 0.6), c);
        EXPECT_NEAR(std::abs(lp / lm - c.e0 * c.e0), 0.0, 1e-13);
    }
}

TEST(Lambda, OffSegmentTendsToBoundaryValues) {
    const double k = 0.6;
    const auto c = derive_constants(0.25, k);
    for (double t : {-0.4, 0.0, 0.3}) {
        const auto [lp, lm] = lambda_pm(SegmentPoint::at(t, k), c);
        EXPECT_NEAR(std::abs(lambda_offsegment(cplx(t, 1e-10), k, c.gamma) / lp - 1.0), 0.0, 1e-8);
        EXPECT_NEAR(std::abs(lambda_offsegment(cplx(t, -1e-10), k, c.gamma) / lm - 1.0), 0.0, 1e-8);
    }
    const cplx far = lambda_offsegment(cplx(1e6, 3e5), k, c.gamma);
    EXPECT_NEAR(std::abs(far * cplx(1e6, 3e5) - 1.0), 0.0, 1e-5);
}

TEST(Beta, OffSegmentTendsToBoundaryValues) {
    const double k = 0.5;
    const auto c = derive_constants(0.3, k);
    const auto p = SegmentPoint::at(0.2, k);
    const auto [bp, bm] = beta_pm(p, c);
    // the approach error is O(y log y)
    EXPECT_NEAR(std::abs(beta_offsegment(cplx(0.2, 1e-7), c, 1e-13) - bp), 0.0, 1e-5);
    EXPECT_NEAR(std::abs(beta_offsegment(cplx(0.2, -1e-7), c, 1e-13) - bm), 0.0, 1e-5);
    // jump: beta+ - beta- = ln sqrt(lambda1) / sqrt(1 - t^2)
    EXPECT_NEAR(std::abs((bp - bm) * p.sqrt_one_minus_t2() - c.log_sqrt_lambda1()), 0.0, 1e-14);
}

TEST(Factorization, ReproducesGAndDeterminant) {
    for (double k : {0.2, 0.5, 0.99})
        for (double nu : {-0.4, 0.05, 0.45}) {
            const auto c = derive_constants(nu, k);
            for (double u : {-0.95, -0.2, 0.4, 0.9}) {
                const auto p = SegmentPoint::at(u * k, k);
                const auto f = factor_matrices(p, c);
                const Mat2 g = g_matrix(p, c);
                const Mat2 rec = f.x_plus * f.x_minus.inverse();
                EXPECT_LT((rec - g).norm() / g.norm(), 1e-12) << k << " " << nu << " " << u;
                const auto [lp, lm] = lambda_pm(p, c);
                EXPECT_NEAR(std::abs(f.x_plus.determinant() / (lp * lp) - 1.0), 0.0, 1e-12);
                EXPECT_NEAR(std::abs(f.x_minus.determinant() / (lm * lm) - 1.0), 0.0, 1e-12);
            }
        }
}

TEST(Factorization, OffSegmentMatrixApproachesBoundaryValue) {
    const double k = 0.5;
    const auto c = derive_constants(0.3, k);
    const auto f = factor_matrices(SegmentPoint::at(-0.1, k), c);
    const Mat2 up = factor_matrix_offsegment(cplx(-0.1, 1e-8), c);
    EXPECT_LT((up - f.x_plus).norm() / f.x_plus.norm(), 1e-5);
}

TEST(Chi, IsJumpOfFirstFactorEntry) {
    for (double nu : {0.0, 0.3, 0.5}) {
        const auto c = derive_constants(nu, 0.7);
        for (double u : {-0.9, 0.0, 0.5}) {
            const auto j = chi_jump(SegmentPoint::at(u * 0.7, 0.7), c);
            EXPECT_NEAR(std::abs(j.chi1_plus - j.chi1_minus - j.chi), 0.0, 1e-13 * std::abs(j.chi));
        }
    }
}

TEST(Chi, EndpointBehaviour) {
    // |chi| sqrt(k - t) stays bounded at +k
    const double k = 0.5;
    const auto c = derive_constants(0.3, k);
    const double r1 = std::abs(chi(SegmentPoint::from_plus(1e-6, k), c)) * std::sqrt(1e-6);
    const double r2 = std::abs(chi(SegmentPoint::from_plus(1e-12, k), c)) * std::sqrt(1e-12);
    EXPECT_NEAR(r1 / r2, 1.0, 1e-5);
}

TEST(DensityExponents, OscillatingSquareRoot) {
    const auto c = derive_constants(0.3, 0.5);
    const auto e = density_exponents(c);
    EXPECT_NEAR(std::abs(e.at_plus_k - cplx(-0.5, -2.0 * c.gamma)), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(e.at_minus_k - cplx(-0.5, 2.0 * c.gamma)), 0.0, 1e-16);
}
