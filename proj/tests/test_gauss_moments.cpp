#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zalms/gauss_moments.hpp"
#include "zalms/oracles.hpp"
#include "zalms/quadrature.hpp"
#include "zalms/verify.hpp"

namespace {

using zalms::Gaussian1;
using zalms::Gaussian2;

constexpr double kRoot2OverPi = 0.7978845608028654; // sqrt(2/pi)

// ---------------------------------------------------------------------
// Parameter validation helpers
// ---------------------------------------------------------------------

TEST(MomentInputs, ClampVarianceHandlesRoundOffAndRejectsGenuineNegatives) {
    EXPECT_EQ(zalms::clamp_variance(0.25), 0.25);
    EXPECT_EQ(zalms::clamp_variance(0.0), 0.0);
    EXPECT_EQ(zalms::clamp_variance(-1e-13), 0.0);
    EXPECT_THROW(zalms::clamp_variance(-1e-9), std::domain_error);
    EXPECT_THROW(zalms::clamp_variance(std::nan("")), std::domain_error);
}

TEST(MomentInputs, NormalizedClampsCovarianceOntoPsdBoundary) {
    const double bound = std::sqrt(0.5 * 0.5); // var_u = var_v = 0.5
    const Gaussian2 nearly{0.0, 0.0, 0.5, 0.5, bound + 1e-11};
    EXPECT_EQ(zalms::normalized(nearly).cov_uv, bound);

    const Gaussian2 bad{0.0, 0.0, 1.0, 1.0, 1.5};
    EXPECT_THROW(zalms::normalized(bad), std::domain_error);
    const Gaussian2 nonfinite{std::nan(""), 0.0, 1.0, 1.0, 0.0};
    EXPECT_THROW(zalms::normalized(nonfinite), std::domain_error);
}

// ---------------------------------------------------------------------
// Univariate CDF
// ---------------------------------------------------------------------

TEST(NormalCdf, MatchesQuadratureOfTheDensity) {
    for (const double x : {-8.0, -4.0, -1.0, 0.0, 1.0, 4.0, 8.0}) {
        const auto integral =
            zalms::integrate_adaptive(zalms::std_normal_pdf, -12.0, x, 1e-13);
        EXPECT_NEAR(zalms::std_normal_cdf(x), integral.value, 1e-10) << "x=" << x;
    }
}

TEST(NormalCdf, ComplementIdentityAndLimits) {
    for (const double x : {0.0, 0.3, 1.0, 2.5, 6.0}) {
        EXPECT_NEAR(zalms::std_normal_cdf(x) + zalms::std_normal_cdf(-x), 1.0, 1e-15);
    }
    EXPECT_DOUBLE_EQ(zalms::std_normal_cdf(0.0), 0.5);
    EXPECT_EQ(zalms::std_normal_cdf(40.0), 1.0);
    EXPECT_EQ(zalms::std_normal_cdf(-40.0), 0.0);
    EXPECT_THROW(zalms::std_normal_cdf(std::nan("")), std::domain_error);
}

// ---------------------------------------------------------------------
// Bivariate CDF
// ---------------------------------------------------------------------

TEST(BivariateCdf, IndependentCaseFactorsExactly) {
    const Gaussian2 g{0.2, -0.4, 1.5, 0.7, 0.0};
    for (const double x1 : {-1.0, 0.0, 0.8}) {
        for (const double x2 : {-0.5, 0.1, 2.0}) {
            const double expected = zalms::std_normal_cdf((x1 - 0.2) / std::sqrt(1.5)) *
                                    zalms::std_normal_cdf((x2 + 0.4) / std::sqrt(0.7));
            EXPECT_NEAR(zalms::bivariate_normal_cdf(x1, x2, g), expected, 1e-12);
        }
    }
}

TEST(BivariateCdf, ZeroThresholdOrthantMatchesArcsineFormula) {
    for (const double r : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        const Gaussian2 g{0.0, 0.0, 1.0, 1.0, r};
        const double expected = 0.25 + std::asin(r) / (2.0 * M_PI);
        EXPECT_NEAR(zalms::bivariate_normal_cdf(0.0, 0.0, g), expected, 1e-9) << "r=" << r;
    }
}

TEST(BivariateCdf, SaturatesAtDistantThresholds) {
    const Gaussian2 g{0.0, 0.0, 1.0, 1.0, 0.3};
    EXPECT_NEAR(zalms::bivariate_normal_cdf(40.0, 40.0, g), 1.0, 1e-12);
    EXPECT_NEAR(zalms::bivariate_normal_cdf(-40.0, 2.0, g), 0.0, 1e-12);
    EXPECT_NEAR(zalms::bivariate_normal_cdf(40.0, 1.0, g),
                zalms::std_normal_cdf(1.0), 1e-9);
}

TEST(BivariateCdf, MonotoneInEachThreshold) {
    const Gaussian2 g{0.1, -0.2, 1.0, 2.0, -0.6};
    double prev = 0.0;
    for (double x = -4.0; x <= 4.0; x += 0.5) {
        const double cur = zalms::bivariate_normal_cdf(x, 0.7, g);
        EXPECT_GE(cur, prev - 1e-12);
        prev = cur;
    }
}

TEST(BivariateCdf, PerfectCorrelationUsesAnalyticLimit) {
    const Gaussian2 pos{0.0, 0.0, 1.0, 1.0, 1.0};
    // U = V: P(U <= a, U <= b) = Phi(min(a, b)).
    EXPECT_NEAR(zalms::bivariate_normal_cdf(0.5, -0.3, pos), zalms::std_normal_cdf(-0.3),
                1e-12);
    const Gaussian2 neg{0.0, 0.0, 1.0, 1.0, -1.0};
    // V = -U: P(U <= a, -U <= b) = max(0, Phi(a) - Phi(-b)).
    EXPECT_NEAR(zalms::bivariate_normal_cdf(1.0, 0.5, neg),
                zalms::std_normal_cdf(1.0) - zalms::std_normal_cdf(-0.5), 1e-12);
    EXPECT_NEAR(zalms::bivariate_normal_cdf(-1.0, -0.5, neg), 0.0, 1e-12);
}

TEST(BivariateCdf, DegenerateVariancesReduceToIndicators) {
    const Gaussian2 u_fixed{0.5, 0.0, 0.0, 1.0, 0.0};
    EXPECT_DOUBLE_EQ(zalms::bivariate_normal_cdf(1.0, 0.3, u_fixed),
                     zalms::std_normal_cdf(0.3));
    EXPECT_DOUBLE_EQ(zalms::bivariate_normal_cdf(0.4, 0.3, u_fixed), 0.0);

    const Gaussian2 both_fixed{0.5, -0.5, 0.0, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(zalms::bivariate_normal_cdf(0.6, 0.0, both_fixed), 1.0);
    EXPECT_DOUBLE_EQ(zalms::bivariate_normal_cdf(0.6, -0.6, both_fixed), 0.0);
}

TEST(BivariateCdf, AgreesWithNestedQuadratureOnGeneralCase) {
    // Independent high-precision check: integrate the conditional normal
    // CDF against the marginal density.
    const Gaussian2 g{0.3, -0.1, 1.2, 0.8, 0.55};
    const double x1 = 0.4;
    const double x2 = -0.2;
    const double sd_u = std::sqrt(g.var_u);
    const auto integrand = [&](double u) {
        const double cond_mean = g.mean_v + g.cov_uv / g.var_u * (u - g.mean_u);
        const double cond_var = g.var_v - g.cov_uv * g.cov_uv / g.var_u;
        return zalms::std_normal_pdf((u - g.mean_u) / sd_u) / sd_u *
               zalms::std_normal_cdf((x2 - cond_mean) / std::sqrt(cond_var));
    };
    const auto ref = zalms::integrate_adaptive(integrand, g.mean_u - 12.0 * sd_u, x1, 1e-12);
    EXPECT_NEAR(zalms::bivariate_normal_cdf(x1, x2, g), ref.value, 1e-9);
}

// ---------------------------------------------------------------------
// E{sgn u}
// ---------------------------------------------------------------------

TEST(SignMean, MatchesErrorFunctionValues) {
    EXPECT_DOUBLE_EQ(zalms::sign_mean({0.0, 1.0}), 0.0);
    EXPECT_NEAR(zalms::sign_mean({1.0, 1.0}), std::erf(M_SQRT1_2), 1e-14);
    EXPECT_NEAR(zalms::sign_mean({-2.0, 4.0}), -std::erf(M_SQRT1_2), 1e-14);
    EXPECT_NEAR(zalms::sign_mean({0.05, 0.0025}), std::erf(M_SQRT1_2), 1e-14);
}

TEST(SignMean, OddInTheMean) {
    for (const double mean : {0.1, 0.7, 2.0}) {
        EXPECT_NEAR(zalms::sign_mean({mean, 0.5}), -zalms::sign_mean({-mean, 0.5}), 1e-15);
    }
}

TEST(SignMean, DegenerateVarianceGivesDeterministicSign) {
    EXPECT_EQ(zalms::sign_mean({3.0, 0.0}), 1.0);
    EXPECT_EQ(zalms::sign_mean({-2.0, 0.0}), -1.0);
    EXPECT_EQ(zalms::sign_mean({0.0, 0.0}), 0.0);
    EXPECT_EQ(zalms::sign_mean({1.5, -1e-13}), 1.0); // round-off clamp
}

// ---------------------------------------------------------------------
// E{sgn u sgn v}
// ---------------------------------------------------------------------

TEST(SignProduct, ZeroMeanIndependentVanishes) {
    EXPECT_NEAR(zalms::sign_product_mean({0.0, 0.0, 1.0, 2.0, 0.0}), 0.0, 1e-12);
}

TEST(SignProduct, ZeroMeanCaseFollowsArcsineLaw) {
    // E{sgn u sgn v} = (2/pi) asin(rho) for centered pairs.
    for (const double rho : {-0.95, -0.5, 0.25, 0.5, 0.9}) {
        const Gaussian2 g{0.0, 0.0, 1.0, 1.0, rho};
        EXPECT_NEAR(zalms::sign_product_mean(g), 2.0 / M_PI * std::asin(rho), 1e-9)
            << "rho=" << rho;
    }
    // rho = 1/2 gives exactly 1/3.
    EXPECT_NEAR(zalms::sign_product_mean({0.0, 0.0, 1.0, 1.0, 0.5}), 1.0 / 3.0, 1e-9);
}

TEST(SignProduct, SymmetricUnderCoordinateSwap) {
    const Gaussian2 g{0.4, -0.7, 1.3, 0.6, -0.3};
    const Gaussian2 swapped{-0.7, 0.4, 0.6, 1.3, -0.3};
    EXPECT_NEAR(zalms::sign_product_mean(g), zalms::sign_product_mean(swapped), 1e-12);
}

TEST(SignProduct, FactorsWhenCovarianceVanishes) {
    const Gaussian2 g{0.6, -0.9, 0.8, 1.7, 0.0};
    const double expected =
        zalms::sign_mean({0.6, 0.8}) * zalms::sign_mean({-0.9, 1.7});
    EXPECT_NEAR(zalms::sign_product_mean(g), expected, 1e-12);
}

TEST(SignProduct, SaturatesForDistantMeans) {
    EXPECT_NEAR(zalms::sign_product_mean({5.0, 5.0, 1.0, 1.0, 0.0}), 1.0, 1e-5);
    EXPECT_NEAR(zalms::sign_product_mean({5.0, -5.0, 1.0, 1.0, 0.0}), -1.0, 1e-5);
}

TEST(SignProduct, DegenerateCoordinatesFactorOut) {
    // Deterministic u multiplies the marginal sign mean of v.
    EXPECT_NEAR(zalms::sign_product_mean({-2.0, 0.7, 0.0, 1.0, 0.0}),
                -zalms::sign_mean({0.7, 1.0}), 1e-14);
    EXPECT_NEAR(zalms::sign_product_mean({0.3, -1.0, 1.0, 0.0, 0.0}),
                -zalms::sign_mean({0.3, 1.0}), 1e-14);
    // Deterministically zero coordinate kills the product.
    EXPECT_EQ(zalms::sign_product_mean({0.0, 0.9, 0.0, 1.0, 0.0}), 0.0);
    EXPECT_EQ(zalms::sign_product_mean({0.0, 0.0, 0.0, 0.0, 0.0}), 0.0);
}

TEST(SignProduct, PerfectCorrelationIsExact) {
    EXPECT_NEAR(zalms::sign_product_mean({0.0, 0.0, 1.0, 1.0, 1.0}), 1.0, 1e-12);
    EXPECT_NEAR(zalms::sign_product_mean({0.0, 0.0, 1.0, 1.0, -1.0}), -1.0, 1e-12);
    // Same-variable diagonal at nonzero mean: E{sgn(u)^2} = 1.
    EXPECT_NEAR(zalms::sign_product_mean({0.8, 0.8, 0.25, 0.25, 0.25}), 1.0, 1e-12);
}

TEST(SignProduct, StaysWithinLogicalBounds) {
    for (const double mu : {-1.5, 0.0, 2.0}) {
        for (const double rho : {-1.0, -0.7, 0.0, 0.7, 1.0}) {
            const Gaussian2 g{mu, -0.5, 2.0, 0.5, rho * std::sqrt(2.0 * 0.5)};
            const double value = zalms::sign_product_mean(g);
            EXPECT_GE(value, -1.0);
            EXPECT_LE(value, 1.0);
        }
    }
}

// ---------------------------------------------------------------------
// E{u sgn v}
// ---------------------------------------------------------------------

TEST(CrossSignMoment, CenteredCaseIsScaledCorrelation) {
    // E{u sgn v} = sqrt(2/pi) cov / sd_v for centered pairs.
    EXPECT_NEAR(zalms::cross_sign_moment({0.0, 0.0, 1.0, 1.0, 0.5}),
                0.5 * kRoot2OverPi, 1e-12);
    EXPECT_NEAR(zalms::cross_sign_moment({0.0, 0.0, 2.0, 0.25, -0.2}),
                -0.2 / 0.5 * kRoot2OverPi, 1e-12);
}

TEST(CrossSignMoment, SingularDiagonalGivesFoldedGaussianMean) {
    // u = v (singular covariance): E{u sgn u} = E|u| = sd * sqrt(2/pi).
    EXPECT_NEAR(zalms::cross_sign_moment({0.0, 0.0, 1.0, 1.0, 1.0}), kRoot2OverPi, 1e-12);
    EXPECT_NEAR(zalms::cross_sign_moment({0.0, 0.0, 0.09, 0.09, 0.09}),
                0.3 * kRoot2OverPi, 1e-12);
}

TEST(CrossSignMoment, IndependentCaseFactors) {
    // cov = 0: E{u sgn v} = mean_u * E{sgn v}.
    EXPECT_NEAR(zalms::cross_sign_moment({2.0, 0.0, 1.0, 1.0, 0.0}), 0.0, 1e-12);
    EXPECT_NEAR(zalms::cross_sign_moment({2.0, 1.0, 1.0, 1.0, 0.0}),
                2.0 * zalms::sign_mean({1.0, 1.0}), 1e-10);
}

TEST(CrossSignMoment, DegenerateSignCoordinate) {
    EXPECT_DOUBLE_EQ(zalms::cross_sign_moment({1.5, -0.2, 1.0, 0.0, 0.0}), -1.5);
    EXPECT_DOUBLE_EQ(zalms::cross_sign_moment({1.5, 0.0, 1.0, 0.0, 0.0}), 0.0);
}

TEST(CrossSignMoment, DecomposedFormRequiresPositiveDefiniteCovariance) {
    EXPECT_THROW(zalms::cross_sign_moment_decomposed({0.0, 0.0, 1.0, 1.0, 1.0}),
                 std::domain_error);
    EXPECT_THROW(zalms::cross_sign_moment_decomposed({0.3, 0.3, 0.0, 1.0, 0.0}),
                 std::domain_error);
}

TEST(CrossSignMoment, DecomposedAgreesWithDirectForm) {
    // The assembled (precision-matrix) expression and the simplified direct
    // expression are algebraically identical on positive-definite inputs.
    double worst = 0.0;
    for (const double mu : {-1.2, 0.0, 0.5, 2.0}) {
        for (const double mv : {-0.8, 0.0, 1.5}) {
            for (const double rho : {-0.9, -0.4, 0.0, 0.4, 0.9}) {
                const Gaussian2 g{mu, mv, 1.7, 0.4, rho * std::sqrt(1.7 * 0.4)};
                const double direct = zalms::cross_sign_moment_direct(g);
                const double decomposed = zalms::cross_sign_moment_decomposed(g);
                worst = std::max(worst, std::abs(direct - decomposed));
            }
        }
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(CrossSignMoment, InjectedSignFlipChangesTheValue) {
    // The fault-injection flag must actually move the result, otherwise the
    // oracle suite's claim to detect the flipped variant proves nothing.
    const Gaussian2 g{0.3, 0.7, 1.0, 0.8, 0.2};
    const double good = zalms::cross_sign_moment_decomposed(g, false);
    const double flipped = zalms::cross_sign_moment_decomposed(g, true);
    EXPECT_GT(std::abs(good - flipped), 1e-4);
    EXPECT_NEAR(good, zalms::cross_sign_moment_direct(g), 1e-12);
}

// ---------------------------------------------------------------------
// Oracle self-tests
// ---------------------------------------------------------------------

TEST(QuadratureOracles, ReproduceKnownClosedForms) {
    const auto sm = zalms::quad_sign_mean({1.0, 1.0});
    EXPECT_NEAR(sm.value, std::erf(M_SQRT1_2), 1e-9);

    const auto sp = zalms::quad_sign_product({0.0, 0.0, 1.0, 1.0, 0.5});
    EXPECT_NEAR(sp.value, 1.0 / 3.0, 1e-8);

    const auto cm = zalms::quad_cross_moment({0.0, 0.0, 1.0, 1.0, 0.5});
    EXPECT_NEAR(cm.value, 0.5 * kRoot2OverPi, 1e-8);
}

TEST(MonteCarloOracles, AreDeterministicPerSeedAndStream) {
    const Gaussian2 g{0.2, -0.1, 1.0, 0.5, 0.3};
    const auto a = zalms::mc_cross_moment(g, 42, 5, 10000);
    const auto b = zalms::mc_cross_moment(g, 42, 5, 10000);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.error_estimate, b.error_estimate);
    const auto c = zalms::mc_cross_moment(g, 42, 6, 10000);
    EXPECT_NE(a.value, c.value);
}

TEST(MonteCarloOracles, AgreeWithClosedFormsWithinFourSigma) {
    const std::size_t n = 200000;
    const auto sm = zalms::mc_sign_mean({0.4, 0.9}, 7, 1, n);
    EXPECT_NEAR(sm.value, zalms::sign_mean({0.4, 0.9}), 4.0 * sm.error_estimate);

    const Gaussian2 g{0.3, -0.2, 1.1, 0.7, -0.4};
    const auto sp = zalms::mc_sign_product(g, 7, 2, n);
    EXPECT_NEAR(sp.value, zalms::sign_product_mean(g), 4.0 * sp.error_estimate);

    const auto cm = zalms::mc_cross_moment(g, 7, 3, n);
    EXPECT_NEAR(cm.value, zalms::cross_sign_moment(g), 4.0 * cm.error_estimate);
    EXPECT_GT(cm.error_estimate, 0.0);
    EXPECT_LT(cm.error_estimate, 0.01);
}

TEST(MonteCarloOracles, RejectDegenerateSampleCounts) {
    EXPECT_THROW(zalms::mc_sign_mean({0.0, 1.0}, 1, 0, 1), std::invalid_argument);
}

// ---------------------------------------------------------------------
// Whole-suite smoke runs (quadrature oracles only; the full Monte Carlo
// pass belongs to the acceptance gate)
// ---------------------------------------------------------------------

TEST(VerifySuite, QuadraturePassesOnTheFullGrid) {
    zalms::VerifyOptions opt;
    opt.mc_stride = 0;
    const auto report = zalms::verify_lemmas(opt);
    for (const auto& failure : report.failures) ADD_FAILURE() << failure;
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.sign_mean_tuples, 35u);
    EXPECT_EQ(report.pair_tuples, 336u);
    EXPECT_EQ(report.relaxed_tuples, 24u);
    EXPECT_EQ(report.mc_checks, 0u);
    EXPECT_GE(report.total_tuples(), 200u);
    EXPECT_LE(report.max_dev_sign_mean, zalms::verify_tolerances::quad_abs);
    EXPECT_LE(report.max_dev_sign_product, zalms::verify_tolerances::quad_abs);
    EXPECT_LE(report.max_dev_cross, zalms::verify_tolerances::quad_abs);
    EXPECT_LE(report.max_dev_equivalence, zalms::verify_tolerances::equivalence);
    EXPECT_LE(report.max_dev_relaxed, zalms::verify_tolerances::quad_relaxed);
}

TEST(VerifySuite, DetectsInjectedSignFlip) {
    zalms::VerifyOptions opt;
    opt.mc_stride = 0;
    opt.inject_sign_flip = true;
    const auto report = zalms::verify_lemmas(opt);
    EXPECT_FALSE(report.passed());
    EXPECT_GT(report.failures.size(), 0u);
}

} // namespace
