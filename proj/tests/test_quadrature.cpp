#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "zalms/errors.hpp"
#include "zalms/quadrature.hpp"

namespace {

using zalms::detail::GaussLegendre;

// Gauss-Legendre with N nodes integrates polynomials up to degree 2N-1
// exactly; this is the defining property and serves as the oracle for the
// Newton-iteration node construction (no tabulated nodes are used).
template <std::size_t N>
void check_monomial_exactness() {
    const auto& rule = GaussLegendre<N>::instance();
    for (std::size_t degree = 0; degree <= 2 * N - 1; ++degree) {
        double acc = 0.0;
        for (std::size_t k = 0; k < N; ++k)
            acc += rule.weight[k] * std::pow(rule.node[k], static_cast<double>(degree));
        const double exact = (degree % 2 == 0) ? 2.0 / static_cast<double>(degree + 1) : 0.0;
        EXPECT_NEAR(acc, exact, 1e-13) << "N=" << N << " degree=" << degree;
    }
}

TEST(GaussLegendreRule, FiveNodeRuleIsExactToDegreeNine) { check_monomial_exactness<5>(); }

TEST(GaussLegendreRule, TwentyNodeRuleIsExactToDegreeThirtyNine) {
    check_monomial_exactness<20>();
}

TEST(GaussLegendreRule, NodesSymmetricWeightsPositiveAndSumToTwo) {
    const auto& rule = GaussLegendre<20>::instance();
    double wsum = 0.0;
    for (std::size_t k = 0; k < 20; ++k) {
        EXPECT_GT(rule.weight[k], 0.0);
        wsum += rule.weight[k];
        EXPECT_NEAR(rule.node[k], -rule.node[19 - k], 1e-15);
        EXPECT_NEAR(rule.weight[k], rule.weight[19 - k], 1e-15);
        if (k > 0) {
            EXPECT_LT(rule.node[k - 1], rule.node[k]);
        }
    }
    EXPECT_NEAR(wsum, 2.0, 1e-14);
}

TEST(Gl20Panel, HandlesAffineMappingAndOrientation) {
    const auto f = [](double x) { return 3.0 * x * x; };
    EXPECT_NEAR(zalms::detail::gl20_panel(f, 1.0, 4.0), 63.0, 1e-11);
    EXPECT_NEAR(zalms::detail::gl20_panel(f, 4.0, 1.0), -63.0, 1e-11);
    EXPECT_NEAR(zalms::detail::gl20_panel([](double) { return 2.0; }, -5.0, 5.0), 20.0, 1e-12);
}

TEST(AdaptiveIntegration, SmoothIntegrandsConvergeTightly) {
    const auto exp_result =
        zalms::integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12);
    EXPECT_NEAR(exp_result.value, std::exp(1.0) - 1.0, 1e-12);
    EXPECT_GE(exp_result.panels, 1u);

    // Standard normal density over +-12 standard deviations.
    const auto gauss_result = zalms::integrate_adaptive(
        [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }, -12.0, 12.0,
        1e-12);
    EXPECT_NEAR(gauss_result.value, 1.0, 1e-10);
}

TEST(AdaptiveIntegration, SplitsAroundMildKink) {
    const auto res = zalms::integrate_adaptive([](double x) { return std::abs(x); }, -1.0, 1.0,
                                               1e-10);
    EXPECT_NEAR(res.value, 1.0, 1e-9);
    EXPECT_GT(res.panels, 1u);
}

TEST(AdaptiveIntegration, ErrorEstimateCoversTrueError) {
    const auto res = zalms::integrate_adaptive(
        [](double x) { return std::sin(10.0 * x) * std::exp(-x); }, 0.0, 3.0, 1e-10);
    const double exact =
        (10.0 - std::exp(-3.0) * (std::sin(30.0) + 10.0 * std::cos(30.0))) / 101.0;
    const double actual_error = std::abs(res.value - exact);
    EXPECT_LE(actual_error, std::max(res.error_estimate, 1e-13));
    EXPECT_NEAR(res.value, exact, 1e-10);
}

TEST(AdaptiveIntegration, EmptyIntervalIsZeroWithoutWork) {
    const auto res = zalms::integrate_adaptive([](double) { return 1e300; }, 2.0, 2.0, 1e-12);
    EXPECT_EQ(res.value, 0.0);
    EXPECT_EQ(res.error_estimate, 0.0);
    EXPECT_EQ(res.panels, 0u);
}

TEST(AdaptiveIntegration, RejectsNonPositiveTolerance) {
    EXPECT_THROW(zalms::integrate_adaptive([](double x) { return x; }, 0.0, 1.0, 0.0),
                 std::invalid_argument);
    EXPECT_THROW(zalms::integrate_adaptive([](double x) { return x; }, 0.0, 1.0, -1e-9),
                 std::invalid_argument);
}

TEST(AdaptiveIntegration, ThrowsWhenDepthIsExhausted) {
    // A step discontinuity at an irrational point cannot be resolved to
    // 1e-12 with only two halvings.
    const auto step = [](double x) { return x > 1.0 / 3.0 ? 1.0 : 0.0; };
    EXPECT_THROW(zalms::integrate_adaptive(step, 0.0, 1.0, 1e-12, 2), zalms::quadrature_error);
}

TEST(SegmentedIntegration, PinsBreakpointsAndSumsSegments) {
    // Placing the kink of |x| on a segment boundary makes each piece a
    // polynomial, so the result is tight.
    const auto res = zalms::integrate_adaptive_segmented(
        [](double x) { return std::abs(x); }, {-1.0, 0.0, 2.0}, 1e-12);
    EXPECT_NEAR(res.value, 2.5, 1e-12);
}

TEST(SegmentedIntegration, RequiresAtLeastTwoPoints) {
    EXPECT_THROW(zalms::integrate_adaptive_segmented([](double x) { return x; }, {1.0}, 1e-10),
                 std::invalid_argument);
    EXPECT_THROW(zalms::integrate_adaptive_segmented([](double x) { return x; }, {}, 1e-10),
                 std::invalid_argument);
}

} // namespace
