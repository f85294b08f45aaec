#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "zalms/errors.hpp"

namespace zalms {

/// Outcome of an adaptive integration: the value, a conservative absolute
/// error estimate (sum of accepted panel discrepancies), and the number of
/// evaluated panels.
struct QuadratureResult {
    double value;
    double error_estimate;
    std::size_t panels;
};

namespace detail {

/**
 * Gauss-Legendre abscissae/weights on [-1, 1], computed once by Newton
 * iteration on the Legendre polynomial.  Computing the nodes at runtime
 * (instead of pasting decimal tables) keeps the rule verifiable: an
 * N-point rule must integrate polynomials up to degree 2N-1 exactly, which
 * the unit tests assert.
 */
template <int N>
struct GaussLegendre {
    std::array<double, N> node{};
    std::array<double, N> weight{};

    GaussLegendre() {
        static_assert(N >= 2);
        const int half = (N + 1) / 2;
        for (int i = 0; i < half; ++i) {
            // Chebyshev-based initial guess for the i-th positive root.
            double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
            double derivative = 0.0;
            for (int iter = 0; iter < 64; ++iter) {
                // Evaluate P_N and P_{N-1} by the three-term recurrence.
                double p_cur = 1.0;  // P_0
                double p_prev = 0.0; // P_{-1}
                for (int j = 0; j < N; ++j) {
                    const double p_old = p_prev;
                    p_prev = p_cur;
                    p_cur = ((2.0 * j + 1.0) * x * p_prev - j * p_old) / (j + 1.0);
                }
                derivative = N * (x * p_cur - p_prev) / (x * x - 1.0);
                const double step = p_cur / derivative;
                x -= step;
                if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
            }
            node[i] = -x;
            node[N - 1 - i] = x;
            weight[i] = weight[N - 1 - i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
        }
    }

    static const GaussLegendre& instance() {
        static const GaussLegendre rule;
        return rule;
    }
};

/// Fixed 20-point Gauss-Legendre evaluation over [a, b] (sign-aware: a > b
/// yields the negated integral).
template <class F>
double gl20_panel(const F& f, double a, double b) {
    const auto& rule = GaussLegendre<20>::instance();
    const double center = 0.5 * (a + b);
    const double halfwidth = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = 0; k < 20; ++k)
        sum += rule.weight[k] * f(center + halfwidth * rule.node[k]);
    return sum * halfwidth;
}

template <class F>
QuadratureResult integrate_panel(const F& f, double a, double b, double whole,
                                 double tol, int depth_left) {
    const double mid = 0.5 * (a + b);
    const double left = gl20_panel(f, a, mid);
    const double right = gl20_panel(f, mid, b);
    const double refined = left + right;
    const double discrepancy = std::abs(refined - whole);
    if (discrepancy <= tol) return {refined, discrepancy, 2};
    if (depth_left == 0)
        throw quadrature_error(
            "integrate_adaptive: subdivision budget exhausted over [" +
            std::to_string(a) + ", " + std::to_string(b) +
            "] (residual error " + std::to_string(discrepancy) + ")");
    const auto l = integrate_panel(f, a, mid, left, 0.5 * tol, depth_left - 1);
    const auto r = integrate_panel(f, mid, b, right, 0.5 * tol, depth_left - 1);
    return {l.value + r.value, l.error_estimate + r.error_estimate,
            l.panels + r.panels};
}

} // namespace detail

/**
 * Adaptive integration of f over [a, b] to absolute tolerance abs_tol.
 *
 * Panels are accepted when halving them changes the 20-point
 * Gauss-Legendre value by at most the panel's tolerance share; otherwise
 * they are split recursively.  Non-convergence within max_depth halvings
 * raises quadrature_error -- never a silently inaccurate value.
 */
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    double abs_tol, int max_depth = 40) {
    if (!(abs_tol > 0.0))
        throw std::invalid_argument("integrate_adaptive: tolerance must be positive");
    if (a == b) return {0.0, 0.0, 0};
    const double whole = detail::gl20_panel(f, a, b);
    auto result = detail::integrate_panel(f, a, b, whole, abs_tol, max_depth);
    ++result.panels;
    return result;
}

/**
 * Adaptive integration over consecutive segments
 * [points[0], points[1]], ..., sharing the tolerance equally.  Use the
 * interior points to pin known kinks or discontinuities (e.g. the origin
 * for sign integrands) at panel boundaries, where they cost nothing.
 */
template <class F>
QuadratureResult integrate_adaptive_segmented(const F& f,
                                              const std::vector<double>& points,
                                              double abs_tol, int max_depth = 40) {
    if (points.size() < 2)
        throw std::invalid_argument("integrate_adaptive_segmented: need at least two points");
    const double per_segment = abs_tol / static_cast<double>(points.size() - 1);
    QuadratureResult total{0.0, 0.0, 0};
    for (std::size_t s = 0; s + 1 < points.size(); ++s) {
        const auto part = integrate_adaptive(f, points[s], points[s + 1], per_segment, max_depth);
        total.value += part.value;
        total.error_estimate += part.error_estimate;
        total.panels += part.panels;
    }
    return total;
}

} // namespace zalms
