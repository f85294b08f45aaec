#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "zalms/quadrature.hpp"
#include "zalms/sign.hpp"

namespace zalms {

/**
 * Closed-form expectations of sign nonlinearities of (possibly nonzero
 * mean) Gaussian variables, together with the univariate and bivariate
 * normal CDFs they are built from.
 *
 * Degenerate (zero-variance) distributions are handled by explicit limit
 * branches rather than variance flooring, so deterministic states evaluate
 * exactly.  Small negative variances and slightly out-of-range covariances
 * produced by floating-point cancellation are clamped within documented
 * tolerances; anything worse is rejected.
 */

/// Scalar Gaussian N(mean, variance); variance 0 denotes a deterministic
/// value.
struct Gaussian1 {
    double mean;
    double variance;
};

/// Pair of jointly Gaussian variables (u, v) with means, variances, and
/// covariance.  cov_uv^2 <= var_u * var_v (PSD); equality marks the
/// perfectly correlated (singular) case.
struct Gaussian2 {
    double mean_u;
    double mean_v;
    double var_u;
    double var_v;
    double cov_uv;

    Gaussian1 u_marginal() const { return {mean_u, var_u}; }
    Gaussian1 v_marginal() const { return {mean_v, var_v}; }
};

namespace moment_tolerances {
/// Negative variances at least this small (from cancellation) clamp to 0.
inline constexpr double variance_clamp = 1e-12;
/// Covariances past the PSD boundary by at most this clamp onto it, and
/// correlations within this of +/-1 clamp to exactly +/-1.
inline constexpr double covariance_clamp = 1e-10;
/// Correlations this close to +/-1 use the analytic perfect-correlation
/// limits of the bivariate CDF.
inline constexpr double correlation_degenerate = 1e-12;
} // namespace moment_tolerances

/// Clamp a slightly negative variance to zero; reject anything below the
/// tolerance as a genuine inconsistency.
inline double clamp_variance(double variance) {
    if (!std::isfinite(variance))
        throw std::domain_error("clamp_variance: non-finite variance");
    if (variance >= 0.0) return variance;
    if (variance >= -moment_tolerances::variance_clamp) return 0.0;
    throw std::domain_error("clamp_variance: variance " + std::to_string(variance) +
                            " below round-off tolerance");
}

/// Validate and tidy a Gaussian pair: variances clamped at zero, covariance
/// clamped onto the PSD boundary when within tolerance.  Throws
/// std::domain_error for violations beyond tolerance or non-finite fields.
inline Gaussian2 normalized(const Gaussian2& g) {
    if (!std::isfinite(g.mean_u) || !std::isfinite(g.mean_v) || !std::isfinite(g.cov_uv))
        throw std::domain_error("Gaussian2: non-finite parameter");
    Gaussian2 out = g;
    out.var_u = clamp_variance(g.var_u);
    out.var_v = clamp_variance(g.var_v);
    const double bound = std::sqrt(out.var_u * out.var_v);
    if (std::abs(out.cov_uv) > bound) {
        if (std::abs(out.cov_uv) - bound <= moment_tolerances::covariance_clamp)
            out.cov_uv = (out.cov_uv > 0.0 ? bound : -bound);
        else
            throw std::domain_error("Gaussian2: covariance " + std::to_string(g.cov_uv) +
                                    " violates positive semidefiniteness (bound " +
                                    std::to_string(bound) + ")");
    }
    return out;
}

/// Standard normal density.
inline double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

/// Standard normal CDF via the complementary error function; absolute
/// accuracy well below 1e-12 everywhere.
inline double std_normal_cdf(double x) {
    if (!std::isfinite(x)) throw std::domain_error("std_normal_cdf: non-finite argument");
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

namespace detail {

/**
 * CDF of the standard bivariate normal, P(Z1 <= z1, Z2 <= z2) with unit
 * marginals and correlation r.
 *
 * Uses the single-integral reduction (Drezner-Wesolowsky): the CDF equals
 * Phi(z1)Phi(z2) plus an integral of a smooth exponential over
 * [0, asin r].  Moderate correlations (|r| <= 0.925) use one fixed
 * 20-point Gauss-Legendre panel, which is exact to ~1e-14 there; stronger
 * correlations integrate the same integrand adaptively; |r| within 1e-12
 * of +/-1 uses the analytic perfectly-correlated limits.
 */
inline double standard_bvn_cdf(double z1, double z2, double r) {
    if (!std::isfinite(z1) || !std::isfinite(z2))
        throw std::domain_error("standard_bvn_cdf: non-finite argument");
    if (!(r >= -1.0 && r <= 1.0))
        throw std::domain_error("standard_bvn_cdf: correlation outside [-1, 1]");

    if (1.0 - std::abs(r) <= moment_tolerances::correlation_degenerate) {
        if (r > 0.0) return std_normal_cdf(std::min(z1, z2));
        return std::max(0.0, std_normal_cdf(z1) + std_normal_cdf(z2) - 1.0);
    }
    const double base = std_normal_cdf(z1) * std_normal_cdf(z2);
    if (r == 0.0) return base;

    const double quad_sum = z1 * z1 + z2 * z2;
    const double cross = 2.0 * z1 * z2;
    const auto integrand = [&](double theta) {
        const double s = std::sin(theta);
        const double c2 = std::cos(theta) * std::cos(theta);
        return std::exp(-(quad_sum - cross * s) / (2.0 * c2));
    };

    const double upper = std::asin(r);
    double integral;
    if (std::abs(r) <= 0.925) {
        integral = detail::gl20_panel(integrand, 0.0, upper);
    } else {
        // Pin the moderate/strong split at a panel boundary and refine
        // adaptively toward the increasingly peaked upper end.
        const double split = std::copysign(std::asin(0.925), r);
        integral = integrate_adaptive_segmented(integrand, {0.0, split, upper}, 1e-12, 48).value;
    }
    return std::clamp(base + integral / (2.0 * M_PI), 0.0, 1.0);
}

} // namespace detail

/**
 * Bivariate normal CDF P(U <= x1, V <= x2) for the pair described by g.
 *
 * Degenerate variances reduce analytically (a zero-variance coordinate
 * contributes an indicator); correlations within tolerance of +/-1 use the
 * perfect-correlation limits.  Absolute accuracy 1e-7 or better for
 * |correlation| <= 0.999.
 */
inline double bivariate_normal_cdf(double x1, double x2, const Gaussian2& g) {
    if (!std::isfinite(x1) || !std::isfinite(x2))
        throw std::domain_error("bivariate_normal_cdf: non-finite argument");
    const Gaussian2 n = normalized(g);

    if (n.var_u == 0.0 && n.var_v == 0.0)
        return (n.mean_u <= x1 && n.mean_v <= x2) ? 1.0 : 0.0;
    if (n.var_u == 0.0)
        return n.mean_u <= x1
                   ? std_normal_cdf((x2 - n.mean_v) / std::sqrt(n.var_v))
                   : 0.0;
    if (n.var_v == 0.0)
        return n.mean_v <= x2
                   ? std_normal_cdf((x1 - n.mean_u) / std::sqrt(n.var_u))
                   : 0.0;

    const double sd_u = std::sqrt(n.var_u);
    const double sd_v = std::sqrt(n.var_v);
    double r = n.cov_uv / (sd_u * sd_v);
    if (std::abs(r) > 1.0) {
        // Round-off from the two square roots; the normalization above
        // already bounded the covariance.
        r = (r > 0.0 ? 1.0 : -1.0);
    }
    return detail::standard_bvn_cdf((x1 - n.mean_u) / sd_u, (x2 - n.mean_v) / sd_v, r);
}

/**
 * E{sgn u} for u ~ N(mean, variance): 1 - 2*Phi(-mean/sd), with the
 * deterministic limit sgn(mean) at zero variance.
 */
inline double sign_mean(const Gaussian1& g) {
    if (!std::isfinite(g.mean)) throw std::domain_error("sign_mean: non-finite mean");
    const double variance = clamp_variance(g.variance);
    if (variance == 0.0) return sgn(g.mean);
    return 1.0 - 2.0 * std_normal_cdf(-g.mean / std::sqrt(variance));
}

/**
 * E{sgn u * sgn v} for jointly Gaussian (u, v).
 *
 * Nondegenerate pairs evaluate the four-orthant CDF combination
 *   Phi2(-mu) + Phi2(+mu) - Phi2bar(u flipped) - Phi2bar(v flipped),
 * where the flipped terms use the sign-reversed covariance.  Zero-variance
 * coordinates factor out as deterministic signs.  Symmetric in (u, v).
 */
inline double sign_product_mean(const Gaussian2& g) {
    const Gaussian2 n = normalized(g);

    if (n.var_u == 0.0 && n.var_v == 0.0) return sgn(n.mean_u) * sgn(n.mean_v);
    if (n.var_u == 0.0) return sgn(n.mean_u) * sign_mean(n.v_marginal());
    if (n.var_v == 0.0) return sgn(n.mean_v) * sign_mean(n.u_marginal());

    const double sd_u = std::sqrt(n.var_u);
    const double sd_v = std::sqrt(n.var_v);
    double r = n.cov_uv / (sd_u * sd_v);
    r = std::clamp(r, -1.0, 1.0);
    const double zu = n.mean_u / sd_u;
    const double zv = n.mean_v / sd_v;

    const double both_negative = detail::standard_bvn_cdf(-zu, -zv, r);
    const double both_positive = detail::standard_bvn_cdf(zu, zv, r);
    const double u_pos_v_neg = detail::standard_bvn_cdf(zu, -zv, -r);
    const double u_neg_v_pos = detail::standard_bvn_cdf(-zu, zv, -r);
    return std::clamp(both_negative + both_positive - u_pos_v_neg - u_neg_v_pos,
                      -1.0, 1.0);
}

/**
 * E{u * sgn v} in the direct closed form
 *   mean_u * (1 - 2*Phi(-mean_v/sd_v)) + (cov/sd_v) * sqrt(2/pi) * exp(-mean_v^2 / (2 var_v)).
 *
 * Valid for any var_v > 0, including a singular (perfectly correlated)
 * covariance; var_v = 0 degenerates to mean_u * sgn(mean_v).
 */
inline double cross_sign_moment_direct(const Gaussian2& g) {
    const Gaussian2 n = normalized(g);
    if (!std::isfinite(n.mean_u)) throw std::domain_error("cross_sign_moment: non-finite mean");
    if (n.var_v == 0.0) return n.mean_u * sgn(n.mean_v);
    const double sd_v = std::sqrt(n.var_v);
    return n.mean_u * (1.0 - 2.0 * std_normal_cdf(-n.mean_v / sd_v)) +
           (n.cov_uv / sd_v) * std::sqrt(2.0 / M_PI) *
               std::exp(-0.5 * n.mean_v * n.mean_v / n.var_v);
}

/**
 * E{u * sgn v} assembled from the precision-matrix decomposition: with
 * inverse covariance [[a, c], [c, b]] and delta = b - c^2/a, the moment is
 * the prefactor 1/sqrt(2*pi*a*det) times the difference of a constant-term
 * integral and a folded-Gaussian-mean integral.  Requires a strictly
 * positive-definite covariance.
 *
 * flip_constant_term_cdf_sign reproduces a plausible transcription error
 * (negating the CDF argument inside the constant-term integral).  It exists
 * solely so the verification suite can prove, by fault injection, that its
 * oracle comparison detects exactly this mistake.  Production callers leave
 * it false.
 */
inline double cross_sign_moment_decomposed(const Gaussian2& g,
                                           bool flip_constant_term_cdf_sign = false) {
    const Gaussian2 n = normalized(g);
    const double det = n.var_u * n.var_v - n.cov_uv * n.cov_uv;
    if (!(det > 0.0))
        throw std::domain_error(
            "cross_sign_moment_decomposed: covariance must be positive definite");

    const double a = n.var_v / det;
    const double b = n.var_u / det;
    const double c = -n.cov_uv / det;
    const double delta = b - (c * c) / a;
    const double sqrt_delta = std::sqrt(delta);
    const double prefactor = 1.0 / std::sqrt(2.0 * M_PI * a * det);

    const double cdf_arg = flip_constant_term_cdf_sign ? n.mean_v * sqrt_delta
                                                       : -n.mean_v * sqrt_delta;
    const double constant_term = (n.mean_u + (c / a) * n.mean_v) *
                                 std::sqrt(2.0 * M_PI / delta) *
                                 (1.0 - 2.0 * std_normal_cdf(cdf_arg));
    const double folded_term =
        (c / a) * std::sqrt(2.0 * M_PI / delta) *
        (std::sqrt(2.0 / (delta * M_PI)) * std::exp(-0.5 * n.mean_v * n.mean_v * delta) +
         n.mean_v * (1.0 - 2.0 * std_normal_cdf(-n.mean_v * sqrt_delta)));
    return prefactor * (constant_term - folded_term);
}

/**
 * E{u * sgn v}: primary entry point.  Positive-definite covariances take
 * the precision-matrix decomposition; singular and near-singular pairs
 * (needed for the perfectly correlated diagonal of the analytic model)
 * fall back to the equivalent direct form, which stays well-conditioned
 * there.  The two branches agree to 1e-10 wherever both apply -- the
 * verification suite checks that equivalence.
 */
inline double cross_sign_moment(const Gaussian2& g) {
    const Gaussian2 n = normalized(g);
    if (n.var_v == 0.0) return n.mean_u * sgn(n.mean_v);
    const double det = n.var_u * n.var_v - n.cov_uv * n.cov_uv;
    if (det > 1e-12 * n.var_u * n.var_v) return cross_sign_moment_decomposed(n);
    return cross_sign_moment_direct(n);
}

} // namespace zalms
