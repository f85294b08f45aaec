#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "zalms/gauss_moments.hpp"
#include "zalms/quadrature.hpp"
#include "zalms/rng.hpp"
#include "zalms/sign.hpp"

namespace zalms {

/**
 * Independent numerical estimates of the sign-moment expectations, used to
 * verify the closed forms.  Two families:
 *
 *  - quad_*: adaptive quadrature over the Gaussian density (nested 1-D
 *    passes for the bivariate moments, integrating the conditional
 *    distribution of u given v).  Sign discontinuities are pinned at panel
 *    boundaries; tails are truncated at 12 standard deviations (mass
 *    ~1e-33, far below the tolerances here).  Non-convergence raises
 *    quadrature_error -- never a silent value.
 *
 *  - mc_*: seeded Monte Carlo sampling, deterministic given the seed, with
 *    a standard-error estimate alongside the value.
 *
 * These deliberately share no code with the closed forms beyond the
 * univariate normal CDF/density.
 */
struct OracleEstimate {
    double value;
    double error_estimate;
};

namespace detail {

/// Integration breakpoints covering mean +/- 12 sd, optionally pinning the
/// origin (a sign discontinuity) at a panel boundary.
inline std::vector<double> gaussian_support(double mean, double sd, bool split_at_zero) {
    const double lo = mean - 12.0 * sd;
    const double hi = mean + 12.0 * sd;
    std::vector<double> points{lo};
    if (split_at_zero && lo < 0.0 && hi > 0.0) points.push_back(0.0);
    points.push_back(hi);
    return points;
}

inline double gaussian_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

} // namespace detail

/// Quadrature estimate of E{sgn u}.
inline OracleEstimate quad_sign_mean(const Gaussian1& g, double tol = 1e-10) {
    const double variance = clamp_variance(g.variance);
    if (variance == 0.0) return {sgn(g.mean), 0.0};
    const double sd = std::sqrt(variance);
    const auto integrand = [&](double u) {
        return sgn(u) * detail::gaussian_pdf(u, g.mean, sd);
    };
    const auto r = integrate_adaptive_segmented(
        integrand, detail::gaussian_support(g.mean, sd, true), tol);
    return {r.value, r.error_estimate};
}

namespace detail {

/// Shared nested-quadrature driver for the bivariate moments: integrates
/// sgn(v) * inner(v) * pdf(v) over v, where inner(v) is itself an adaptive
/// integral over the conditional distribution of u given v.
///
/// inner_kind selects the conditional integrand: the conditional
/// expectation of sgn(u) or of u itself.  A zero conditional variance
/// (singular covariance) collapses the inner integral to the conditional
/// mean path analytically, making the whole estimate a single 1-D
/// integral.
enum class ConditionalMoment { sign_of_u, u_itself };

inline OracleEstimate quad_conditional_sign_moment(const Gaussian2& input,
                                                   ConditionalMoment kind,
                                                   double tol) {
    const Gaussian2 g = normalized(input);

    // Degenerate v: sgn(v) is a constant factor.
    if (g.var_v == 0.0) {
        if (kind == ConditionalMoment::u_itself) return {g.mean_u * sgn(g.mean_v), 0.0};
        const auto u_part = quad_sign_mean(g.u_marginal(), tol);
        return {sgn(g.mean_v) * u_part.value, u_part.error_estimate};
    }
    // Degenerate u with nondegenerate v: u is the constant mean_u.
    if (g.var_u == 0.0 && kind == ConditionalMoment::sign_of_u) {
        const auto v_part = quad_sign_mean(g.v_marginal(), tol);
        return {sgn(g.mean_u) * v_part.value, v_part.error_estimate};
    }

    const double sd_v = std::sqrt(g.var_v);
    const double slope = g.cov_uv / g.var_v; // d E{u|v} / dv
    const double conditional_var = clamp_variance(g.var_u - g.cov_uv * slope);
    const double conditional_sd = std::sqrt(conditional_var);

    const double inner_tol = 0.25 * tol;
    const auto conditional_value = [&](double v) {
        const double mean_u_given_v = g.mean_u + slope * (v - g.mean_v);
        if (kind == ConditionalMoment::u_itself) {
            if (conditional_sd == 0.0) return mean_u_given_v;
            const auto integrand = [&](double u) {
                return u * gaussian_pdf(u, mean_u_given_v, conditional_sd);
            };
            return integrate_adaptive_segmented(
                       integrand, gaussian_support(mean_u_given_v, conditional_sd, false),
                       inner_tol * std::max(1.0, std::abs(mean_u_given_v)))
                .value;
        }
        if (conditional_sd == 0.0) return sgn(mean_u_given_v);
        const auto integrand = [&](double u) {
            return sgn(u) * gaussian_pdf(u, mean_u_given_v, conditional_sd);
        };
        return integrate_adaptive_segmented(
                   integrand, gaussian_support(mean_u_given_v, conditional_sd, true),
                   inner_tol)
            .value;
    };

    const auto outer_integrand = [&](double v) {
        return sgn(v) * conditional_value(v) * gaussian_pdf(v, g.mean_v, sd_v);
    };
    const auto r = integrate_adaptive_segmented(
        outer_integrand, gaussian_support(g.mean_v, sd_v, true), 0.5 * tol);
    // The inner tolerance integrates against a unit-mass density, so it
    // adds at most inner_tol (scaled) to the overall uncertainty.
    return {r.value, r.error_estimate + inner_tol};
}

} // namespace detail

/// Quadrature estimate of E{sgn u * sgn v}.
inline OracleEstimate quad_sign_product(const Gaussian2& g, double tol = 1e-9) {
    return detail::quad_conditional_sign_moment(g, detail::ConditionalMoment::sign_of_u, tol);
}

/// Quadrature estimate of E{u * sgn v}.
inline OracleEstimate quad_cross_moment(const Gaussian2& g, double tol = 1e-9) {
    return detail::quad_conditional_sign_moment(g, detail::ConditionalMoment::u_itself, tol);
}

namespace detail {

/// Draw (u, v) with the moments of g from two standard normal inputs.
struct GaussianPairSampler {
    explicit GaussianPairSampler(const Gaussian2& input) : g(normalized(input)) {
        sd_u = std::sqrt(g.var_u);
        sd_v = std::sqrt(g.var_v);
        const double denom = sd_u * sd_v;
        double r = denom > 0.0 ? g.cov_uv / denom : 0.0;
        r = std::min(1.0, std::max(-1.0, r));
        v_coeff_shared = sd_v * r;
        v_coeff_fresh = sd_v * std::sqrt(std::max(0.0, 1.0 - r * r));
    }

    std::pair<double, double> operator()(GaussianStream& stream) const {
        const double s = stream.next();
        const double t = stream.next();
        return {g.mean_u + sd_u * s, g.mean_v + v_coeff_shared * s + v_coeff_fresh * t};
    }

    Gaussian2 g;
    double sd_u, sd_v, v_coeff_shared, v_coeff_fresh;
};

template <class Draw>
OracleEstimate mc_mean(std::uint64_t master_seed, std::uint64_t stream_id,
                       std::size_t samples, const Draw& draw) {
    if (samples < 2) throw std::invalid_argument("monte carlo oracle: need at least 2 samples");
    GaussianStream stream(master_seed, stream_id);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double x = draw(stream);
        const double delta = x - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (x - mean);
    }
    const double n = static_cast<double>(samples);
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

} // namespace detail

/// Monte Carlo estimate of E{sgn u}; error_estimate is the standard error.
inline OracleEstimate mc_sign_mean(const Gaussian1& g, std::uint64_t master_seed,
                                   std::uint64_t stream_id, std::size_t samples) {
    const double sd = std::sqrt(clamp_variance(g.variance));
    return detail::mc_mean(master_seed, stream_id, samples, [&](GaussianStream& s) {
        return sgn(g.mean + sd * s.next());
    });
}

/// Monte Carlo estimate of E{sgn u * sgn v}.
inline OracleEstimate mc_sign_product(const Gaussian2& g, std::uint64_t master_seed,
                                      std::uint64_t stream_id, std::size_t samples) {
    const detail::GaussianPairSampler sampler(g);
    return detail::mc_mean(master_seed, stream_id, samples, [&](GaussianStream& s) {
        const auto [u, v] = sampler(s);
        return sgn(u) * sgn(v);
    });
}

/// Monte Carlo estimate of E{u * sgn v}.
inline OracleEstimate mc_cross_moment(const Gaussian2& g, std::uint64_t master_seed,
                                      std::uint64_t stream_id, std::size_t samples) {
    const detail::GaussianPairSampler sampler(g);
    return detail::mc_mean(master_seed, stream_id, samples, [&](GaussianStream& s) {
        const auto [u, v] = sampler(s);
        return u * sgn(v);
    });
}

} // namespace zalms
