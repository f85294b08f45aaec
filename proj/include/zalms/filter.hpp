#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "zalms/linalg.hpp"
#include "zalms/sign.hpp"
#include "zalms/signals.hpp"

namespace zalms {

/**
 * The zero-attracting LMS adaptive filter: the plain LMS stochastic
 * gradient plus an l1-subgradient term pulling every nonzero weight toward
 * zero by attractor_gain per step.
 */

/// Algorithm parameters.  attractor_gain is derived as
/// step_size * reg_weight exactly; construct through make_algo_params so
/// the invariant holds.
struct AlgoParams {
    double step_size;      // gradient step (mu)
    double reg_weight;     // l1 regularization weight (lambda)
    double attractor_gain; // step_size * reg_weight (rho)
};

inline AlgoParams make_algo_params(double step_size, double reg_weight) {
    if (!std::isfinite(step_size) || !(step_size > 0.0))
        throw std::domain_error("make_algo_params: step size must be positive");
    if (!std::isfinite(reg_weight) || !(reg_weight >= 0.0))
        throw std::domain_error("make_algo_params: regularization weight must be >= 0");
    return {step_size, reg_weight, step_size * reg_weight};
}

/// Adaptive filter state: current weights and the iteration count.
struct FilterState {
    Vec w;
    std::uint64_t n = 0;
};

/// Result of one update: the advanced state and the a-priori error e_n.
struct FilterStep {
    FilterState state;
    double error;
};

/**
 * One zero-attracting LMS update:
 *
 *   e_n     = y_n - w_n . x_n
 *   w_{n+1} = w_n + step_size * e_n * x_n - attractor_gain * sgn(w_n)
 *
 * entrywise, with sgn(0) = 0 so weights already at zero receive no
 * attractor pull.  With reg_weight = 0 the attractor term is skipped
 * entirely and the update is bit-identical to plain LMS on the same
 * inputs.
 */
inline FilterStep za_lms_step(const FilterState& state, const Vec& x, double y,
                              const AlgoParams& p) {
    if (x.size() != state.w.size())
        throw std::invalid_argument("za_lms_step: dimension mismatch");
    if (!std::isfinite(y)) throw std::domain_error("za_lms_step: non-finite desired output");
    for (double xi : x)
        if (!std::isfinite(xi)) throw std::domain_error("za_lms_step: non-finite regressor");

    const double error = y - dot(state.w, x);
    if (!std::isfinite(error)) throw std::domain_error("za_lms_step: non-finite error");

    FilterStep out{FilterState{state.w, state.n + 1}, error};
    const double scaled_error = p.step_size * error;
    Vec& w = out.state.w;
    if (p.attractor_gain == 0.0) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += scaled_error * x[i];
    } else {
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = (w[i] + scaled_error * x[i]) - p.attractor_gain * sgn(w[i]);
    }
    return out;
}

/**
 * The l1-regularized mean-square cost at w, evaluated in closed form for
 * the stationary Gaussian input:
 *
 *   E{[y - w.x]^2} + reg_weight * ||w||_1
 *     = noise_var + (w - w_star)' Rx (w - w_star) + reg_weight * ||w||_1.
 *
 * Diagnostic only; the filter never evaluates its own cost.  Always at
 * least noise_var.
 */
inline double objective_value(const Vec& w, const PlantSpec& plant, const Mat& Rx,
                              double reg_weight) {
    if (w.size() != plant.w_star.size() || Rx.size() != w.size())
        throw std::invalid_argument("objective_value: dimension mismatch");
    Vec werr(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) werr[i] = w[i] - plant.w_star[i];
    return plant.noise_var + dot(werr, matvec(Rx, werr)) + reg_weight * l1_norm(w);
}

} // namespace zalms
