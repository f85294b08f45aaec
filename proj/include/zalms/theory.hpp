#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "zalms/errors.hpp"
#include "zalms/filter.hpp"
#include "zalms/gauss_moments.hpp"
#include "zalms/linalg.hpp"
#include "zalms/signals.hpp"

namespace zalms {

/**
 * Transient-model engine for the zero-attracting LMS filter.
 *
 * The engine iterates coupled recursions on the weight-error moments
 *   m_n = E{werr_n}   and   K_n = E{werr_n werr_n'},
 * driven by closed-form Gaussian sign moments: entrywise sign means for
 * the mean recursion, and sign-product / weight-sign cross moments for the
 * second-moment recursion.  Every expectation consumed at step n is
 * evaluated at the time-n moments; both states then advance together.
 *
 * The closed form of the fourth-order input moment assumes a zero-mean
 * Gaussian regressor, which the AR(1) input model guarantees.
 *
 * ModelKind::exact evaluates the pairwise sign moments from the joint
 * (pairwise Gaussian) distribution.  ModelKind::baseline reproduces the
 * coarser prior-practice model that replaces every sign-coupled
 * expectation by the product of the individual expectations:
 * E{sgn w sgn w'} becomes s s' and E{werr sgn w'} becomes m s' with
 * s = E{sgn w}.  The factorization is harmless for independent
 * off-diagonal entries but discards each weight's coupling to its own
 * sign -- in particular the shrinkage moment E{werr_i sgn w_i}, whose
 * folded-Gaussian part drives the attractor's steady-state behavior --
 * which is what gives the baseline its large bias.
 */

/// Which second-moment model to run.
enum class ModelKind { exact, baseline };

inline const char* to_string(ModelKind kind) {
    return kind == ModelKind::exact ? "exact" : "baseline";
}

/// Coupled moment state: mean weight-error m, second moment K, iteration n.
struct TheoryState {
    Vec m;
    Mat K;
    std::uint64_t n = 0;
};

/// One emitted point of the theoretical learning curve.  mse is constructed
/// as noise_var + emse, so mse - emse recovers the noise floor exactly.
struct CurvePoint {
    std::uint64_t n;
    double mse;
    double emse;
    Vec m;
};

/// Moment state for a deterministic start at weights w0 (default all-zero):
/// m = w0 - w_star and K = m m', a zero-variance (exactly known) state.
inline TheoryState initial_theory_state(const PlantSpec& plant, const Vec& w0 = {}) {
    plant.validate();
    const std::size_t L = plant.length();
    if (!w0.empty() && w0.size() != L)
        throw std::invalid_argument("initial_theory_state: w0 dimension mismatch");
    Vec m(L);
    for (std::size_t i = 0; i < L; ++i)
        m[i] = (w0.empty() ? 0.0 : w0[i]) - plant.w_star[i];
    return {m, outer(m, m), 0};
}

namespace detail {

/// Central variance of entry i: K_ii - m_i^2, clamped at zero within
/// round-off tolerance.
inline double central_variance(const TheoryState& state, std::size_t i) {
    const double v = state.K(i, i) - state.m[i] * state.m[i];
    if (v >= 0.0) return v;
    if (v >= -moment_tolerances::variance_clamp) return 0.0;
    throw moment_error("theory state: negative marginal variance " + std::to_string(v) +
                       " at entry " + std::to_string(i));
}

/// Central covariance of entries (i, j), clamped onto the PSD boundary
/// when within tolerance.
inline double central_covariance(const TheoryState& state, std::size_t i, std::size_t j,
                                 double var_i, double var_j) {
    double cov = state.K(i, j) - state.m[i] * state.m[j];
    const double bound = std::sqrt(var_i * var_j);
    if (std::abs(cov) > bound) {
        if (std::abs(cov) - bound <= moment_tolerances::covariance_clamp)
            cov = (cov > 0.0 ? bound : -bound);
        else
            throw moment_error("theory state: covariance " + std::to_string(cov) +
                               " at (" + std::to_string(i) + ", " + std::to_string(j) +
                               ") violates positive semidefiniteness (bound " +
                               std::to_string(bound) + ")");
    }
    return cov;
}

} // namespace detail

/// Scalar Gaussian law of weight entry i implied by the state: the
/// weight-error moments shifted by the true weight.
inline Gaussian1 marginal_of(const TheoryState& state, std::size_t i, const Vec& w_star) {
    if (i >= state.m.size() || state.m.size() != w_star.size())
        throw std::invalid_argument("marginal_of: index out of range");
    return {w_star[i] + state.m[i], detail::central_variance(state, i)};
}

/// Joint Gaussian law of weight entries (i, j) implied by the state.  The
/// second-order parameters are central moments, invariant to the w_star
/// shift of the means.
inline Gaussian2 pair_of(const TheoryState& state, std::size_t i, std::size_t j,
                         const Vec& w_star) {
    if (i == j) throw std::invalid_argument("pair_of: indices must differ");
    if (i >= state.m.size() || j >= state.m.size() || state.m.size() != w_star.size())
        throw std::invalid_argument("pair_of: index out of range");
    const double var_i = detail::central_variance(state, i);
    const double var_j = detail::central_variance(state, j);
    return {w_star[i] + state.m[i], w_star[j] + state.m[j], var_i, var_j,
            detail::central_covariance(state, i, j, var_i, var_j)};
}

/// Entrywise expected signs of the weights, E{sgn(w_star + werr)}.
inline Vec sign_mean_vector(const TheoryState& state, const Vec& w_star) {
    Vec s(state.m.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = sign_mean(marginal_of(state, i, w_star));
    return s;
}

/**
 * Mean recursion: m <- m - step_size * (Rx m) - attractor_gain * E{sgn w}.
 * With attractor_gain = 0 the sign machinery is never evaluated and the
 * update is exactly the classical LMS mean recursion.
 */
inline Vec step_mean(const TheoryState& state, const Mat& Rx, const AlgoParams& p,
                     const Vec& w_star) {
    const Vec drift = matvec(Rx, state.m);
    Vec next(state.m.size());
    if (p.attractor_gain == 0.0) {
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = state.m[i] - p.step_size * drift[i];
        return next;
    }
    const Vec s = sign_mean_vector(state, w_star);
    for (std::size_t i = 0; i < next.size(); ++i)
        next[i] = state.m[i] - p.step_size * drift[i] - p.attractor_gain * s[i];
    return next;
}

/**
 * Fourth-order input moment E{x x' werr werr' x x'} for zero-mean Gaussian
 * x ~ N(0, Rx) independent of werr with second moment K (Isserlis
 * factorization): 2 Rx K Rx + tr{Rx K} Rx.  Products associate as
 * Rx * (K * Rx).
 */
inline Mat gaussian_fourth_moment(const Mat& K, const Mat& Rx) {
    detail::require_same_size(K, Rx, "gaussian_fourth_moment");
    const Mat inner = matmul(Rx, matmul(K, Rx));
    const double trace = trace_of_product(Rx, K);
    const std::size_t L = K.size();
    Mat out(L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j)
            out(i, j) = 2.0 * inner(i, j) + trace * Rx(i, j);
    return out;
}

/**
 * Sign-product matrix E{sgn(w) sgn(w)'} at the state's weight law.
 *
 * Exact kind: diagonal entries are 1 whenever the weight is not
 * deterministically zero (sgn^2 = 1 almost surely), with the
 * deterministic-zero case -- the exact all-zero initialization --
 * contributing 0; off-diagonals evaluate the pairwise joint sign-product
 * moment.  Baseline kind: the whole matrix factors into the outer product
 * of the sign-mean vector with itself.
 */
inline Mat sign_outer_moment(const TheoryState& state, const Vec& w_star, ModelKind kind) {
    const std::size_t L = state.m.size();
    if (kind == ModelKind::baseline) {
        const Vec s = sign_mean_vector(state, w_star);
        return outer(s, s);
    }
    Mat out(L);
    for (std::size_t i = 0; i < L; ++i) {
        const Gaussian1 gi = marginal_of(state, i, w_star);
        out(i, i) = (gi.variance > 0.0 || gi.mean != 0.0) ? 1.0 : 0.0;
    }
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j)
            out(i, j) = out(j, i) = sign_product_mean(pair_of(state, i, j, w_star));
    return out;
}

/// Second-moment/input cross term E{werr werr' x x'} = K Rx (independence).
inline Mat error_input_moment(const Mat& K, const Mat& Rx) {
    return matmul(K, Rx);
}

/**
 * Weight-error/sign cross matrix E{werr sgn(w)'}: entry (i, j) is the
 * cross moment of u = werr_i (mean m_i, unshifted) against
 * v = w_star_j + werr_j, with central second moments from the state.  The
 * diagonal pairs u and v perfectly (cov = var), exercising the singular
 * path of the cross moment.  The baseline kind factors the whole matrix
 * into the outer product m s' of the mean weight error with the sign-mean
 * vector, losing in particular the diagonal shrinkage moments.
 */
inline Mat error_sign_moment(const TheoryState& state, const Vec& w_star,
                             ModelKind kind = ModelKind::exact) {
    const std::size_t L = state.m.size();
    if (kind == ModelKind::baseline)
        return outer(state.m, sign_mean_vector(state, w_star));
    Vec variance(L);
    for (std::size_t i = 0; i < L; ++i) variance[i] = detail::central_variance(state, i);
    Mat out(L);
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
            const double cov =
                i == j ? variance[i]
                       : detail::central_covariance(state, i, j, variance[i], variance[j]);
            out(i, j) = cross_sign_moment({state.m[i], w_star[j] + state.m[j], variance[i],
                                           variance[j], cov});
        }
    }
    return out;
}

/// Input-weighted sign cross term E{x x' werr sgn(w)'} = Rx * error_sign
/// (independence).
inline Mat input_sign_moment(const Mat& Rx, const Mat& error_sign) {
    return matmul(Rx, error_sign);
}

/**
 * Second-moment recursion.  Writing T = K Rx, S = sign-product matrix,
 * C = weight-sign cross matrix, D = Rx C, mu = step_size and
 * rho = attractor_gain:
 *
 *   K <- K + mu^2 noise_var Rx + mu^2 (2 Rx K Rx + tr{Rx K} Rx)
 *          - mu (T + T') + rho^2 S - rho (C + C') + mu rho (D + D')
 *
 * followed by symmetrization to suppress round-off drift.  With rho = 0
 * the sign terms are skipped entirely, leaving the classical Gaussian-input
 * LMS moment recursion.
 */
inline Mat step_second_moment(const TheoryState& state, const Mat& Rx, const AlgoParams& p,
                              const PlantSpec& plant, ModelKind kind) {
    const std::size_t L = state.m.size();
    const Mat T = error_input_moment(state.K, Rx);
    const Mat fourth = gaussian_fourth_moment(state.K, Rx);
    const double noise_coeff = p.step_size * p.step_size * plant.noise_var;
    const double step_sq = p.step_size * p.step_size;

    Mat next = state.K;
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) {
            next(i, j) += noise_coeff * Rx(i, j);
            next(i, j) += step_sq * fourth(i, j);
            next(i, j) -= p.step_size * (T(i, j) + T(j, i));
        }

    if (p.attractor_gain != 0.0) {
        const double gain_sq = p.attractor_gain * p.attractor_gain;
        const double step_gain = p.step_size * p.attractor_gain;
        const Mat S = sign_outer_moment(state, plant.w_star, kind);
        const Mat C = error_sign_moment(state, plant.w_star, kind);
        const Mat D = input_sign_moment(Rx, C);
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j) {
                next(i, j) += gain_sq * S(i, j);
                next(i, j) -= p.attractor_gain * (C(i, j) + C(j, i));
                next(i, j) += step_gain * (D(i, j) + D(j, i));
            }
    }
    return symmetrize(next);
}

/**
 * Run the coupled recursions for n_iters steps and emit the learning
 * curve: point n carries mse = noise_var + tr{Rx K_n}, emse = tr{Rx K_n},
 * and the mean weight-error m_n, all evaluated before stepping (point 0 is
 * the initial state).  Moment-consistency failures are reported with the
 * iteration at which they occurred.
 */
inline std::vector<CurvePoint> run_model(const PlantSpec& plant, const InputModel& input,
                                         const AlgoParams& p, ModelKind kind,
                                         std::size_t n_iters, const Vec& w0 = {}) {
    if (n_iters < 1) throw std::invalid_argument("run_model: n_iters must be >= 1");
    plant.validate();
    input.validate();
    const std::size_t L = plant.length();
    const Mat Rx = ar1_correlation(L, input.ar_coeff, input.signal_var());

    TheoryState state = initial_theory_state(plant, w0);
    std::vector<CurvePoint> curve;
    curve.reserve(n_iters);
    for (std::size_t n = 0; n < n_iters; ++n) {
        const double emse = trace_of_product(Rx, state.K);
        curve.push_back({state.n, plant.noise_var + emse, emse, state.m});
        if (n + 1 == n_iters) break;
        try {
            Vec next_m = step_mean(state, Rx, p, plant.w_star);
            Mat next_K = step_second_moment(state, Rx, p, plant, kind);
            state.m = std::move(next_m);
            state.K = std::move(next_K);
            state.n += 1;
        } catch (const moment_error& e) {
            throw moment_error("run_model: at iteration " + std::to_string(state.n) + ": " +
                               e.what());
        }
    }
    return curve;
}

} // namespace zalms
