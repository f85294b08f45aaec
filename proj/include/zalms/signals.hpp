#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "zalms/linalg.hpp"
#include "zalms/rng.hpp"

namespace zalms {

/**
 * Reproducible random signal generation: the unknown plant, the AR(1)
 * regressor process, and the noisy plant output.
 */

/// The unknown system: true weight vector and measurement-noise variance.
struct PlantSpec {
    Vec w_star;
    double noise_var;

    std::size_t length() const { return w_star.size(); }

    void validate() const {
        if (w_star.empty()) throw std::invalid_argument("PlantSpec: empty weight vector");
        for (double w : w_star)
            if (!std::isfinite(w)) throw std::domain_error("PlantSpec: non-finite weight");
        if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
            throw std::domain_error("PlantSpec: noise variance must be >= 0");
    }
};

/// First-order autoregressive input model
/// x_n = ar_coeff * x_{n-1} + innovation; the stationary signal variance
/// innovation_var / (1 - ar_coeff^2) is derived, not stored.
struct InputModel {
    double ar_coeff;
    double innovation_var;

    double signal_var() const { return innovation_var / (1.0 - ar_coeff * ar_coeff); }

    void validate() const {
        if (!std::isfinite(ar_coeff) || !(std::abs(ar_coeff) < 1.0))
            throw std::domain_error("InputModel: |ar_coeff| must be < 1 (stationary)");
        if (!std::isfinite(innovation_var) || !(innovation_var > 0.0))
            throw std::domain_error("InputModel: innovation variance must be positive");
    }
};

/// Addressing for one random stream: the experiment's master seed plus a
/// stream index.  Distinct pairs give statistically independent streams.
struct SeedSpec {
    std::uint64_t master_seed;
    std::uint64_t stream_id;
};

/**
 * Stream of regressor vectors x_n = [x_n, x_{n-1}, ..., x_{n-L+1}]: a
 * sliding window over one scalar AR(1) sequence.
 *
 * The scalar process is warm-started from its stationary distribution (the
 * oldest sample is drawn from N(0, signal_var) and the recursion run
 * forward), so the delivered stream is stationary from the first vector --
 * no burn-in transient.  Deterministic given the seed.
 */
class RegressorStream {
public:
    RegressorStream(const InputModel& model, const SeedSpec& seed, std::size_t L)
        : stream_(seed.master_seed, seed.stream_id),
          coeff_(model.ar_coeff),
          innovation_sd_(std::sqrt(model.innovation_var)),
          window_(L) {
        model.validate();
        if (L == 0) throw std::invalid_argument("RegressorStream: L must be >= 1");
        // Window holds newest-first: window_[k] = x_{n-k}.  Fill the
        // initial window oldest-first so the first next() returns x_0.
        double sample = std::sqrt(model.signal_var()) * stream_.next();
        window_[L - 1] = sample;
        for (std::size_t k = L - 1; k-- > 0;) {
            sample = coeff_ * sample + innovation_sd_ * stream_.next();
            window_[k] = sample;
        }
    }

    /// Advance to the next regressor and return it (newest entry first).
    /// The first call returns the initial stationary window x_0.
    const Vec& next() {
        if (first_) {
            first_ = false;
            return window_;
        }
        const double sample = coeff_ * window_[0] + innovation_sd_ * stream_.next();
        for (std::size_t k = window_.size(); k-- > 1;) window_[k] = window_[k - 1];
        window_[0] = sample;
        return window_;
    }

private:
    GaussianStream stream_;
    double coeff_;
    double innovation_sd_;
    Vec window_;
    bool first_ = true;
};

/// Plant response y = x . w_star + noise_draw; the caller supplies the
/// noise sample from its own seeded stream.
inline double plant_output(const PlantSpec& plant, const Vec& x, double noise_draw) {
    if (x.size() != plant.w_star.size())
        throw std::invalid_argument("plant_output: dimension mismatch");
    return dot(x, plant.w_star) + noise_draw;
}

} // namespace zalms
