#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "zalms/errors.hpp"
#include "zalms/filter.hpp"
#include "zalms/linalg.hpp"
#include "zalms/signals.hpp"
#include "zalms/theory.hpp"

namespace zalms {

/**
 * Seeded Monte Carlo harness.
 *
 * Every run r draws its regressors from counter-based stream 2r and its
 * plant noise from stream 2r + 1 under the ensemble's master seed, so any
 * run is reproducible in isolation.  Runs are processed in fixed blocks of
 * 32; each block accumulates per-iteration statistics with Welford's
 * algorithm, and the block accumulators are merged in ascending block
 * order (Chan's parallel combination) after all workers finish.  Worker
 * threads only claim block indices, so the result is bitwise identical for
 * any thread count.
 */

/// Request to record the joint weight-error sample (werr_i, werr_j) across
/// all runs at iteration at_iter.  at_iter = n records the state entering
/// update n; at_iter = iters records the final state.
struct PairDump {
    std::size_t i;
    std::size_t j;
    std::uint64_t at_iter;
};

struct EnsembleConfig {
    std::uint64_t runs = 500;
    std::uint64_t iters = 1000;
    std::uint64_t master_seed = 1;
    std::vector<PairDump> record_pairs;
    /// Initial filter weights for every run (empty = all zeros).
    Vec initial_weights;

    void validate(std::size_t L) const {
        if (runs < 1) throw std::invalid_argument("EnsembleConfig: runs must be >= 1");
        if (iters < 1) throw std::invalid_argument("EnsembleConfig: iters must be >= 1");
        if (!initial_weights.empty() && initial_weights.size() != L)
            throw std::invalid_argument("EnsembleConfig: initial_weights dimension mismatch");
        for (const PairDump& d : record_pairs) {
            if (d.i >= L || d.j >= L)
                throw std::invalid_argument("EnsembleConfig: record pair index out of range");
            if (d.at_iter > iters)
                throw std::invalid_argument("EnsembleConfig: record pair iteration exceeds iters");
        }
    }
};

/// Ensemble averages at iteration n.  mse averages the squared prediction
/// error e^2, emse the squared a-priori excess error (werr . x)^2, and
/// mean_error the weight-error vector w - w_star, all over runs with the
/// filter state entering update n.  Standard errors are of the respective
/// means (zero when runs < 2).
struct McCurvePoint {
    std::uint64_t n;
    double mse;
    double mse_stderr;
    double emse;
    double emse_stderr;
    Vec mean_error;
    Vec mean_error_stderr;
};

/// Joint weight-error samples for one recorded pair; samples[r] belongs to
/// run r.
struct JointSampleSet {
    PairDump spec;
    std::vector<std::array<double, 2>> samples;
};

/// Sample moments of a recorded pair: means, covariance (n - 1
/// normalization), and per-coordinate skewness / excess kurtosis as a
/// Gaussianity sanity check (both reported as 0 for degenerate samples).
struct JointSummary {
    double mean_i;
    double mean_j;
    double var_i;
    double var_j;
    double cov;
    double skew_i;
    double skew_j;
    double ex_kurt_i;
    double ex_kurt_j;
    std::uint64_t count;
};

struct EnsembleResult {
    std::vector<McCurvePoint> curve;
    std::vector<JointSampleSet> joints;
    std::uint64_t runs;
};

namespace detail {

constexpr std::uint64_t ensemble_block_runs = 32;

/// Squared error above this bound aborts the ensemble as divergent well
/// before the trajectory overflows to infinity.
constexpr double divergence_bound = 1e200;

/// Per-block Welford accumulators: `width` statistics for each iteration,
/// flattened row-major as [iteration * width + stat].
struct BlockStats {
    std::uint64_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    BlockStats() = default;
    BlockStats(std::size_t iters, std::size_t width)
        : mean(iters * width, 0.0), m2(iters * width, 0.0) {}
};

inline void welford_update(double& mean, double& m2, std::uint64_t count_after, double value) {
    const double delta = value - mean;
    mean += delta / static_cast<double>(count_after);
    m2 += delta * (value - mean);
}

/// Merge accumulator b into a (Chan's pairwise combination).
inline void chan_merge(BlockStats& a, const BlockStats& b) {
    if (b.count == 0) return;
    if (a.count == 0) {
        a = b;
        return;
    }
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const double total = na + nb;
    for (std::size_t k = 0; k < a.mean.size(); ++k) {
        const double delta = b.mean[k] - a.mean[k];
        a.mean[k] += delta * (nb / total);
        a.m2[k] += b.m2[k] + delta * delta * (na * nb / total);
    }
    a.count += b.count;
}

} // namespace detail

/**
 * Simulate the full ensemble.  Statistics at iteration n describe the state
 * entering update n (so point 0 is the initial condition's first use), with
 * the prediction error of update n itself.  Throws divergence_error when a
 * trajectory blows up, identifying the run and iteration.
 */
inline EnsembleResult run_ensemble(const PlantSpec& plant, const InputModel& input,
                                   const AlgoParams& p, const EnsembleConfig& cfg,
                                   unsigned threads = 1) {
    plant.validate();
    input.validate();
    const std::size_t L = plant.length();
    cfg.validate(L);
    if (threads < 1) threads = 1;

    const std::size_t width = L + 2; // weight-error entries, e^2, excess^2
    const std::uint64_t n_blocks =
        (cfg.runs + detail::ensemble_block_runs - 1) / detail::ensemble_block_runs;

    std::vector<detail::BlockStats> blocks(n_blocks);
    EnsembleResult result;
    result.runs = cfg.runs;
    result.joints.reserve(cfg.record_pairs.size());
    for (const PairDump& d : cfg.record_pairs)
        result.joints.push_back({d, std::vector<std::array<double, 2>>(cfg.runs)});

    const Vec w0 = cfg.initial_weights.empty() ? Vec(L, 0.0) : cfg.initial_weights;

    std::atomic<std::uint64_t> next_block{0};
    std::atomic<bool> abort{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto simulate_run = [&](std::uint64_t run, detail::BlockStats& stats) {
        RegressorStream regressors(input, {cfg.master_seed, 2 * run}, L);
        GaussianStream noise(cfg.master_seed, 2 * run + 1);
        const double noise_sd = std::sqrt(plant.noise_var);

        FilterState state{w0, 0};
        Vec werr(L);
        const std::uint64_t count_after = stats.count + 1;
        for (std::uint64_t n = 0; n < cfg.iters; ++n) {
            const Vec& x = regressors.next();
            const double y = plant_output(plant, x, noise_sd * noise.next());

            for (std::size_t i = 0; i < L; ++i) werr[i] = state.w[i] - plant.w_star[i];
            const double excess = dot(werr, x);

            for (std::size_t k = 0; k < result.joints.size(); ++k)
                if (result.joints[k].spec.at_iter == n)
                    result.joints[k].samples[run] = {werr[result.joints[k].spec.i],
                                                     werr[result.joints[k].spec.j]};

            FilterStep step = za_lms_step(state, x, y, p);
            const double sq_error = step.error * step.error;
            if (!(sq_error <= detail::divergence_bound))
                throw divergence_error("run_ensemble: run " + std::to_string(run) +
                                       " diverged at iteration " + std::to_string(n) +
                                       " (squared error " + std::to_string(sq_error) + ")");

            double* mean_row = stats.mean.data() + n * width;
            double* m2_row = stats.m2.data() + n * width;
            for (std::size_t i = 0; i < L; ++i)
                detail::welford_update(mean_row[i], m2_row[i], count_after, werr[i]);
            detail::welford_update(mean_row[L], m2_row[L], count_after, sq_error);
            detail::welford_update(mean_row[L + 1], m2_row[L + 1], count_after,
                                   excess * excess);

            state = std::move(step.state);
        }
        if (!result.joints.empty()) {
            for (std::size_t i = 0; i < L; ++i) werr[i] = state.w[i] - plant.w_star[i];
            for (std::size_t k = 0; k < result.joints.size(); ++k)
                if (result.joints[k].spec.at_iter == cfg.iters)
                    result.joints[k].samples[run] = {werr[result.joints[k].spec.i],
                                                     werr[result.joints[k].spec.j]};
        }
        stats.count = count_after;
    };

    auto worker = [&]() {
        while (!abort.load(std::memory_order_relaxed)) {
            const std::uint64_t b = next_block.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            try {
                blocks[b] = detail::BlockStats(cfg.iters, width);
                const std::uint64_t first = b * detail::ensemble_block_runs;
                const std::uint64_t last =
                    std::min(cfg.runs, first + detail::ensemble_block_runs);
                for (std::uint64_t run = first; run < last; ++run)
                    simulate_run(run, blocks[b]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                abort.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (threads == 1 || n_blocks == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const unsigned spawn =
            static_cast<unsigned>(std::min<std::uint64_t>(threads, n_blocks));
        pool.reserve(spawn);
        for (unsigned t = 0; t < spawn; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    detail::BlockStats total;
    for (const detail::BlockStats& b : blocks) detail::chan_merge(total, b);

    const double count = static_cast<double>(total.count);
    result.curve.reserve(cfg.iters);
    for (std::uint64_t n = 0; n < cfg.iters; ++n) {
        const double* mean_row = total.mean.data() + n * width;
        const double* m2_row = total.m2.data() + n * width;
        auto stderr_of = [&](std::size_t k) {
            return total.count < 2 ? 0.0 : std::sqrt(m2_row[k] / (count - 1.0) / count);
        };
        McCurvePoint point{n,
                           mean_row[L],
                           stderr_of(L),
                           mean_row[L + 1],
                           stderr_of(L + 1),
                           Vec(mean_row, mean_row + L),
                           Vec(L)};
        for (std::size_t i = 0; i < L; ++i) point.mean_error_stderr[i] = stderr_of(i);
        result.curve.push_back(std::move(point));
    }
    return result;
}

/// Sample moments of one recorded pair.  Variances and covariance use the
/// n - 1 normalization; skewness and excess kurtosis use population central
/// moments and report 0 for a degenerate (zero-variance) coordinate.
inline JointSummary summarize_joint(const JointSampleSet& set) {
    const std::size_t n = set.samples.size();
    if (n < 2) throw std::invalid_argument("summarize_joint: need at least 2 samples");
    double mean_i = 0.0, mean_j = 0.0;
    for (const auto& s : set.samples) {
        mean_i += s[0];
        mean_j += s[1];
    }
    mean_i /= static_cast<double>(n);
    mean_j /= static_cast<double>(n);

    double m2_i = 0.0, m2_j = 0.0, m3_i = 0.0, m3_j = 0.0, m4_i = 0.0, m4_j = 0.0;
    double cov = 0.0;
    for (const auto& s : set.samples) {
        const double du = s[0] - mean_i;
        const double dv = s[1] - mean_j;
        m2_i += du * du;
        m2_j += dv * dv;
        m3_i += du * du * du;
        m3_j += dv * dv * dv;
        m4_i += du * du * du * du;
        m4_j += dv * dv * dv * dv;
        cov += du * dv;
    }
    const double nn = static_cast<double>(n);
    m2_i /= nn;
    m2_j /= nn;
    m3_i /= nn;
    m3_j /= nn;
    m4_i /= nn;
    m4_j /= nn;

    auto skew = [](double m2, double m3) {
        return m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    };
    auto ex_kurt = [](double m2, double m4) { return m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0; };

    const double norm = nn - 1.0;
    return {mean_i,
            mean_j,
            m2_i * nn / norm,
            m2_j * nn / norm,
            cov / norm,
            skew(m2_i, m3_i),
            skew(m2_j, m3_j),
            ex_kurt(m2_i, m4_i),
            ex_kurt(m2_j, m4_j),
            static_cast<std::uint64_t>(n)};
}

/// One aligned row of the theory/Monte-Carlo comparison.  emse_in_band
/// flags |emse_theory - emse_mc| <= band_k * emse_mc_stderr; max_weight_dev
/// is the largest |mean weight-error deviation| over coordinates at this
/// iteration.
struct ComparisonRow {
    std::uint64_t n;
    double mse_theory;
    double mse_mc;
    double mse_mc_stderr;
    double emse_theory;
    double emse_mc;
    double emse_mc_stderr;
    bool emse_in_band;
    double max_weight_dev;
};

/// Theory-vs-ensemble comparison: per-iteration rows plus steady-state
/// averages over the last tenth of the curve and whole-curve aggregates.
struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    std::size_t steady_window;
    double steady_emse_theory;
    double steady_emse_mc;
    double steady_mse_theory;
    double steady_mse_mc;
    /// Fraction of all rows with emse_in_band set.
    double band_fraction;
    /// Largest mean weight-error deviation over all rows and coordinates.
    double max_weight_dev;
};

namespace detail {

inline std::size_t steady_window_of(std::size_t rows) {
    return std::max<std::size_t>(1, rows / 10);
}

} // namespace detail

/**
 * Align a theoretical curve with an ensemble curve point-by-point.  Both
 * must cover the same iterations in the same order.  band_k defaults to the
 * normal 95% confidence band (1.96 standard errors).
 */
inline ComparisonReport compare_curves(const std::vector<CurvePoint>& theory,
                                       const std::vector<McCurvePoint>& mc,
                                       double band_k = 1.96) {
    if (theory.empty() || theory.size() != mc.size())
        throw std::invalid_argument("compare_curves: curve lengths differ or empty");
    if (!(band_k > 0.0)) throw std::domain_error("compare_curves: band_k must be positive");

    ComparisonReport report;
    report.rows.reserve(theory.size());
    std::uint64_t inside = 0;
    double worst_weight = 0.0;
    for (std::size_t k = 0; k < theory.size(); ++k) {
        if (theory[k].n != mc[k].n)
            throw std::invalid_argument("compare_curves: iteration indices differ at row " +
                                        std::to_string(k));
        if (theory[k].m.size() != mc[k].mean_error.size())
            throw std::invalid_argument("compare_curves: weight dimensions differ at row " +
                                        std::to_string(k));
        double row_weight = 0.0;
        for (std::size_t i = 0; i < theory[k].m.size(); ++i)
            row_weight = std::max(row_weight, std::abs(theory[k].m[i] - mc[k].mean_error[i]));
        worst_weight = std::max(worst_weight, row_weight);
        const bool in_band =
            std::abs(theory[k].emse - mc[k].emse) <= band_k * mc[k].emse_stderr;
        if (in_band) ++inside;
        report.rows.push_back({theory[k].n, theory[k].mse, mc[k].mse, mc[k].mse_stderr,
                               theory[k].emse, mc[k].emse, mc[k].emse_stderr, in_band,
                               row_weight});
    }

    const std::size_t window = detail::steady_window_of(report.rows.size());
    double st_et = 0.0, st_em = 0.0, st_mt = 0.0, st_mm = 0.0;
    for (std::size_t k = report.rows.size() - window; k < report.rows.size(); ++k) {
        st_et += report.rows[k].emse_theory;
        st_em += report.rows[k].emse_mc;
        st_mt += report.rows[k].mse_theory;
        st_mm += report.rows[k].mse_mc;
    }
    report.steady_window = window;
    report.steady_emse_theory = st_et / static_cast<double>(window);
    report.steady_emse_mc = st_em / static_cast<double>(window);
    report.steady_mse_theory = st_mt / static_cast<double>(window);
    report.steady_mse_mc = st_mm / static_cast<double>(window);
    report.band_fraction =
        static_cast<double>(inside) / static_cast<double>(report.rows.size());
    report.max_weight_dev = worst_weight;
    return report;
}

/// Fraction of comparison rows with n >= min_n whose excess MSE lies in the
/// stderr band.
inline double band_coverage(const std::vector<ComparisonRow>& rows, std::uint64_t min_n) {
    std::uint64_t eligible = 0, inside = 0;
    for (const ComparisonRow& row : rows) {
        if (row.n < min_n) continue;
        ++eligible;
        if (row.emse_in_band) ++inside;
    }
    if (eligible == 0) throw std::invalid_argument("band_coverage: no rows at or past min_n");
    return static_cast<double>(inside) / static_cast<double>(eligible);
}

/// Average excess MSE over the last `window` points of a curve.
inline double steady_state_emse(const std::vector<CurvePoint>& curve, std::size_t window) {
    if (window < 1 || window > curve.size())
        throw std::invalid_argument("steady_state_emse: bad window");
    double sum = 0.0;
    for (std::size_t k = curve.size() - window; k < curve.size(); ++k) sum += curve[k].emse;
    return sum / static_cast<double>(window);
}

inline double steady_state_emse(const std::vector<McCurvePoint>& curve, std::size_t window) {
    if (window < 1 || window > curve.size())
        throw std::invalid_argument("steady_state_emse: bad window");
    double sum = 0.0;
    for (std::size_t k = curve.size() - window; k < curve.size(); ++k) sum += curve[k].emse;
    return sum / static_cast<double>(window);
}

/**
 * Pointwise mean-weight band check: the worst value over iterations and
 * coordinates of |theory m - empirical mean| - max(abs_floor, k * SE),
 * where SE is the empirical mean's standard error.  Nonpositive means every
 * coordinate of every iteration sits inside its band.
 */
inline double weight_band_excess(const std::vector<CurvePoint>& theory,
                                 const std::vector<McCurvePoint>& mc, double abs_floor,
                                 double k) {
    if (theory.size() != mc.size())
        throw std::invalid_argument("weight_band_excess: curve lengths differ");
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < theory.size(); ++r) {
        if (theory[r].m.size() != mc[r].mean_error.size() ||
            mc[r].mean_error.size() != mc[r].mean_error_stderr.size())
            throw std::invalid_argument("weight_band_excess: dimension mismatch");
        for (std::size_t i = 0; i < theory[r].m.size(); ++i) {
            const double dev = std::abs(theory[r].m[i] - mc[r].mean_error[i]);
            const double band = std::max(abs_floor, k * mc[r].mean_error_stderr[i]);
            worst = std::max(worst, dev - band);
        }
    }
    return worst;
}

} // namespace zalms
