#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "zalms/csv.hpp"
#include "zalms/errors.hpp"
#include "zalms/gauss_moments.hpp"
#include "zalms/oracles.hpp"

namespace zalms {

/**
 * Closed-form verification suite: checks every Gaussian sign-moment closed
 * form against independent adaptive-quadrature oracles over a parameter
 * grid (means in [-3, 3], variances in [1e-4, 4], correlations in
 * [-0.99, 0.99], plus a near-singular +-0.999 extension), against
 * large-sample Monte Carlo oracles on a strided subset, and checks the
 * two algebraically equivalent closed forms of the weight/sign cross
 * moment against each other.
 *
 * inject_sign_flip deliberately evaluates the cross moment with the
 * sign-flipped variant of its assembled form -- a transcription ambiguity
 * the suite exists to catch -- and must make the suite fail.
 */
struct VerifyOptions {
    std::size_t mc_samples = 1'000'000;
    /// Every mc_stride-th grid tuple also gets a Monte Carlo check
    /// (0 disables Monte Carlo entirely).
    std::size_t mc_stride = 16;
    std::uint64_t master_seed = 7;
    bool inject_sign_flip = false;
};

struct VerifyReport {
    std::size_t sign_mean_tuples = 0;
    std::size_t pair_tuples = 0;
    std::size_t relaxed_tuples = 0;
    std::size_t mc_checks = 0;
    double max_dev_sign_mean = 0.0;
    double max_dev_sign_product = 0.0;
    double max_dev_cross = 0.0;
    double max_dev_equivalence = 0.0;
    double max_dev_relaxed = 0.0;
    /// Worst Monte Carlo deviation in standard-error units.
    double worst_mc_sigma = 0.0;
    std::vector<std::string> failures;

    bool passed() const { return failures.empty(); }
    std::size_t total_tuples() const {
        return sign_mean_tuples + pair_tuples + relaxed_tuples;
    }
};

namespace verify_tolerances {
constexpr double quad_abs = 1e-6;      // closed form vs quadrature oracle
constexpr double quad_relaxed = 1e-5;  // same, at correlation +-0.999
constexpr double equivalence = 1e-10;  // assembled vs simplified closed form
constexpr double mc_sigmas = 4.0;      // Monte Carlo band half-width in SEs
} // namespace verify_tolerances

namespace detail {

inline std::string describe(const Gaussian1& g) {
    return "mean=" + format_double(g.mean) + " var=" + format_double(g.variance);
}

inline std::string describe(const Gaussian2& g) {
    return "mean_u=" + format_double(g.mean_u) + " mean_v=" + format_double(g.mean_v) +
           " var_u=" + format_double(g.var_u) + " var_v=" + format_double(g.var_v) +
           " cov=" + format_double(g.cov_uv);
}

} // namespace detail

inline VerifyReport verify_lemmas(const VerifyOptions& opt = {}) {
    VerifyReport rep;
    std::uint64_t next_stream = 0;

    auto check_quad = [&](const char* label, double closed, const OracleEstimate& est,
                          double tol, double& worst, const std::string& where) {
        const double dev = std::abs(closed - est.value);
        if (dev > worst) worst = dev;
        if (dev > tol)
            rep.failures.push_back(std::string(label) + " vs quadrature at " + where +
                                   ": |" + format_double(closed) + " - " +
                                   format_double(est.value) + "| = " + format_double(dev) +
                                   " > " + format_double(tol));
    };
    auto check_mc = [&](const char* label, double closed, const OracleEstimate& est,
                        const std::string& where) {
        ++rep.mc_checks;
        const double dev = std::abs(closed - est.value);
        // Sample standard errors cannot resolve event probabilities below
        // ~1/n; when every sample coincides the SE collapses to 0 even
        // though mass up to ~3/n (rule of three) may hide in the tail.
        const double floor = 3.0 / static_cast<double>(opt.mc_samples);
        const double sigma = dev / std::max(est.error_estimate, floor);
        if (sigma > rep.worst_mc_sigma) rep.worst_mc_sigma = sigma;
        if (dev > verify_tolerances::mc_sigmas * std::max(est.error_estimate, floor))
            rep.failures.push_back(std::string(label) + " vs Monte Carlo at " + where + ": |" +
                                   format_double(closed) + " - " + format_double(est.value) +
                                   "| = " + format_double(dev) + " > " +
                                   format_double(verify_tolerances::mc_sigmas) +
                                   " standard errors (" + format_double(est.error_estimate) +
                                   ")");
    };
    auto mc_due = [&](std::size_t index, std::size_t phase) {
        return opt.mc_stride > 0 && opt.mc_samples >= 2 &&
               index % opt.mc_stride == phase % opt.mc_stride;
    };

    // --- scalar sign mean ------------------------------------------------
    const double means_1d[] = {-3.0, -1.2, -0.3, 0.0, 0.3, 1.2, 3.0};
    const double vars_1d[] = {1e-4, 0.01, 0.25, 1.0, 4.0};
    std::size_t index = 0;
    for (double mean : means_1d)
        for (double var : vars_1d) {
            const Gaussian1 g{mean, var};
            const std::string where = detail::describe(g);
            const double closed = sign_mean(g);
            check_quad("sign-mean", closed, quad_sign_mean(g), verify_tolerances::quad_abs,
                       rep.max_dev_sign_mean, where);
            if (mc_due(index, 0))
                check_mc("sign-mean", closed,
                         mc_sign_mean(g, opt.master_seed, next_stream++, opt.mc_samples),
                         where);
            ++index;
            ++rep.sign_mean_tuples;
        }

    // --- pairwise grid ----------------------------------------------------
    struct VarPair {
        double u, v;
    };
    const double means_u[] = {-3.0, -0.8, 0.0, 1.1};
    const double means_v[] = {-1.7, 0.45, 3.0};
    const VarPair var_pairs[] = {{1e-4, 0.9}, {0.04, 0.04}, {1.0, 1.0}, {4.0, 0.25}};
    const double corrs[] = {-0.99, -0.82, -0.35, 0.0, 0.41, 0.93, 0.99};
    const double corrs_relaxed[] = {-0.999, 0.999};

    struct PairTuple {
        Gaussian2 g;
        bool relaxed;
    };
    std::vector<PairTuple> tuples;
    for (double mu : means_u)
        for (double mv : means_v) {
            for (const VarPair& vp : var_pairs)
                for (double r : corrs)
                    tuples.push_back({{mu, mv, vp.u, vp.v, r * std::sqrt(vp.u * vp.v)}, false});
            for (double r : corrs_relaxed) tuples.push_back({{mu, mv, 1.0, 1.0, r}, true});
        }

    index = 0;
    for (const PairTuple& t : tuples) {
        const Gaussian2& g = t.g;
        const std::string where = detail::describe(g);
        const double tol =
            t.relaxed ? verify_tolerances::quad_relaxed : verify_tolerances::quad_abs;
        double& quad_worst = t.relaxed ? rep.max_dev_relaxed : rep.max_dev_sign_product;
        double& cross_worst = t.relaxed ? rep.max_dev_relaxed : rep.max_dev_cross;

        const double closed_product = sign_product_mean(g);
        check_quad("sign-product", closed_product, quad_sign_product(g), tol, quad_worst,
                   where);

        const double closed_cross = opt.inject_sign_flip
                                        ? cross_sign_moment_decomposed(g, true)
                                        : cross_sign_moment(g);
        check_quad("cross-moment", closed_cross, quad_cross_moment(g), tol, cross_worst,
                   where);

        const double assembled = cross_sign_moment_decomposed(g, opt.inject_sign_flip);
        const double simplified = cross_sign_moment_direct(g);
        const double equiv_dev = std::abs(assembled - simplified);
        if (equiv_dev > rep.max_dev_equivalence) rep.max_dev_equivalence = equiv_dev;
        if (equiv_dev > verify_tolerances::equivalence)
            rep.failures.push_back("cross-moment assembled vs simplified at " + where + ": |" +
                                   format_double(assembled) + " - " +
                                   format_double(simplified) + "| = " +
                                   format_double(equiv_dev) + " > " +
                                   format_double(verify_tolerances::equivalence));

        if (mc_due(index, 1))
            check_mc("sign-product", closed_product,
                     mc_sign_product(g, opt.master_seed, next_stream++, opt.mc_samples),
                     where);
        if (mc_due(index, 9))
            check_mc("cross-moment", closed_cross,
                     mc_cross_moment(g, opt.master_seed, next_stream++, opt.mc_samples),
                     where);

        ++index;
        if (t.relaxed)
            ++rep.relaxed_tuples;
        else
            ++rep.pair_tuples;
    }
    return rep;
}

} // namespace zalms
