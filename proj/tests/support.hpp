#pragma once

// Shared test utilities: temporary directories, file byte comparison,
// brute-force linear-algebra references, an independent classical LMS
// implementation (trajectory and moment recursion), and Monte Carlo
// matrix oracles for the moment-engine terms.
//
// The reference implementations here use their own loops throughout --
// they never call the library's composite operations -- but they follow
// the same documented evaluation order (ascending-index summation,
// products associated as written), because the bit-level and 1e-14
// agreement checks are only meaningful when both sides round identically.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "zalms/linalg.hpp"
#include "zalms/rng.hpp"
#include "zalms/sign.hpp"
#include "zalms/theory.hpp"

namespace testsupport {

using zalms::Mat;
using zalms::Vec;

// ---------------------------------------------------------------------
// Filesystem helpers
// ---------------------------------------------------------------------

/// Unique temporary directory, removed (recursively) on destruction.
class TempDir {
public:
    TempDir() {
        static std::uint64_t counter = 0;
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("zalms_test_" + std::to_string(static_cast<std::uint64_t>(
                                            reinterpret_cast<std::uintptr_t>(this))) +
                        "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string sub(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file_bytes: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---------------------------------------------------------------------
// Brute-force linear algebra references
// ---------------------------------------------------------------------

/// Triple-loop matrix product with ascending inner index, kept separate
/// from the library implementation so the two can be compared.
inline Mat naive_matmul(const Mat& a, const Mat& b) {
    const std::size_t n = a.size();
    Mat c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) sum += a(i, k) * b(k, j);
            c(i, j) = sum;
        }
    return c;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
inline Mat cholesky(const Mat& a) {
    const std::size_t n = a.size();
    Mat l(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(sum > 0.0))
                    throw std::runtime_error("cholesky: matrix not positive definite");
                l(i, i) = std::sqrt(sum);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    return l;
}

// ---------------------------------------------------------------------
// Independent plain LMS (trajectory level)
// ---------------------------------------------------------------------

/// One plain LMS update, written with its own loops.  The error term is
/// accumulated ascending and subtracted once, and the update applies a
/// pre-scaled error, matching the documented evaluation order of the
/// filter under test so that bit-level agreement is expected.
inline double ref_plain_lms_step(Vec& w, const Vec& x, double y, double mu) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * x[k];
    const double error = y - acc;
    const double scaled = mu * error;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += scaled * x[i];
    return error;
}

// ---------------------------------------------------------------------
// Independent classical LMS moment recursion
// ---------------------------------------------------------------------

/// Mean and second moment of the weight error under the classical
/// (attractor-free) Gaussian-input analysis:
///
///   m <- m - mu Rx m
///   K <- K + mu^2 nv Rx + mu^2 (2 Rx K Rx + tr{Rx K} Rx) - mu (KRx + (KRx)')
///
/// followed by (A + A')/2.  Implemented entirely with local loops in the
/// same evaluation order as the engine under test.
struct RefMomentState {
    Vec m;
    Mat K;
};

inline RefMomentState ref_classical_moment_step(const RefMomentState& s, const Mat& Rx,
                                                double mu, double noise_var) {
    const std::size_t n = s.m.size();

    RefMomentState out;
    out.m.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double drift = 0.0;
        for (std::size_t k = 0; k < n; ++k) drift += Rx(i, k) * s.m[k];
        out.m[i] = s.m[i] - mu * drift;
    }

    Mat KR(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) sum += s.K(i, k) * Rx(k, j);
            KR(i, j) = sum;
        }
    Mat inner(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k) sum += Rx(i, k) * KR(k, j);
            inner(i, j) = sum;
        }
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) trace += Rx(i, j) * s.K(j, i);

    const double noise_coeff = mu * mu * noise_var;
    const double mu_sq = mu * mu;
    Mat next = s.K;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            next(i, j) += noise_coeff * Rx(i, j);
            next(i, j) += mu_sq * (2.0 * inner(i, j) + trace * Rx(i, j));
            next(i, j) -= mu * (KR(i, j) + KR(j, i));
        }

    out.K = Mat(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.K(i, i) = next(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (next(i, j) + next(j, i));
            out.K(i, j) = v;
            out.K(j, i) = v;
        }
    }
    return out;
}

/// tr{Rx K} accumulated in the same order as the engine's curve point.
inline double ref_trace_product(const Mat& Rx, const Mat& K) {
    double sum = 0.0;
    for (std::size_t i = 0; i < Rx.size(); ++i)
        for (std::size_t j = 0; j < Rx.size(); ++j) sum += Rx(i, j) * K(j, i);
    return sum;
}

// ---------------------------------------------------------------------
// Monte Carlo matrix oracles for the moment-engine terms
// ---------------------------------------------------------------------

/// Draw correlated Gaussian vectors mean + L z with a shared stream.
struct GaussianVectorSampler {
    Vec mean;
    Mat chol;

    Vec operator()(zalms::GaussianStream& stream) const {
        const std::size_t n = mean.size();
        Vec z(n);
        for (std::size_t k = 0; k < n; ++k) z[k] = stream.next();
        Vec out(n);
        for (std::size_t i = 0; i < n; ++i) {
            double sum = mean[i];
            for (std::size_t k = 0; k <= i; ++k) sum += chol(i, k) * z[k];
            out[i] = sum;
        }
        return out;
    }
};

/// Entrywise mean and standard error of a stream of sample matrices.
struct MatrixEstimate {
    Mat mean;
    Mat se;
};

class MatrixAccumulator {
public:
    explicit MatrixAccumulator(std::size_t n) : n_(n), sum_(n), sumsq_(n) {}

    void add(const Mat& sample) {
        ++count_;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                sum_(i, j) += sample(i, j);
                sumsq_(i, j) += sample(i, j) * sample(i, j);
            }
    }

    MatrixEstimate estimate() const {
        const double n = static_cast<double>(count_);
        MatrixEstimate est{Mat(n_), Mat(n_)};
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                const double mean = sum_(i, j) / n;
                const double var =
                    std::max(0.0, (sumsq_(i, j) - n * mean * mean) / (n - 1.0));
                est.mean(i, j) = mean;
                est.se(i, j) = std::sqrt(var / n);
            }
        return est;
    }

private:
    std::size_t n_;
    std::uint64_t count_ = 0;
    Mat sum_;
    Mat sumsq_;
};

/// Random nondegenerate moment state for oracle checks: mean weight error
/// with entries in about (-0.7, 0.7), a full-rank central covariance
/// A A' (A entries ~ N(0, scale^2)), and K = cov + m m'.
inline zalms::TheoryState random_theory_state(std::size_t L, zalms::GaussianStream& stream,
                                              double scale = 0.35) {
    Vec m(L);
    for (std::size_t i = 0; i < L; ++i) m[i] = 0.7 * (2.0 * stream.next_uniform() - 1.0);
    Mat a(L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) a(i, j) = scale * stream.next();
    zalms::TheoryState st;
    st.m = m;
    st.K = Mat(L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) {
            double cov = 0.0;
            for (std::size_t k = 0; k < L; ++k) cov += a(i, k) * a(j, k);
            st.K(i, j) = cov + m[i] * m[j];
        }
    st.n = 0;
    return st;
}

/// Central covariance of a state (for building samplers).
inline Mat central_covariance_of(const zalms::TheoryState& st) {
    const std::size_t L = st.m.size();
    Mat c(L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) c(i, j) = st.K(i, j) - st.m[i] * st.m[j];
    return c;
}

} // namespace testsupport
