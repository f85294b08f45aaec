#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace zalms {

/// Dense real vector.  Lengths are fixed by the surrounding computation
/// (the filter order L); operations validate dimensions explicitly.
using Vec = std::vector<double>;

/**
 * Dense square matrix, row-major.  Sized for small filter orders (tens to
 * a few hundred taps); no attempt at BLAS-scale performance.
 */
class Mat {
public:
    Mat() = default;

    explicit Mat(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    bool operator==(const Mat& other) const { return n_ == other.n_ && a_ == other.a_; }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

namespace detail {

inline void require_same_size(const Mat& a, const Mat& b, const char* op) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
}

inline void require_same_size(const Vec& a, const Vec& b, const char* op) {
    if (a.size() != b.size())
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
}

} // namespace detail

/**
 * Stationary autocovariance matrix of a first-order autoregressive process
 * x_n = coeff * x_{n-1} + innovation: entry (i, j) is
 * signal_var * coeff^|i-j|.  Symmetric positive-definite Toeplitz.
 *
 * Throws std::domain_error for |coeff| >= 1 (nonstationary process) or a
 * nonpositive variance.
 */
inline Mat ar1_correlation(std::size_t L, double coeff, double signal_var) {
    if (L == 0) throw std::invalid_argument("ar1_correlation: L must be >= 1");
    if (!(std::abs(coeff) < 1.0))
        throw std::domain_error("ar1_correlation: |coeff| must be < 1 for a stationary process");
    if (!(signal_var > 0.0) || !std::isfinite(signal_var))
        throw std::domain_error("ar1_correlation: signal variance must be positive");

    // Powers by recurrence so entry (i, j) depends only on |i - j|.
    Vec pow_by_lag(L);
    pow_by_lag[0] = signal_var;
    for (std::size_t k = 1; k < L; ++k) pow_by_lag[k] = pow_by_lag[k - 1] * coeff;

    Mat r(L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j)
            r(i, j) = pow_by_lag[i >= j ? i - j : j - i];
    return r;
}

/// C = A * B.  Inner loop runs over ascending k so the summation order is
/// fixed and reproducible across builds.
inline Mat matmul(const Mat& a, const Mat& b) {
    detail::require_same_size(a, b, "matmul");
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

/// y = A * x.
inline Vec matvec(const Mat& a, const Vec& x) {
    if (a.size() != x.size())
        throw std::invalid_argument("matvec: dimension mismatch");
    const std::size_t n = a.size();
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += a(i, k) * x[k];
        y[i] = sum;
    }
    return y;
}

/// Inner product with fixed ascending summation order.
inline double dot(const Vec& a, const Vec& b) {
    detail::require_same_size(a, b, "dot");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
    return sum;
}

/// tr{A * B} = sum_ij A_ij * B_ji, accumulated without forming the product.
inline double trace_of_product(const Mat& a, const Mat& b) {
    detail::require_same_size(a, b, "trace_of_product");
    const std::size_t n = a.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sum += a(i, j) * b(j, i);
    return sum;
}

/// Outer product u * v^T.
inline Mat outer(const Vec& u, const Vec& v) {
    detail::require_same_size(u, v, "outer");
    const std::size_t n = u.size();
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = u[i] * v[j];
    return m;
}

inline Mat transpose(const Mat& a) {
    const std::size_t n = a.size();
    Mat t(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t(i, j) = a(j, i);
    return t;
}

/// (A + A^T) / 2.  A projection: applying it twice changes nothing.
inline Mat symmetrize(const Mat& a) {
    const std::size_t n = a.size();
    Mat s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s(i, i) = a(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

/// max_ij |A_ij - A_ji|; zero for an exactly symmetric matrix.
inline double max_asymmetry(const Mat& a) {
    const std::size_t n = a.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
    return worst;
}

inline double l1_norm(const Vec& v) {
    double sum = 0.0;
    for (double x : v) sum += std::abs(x);
    return sum;
}

} // namespace zalms
