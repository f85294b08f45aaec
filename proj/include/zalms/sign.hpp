#pragma once

namespace zalms {

/**
 * Entrywise sign convention shared by the adaptive filter and the moment
 * analytics: sgn(0) = 0.
 *
 * Zero is a valid subgradient of |.| at the origin, and this choice makes
 * the first update from an all-zero weight vector attractor-free -- the
 * analytic model relies on the same convention for its deterministic
 * initial state.
 */
inline double sgn(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

} // namespace zalms
