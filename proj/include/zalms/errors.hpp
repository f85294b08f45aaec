#pragma once

#include <stdexcept>
#include <string>

namespace zalms {

/**
 * Error taxonomy used across the library.
 *
 * Argument/precondition violations in pure functions throw the standard
 * types (std::invalid_argument for structural misuse such as dimension
 * mismatches, std::domain_error for mathematical domain violations such
 * as non-finite inputs or an invalid covariance).  Failures that can only
 * be detected while computing derive from compute_error below, so callers
 * can distinguish "bad request" from "computation went wrong".
 *
 * The command-line driver maps exceptions to exit codes:
 *   config_error -> 1, everything else -> 2 (verification failures use 3
 *   but are reported, not thrown).
 */

/// Configuration ingestion failure: unreadable file, malformed JSON,
/// schema violation, or an invalid parameter value.  Messages carry the
/// offending key path where applicable.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical computation failed in a detectable way.
class compute_error : public std::runtime_error {
public:
    explicit compute_error(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive quadrature could not reach the requested tolerance within its
/// subdivision budget.  Raised instead of returning a silently inaccurate
/// value.
class quadrature_error : public compute_error {
public:
    explicit quadrature_error(const std::string& what) : compute_error(what) {}
};

/// A moment pair (mean vector, second-moment matrix) became inconsistent
/// beyond round-off tolerance: a negative marginal variance or a covariance
/// violating positive semidefiniteness.
class moment_error : public compute_error {
public:
    explicit moment_error(const std::string& what) : compute_error(what) {}
};

/// An adaptive-filter trajectory produced a non-finite weight.  The
/// ensemble aborts rather than silently dropping the run.
class divergence_error : public compute_error {
public:
    explicit divergence_error(const std::string& what) : compute_error(what) {}
};

} // namespace zalms
