#pragma once

/**
 * Umbrella header: the full zero-attracting LMS library.
 *
 * Layering (each header includes what it needs):
 *   version, errors, sign          -- shared basics
 *   rng                            -- counter-based RNG and Gaussian streams
 *   linalg                         -- dense vectors/matrices, AR(1) correlation
 *   quadrature                     -- Gauss-Legendre panels, adaptive refinement
 *   gauss_moments                  -- Gaussian CDFs and closed-form sign moments
 *   oracles                        -- quadrature and Monte Carlo reference values
 *   signals, filter                -- plant, regressor stream, ZA-LMS update
 *   theory                         -- exact/baseline moment recursions
 *   harness                        -- seeded ensembles and curve comparison
 *   csv, config, experiment        -- serialization and orchestration
 *   verify                         -- closed-form verification suite
 */

#include "zalms/version.hpp"
#include "zalms/errors.hpp"
#include "zalms/sign.hpp"
#include "zalms/rng.hpp"
#include "zalms/linalg.hpp"
#include "zalms/quadrature.hpp"
#include "zalms/gauss_moments.hpp"
#include "zalms/oracles.hpp"
#include "zalms/signals.hpp"
#include "zalms/filter.hpp"
#include "zalms/theory.hpp"
#include "zalms/harness.hpp"
#include "zalms/csv.hpp"
#include "zalms/config.hpp"
#include "zalms/experiment.hpp"
#include "zalms/verify.hpp"
