#pragma once

// Randomized checks of matrix inequalities: midpoint g-convexity and
// log-g-convexity catalogs, log-majorization of geometric-mean spectra,
// Thompson-metric properties and contraction bounds, and the Kronecker
// identity for geometric means.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spdgeo/manifold.hpp"

namespace spdgeo::oracles {

struct CheckReport {
  std::string name;
  int trials = 0;
  int violations = 0;
  double worst_slack = 0.0;  // most negative margin; +inf if never measured
};

/// Midpoint used by the g-convexity checks; swappable to test the checks.
using MeanKernel = std::function<Spd(const Spd&, const Spd&)>;
MeanKernel default_mean();

struct Options {
  double tol = 1e-9;
  MeanKernel mean;  // empty: geometric_mean
};

/// Random SPD matrix M M^T + 1e-3 I, condition number at most 1e6.
template <typename Rng>
Spd random_pd(Index d, Rng& rng) {
  return random_spd<double>(d, rng, 1e-3, 1e6);
}

/// Per-trial generator seeded from (seed, trial).
std::mt19937_64 trial_rng(std::uint64_t seed, int trial);

const std::vector<std::string>& midpoint_catalog();
const std::vector<std::string>& log_catalog();

/// f(A # B) <= f(A)/2 + f(B)/2 + tol over random PD pairs.
CheckReport midpoint_gconvexity_check(const std::string& f, Index d, int trials,
                                      std::uint64_t seed, const Options& opts = {});

/// log f(A # B) <= (log f(A) + log f(B)) / 2 + tol.
CheckReport log_gconvexity_check(const std::string& f, Index d, int trials, std::uint64_t seed,
                                 const Options& opts = {});

/// lambda(A #_t B) <_log lambda(A^{1-t} B^t) <_log lambda(A^{1-t}) lambda(B^t),
/// prefix sums of log-eigenvalues with equal totals.
CheckReport log_majorization_check(Index d, double t, int trials, std::uint64_t seed,
                                   const Options& opts = {});

// Thompson metric properties.
CheckReport thompson_inverse_check(Index d, int trials, std::uint64_t seed, const Options& opts = {});
CheckReport thompson_congruence_check(Index d, int trials, std::uint64_t seed,
                                      const Options& opts = {});
CheckReport thompson_power_check(Index d, int trials, std::uint64_t seed, const Options& opts = {});
CheckReport thompson_convex_sum_check(Index d, int trials, std::uint64_t seed,
                                      const Options& opts = {});
CheckReport thompson_translation_check(Index d, int trials, std::uint64_t seed,
                                       const Options& opts = {});

/// delta_T(M^T A M, M^T B M) <= delta_T(A, B) for d x k, k < d, full column rank M.
CheckReport compression_check(Index d, int trials, std::uint64_t seed, const Options& opts = {});
/// Square invertible M: equality.
CheckReport compression_square_check(Index d, int trials, std::uint64_t seed,
                                     const Options& opts = {});
/// delta_T(A^r, B^r) <= delta_T(A, B) for random r in (0, 1).
CheckReport opmono_contraction_check(Index d, int trials, std::uint64_t seed,
                                     const Options& opts = {});
/// (identity + square root) is strictly contractive: the margin
/// 1 - delta_T(G(A), G(B)) / delta_T(A, B) must be positive.
CheckReport sum_log_contractive_check(Index d, int trials, std::uint64_t seed,
                                      const Options& opts = {});

/// (A # B) (x) (C # D) = (A (x) C) # (B (x) D), relative Frobenius error <= 1e-10.
CheckReport kron_gm_identity_check(Index d1, Index d2, int trials, std::uint64_t seed,
                                   const Options& opts = {});

/// Named suites: "thompson", "gconvex", "majorization", "all".
std::vector<CheckReport> run_suite(const std::string& suite, std::uint64_t seed, int trials,
                                   const Options& opts = {});
const std::vector<std::string>& suite_names();

}  // namespace spdgeo::oracles
