#pragma once

// Picard iteration S_{k+1} = G(S_k) on the SPD cone, measured in the
// Thompson metric, with the optional trace-normalizing scale alpha_k.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spdgeo/manifold.hpp"

namespace spdgeo {

struct FixedPointMap {
  Index dim = 0;
  std::function<Spd(const Spd&)> apply;
};

enum class Scaling { Off, TraceD };

struct FpConfig {
  double step_tol = 1e-8;
  int max_iter = 5000;
  Scaling scaling = Scaling::Off;
  std::optional<Spd> initial;
  /// Optional objective recorded in the trace (NaN column when unset).
  std::function<double(const Spd&)> cost;
};

struct FpTraceRow {
  int iter = 0;
  double delta_t_step = 0.0;  // delta_T(S_k, S_{k-1}); NaN on row 0
  double residual = 0.0;      // delta_T(G(S_k), S_k)
  double m_dev = 0.0;         // ||S_k^{-1/2} G(S_k) S_k^{-1/2} - I||_2
  double m_fro = 0.0;         // same, Frobenius norm
  double alpha = 1.0;
  double cost = 0.0;
  double time_s = 0.0;
};

struct FpReport {
  Spd fixed_point;
  std::vector<FpTraceRow> trace;
  Status status = Status::MaxIter;
  int iterations = 0;
  int map_evaluations = 0;
  double residual = 0.0;
};

/// Iterates until delta_T(G(S_k), S_k) <= step_tol, which is the Thompson
/// length of the next unscaled step. With Scaling::TraceD each iterate is
/// alpha_k G(S_{k-1}) with alpha_k chosen so that trace(S_k^{-1} G(S_k)) = d.
FpReport picard_solve(const FixedPointMap& g, const FpConfig& cfg);

/// Result of the scale search for one FP2 step.
struct ScaleResult {
  double alpha = 1.0;
  Spd point;   // alpha T
  Spd image;   // G(alpha T)
  int evaluations = 0;
  bool scaled = false;  // false when psi had no sign change
};

/// Solves trace((alpha T)^{-1} G(alpha T)) = d for alpha by a safeguarded
/// secant iteration on log alpha, warm-started at trace(T^{-1} G(T)) / d.
ScaleResult trace_scale(const FixedPointMap& g, const Spd& t, int max_evaluations = 8);

/// trace(S^{-1} M).
double trace_ratio(const Spd& s, const Spd& m);

/// max over sampled pairs of delta_T(G(A), G(B)) / delta_T(A, B). Pairs are
/// base^{1/2} exp(Z) base^{1/2} with symmetric Gaussian Z of entry scale
/// `spread`; base defaults to the identity. The first pair is (A, e^spread A).
double estimate_contraction(const FixedPointMap& g, int n_pairs, std::uint64_t seed,
                            const std::optional<Spd>& base = std::nullopt, double spread = 0.5);

// Elementary maps, mostly for tests and oracles.
FixedPointMap identity_map(Index d);
FixedPointMap constant_map(const Spd& c);
FixedPointMap power_map(Index d, double r);
/// (G + F)(S) = G(S) + F(S).
FixedPointMap sum_map(const FixedPointMap& g, const FixedPointMap& f);

}  // namespace spdgeo
