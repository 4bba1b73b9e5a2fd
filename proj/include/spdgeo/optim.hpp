#pragma once

// Line-search solvers on the SPD manifold: steepest descent, Fletcher-Reeves
// conjugate gradient and limited-memory Riemannian BFGS.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spdgeo/manifold.hpp"

namespace spdgeo {

struct Evaluation {
  double cost = 0.0;
  Sym egrad;  // symmetrized Euclidean gradient
};

/// Cost and Euclidean gradient over the SPD cone. `evaluate` is an optional
/// fused cost+gradient; when unset, `cost` and `egrad` are called separately.
struct Problem {
  Index dim = 0;
  std::function<double(const Spd&)> cost;
  std::function<Sym(const Spd&)> egrad;
  std::function<Evaluation(const Spd&)> evaluate;

  Evaluation eval(const Spd& x) const;
};

enum class Method { SteepestDescent, ConjugateGradient, Lbfgs };

const char* to_string(Method m);
/// "sd", "cg", "lbfgs"; throws InvalidInput otherwise.
Method parse_method(const std::string& name);

struct SolverConfig {
  Method method = Method::Lbfgs;
  int max_iter = 1000;
  double grad_tol = 1e-6;
  int memory = 10;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 50;
  std::optional<Spd> initial_point;

  void validate() const;
};

struct TraceRow {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double time_s = 0.0;
};

struct SolveReport {
  Spd minimizer;
  std::vector<TraceRow> trace;
  Status status = Status::MaxIter;
  int iterations = 0;
  double grad_norm = 0.0;
};

SolveReport solve(const Problem& p, const SolverConfig& cfg);

struct LineSearchResult {
  bool ok = false;
  double step = 0.0;
  Spd point;
  Evaluation eval;
  int evaluations = 0;
};

/// Weak Wolfe search along t -> R_X(t xi) by bracketing: doubling until the
/// Armijo condition fails, bisection once bracketed. The slope at a trial
/// point Y is trace(egrad(Y) xi X^{-1} Y), i.e. the gradient paired with the
/// direction transported to Y. Accepted steps strictly decrease the cost.
///
/// Throws NotDescent if g_X(grad, xi) >= 0.
LineSearchResult wolfe_line_search(const Problem& p, const Point& x, const Evaluation& at_x,
                                   const Sym& xi, double initial_step, const SolverConfig& cfg);

// Built-in problems.

/// sum_i w_i delta_R(X, A_i)^2.
Problem karcher_problem(const std::vector<double>& weights, const std::vector<Spd>& mats);

/// sum_i w_i sqrt(delta_R(X, A_i)^2 + eps^2).
Problem median_problem(const std::vector<double>& weights, const std::vector<Spd>& mats,
                       double eps = 1e-9);

/// sum_i w_i S(X, A_i) with S(X, A) = logdet((X + A) / 2) - logdet(X A) / 2.
Problem sdiv_problem(const std::vector<double>& weights, const std::vector<Spd>& mats);

/// ||sum_i w_i log(X^{-1/2} A_i X^{-1/2})||_F, zero at the Karcher mean.
double karcher_residual(const std::vector<double>& weights, const std::vector<Spd>& mats,
                        const Spd& x);

/// Equal weights 1/n.
std::vector<double> uniform_weights(std::size_t n);

}  // namespace spdgeo
