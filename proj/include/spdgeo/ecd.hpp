#pragma once

// Zero-mean elliptically contoured distributions with density
// det(S)^{-1/2} phi(x^T S^{-1} x): dgf catalog, negative log-likelihood,
// fixed-point and CCCP maps, sampling and maximum-likelihood fitting.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spdgeo/fixed_point.hpp"
#include "spdgeo/optim.hpp"

namespace spdgeo::ecd {

enum class DgfKind { Kotz, StudentT, PowerExponential, WDist, EllipticalGamma, PearsonII, Logistic };

/// Kotz parameters phi(t) = t^{alpha - d/2} exp(-(t/b)^beta).
struct KotzParams {
  double alpha, b, beta;
};

/// Density generating function, normalizing constants dropped.
struct Dgf {
  DgfKind kind = DgfKind::Kotz;
  double alpha = 0.0;  // Kotz
  double b = 1.0;      // Kotz, PowerExponential, WDist, EllipticalGamma
  double beta = 1.0;   // Kotz
  double nu = 1.0;     // every other parametric variant

  static Dgf kotz(double alpha, double b, double beta);
  /// Kotz(alpha = d/2, b = 2, beta = 1).
  static Dgf gaussian(Index d);
  static Dgf student_t(double nu);
  static Dgf power_exponential(double nu, double b);
  static Dgf wdist(double nu, double b);
  static Dgf elliptical_gamma(double nu, double b);
  static Dgf pearson2(double nu);
  static Dgf logistic();

  /// Throws InvalidInput on out-of-range parameters.
  void validate() const;

  /// -log phi(t) for t > 0 (+inf outside the support).
  double neg_log_phi(double t, Index d) const;
  /// h(t) = -phi'(t) / phi(t).
  double h(double t, Index d) const;

  /// Equivalent Kotz parameters for the Kotz-family variants.
  std::optional<KotzParams> as_kotz(Index d) const;

  std::string name() const;
  /// Named parameters in a stable order, e.g. {{"alpha", 1}, {"b", 2}, ...}.
  std::vector<std::pair<std::string, double>> params() const;
};

/// Parses "kotz", "gaussian", "student_t", ... from a name and a parameter
/// lookup; missing parameters raise InvalidInput.
DgfKind parse_dgf_kind(const std::string& name);
const char* to_string(DgfKind k);

enum class Solver { FixedPoint, Cccp, Manifold };
const char* to_string(Solver s);

struct DgfClass {
  bool gconvex = false;
  bool ln = false;
  bool lc = false;
  Solver recommended = Solver::Manifold;

  bool any() const { return gconvex || ln || lc; }
};

DgfClass classify(const Dgf& dgf, Index d);

struct Provenance {
  std::uint64_t seed = 0;
  Dgf dgf;
  Spd scatter;
};

/// n samples in R^d, stored column-wise (d x n).
class Dataset {
 public:
  Dataset() = default;
  /// From an n x d row matrix. Rejects non-finite entries and zero rows.
  static Dataset from_rows(const Mat& rows);
  /// Empty dataset of dimension d.
  static Dataset empty(Index d);

  Index n() const { return x_.cols(); }
  Index d() const { return x_.rows(); }
  const Mat& columns() const { return x_; }
  Mat rows() const { return x_.transpose(); }

  /// Numerical rank of the data matrix.
  Index rank() const;
  /// (1/n) sum x_i x_i^T.
  Mat second_moment() const;

  std::optional<Provenance> provenance;

 private:
  Mat x_;
};

/// Negative log-likelihood Phi(S) = (n/2) logdet S + sum_i -log phi(t_i),
/// t_i = x_i^T S^{-1} x_i, with its derivatives and iteration maps.
class EcdProblem {
 public:
  /// Throws RankError on empty data. Rank deficiency is only fatal for the
  /// fixed-point and CCCP maps.
  EcdProblem(Dgf dgf, Dataset data);

  bool full_rank() const { return rank_ == dim(); }

  const Dgf& dgf() const { return dgf_; }
  const Dataset& data() const { return *data_; }
  Index dim() const { return data_->d(); }
  Index n() const { return data_->n(); }

  Vec mahalanobis(const Spd& s) const;
  double nll(const Spd& s) const;
  Sym nll_egrad(const Spd& s) const;
  Evaluation evaluate(const Spd& s) const;

  /// (2/n) sum_i h(t_i) x_i x_i^T.
  Spd fp_map(const Spd& s) const;
  /// ((2/n) sum_i h(x_i^T P x_i) x_i x_i^T)^{-1}; ClassViolation if some h < 0.
  Spd cccp_step(const Spd& p) const;

  /// Mean NLL Phi / n as a manifold problem.
  Problem as_problem() const;
  FixedPointMap as_map() const;

  /// (trace(C) / d) I with C the second moment; widened for PearsonII so
  /// that every t_i <= 1/2.
  Spd default_start() const;

 private:
  // Cholesky solve Z = L^{-1} X and t = column norms of Z.
  struct Work {
    Eigen::LLT<Mat> llt;
    Mat z;
    Vec t;
  };
  Work work(const Spd& s) const;
  Vec weights(const Vec& t) const;
  void require_full_rank(const char* who) const;

  Dgf dgf_;
  Index rank_ = 0;
  std::shared_ptr<const Dataset> data_;
};

// Sampling.

/// x = r S^{1/2} u with u uniform on the sphere. Kotz family via
/// (r^2 / b)^beta ~ Gamma(alpha / beta, 1); StudentT through a chi-square
/// mixture; PearsonII via r^2 ~ Beta(d/2, nu + 1). Logistic: Unsupported.
Dataset sample(const Dgf& dgf, const Spd& scatter, Index n, std::uint64_t seed);

// Existence diagnostics.

struct ExistenceResult {
  bool ok = true;
  bool exact = true;       // every relevant subspace was enumerated
  std::string message;
  Mat witness;             // basis of the offending subspace (columns)
  double fraction = 0.0;   // |X cap L| / |X|
  double bound = 0.0;      // d_L / (d - 2 alpha)
};

/// Checks |X cap L| / |X| < d_L / (d - 2 alpha) over subspaces L. Exact for
/// d <= 3 (up to a cap on distinct directions), heuristic above.
ExistenceResult existence_check(const Dataset& data, double alpha);

// Fitting.

enum class FitMethod { Auto, Fp, Fp2, Cccp, Sd, Cg, Lbfgs };
FitMethod parse_fit_method(const std::string& name);
const char* to_string(FitMethod m);

struct FitOptions {
  FitMethod method = FitMethod::Auto;
  /// Fixed-point: Thompson step tolerance. Manifold: gradient norm of Phi/n.
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<Spd> initial;
  bool check_existence = true;
};

struct FitTraceRow {
  int iter = 0;
  double cost = 0.0;          // Phi / n
  double grad_norm = 0.0;     // Riemannian gradient norm of Phi / n
  double delta_t_step = 0.0;  // NaN where undefined
  double time_s = 0.0;
};

struct FitReport {
  Spd scatter;
  FitMethod method = FitMethod::Auto;  // method actually run
  DgfClass dgf_class;
  Status status = Status::MaxIter;
  int iterations = 0;
  double final_cost = 0.0;
  double grad_norm = 0.0;
  std::vector<FitTraceRow> trace;
  std::optional<ExistenceResult> existence;
};

/// Throws IncompatibleMethod when the method does not apply to the dgf
/// class, RankError for rank-deficient data.
FitReport mle_fit(const Dgf& dgf, const Dataset& data, const FitOptions& opts = {});

/// Checks a method against a class; returns an explanation when incompatible.
std::optional<std::string> incompatibility(FitMethod m, const DgfClass& cls);

}  // namespace spdgeo::ecd
