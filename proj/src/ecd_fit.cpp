#include <cmath>
#include <limits>

#include "spdgeo/ecd.hpp"

namespace spdgeo::ecd {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

FitMethod parse_fit_method(const std::string& name) {
  for (FitMethod m : {FitMethod::Auto, FitMethod::Fp, FitMethod::Fp2, FitMethod::Cccp,
                      FitMethod::Sd, FitMethod::Cg, FitMethod::Lbfgs})
    if (name == to_string(m)) return m;
  throw InvalidInput("unknown fit method: " + name);
}

const char* to_string(FitMethod m) {
  switch (m) {
    case FitMethod::Auto:
      return "auto";
    case FitMethod::Fp:
      return "fp";
    case FitMethod::Fp2:
      return "fp2";
    case FitMethod::Cccp:
      return "cccp";
    case FitMethod::Sd:
      return "sd";
    case FitMethod::Cg:
      return "cg";
    case FitMethod::Lbfgs:
      return "lbfgs";
  }
  return "unknown";
}

std::optional<std::string> incompatibility(FitMethod m, const DgfClass& cls) {
  if (!cls.any()) return std::string("dgf lies in none of the classes g-convex, LN, LC");
  switch (m) {
    case FitMethod::Auto:
      return std::nullopt;
    case FitMethod::Fp:
    case FitMethod::Fp2:
      if (!(cls.ln || cls.lc)) return std::string("fixed-point methods need class LN or LC");
      return std::nullopt;
    case FitMethod::Cccp:
      if (!cls.lc) return std::string("cccp needs class LC");
      return std::nullopt;
    case FitMethod::Sd:
    case FitMethod::Cg:
    case FitMethod::Lbfgs:
      return std::nullopt;
  }
  return std::string("unknown method");
}

FitReport mle_fit(const Dgf& dgf, const Dataset& data, const FitOptions& opts) {
  const Index d = data.d();
  FitReport rep;
  rep.dgf_class = classify(dgf, d);
  if (auto why = incompatibility(opts.method, rep.dgf_class))
    throw IncompatibleMethod(std::string(to_string(opts.method)) + " for " + dgf.name() + ": " + *why);

  FitMethod method = opts.method;
  if (method == FitMethod::Auto)
    method = rep.dgf_class.recommended == Solver::Manifold ? FitMethod::Lbfgs : FitMethod::Fp2;
  rep.method = method;

  const EcdProblem prob(dgf, data);
  if (!prob.full_rank()) throw RankError("mle_fit: data do not span R^d");
  const double inv_n = 1.0 / static_cast<double>(prob.n());
  if (opts.check_existence) {
    if (auto k = dgf.as_kotz(d)) rep.existence = existence_check(data, k->alpha);
  }
  const Spd start = opts.initial ? *opts.initial : prob.default_start();

  switch (method) {
    case FitMethod::Fp:
    case FitMethod::Fp2:
    case FitMethod::Cccp: {
      FpConfig cfg;
      if (opts.tol) cfg.step_tol = *opts.tol;
      if (opts.max_iter) cfg.max_iter = *opts.max_iter;
      const bool cccp = method == FitMethod::Cccp;
      cfg.scaling = method == FitMethod::Fp2 ? Scaling::TraceD : Scaling::Off;
      auto shared = std::make_shared<const EcdProblem>(prob);
      FixedPointMap map;
      if (cccp) {
        // ClassViolation must surface here rather than read as a failed map.
        cfg.initial = inverse(start);
        prob.cccp_step(*cfg.initial);
        map = {d, [shared](const Spd& p) { return shared->cccp_step(p); }};
        cfg.cost = [shared, inv_n](const Spd& p) { return shared->nll(inverse(p)) * inv_n; };
      } else {
        cfg.initial = start;
        map = prob.as_map();
        cfg.cost = [shared, inv_n](const Spd& s) { return shared->nll(s) * inv_n; };
      }
      const FpReport fp = picard_solve(map, cfg);
      rep.status = fp.status;
      rep.iterations = fp.iterations;
      rep.scatter = cccp ? inverse(fp.fixed_point) : fp.fixed_point;
      for (const auto& row : fp.trace) {
        // Riemannian gradient of Phi/n at S is (1/2)(S - G(S)), with norm
        // (1/2)||S^{-1/2} G(S) S^{-1/2} - I||_F. For cccp the same expression
        // is taken in P = S^{-1}, which agrees to first order.
        rep.trace.push_back({row.iter, row.cost, 0.5 * row.m_fro, row.delta_t_step, row.time_s});
      }
      break;
    }
    case FitMethod::Sd:
    case FitMethod::Cg:
    case FitMethod::Lbfgs: {
      SolverConfig cfg;
      cfg.method = method == FitMethod::Sd   ? Method::SteepestDescent
                   : method == FitMethod::Cg ? Method::ConjugateGradient
                                             : Method::Lbfgs;
      cfg.grad_tol = opts.tol.value_or(1e-7);
      cfg.max_iter = opts.max_iter.value_or(method == FitMethod::Sd ? 20000 : 5000);
      cfg.initial_point = start;
      const SolveReport sr = solve(prob.as_problem(), cfg);
      rep.status = sr.status;
      rep.iterations = sr.iterations;
      rep.scatter = sr.minimizer;
      for (const auto& row : sr.trace)
        rep.trace.push_back({row.iter, row.cost, row.grad_norm, kNaN, row.time_s});
      break;
    }
    case FitMethod::Auto:
      break;
  }
  if (!rep.trace.empty()) {
    rep.final_cost = rep.trace.back().cost;
    rep.grad_norm = rep.trace.back().grad_norm;
  }
  return rep;
}

}  // namespace spdgeo::ecd
