#include "spdgeo/optim.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

namespace spdgeo {

Evaluation Problem::eval(const Spd& x) const {
  if (evaluate) return evaluate(x);
  if (!cost || !egrad) throw InvalidInput("Problem: cost and egrad must be set");
  return {cost(x), egrad(x)};
}

const char* to_string(Method m) {
  switch (m) {
    case Method::SteepestDescent:
      return "sd";
    case Method::ConjugateGradient:
      return "cg";
    case Method::Lbfgs:
      return "lbfgs";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "sd") return Method::SteepestDescent;
  if (name == "cg") return Method::ConjugateGradient;
  if (name == "lbfgs") return Method::Lbfgs;
  throw InvalidInput("unknown solver method: " + name);
}

void SolverConfig::validate() const {
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0))
    throw InvalidInput("SolverConfig: need 0 < c1 < c2 < 1");
  if (memory < 1) throw InvalidInput("SolverConfig: memory must be >= 1");
  if (max_iter < 0) throw InvalidInput("SolverConfig: max_iter must be >= 0");
  if (!(grad_tol >= 0.0)) throw InvalidInput("SolverConfig: grad_tol must be >= 0");
  if (max_line_search < 1) throw InvalidInput("SolverConfig: max_line_search must be >= 1");
}

namespace {

// Euclidean pairing trace(G xi) of two symmetric matrices.
double pair(const Mat& g, const Mat& xi) { return g.cwiseProduct(xi).sum(); }

}  // namespace

LineSearchResult wolfe_line_search(const Problem& p, const Point& x, const Evaluation& at_x,
                                   const Sym& xi, double initial_step, const SolverConfig& cfg) {
  const double f0 = at_x.cost;
  const double slope0 = pair(at_x.egrad, xi);
  if (!(slope0 < 0.0)) throw NotDescent("line search: direction is not a descent direction");
  if (!(initial_step > 0.0) || !std::isfinite(initial_step)) initial_step = 1.0;

  // Below this band cost differences are rounding noise; there the step is
  // judged by the slope alone (approximate Wolfe conditions).
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(f0);

  LineSearchResult out;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double a = initial_step;
  const auto accept = [&](Spd& y, Evaluation& ev) {
    out.ok = true;
    out.step = a;
    out.point = std::move(y);
    out.eval = std::move(ev);
  };
  for (int it = 0; it < cfg.max_line_search; ++it) {
    bool finite = false;
    Spd y;
    Evaluation ev;
    try {
      y = retract(x, a * xi);
      ev = p.eval(y);
      ++out.evaluations;
      finite = std::isfinite(ev.cost);
    } catch (const StepTooLarge&) {
    } catch (const DomainError&) {
    } catch (const NonFiniteCost&) {
    }
    const bool armijo = finite && ev.cost < f0 && ev.cost <= f0 + cfg.c1 * a * slope0;
    if (armijo) {
      const double slope = pair(ev.egrad, geodesic_velocity(x, xi, y));
      if (slope >= cfg.c2 * slope0) {
        accept(y, ev);
        return out;
      }
      lo = a;
    } else if (finite && ev.cost <= f0 + noise) {
      const double slope = pair(ev.egrad, geodesic_velocity(x, xi, y));
      if (slope < cfg.c2 * slope0) {
        lo = a;
      } else if (slope > (2.0 * cfg.c1 - 1.0) * slope0) {
        hi = a;
      } else {
        accept(y, ev);
        return out;
      }
    } else {
      hi = a;
    }
    a = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * a;
  }
  return out;
}

namespace {

// One accepted step X_j -> X_{j+1} with its transport, and the curvature pair
// (s, y) stored at X_{j+1} when g(s, y) > 0.
struct Link {
  Transport transport;
  Point at;
  bool has_pair = false;
  Sym s, y;
  double rho = 0.0;
};

// Two-loop form of the recursive HessMul: each stored pair is applied at
// the point where it was created, moving between points with T and T^{-1}.
Sym hess_mul(const std::deque<Link>& links, const Sym& p, double h_diag) {
  std::vector<double> a(links.size(), 0.0);
  Sym q = p;
  for (std::size_t j = links.size(); j-- > 0;) {
    const Link& l = links[j];
    if (l.has_pair) {
      a[j] = l.rho * inner(l.at, l.s, q);
      q = q - a[j] * l.y;
    }
    q = l.transport.apply_inverse(q);
  }
  Sym r = h_diag * q;
  for (std::size_t j = 0; j < links.size(); ++j) {
    const Link& l = links[j];
    r = l.transport.apply(r);
    if (l.has_pair) {
      const double b = l.rho * inner(l.at, l.y, r);
      r = r + (a[j] - b) * l.s;
    }
  }
  return r;
}

}  // namespace

SolveReport solve(const Problem& p, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  Spd x0 = cfg.initial_point ? *cfg.initial_point : Spd::identity(p.dim);
  if (x0.dim() != p.dim) throw InvalidInput("solve: initial point has the wrong dimension");

  Point x(x0);
  Evaluation ev = p.eval(x.value());
  if (!std::isfinite(ev.cost)) throw NonFiniteCost("solve: cost is not finite at the initial point");
  Sym grad = egrad_to_rgrad(x, ev.egrad);
  double gn = norm(x, grad);

  SolveReport rep;
  rep.trace.push_back({0, ev.cost, gn, elapsed()});

  const Index d = p.dim;
  const int cg_restart = static_cast<int>(d * (d + 1) / 2);
  int since_restart = 0;
  Sym prev_dir;
  double prev_gn2 = 0.0;
  double prev_cost = 0.0;
  double prev_step = gn > 0.0 ? 1.0 / gn : 1.0;

  std::deque<Link> links;
  double h_diag = gn > 0.0 ? 1.0 / gn : 1.0;

  rep.status = Status::MaxIter;
  int k = 0;
  for (; k < cfg.max_iter; ++k) {
    if (gn <= cfg.grad_tol) {
      rep.status = Status::Converged;
      break;
    }

    Sym xi;
    double step0 = 1.0;
    switch (cfg.method) {
      case Method::SteepestDescent:
        xi = -grad;
        break;
      case Method::ConjugateGradient:
        if (k == 0 || since_restart >= cg_restart) {
          xi = -grad;
          since_restart = 0;
        } else {
          xi = -grad + (gn * gn / prev_gn2) * prev_dir;
          if (!(inner(x, grad, xi) < 0.0)) {
            xi = -grad;
            since_restart = 0;
          }
        }
        ++since_restart;
        break;
      case Method::Lbfgs:
        xi = -hess_mul(links, grad, h_diag);
        break;
    }

    if (cfg.method != Method::Lbfgs) {
      if (k == 0) {
        step0 = prev_step;
      } else {
        const double slope = inner(x, grad, xi);
        const double guess = 2.0 * (ev.cost - prev_cost) / slope;
        step0 = (std::isfinite(guess) && guess > 0.0) ? 1.01 * guess : prev_step;
      }
    }

    LineSearchResult ls;
    try {
      ls = wolfe_line_search(p, x, ev, xi, step0, cfg);
    } catch (const NotDescent&) {
      if (cfg.method != Method::Lbfgs) throw;
      links.clear();
      xi = -h_diag * grad;
      ls = wolfe_line_search(p, x, ev, xi, 1.0, cfg);
    }
    if (!ls.ok) {
      rep.status = Status::LineSearchFail;
      break;
    }

    Point y(ls.point);
    Sym grad_y = egrad_to_rgrad(y, ls.eval.egrad);
    // Velocity of the retraction curve at Y is the parallel transport of xi.
    const Sym xi_y = geodesic_velocity(x, xi, y.value());

    if (cfg.method == Method::Lbfgs) {
      Link l{Transport(x, y), y, false, Sym(), Sym(), 0.0};
      const Sym s = ls.step * xi_y;
      const Sym yv = grad_y - l.transport.apply(grad);
      const double sy = inner(y, s, yv);
      if (sy > 0.0) {
        l.has_pair = true;
        l.s = s;
        l.y = yv;
        l.rho = 1.0 / sy;
        h_diag = sy / inner(y, yv, yv);
      }
      links.push_back(std::move(l));
      while (static_cast<int>(links.size()) > cfg.memory) links.pop_front();
    }

    prev_cost = ev.cost;
    prev_step = ls.step;
    prev_gn2 = gn * gn;
    prev_dir = xi_y;

    x = std::move(y);
    ev = std::move(ls.eval);
    grad = std::move(grad_y);
    gn = norm(x, grad);
    rep.trace.push_back({k + 1, ev.cost, gn, elapsed()});
  }
  if (k == cfg.max_iter && gn <= cfg.grad_tol) rep.status = Status::Converged;

  rep.iterations = static_cast<int>(rep.trace.size()) - 1;
  rep.minimizer = x.value();
  rep.grad_norm = gn;
  return rep;
}

}  // namespace spdgeo
