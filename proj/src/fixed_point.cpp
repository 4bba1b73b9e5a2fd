#include "spdgeo/fixed_point.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace spdgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Applies the map and rejects non-finite or non-PD output.
std::optional<Spd> safe_apply(const FixedPointMap& g, const Spd& s) {
  try {
    const Spd out = g.apply(s);
    if (out.dim() != s.dim() || !out.matrix().allFinite()) return std::nullopt;
    Eigen::LLT<Mat> llt(out.matrix());
    if (llt.info() != Eigen::Success) return std::nullopt;
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct Residual {
  double thompson = 0.0;
  double m_dev = 0.0;
  double m_fro = 0.0;
};

Residual residual_of(const Spd& s, const Spd& gs) {
  const Vec mu = relative_spectrum(s, gs);
  Residual r;
  r.thompson = mu.array().log().abs().maxCoeff();
  r.m_dev = (mu.array() - 1.0).abs().maxCoeff();
  r.m_fro = (mu.array() - 1.0).matrix().norm();
  return r;
}

}  // namespace

double trace_ratio(const Spd& s, const Spd& m) {
  Eigen::LLT<Mat> llt(s.matrix());
  return llt.solve(m.matrix()).trace();
}

ScaleResult trace_scale(const FixedPointMap& g, const Spd& t, int max_evaluations) {
  const double d = static_cast<double>(t.dim());
  ScaleResult out;
  out.point = t;

  // phi(u) = log(trace((e^u T)^{-1} G(e^u T)) / d); same root as psi.
  struct Sample {
    double u, phi;
    Spd point, image;
  };
  const auto eval = [&](double u) -> std::optional<Sample> {
    const Spd p = t.scaled(std::exp(u));
    ++out.evaluations;
    const auto img = safe_apply(g, p);
    if (!img) return std::nullopt;
    return Sample{u, std::log(trace_ratio(p, *img) / d), p, *img};
  };

  auto s0 = eval(0.0);
  if (!s0) throw NonFiniteCost("trace_scale: map failed at T");
  out.image = s0->image;
  constexpr double kTol = 1e-11;
  if (std::abs(s0->phi) <= kTol) {
    out.scaled = true;
    return out;
  }

  Sample best = *s0;
  Sample a = *s0;  // previous secant point
  std::optional<Sample> lo, hi;  // bracket: phi(lo) > 0 > phi(hi) or any sign split
  const auto note = [&](const Sample& s) {
    if (std::abs(s.phi) < std::abs(best.phi)) best = s;
    if (s.phi > 0.0) {
      if (!lo || s.phi < lo->phi) lo = s;
    } else {
      if (!hi || s.phi > hi->phi) hi = s;
    }
  };
  note(*s0);

  double u = s0->phi;  // warm start: alpha_0 = trace(T^{-1} G(T)) / d
  std::optional<Sample> b;
  while (out.evaluations < max_evaluations) {
    if (lo && hi) {
      const double left = std::min(lo->u, hi->u), right = std::max(lo->u, hi->u);
      if (!(u > left && u < right)) {
        // Regula falsi inside the bracket when the secant leaves it.
        u = lo->u - lo->phi * (hi->u - lo->u) / (hi->phi - lo->phi);
        if (!(u > left && u < right)) u = 0.5 * (left + right);
      }
    }
    b = eval(u);
    if (!b) {
      // Map failed; pull back toward the last good point.
      u = 0.5 * (u + a.u);
      continue;
    }
    note(*b);
    if (std::abs(b->phi) <= kTol) break;
    const double denom = b->phi - a.phi;
    double next = (denom != 0.0) ? b->u - b->phi * (b->u - a.u) / denom : b->u + 1.0;
    if (!std::isfinite(next)) next = b->u + (b->phi > 0.0 ? 1.0 : -1.0);
    // Limit the secant jump in log space.
    next = std::clamp(next, b->u - 5.0, b->u + 5.0);
    a = *b;
    u = next;
  }

  if (!(lo && hi) && std::abs(best.phi) > kTol) {
    out.alpha = 1.0;
    out.point = t;
    out.image = s0->image;
    out.scaled = false;
    return out;
  }
  out.alpha = std::exp(best.u);
  out.point = best.point;
  out.image = best.image;
  out.scaled = true;
  return out;
}

FpReport picard_solve(const FixedPointMap& g, const FpConfig& cfg) {
  if (!(cfg.step_tol > 0.0)) throw InvalidInput("picard_solve: step_tol must be positive");
  if (cfg.max_iter < 0) throw InvalidInput("picard_solve: max_iter must be >= 0");
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const auto cost_of = [&](const Spd& s) { return cfg.cost ? cfg.cost(s) : kNaN; };

  FpReport rep;
  Spd s = cfg.initial ? *cfg.initial : Spd::identity(g.dim);
  if (s.dim() != g.dim) throw InvalidInput("picard_solve: initial point has the wrong dimension");

  auto gs = safe_apply(g, s);
  ++rep.map_evaluations;
  if (!gs) {
    rep.status = Status::NonFinite;
    rep.fixed_point = s;
    rep.residual = kNaN;
    return rep;
  }
  Residual res = residual_of(s, *gs);
  rep.trace.push_back({0, kNaN, res.thompson, res.m_dev, res.m_fro, 1.0, cost_of(s), elapsed()});

  rep.status = Status::MaxIter;
  int k = 0;
  while (true) {
    if (res.thompson <= cfg.step_tol) {
      rep.status = Status::Converged;
      break;
    }
    if (k >= cfg.max_iter) break;
    ++k;

    Spd next;
    std::optional<Spd> g_next;
    double alpha = 1.0;
    if (cfg.scaling == Scaling::TraceD) {
      try {
        ScaleResult sr = trace_scale(g, *gs);
        rep.map_evaluations += sr.evaluations;
        alpha = sr.alpha;
        next = std::move(sr.point);
        g_next = std::move(sr.image);
      } catch (const Error&) {
        g_next.reset();
      }
    } else {
      next = *gs;
      g_next = safe_apply(g, next);
      ++rep.map_evaluations;
    }
    if (!g_next) {
      rep.status = Status::NonFinite;
      break;
    }

    const double step = dist_thompson(next, s);
    s = std::move(next);
    gs = std::move(g_next);
    res = residual_of(s, *gs);
    rep.trace.push_back({k, step, res.thompson, res.m_dev, res.m_fro, alpha, cost_of(s), elapsed()});
  }

  rep.iterations = k;
  rep.fixed_point = s;
  rep.residual = res.thompson;
  return rep;
}

double estimate_contraction(const FixedPointMap& g, int n_pairs, std::uint64_t seed,
                            const std::optional<Spd>& base, double spread) {
  if (n_pairs < 1) throw InvalidInput("estimate_contraction: n_pairs must be >= 1");
  const Index d = g.dim;
  const Mat root = base ? Mat(mat_fn(base->matrix(), MatFn::sqrt())) : Mat(Mat::Identity(d, d));
  std::mt19937_64 rng(seed);
  const auto draw = [&] {
    const Sym z = random_sym<double>(d, rng, spread);
    return Spd::trusted(root * mat_fn(z, MatFn::exp()) * root);
  };
  double worst = 0.0;
  int done = 0;
  int attempts = 0;
  while (done < n_pairs) {
    if (++attempts > 100 * n_pairs) throw DomainError("estimate_contraction: only degenerate pairs");
    const Spd a = draw();
    // First pair along the scale direction, which random pairs rarely probe.
    const Spd b = done == 0 ? a.scaled(std::exp(spread)) : draw();
    const double dist = dist_thompson(a, b);
    if (!(dist > 1e-12)) continue;
    const auto ga = safe_apply(g, a);
    const auto gb = safe_apply(g, b);
    if (!ga || !gb) throw DomainError("estimate_contraction: map left the PD cone");
    worst = std::max(worst, dist_thompson(*ga, *gb) / dist);
    ++done;
  }
  return worst;
}

FixedPointMap identity_map(Index d) {
  return {d, [](const Spd& s) { return s; }};
}

FixedPointMap constant_map(const Spd& c) {
  return {c.dim(), [c](const Spd&) { return c; }};
}

FixedPointMap power_map(Index d, double r) {
  return {d, [r](const Spd& s) { return powm(s, r); }};
}

FixedPointMap sum_map(const FixedPointMap& g, const FixedPointMap& f) {
  if (g.dim != f.dim) throw InvalidInput("sum_map: dimension mismatch");
  return {g.dim, [g, f](const Spd& s) {
            return Spd::trusted(g.apply(s).matrix() + f.apply(s).matrix());
          }};
}

}  // namespace spdgeo
