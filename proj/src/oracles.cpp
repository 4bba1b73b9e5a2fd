#include "spdgeo/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace spdgeo::oracles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Tally {
 public:
  Tally(std::string name, double tol) : tol_(tol) {
    r_.name = std::move(name);
    r_.worst_slack = kInf;
  }
  // One trial may record several margins; it counts once.
  void begin() { bad_ = false; }
  void margin(double slack) {
    if (std::isnan(slack)) slack = -kInf;
    r_.worst_slack = std::min(r_.worst_slack, slack);
    if (slack < -tol_) bad_ = true;
  }
  void strict(double slack) {
    if (std::isnan(slack)) slack = -kInf;
    r_.worst_slack = std::min(r_.worst_slack, slack);
    if (!(slack > 0.0)) bad_ = true;
  }
  void end() {
    ++r_.trials;
    if (bad_) ++r_.violations;
  }
  CheckReport report() const { return r_; }

 private:
  CheckReport r_;
  double tol_;
  bool bad_ = false;
};

// (rhs - lhs) scaled by max(1, |rhs|).
double ineq(double lhs, double rhs) { return (rhs - lhs) / std::max(1.0, std::abs(rhs)); }
double eq(double lhs, double rhs) { return -std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)); }

Vec eigs_desc(const Mat& m) { return eig_sym(symmetric_part(m)).values; }

Mat gaussian(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = n(rng);
  return m;
}

// Gaussian matrix with condition number at most max_cond and full column rank.
Mat well_conditioned(Index r, Index c, std::mt19937_64& rng, double max_cond = 1e3) {
  for (;;) {
    Mat m = gaussian(r, c, rng);
    Eigen::JacobiSVD<Mat> svd(m);
    const Vec s = svd.singularValues();
    if (s(s.size() - 1) > 0.0 && s(0) <= max_cond * s(s.size() - 1)) return m;
  }
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Q diag(s) with Haar-like orthogonal Q and s in [1/2, 2]. Equality checks
// need M of moderate condition: M^T A M squares into cond(A) cond(M)^2.
Mat moderate_invertible(Index d, std::mt19937_64& rng) {
  const Eigen::HouseholderQR<Mat> qr(gaussian(d, d, rng));
  Vec s(d);
  for (Index i = 0; i < d; ++i) s(i) = std::exp(uniform(rng, std::log(0.5), std::log(2.0)));
  return Mat(qr.householderQ()) * s.asDiagonal();
}

Spd midpoint(const Options& opts, const Spd& a, const Spd& b) {
  return opts.mean ? opts.mean(a, b) : geometric_mean(a, b);
}

double sdiv(const Spd& x, const Spd& y) {
  return logdet(Spd::trusted(0.5 * (x.matrix() + y.matrix()))) - 0.5 * logdet(x) -
         0.5 * logdet(y);
}

// A scalar function on PD matrices, possibly with random auxiliary data fixed
// per trial. `linear` marks g-linear functions checked in both directions.
struct TrialFn {
  std::function<double(const Spd&)> f;
  bool linear = false;
};

using Factory = std::function<TrialFn(Index, std::mt19937_64&)>;

// Positive linear map X -> B + sum_i A_i^T X A_i into k x k matrices.
std::function<Mat(const Mat&)> linmap(Index d, std::mt19937_64& rng) {
  const Index k = std::max<Index>(1, d - 1);
  const Mat b = 0.1 * random_pd(k, rng).matrix();
  std::vector<Mat> as{gaussian(d, k, rng), gaussian(d, k, rng)};
  return [b, as](const Mat& x) {
    Mat out = b;
    for (const Mat& a : as) out += a.transpose() * x * a;
    return Mat(symmetric_part(out));
  };
}

const std::map<std::string, Factory>& midpoint_factories() {
  static const std::map<std::string, Factory> m = {
      {"trace_exp",
       [](Index, std::mt19937_64&) {
         return TrialFn{[](const Spd& x) { return eigs_desc(x.matrix()).array().exp().sum(); }};
       }},
      {"trace_pow2",
       [](Index, std::mt19937_64&) {
         return TrialFn{[](const Spd& x) { return eigs_desc(x.matrix()).array().square().sum(); }};
       }},
      {"lambda_max_exp",
       [](Index, std::mt19937_64&) {
         return TrialFn{[](const Spd& x) { return std::exp(eigs_desc(x.matrix())(0)); }};
       }},
      {"lambda_max",
       [](Index, std::mt19937_64&) {
         return TrialFn{[](const Spd& x) { return eigs_desc(x.matrix())(0); }};
       }},
      {"topk_square",
       [](Index d, std::mt19937_64&) {
         const Index k = std::max<Index>(1, d / 2);
         return TrialFn{
             [k](const Spd& x) { return eigs_desc(x.matrix()).head(k).array().square().sum(); }};
       }},
      {"neg_logdet",
       [](Index, std::mt19937_64&) {
         return TrialFn{[](const Spd& x) { return -logdet(x); }, true};
       }},
      {"logdet_linmap",
       [](Index d, std::mt19937_64& rng) {
         auto phi = linmap(d, rng);
         return TrialFn{[phi](const Spd& x) { return logdet(Spd::trusted(phi(x.matrix()))); }};
       }},
      {"logdet_linmap_inv",
       [](Index d, std::mt19937_64& rng) {
         auto phi = linmap(d, rng);
         return TrialFn{
             [phi](const Spd& x) { return logdet(Spd::trusted(phi(inverse(x).matrix()))); }};
       }},
      {"trace_pow2_linmap",
       [](Index d, std::mt19937_64& rng) {
         auto phi = linmap(d, rng);
         return TrialFn{[phi](const Spd& x) {
           const Mat y = phi(x.matrix());
           return (y * y).trace();
         }};
       }},
      {"trace_pow2_linmap_inv",
       [](Index d, std::mt19937_64& rng) {
         auto phi = linmap(d, rng);
         return TrialFn{[phi](const Spd& x) {
           const Mat y = phi(inverse(x).matrix());
           return (y * y).trace();
         }};
       }},
      {"sdiv_first",
       [](Index d, std::mt19937_64& rng) {
         const Spd y = random_pd(d, rng);
         return TrialFn{[y](const Spd& x) { return sdiv(x, y); }};
       }},
      {"sdiv_second",
       [](Index d, std::mt19937_64& rng) {
         const Spd y = random_pd(d, rng);
         return TrialFn{[y](const Spd& x) { return sdiv(y, x); }};
       }},
      {"kyfan_log_square",
       [](Index, std::mt19937_64&) {
         return TrialFn{[](const Spd& x) {
           return eigs_desc(x.matrix()).array().log().square().sum();
         }};
       }},
      {"kyfan_log_exp",
       [](Index d, std::mt19937_64&) {
         const Index k = std::max<Index>(1, d - 1);
         return TrialFn{[k](const Spd& x) {
           return eigs_desc(x.matrix()).head(k).array().log().exp().sum();
         }};
       }},
      {"kyfan_abs_log",
       [](Index d, std::mt19937_64&) {
         const Index k = std::max<Index>(1, d / 2);
         return TrialFn{[k](const Spd& x) {
           Vec a = eigs_desc(x.matrix()).array().log().abs();
           std::sort(a.data(), a.data() + a.size(), std::greater<>());
           return a.head(k).sum();
         }};
       }},
      {"riemannian_distance",
       [](Index d, std::mt19937_64& rng) {
         const Spd c = random_pd(d, rng);
         return TrialFn{[c](const Spd& x) { return dist_riem(x, c); }};
       }},
      {"quadratic_inverse",
       [](Index d, std::mt19937_64& rng) {
         const Vec z = gaussian(d, 1, rng);
         return TrialFn{[z](const Spd& x) {
           Eigen::LLT<Mat> llt(x.matrix());
           return z.dot(llt.solve(z));
         }};
       }},
  };
  return m;
}

// Log-g-convex functions, evaluated as log f.
const std::map<std::string, Factory>& log_factories() {
  static const std::map<std::string, Factory> m = {
      {"trace_congruence",
       [](Index d, std::mt19937_64& rng) {
         const Mat x = gaussian(d, std::max<Index>(1, d - 1), rng);
         return TrialFn{
             [x](const Spd& a) { return std::log((x.transpose() * a.matrix() * x).trace()); }};
       }},
      {"prod_exp",
       [](Index d, std::mt19937_64&) {
         const Index k = std::max<Index>(1, d - 1);
         return TrialFn{[k](const Spd& a) { return eigs_desc(a.matrix()).head(k).sum(); }};
       }},
      {"prod_quadratic",
       [](Index d, std::mt19937_64&) {
         const Index k = std::max<Index>(1, d - 1);
         return TrialFn{[k](const Spd& a) {
           const Vec l = eigs_desc(a.matrix()).head(k);
           return (1.0 + l.array() + l.array().square()).log().sum();
         }};
       }},
      {"trace_exp",
       [](Index, std::mt19937_64&) {
         return TrialFn{[](const Spd& a) {
           const Vec l = eigs_desc(a.matrix());
           const double top = l(0);
           return top + std::log((l.array() - top).exp().sum());
         }};
       }},
  };
  return m;
}

std::vector<std::string> keys(const std::map<std::string, Factory>& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

CheckReport midpoint_like(const std::map<std::string, Factory>& catalog, const std::string& f,
                          const std::string& prefix, Index d, int trials, std::uint64_t seed,
                          const Options& opts) {
  const auto it = catalog.find(f);
  if (it == catalog.end()) throw InvalidInput("unknown oracle function: " + f);
  Tally t(prefix + f + "@d" + std::to_string(d), opts.tol);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d, rng);
    const Spd b = random_pd(d, rng);
    const TrialFn fn = it->second(d, rng);
    const double fa = fn.f(a), fb = fn.f(b), fm = fn.f(midpoint(opts, a, b));
    const double avg = 0.5 * fa + 0.5 * fb;
    const double scale = std::max(1.0, 0.5 * std::abs(fa) + 0.5 * std::abs(fb));
    t.begin();
    t.margin((avg - fm) / scale);
    if (fn.linear) t.margin((fm - avg) / scale);
    t.end();
  }
  return t.report();
}

}  // namespace

MeanKernel default_mean() {
  return [](const Spd& a, const Spd& b) { return geometric_mean(a, b); };
}

std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

const std::vector<std::string>& midpoint_catalog() {
  static const std::vector<std::string> k = keys(midpoint_factories());
  return k;
}

const std::vector<std::string>& log_catalog() {
  static const std::vector<std::string> k = keys(log_factories());
  return k;
}

CheckReport midpoint_gconvexity_check(const std::string& f, Index d, int trials,
                                      std::uint64_t seed, const Options& opts) {
  return midpoint_like(midpoint_factories(), f, "gconvex/", d, trials, seed, opts);
}

CheckReport log_gconvexity_check(const std::string& f, Index d, int trials, std::uint64_t seed,
                                 const Options& opts) {
  return midpoint_like(log_factories(), f, "log_gconvex/", d, trials, seed, opts);
}

CheckReport log_majorization_check(Index d, double t, int trials, std::uint64_t seed,
                                   const Options& opts) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("log_majorization_check: t must lie in [0, 1]");
  Tally tally("majorization/t=" + std::to_string(t).substr(0, 4) + "@d" + std::to_string(d),
              opts.tol);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d, rng);
    const Spd b = random_pd(d, rng);
    const Vec l1 = eigs_desc(geodesic(a, b, t).matrix()).array().log();
    const Mat bh = mat_fn(b.matrix(), MatFn::pow(0.5 * t));
    const Mat a1 = mat_fn(a.matrix(), MatFn::pow(1.0 - t));
    const Vec l2 = eigs_desc(bh * a1 * bh).array().log();
    const Vec la = eigs_desc(a.matrix()).array().log();
    const Vec lb = eigs_desc(b.matrix()).array().log();
    const Vec l3 = (1.0 - t) * la + t * lb;
    tally.begin();
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    for (Index k = 0; k < d; ++k) {
      p1 += l1(k);
      p2 += l2(k);
      p3 += l3(k);
      if (k + 1 < d) {
        tally.margin(ineq(p1, p2));
        tally.margin(ineq(p2, p3));
      } else {
        tally.margin(eq(p1, p2));
        tally.margin(eq(p2, p3));
      }
    }
    tally.end();
  }
  return tally.report();
}

CheckReport thompson_inverse_check(Index d, int trials, std::uint64_t seed, const Options& opts) {
  Tally t("thompson/inverse@d" + std::to_string(d), opts.tol);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d, rng), b = random_pd(d, rng);
    t.begin();
    t.margin(eq(dist_thompson(inverse(a), inverse(b)), dist_thompson(a, b)));
    t.end();
  }
  return t.report();
}

CheckReport thompson_congruence_check(Index d, int trials, std::uint64_t seed,
                                      const Options& opts) {
  Tally t("thompson/congruence@d" + std::to_string(d), opts.tol);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d, rng), b = random_pd(d, rng);
    const Mat m = moderate_invertible(d, rng);
    const Spd ma = Spd::trusted(m.transpose() * a.matrix() * m);
    const Spd mb = Spd::trusted(m.transpose() * b.matrix() * m);
    t.begin();
    t.margin(eq(dist_thompson(ma, mb), dist_thompson(a, b)));
    t.end();
  }
  return t.report();
}

CheckReport thompson_power_check(Index d, int trials, std::uint64_t seed, const Options& opts) {
  Tally t("thompson/power@d" + std::to_string(d), opts.tol);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d, rng), b = random_pd(d, rng);
    const double p = uniform(rng, -1.0, 1.0);
    t.begin();
    t.margin(ineq(dist_thompson(powm(a, p), powm(b, p)), std::abs(p) * dist_thompson(a, b)));
    t.end();
  }
  return t.report();
}

CheckReport thompson_convex_sum_check(Index d, int trials, std::uint64_t seed,
                                      const Options& opts) {
  Tally t("thompson/convex_sum@d" + std::to_string(d), opts.tol);
  constexpr int kTerms = 3;
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    Vec w(kTerms);
    for (int j = 0; j < kTerms; ++j) w(j) = uniform(rng, 0.0, 1.0);
    w /= w.sum();
    Mat sa = Mat::Zero(d, d), sb = Mat::Zero(d, d);
    double worst = 0.0;
    for (int j = 0; j < kTerms; ++j) {
      const Spd a = random_pd(d, rng), b = random_pd(d, rng);
      sa += w(j) * a.matrix();
      sb += w(j) * b.matrix();
      worst = std::max(worst, dist_thompson(a, b));
    }
    t.begin();
    t.margin(ineq(dist_thompson(Spd::trusted(sa), Spd::trusted(sb)), worst));
    t.end();
  }
  return t.report();
}

CheckReport thompson_translation_check(Index d, int trials, std::uint64_t seed,
                                       const Options& opts) {
  Tally t("thompson/translation@d" + std::to_string(d), opts.tol);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd x = random_pd(d, rng), y = random_pd(d, rng), c = random_pd(d, rng);
    const double alpha = std::max(eigs_desc(x.matrix())(0), eigs_desc(y.matrix())(0));
    const double beta = eig_sym(c).min();
    const double lhs = dist_thompson(Spd::trusted(x.matrix() + c.matrix()),
                                     Spd::trusted(y.matrix() + c.matrix()));
    t.begin();
    t.margin(ineq(lhs, alpha / (alpha + beta) * dist_thompson(x, y)));
    t.end();
  }
  return t.report();
}

CheckReport compression_check(Index d, int trials, std::uint64_t seed, const Options& opts) {
  Tally t("thompson/compression@d" + std::to_string(d), opts.tol);
  const Index k = std::max<Index>(1, d - 1);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d, rng), b = random_pd(d, rng);
    const Mat m = well_conditioned(d, k, rng);
    const Spd ma = Spd::trusted(m.transpose() * a.matrix() * m);
    const Spd mb = Spd::trusted(m.transpose() * b.matrix() * m);
    t.begin();
    t.margin(ineq(dist_thompson(ma, mb), dist_thompson(a, b)));
    t.end();
  }
  return t.report();
}

CheckReport compression_square_check(Index d, int trials, std::uint64_t seed,
                                     const Options& opts) {
  CheckReport r = thompson_congruence_check(d, trials, seed ^ 0x5bd1e995ULL, opts);
  r.name = "thompson/compression_square@d" + std::to_string(d);
  return r;
}

CheckReport opmono_contraction_check(Index d, int trials, std::uint64_t seed,
                                     const Options& opts) {
  Tally t("thompson/opmono_power@d" + std::to_string(d), opts.tol);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d, rng), b = random_pd(d, rng);
    const double r = uniform(rng, 0.01, 0.99);
    t.begin();
    t.margin(ineq(dist_thompson(powm(a, r), powm(b, r)), dist_thompson(a, b)));
    t.end();
  }
  return t.report();
}

CheckReport sum_log_contractive_check(Index d, int trials, std::uint64_t seed,
                                      const Options& opts) {
  Tally t("thompson/sum_contraction@d" + std::to_string(d), opts.tol);
  const auto g = [](const Spd& s) { return Spd::trusted(s.matrix() + sqrtm(s).matrix()); };
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d, rng), b = random_pd(d, rng);
    const double dist = dist_thompson(a, b);
    t.begin();
    t.strict((dist - dist_thompson(g(a), g(b))) / std::max(1.0, dist));
    t.end();
  }
  return t.report();
}

CheckReport kron_gm_identity_check(Index d1, Index d2, int trials, std::uint64_t seed,
                                   const Options&) {
  if (d1 * d2 > 64) throw InvalidInput("kron_gm_identity_check: d1 * d2 must be <= 64");
  constexpr double kTol = 1e-10;
  Tally t("kron/gm_identity@" + std::to_string(d1) + "x" + std::to_string(d2), kTol);
  for (int i = 0; i < trials; ++i) {
    auto rng = trial_rng(seed, i);
    const Spd a = random_pd(d1, rng), b = random_pd(d1, rng);
    const Spd c = random_pd(d2, rng), e = random_pd(d2, rng);
    const Mat lhs = kron(geometric_mean(a, b).matrix(), geometric_mean(c, e).matrix());
    const Mat rhs = geometric_mean(Spd::trusted(kron(a.matrix(), c.matrix())),
                                   Spd::trusted(kron(b.matrix(), e.matrix())))
                        .matrix();
    t.begin();
    t.margin(-(lhs - rhs).norm() / rhs.norm());
    t.end();
  }
  return t.report();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"thompson", "gconvex", "majorization", "all"};
  return s;
}

std::vector<CheckReport> run_suite(const std::string& suite, std::uint64_t seed, int trials,
                                   const Options& opts) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw InvalidInput("unknown suite: " + suite);
  const bool all = suite == "all";
  std::vector<CheckReport> out;
  if (all || suite == "thompson") {
    for (Index d : {2, 5, 8}) {
      out.push_back(thompson_inverse_check(d, trials, seed, opts));
      out.push_back(thompson_congruence_check(d, trials, seed, opts));
      out.push_back(thompson_power_check(d, trials, seed, opts));
      out.push_back(thompson_convex_sum_check(d, trials, seed, opts));
      out.push_back(thompson_translation_check(d, trials, seed, opts));
      out.push_back(compression_check(d, trials, seed, opts));
      out.push_back(compression_square_check(d, trials, seed, opts));
      out.push_back(opmono_contraction_check(d, trials, seed, opts));
      out.push_back(sum_log_contractive_check(d, trials, seed, opts));
    }
  }
  if (all || suite == "gconvex") {
    for (Index d : {2, 5, 8}) {
      for (const auto& f : midpoint_catalog())
        out.push_back(midpoint_gconvexity_check(f, d, trials, seed, opts));
      for (const auto& f : log_catalog())
        out.push_back(log_gconvexity_check(f, d, trials, seed, opts));
    }
  }
  if (all || suite == "majorization") {
    for (Index d : {2, 3, 4})
      for (double t : {0.25, 0.5, 0.75})
        out.push_back(log_majorization_check(d, t, trials, seed, opts));
    for (auto [d1, d2] : {std::pair<Index, Index>{2, 2}, {3, 2}, {4, 3}, {4, 4}})
      out.push_back(kron_gm_identity_check(d1, d2, trials, seed, opts));
  }
  return out;
}

}  // namespace spdgeo::oracles
