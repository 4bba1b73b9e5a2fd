#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "spdgeo/ecd.hpp"

namespace spdgeo::ecd {
namespace {

using test::from_rows;
using test::rel_err;

std::vector<Dgf> catalog(Index d) {
  return {Dgf::kotz(1.0, 2.0, 0.5),        Dgf::kotz(0.5 * d, 2.0, 1.0),
          Dgf::kotz(0.3, 1.5, 1.7),        Dgf::kotz(2.0, 2.0, 3.0),
          Dgf::student_t(3.0),             Dgf::power_exponential(0.7, 2.0),
          Dgf::wdist(0.8, 1.5),            Dgf::elliptical_gamma(1.0, 2.0),
          Dgf::pearson2(2.0),              Dgf::pearson2(0.0),
          Dgf::logistic()};
}

TEST(Dgf, HMatchesFiniteDifferencesOfNegLogPhi) {
  const Index d = 4;
  for (const Dgf& g : catalog(d)) {
    for (double lt = -6; lt <= 3; lt += 0.25) {
      double t = std::exp(lt);
      if (g.kind == DgfKind::PearsonII) t = 1.0 / (1.0 + 1.0 / t);  // keep inside (0, 1)
      const double h = 1e-6 * t;
      const double fd = (g.neg_log_phi(t + h, d) - g.neg_log_phi(t - h, d)) / (2 * h);
      EXPECT_NEAR(g.h(t, d), fd, 1e-6 * std::max(1.0, std::abs(fd))) << g.name() << " t=" << t;
    }
  }
}

TEST(Dgf, ValidationAndParsing) {
  EXPECT_THROW(Dgf::kotz(-1, 2, 1), InvalidInput);
  EXPECT_THROW(Dgf::kotz(1, 0, 1), InvalidInput);
  EXPECT_THROW(Dgf::student_t(0), InvalidInput);
  EXPECT_THROW(Dgf::pearson2(-1), InvalidInput);
  EXPECT_NO_THROW(Dgf::pearson2(-0.5));
  EXPECT_EQ(parse_dgf_kind("student_t"), DgfKind::StudentT);
  EXPECT_THROW(parse_dgf_kind("weibull"), InvalidInput);
  for (const Dgf& g : catalog(3)) EXPECT_EQ(parse_dgf_kind(g.name()), g.kind);
}

TEST(Dgf, KotzHAtScale) {
  // h(t) = (d/2 - alpha)/t + (beta/b^beta) t^{beta-1}; at t = b, beta = 1.
  const Index d = 6;
  const double alpha = 1.2, b = 1.7;
  EXPECT_NEAR(Dgf::kotz(alpha, b, 1.0).h(b, d), (3.0 - alpha) / b + 1.0 / b, 1e-15);
  EXPECT_EQ(Dgf::gaussian(d).h(1e-300, d), 0.5);
}

TEST(Dgf, KotzHIsLogContractive) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-8, 8), ub(0.05, 1.95), ua(0.05, 1.0);
  const Index d = 4;
  for (int k = 0; k < 2000; ++k) {
    const Dgf g = Dgf::kotz(ua(rng) * 2.0, 0.5 + ua(rng), ub(rng));
    const double t = std::exp(u(rng)), s = std::exp(u(rng));
    if (t == s) continue;
    EXPECT_LT(std::abs(std::log(g.h(t, d)) - std::log(g.h(s, d))), std::abs(std::log(t) - std::log(s)));
  }
}

TEST(Classify, Examples) {
  auto c = classify(Dgf::kotz(1, 2, 0.5), 4);
  EXPECT_TRUE(c.gconvex);
  EXPECT_TRUE(c.ln);
  EXPECT_FALSE(c.lc);
  EXPECT_EQ(c.recommended, Solver::FixedPoint);

  c = classify(Dgf::gaussian(5), 5);
  EXPECT_TRUE(c.gconvex && c.ln && c.lc);

  c = classify(Dgf::kotz(1, 2, 3), 4);
  EXPECT_TRUE(c.lc);
  EXPECT_FALSE(c.ln);

  c = classify(Dgf::kotz(3, 2, 1), 4);
  EXPECT_FALSE(c.any());
  EXPECT_EQ(c.recommended, Solver::Manifold);

  for (const Dgf& g : {Dgf::student_t(2), Dgf::logistic(), Dgf::pearson2(1.0),
                       Dgf::power_exponential(0.5, 1)})
    EXPECT_TRUE(classify(g, 3).any()) << g.name();
  EXPECT_EQ(classify(Dgf::pearson2(1.0), 3).recommended, Solver::Manifold);
}

TEST(Dataset, ConstructionRules) {
  EXPECT_THROW(Dataset::from_rows(from_rows(2, 2, {1, 0, 0, 0})), InvalidInput);
  EXPECT_THROW(Dataset::from_rows(from_rows(1, 2, {1, NAN})), InvalidInput);
  const Dataset ds = Dataset::from_rows(from_rows(3, 2, {1, 0, 0, 2, 1, 1}));
  EXPECT_EQ(ds.n(), 3);
  EXPECT_EQ(ds.d(), 2);
  EXPECT_EQ(ds.rank(), 2);
  EXPECT_LE(rel_err(ds.second_moment(), from_rows(2, 2, {2, 1, 1, 5}) / 3.0), 1e-15);
  EXPECT_EQ(Dataset::from_rows(from_rows(2, 2, {1, 1, 2, 2})).rank(), 1);
  EXPECT_EQ(Dataset::empty(3).n(), 0);
}

TEST(Nll, Examples) {
  std::mt19937_64 rng(2);
  const Dataset ds = sample(Dgf::gaussian(3), Spd::identity(3), 50, 3);
  const EcdProblem g(Dgf::gaussian(3), ds);
  EXPECT_NEAR(g.nll(Spd::identity(3)), 0.5 * ds.columns().squaredNorm(), 1e-10);

  const EcdProblem k(Dgf::kotz(1, 2, 1), Dataset::from_rows(from_rows(1, 2, {1, 0})));
  EXPECT_NEAR(k.nll(Spd::identity(2)), 0.5, 1e-15);

  // Scaling law: nll(cS) - nll(S) term by term.
  const Dgf kt = Dgf::kotz(1.0, 2.0, 0.5);
  const EcdProblem p(kt, ds);
  const Spd s = test::rand_spd(3, rng);
  const double c = 2.5;
  const Vec t = p.mahalanobis(s);
  double expected = 0.5 * 50 * 3 * std::log(c);
  for (Index i = 0; i < t.size(); ++i) expected += kt.neg_log_phi(t(i) / c, 3) - kt.neg_log_phi(t(i), 3);
  EXPECT_NEAR(p.nll(s.scaled(c)) - p.nll(s), expected, 1e-10);
}

TEST(Nll, EgradMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const Dataset ds = sample(Dgf::gaussian(4), Spd::identity(4), 100, 5);
  for (const Dgf& g : catalog(4)) {
    if (g.kind == DgfKind::PearsonII) continue;
    const EcdProblem p(g, ds);
    for (int k = 0; k < 3; ++k) {
      const Spd s = test::rand_spd(4, rng);
      const Sym dir = random_sym<double>(4, rng);
      const double h = 1e-6;
      const double fd = (p.nll(Spd::trusted(s.matrix() + h * dir)) -
                         p.nll(Spd::trusted(s.matrix() - h * dir))) / (2 * h);
      const double an = (p.nll_egrad(s) * dir).trace();
      EXPECT_NEAR(fd, an, 1e-5 * std::max(1.0, std::abs(an))) << g.name();
      EXPECT_NEAR(p.evaluate(s).cost, p.nll(s), 1e-12 * std::abs(p.nll(s)));
    }
  }
}

TEST(Nll, GaussianGradientExamples) {
  const Dataset ds = sample(Dgf::gaussian(3), Spd::identity(3), 400, 6);
  const EcdProblem p(Dgf::gaussian(3), ds);
  EXPECT_LE(p.nll_egrad(Spd(ds.second_moment())).norm(), 1e-8 * 400);

  const EcdProblem one(Dgf::gaussian(2), Dataset::from_rows(from_rows(1, 2, {1, 0})));
  EXPECT_LE(rel_err(one.nll_egrad(Spd::identity(2)), from_rows(2, 2, {0, 0, 0, 0.5})), 1e-15);
}

TEST(FpMap, Examples) {
  const Dataset ds = sample(Dgf::gaussian(3), Spd::identity(3), 300, 7);
  const EcdProblem p(Dgf::gaussian(3), ds);
  std::mt19937_64 rng(8);
  EXPECT_LE(rel_err(p.fp_map(test::rand_spd(3, rng)).matrix(), ds.second_moment()), 1e-12);

  const EcdProblem two(Dgf::gaussian(2), Dataset::from_rows(from_rows(2, 2, {1, 0, 0, 1})));
  EXPECT_LE(rel_err(two.fp_map(Spd::identity(2)).matrix(), 0.5 * Mat::Identity(2, 2)), 1e-15);

  const EcdProblem flat(Dgf::gaussian(2), Dataset::from_rows(from_rows(2, 2, {1, 1, 2, 2})));
  EXPECT_THROW(flat.fp_map(Spd::identity(2)), RankError);
  EXPECT_THROW(flat.cccp_step(Spd::identity(2)), RankError);
  EXPECT_NO_THROW(flat.nll(Spd::identity(2)));
  EXPECT_THROW(EcdProblem(Dgf::gaussian(2), Dataset::empty(2)), RankError);
}

TEST(FpMap, FixedPointsAreStationaryPoints) {
  const Dgf g = Dgf::kotz(1.0, 2.0, 0.5);
  const Dataset ds = sample(g, Spd::identity(4), 3000, 9);
  const EcdProblem p(g, ds);
  FitOptions o;
  o.method = FitMethod::Fp;
  o.tol = 1e-12;
  const FitReport fp = mle_fit(g, ds, o);
  EXPECT_LE(p.nll_egrad(fp.scatter).norm() / p.n(), 1e-8);
  o.method = FitMethod::Lbfgs;
  o.tol = 1e-9;
  const FitReport lb = mle_fit(g, ds, o);
  EXPECT_LE(dist_thompson(p.fp_map(lb.scatter), lb.scatter), 1e-6);
}

TEST(Cccp, ExamplesAndClassViolation) {
  const Dataset ds = sample(Dgf::gaussian(3), Spd::identity(3), 300, 10);
  const EcdProblem p(Dgf::gaussian(3), ds);
  EXPECT_LE(rel_err(p.cccp_step(Spd::identity(3)).matrix(), ds.second_moment().inverse()), 1e-10);

  const Dgf k = Dgf::kotz(1.0, 2.0, 1.5);
  const EcdProblem q(k, sample(k, Spd::identity(3), 300, 11));
  std::mt19937_64 rng(12);
  const Spd pm = test::rand_spd(3, rng);
  EXPECT_LE(rel_err(q.cccp_step(pm).matrix(), inverse(q.fp_map(inverse(pm))).matrix()), 1e-10);

  const Dgf bad = Dgf::kotz(3.0, 2.0, 1.0);  // alpha > d/2: h < 0 near 0
  const EcdProblem r(bad, ds);
  EXPECT_THROW(r.cccp_step(Spd::identity(3).scaled(1e-3)), ClassViolation);
}

TEST(Cccp, MonotoneDescentWithPdIterates) {
  for (double beta : {1.0, 1.3, 2.0, 3.0}) {
    const Dgf g = Dgf::kotz(1.0, 2.0, beta);
    const Dataset ds = sample(g, Spd::identity(4), 1000, 13);
    const EcdProblem p(g, ds);
    Spd pk = inverse(p.default_start());
    double prev = p.nll(inverse(pk));
    for (int k = 0; k < 60; ++k) {
      pk = p.cccp_step(pk);
      EXPECT_GT(eig_sym(pk).min(), 0.0);
      const double cur = p.nll(inverse(pk));
      EXPECT_LE(cur, prev + 1e-12 * std::abs(prev)) << "beta " << beta << " iter " << k;
      prev = cur;
    }
  }
}

TEST(Nll, StrictlyGConvexAlongMidpoints) {
  const Index d = 3;
  const Dataset ds = sample(Dgf::gaussian(d), Spd::identity(d), 60, 14);
  double max_sq = 0;
  for (Index i = 0; i < ds.n(); ++i) max_sq = std::max(max_sq, ds.columns().col(i).squaredNorm());
  std::vector<Dgf> listed{Dgf::kotz(1.0, 2.0, 0.5), Dgf::student_t(3.0), Dgf::logistic(),
                          Dgf::power_exponential(0.5, 2.0), Dgf::elliptical_gamma(1.0, 2.0),
                          Dgf::pearson2(1.0)};
  std::mt19937_64 rng(15);
  for (const Dgf& g : listed) {
    const EcdProblem p(g, ds);
    // PearsonII needs x^T S^{-1} x < 1 for all points.
    const double shift = g.kind == DgfKind::PearsonII ? 2.0 * max_sq : 0.0;
    double worst = INFINITY;
    for (int k = 0; k < 1000; ++k) {
      const Spd a = Spd::trusted(test::rand_spd(d, rng).matrix() + shift * Mat::Identity(d, d));
      const Spd b = Spd::trusted(test::rand_spd(d, rng).matrix() + shift * Mat::Identity(d, d));
      const double fa = p.nll(a), fb = p.nll(b), fm = p.nll(geometric_mean(a, b));
      worst = std::min(worst, (0.5 * fa + 0.5 * fb - fm) / std::max(1.0, 0.5 * (std::abs(fa) + std::abs(fb))));
    }
    EXPECT_GE(worst, -1e-9) << g.name();
  }
}

TEST(FpMap, LogNonexpansiveForLnClasses) {
  const Index d = 4;
  const Dataset ds = sample(Dgf::gaussian(d), Spd::identity(d), 500, 16);
  for (const Dgf& g : catalog(d)) {
    if (!classify(g, d).ln) continue;
    const EcdProblem p(g, ds);
    EXPECT_LE(estimate_contraction(p.as_map(), 100, 17, p.default_start()), 1.0 + 1e-9) << g.name();
  }
}

TEST(Sample, GaussianCovarianceAndEmpty) {
  const Index n = 20000;
  const Dataset ds = sample(Dgf::gaussian(3), Spd::identity(3), n, 18);
  EXPECT_LE((ds.second_moment() - Mat::Identity(3, 3)).cwiseAbs().maxCoeff(), 3.0 / std::sqrt(n));
  const Dataset empty = sample(Dgf::gaussian(3), Spd::identity(3), 0, 1);
  EXPECT_EQ(empty.n(), 0);
  EXPECT_EQ(empty.d(), 3);
  ASSERT_TRUE(ds.provenance);
  EXPECT_EQ(ds.provenance->seed, 18u);
  EXPECT_THROW(sample(Dgf::logistic(), Spd::identity(2), 5, 1), Unsupported);
}

TEST(Sample, DeterministicPerSeed) {
  const Dgf g = Dgf::kotz(1.0, 2.0, 0.5);
  const Dataset a = sample(g, Spd::identity(4), 100, 7), b = sample(g, Spd::identity(4), 100, 7);
  const Dataset c = sample(g, Spd::identity(4), 100, 8);
  EXPECT_EQ(a.columns(), b.columns());
  EXPECT_NE(a.columns(), c.columns());
}

// E[t] under the radial density r^{2 alpha - 1} exp(-(r^2/b)^beta), by
// trapezoidal quadrature in log r.
double radial_mean_t(double alpha, double b, double beta) {
  double num = 0, den = 0;
  const double lo = -40, hi = 60, h = 1e-3;
  for (double u = lo; u <= hi; u += h) {
    const double r2 = std::exp(2 * u);
    const double w = std::exp(2 * alpha * u - std::pow(r2 / b, beta));
    num += w * r2;
    den += w;
  }
  return num / den;
}

TEST(Sample, KotzRadialMomentMatchesQuadrature) {
  const Index d = 3;
  std::mt19937_64 rng(19);
  const Spd s = test::rand_spd(d, rng);
  for (auto [alpha, b, beta] : {std::tuple{1.0, 2.0, 0.5}, {1.5, 2.0, 1.0}, {0.4, 1.0, 1.7}, {2.0, 3.0, 0.1}}) {
    const Dgf g = Dgf::kotz(alpha, b, beta);
    const Dataset ds = sample(g, s, 100000, 20);
    const EcdProblem p(g, ds);
    const double mean = p.mahalanobis(s).mean();
    EXPECT_NEAR(mean / radial_mean_t(alpha, b, beta), 1.0, 0.01) << alpha << " " << beta;
  }
  // Student t: E[t] = d nu / (nu - 2).
  const Dataset st = sample(Dgf::student_t(6.0), s, 100000, 21);
  EXPECT_NEAR(EcdProblem(Dgf::student_t(6.0), st).mahalanobis(s).mean() / (d * 6.0 / 4.0), 1.0, 0.02);
}

TEST(Existence, Examples) {
  const Dataset generic = sample(Dgf::gaussian(3), Spd::identity(3), 500, 22);
  EXPECT_TRUE(existence_check(generic, 0.5).ok);

  // 99 of 100 points on the line through (1, 2); bound 1 / (2 - 2 alpha) = 0.556.
  Mat rows(100, 2);
  for (Index i = 0; i < 100; ++i) rows.row(i) << (i + 1.0), 2.0 * (i + 1.0);
  rows.row(0) << 1.0, 0.0;
  const ExistenceResult line = existence_check(Dataset::from_rows(rows), 0.1);
  EXPECT_FALSE(line.ok);
  ASSERT_EQ(line.witness.cols(), 1);
  EXPECT_NEAR(std::abs(line.witness.col(0).normalized().dot(Vec(Eigen::Vector2d(1, 2).normalized()))), 1.0,
              1e-9);
  EXPECT_TRUE(existence_check(Dataset::from_rows(rows), 0.9).ok);

  const Dataset flat = Dataset::from_rows(from_rows(3, 3, {1, 0, 0, 0, 1, 0, 1, 1, 0}));
  EXPECT_FALSE(existence_check(flat, 0.5).ok);
  EXPECT_TRUE(existence_check(generic, 1.5).ok);  // alpha = d/2: vacuous
}

TEST(Existence, PlanesInThreeDimensions) {
  // 90% of the points on the plane z = 0, alpha = 1: bound 2 / (3 - 2) = 2 -> never violated;
  // alpha = 1.4: bound 2 / 0.2 = 10 -> never; lines: 1 / (3 - 2.8) = 5 -> never.
  // Use alpha small instead: alpha = 0.1, plane bound 2 / 2.8 ~ 0.714.
  Mat rows(100, 3);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n;
  for (Index i = 0; i < 100; ++i) rows.row(i) << n(rng), n(rng), (i < 90 ? 0.0 : n(rng));
  const ExistenceResult r = existence_check(Dataset::from_rows(rows), 0.1);
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(r.exact);
  ASSERT_EQ(r.witness.cols(), 2);
  EXPECT_NEAR(r.fraction, 0.9, 1e-12);
}

TEST(MleFit, GaussianEveryMethodGivesSecondMoment) {
  const Index d = 4;
  const Dataset ds = sample(Dgf::gaussian(d), Spd::identity(d), 2000, 24);
  const Spd c(ds.second_moment());
  for (FitMethod m : {FitMethod::Auto, FitMethod::Fp, FitMethod::Fp2, FitMethod::Cccp, FitMethod::Sd,
                      FitMethod::Cg, FitMethod::Lbfgs}) {
    FitOptions o;
    o.method = m;
    const FitReport r = mle_fit(Dgf::gaussian(d), ds, o);
    EXPECT_EQ(r.status, Status::Converged) << to_string(m);
    EXPECT_LE(dist_thompson(r.scatter, c), 1e-6) << to_string(m);
  }
}

TEST(MleFit, DispatchAndErrors) {
  const Dgf g = Dgf::kotz(1.0, 2.0, 0.5);
  const Dataset ds = sample(g, Spd::identity(4), 3000, 25);
  FitOptions o;
  const FitReport a = mle_fit(g, ds, o);
  EXPECT_EQ(a.method, FitMethod::Fp2);
  ASSERT_TRUE(a.existence);
  EXPECT_TRUE(a.existence->ok);
  o.method = FitMethod::Cccp;
  EXPECT_THROW(mle_fit(g, ds, o), IncompatibleMethod);
  o.method = FitMethod::Fp;
  EXPECT_THROW(mle_fit(Dgf::kotz(3.0, 2.0, 1.0), ds, o), IncompatibleMethod);
  EXPECT_EQ(mle_fit(Dgf::pearson2(1.0), sample(Dgf::gaussian(4), Spd::identity(4), 200, 1), {}).method,
            FitMethod::Lbfgs);
  EXPECT_THROW(mle_fit(g, Dataset::from_rows(from_rows(3, 4, {1, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0})), {}),
               RankError);
  for (FitMethod m : {FitMethod::Auto, FitMethod::Fp, FitMethod::Fp2, FitMethod::Cccp, FitMethod::Sd,
                      FitMethod::Cg, FitMethod::Lbfgs})
    EXPECT_EQ(parse_fit_method(to_string(m)), m);
  EXPECT_THROW(parse_fit_method("newton"), InvalidInput);
}

TEST(MleFit, MethodsAgreeOnKotz) {
  const Dgf g = Dgf::kotz(1.0, 2.0, 0.5);
  const Dataset ds = sample(g, Spd::identity(4), 10000, 7);
  std::vector<Spd> sols;
  for (FitMethod m : {FitMethod::Fp, FitMethod::Fp2, FitMethod::Sd, FitMethod::Cg, FitMethod::Lbfgs}) {
    FitOptions o;
    o.method = m;
    const FitReport r = mle_fit(g, ds, o);
    EXPECT_EQ(r.status, Status::Converged) << to_string(m);
    sols.push_back(r.scatter);
  }
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j) EXPECT_LE(dist_thompson(sols[i], sols[j]), 1e-4);
}

TEST(MleFit, CongruenceEquivariance) {
  const Dgf g = Dgf::kotz(1.0, 2.0, 0.5);
  const Dataset ds = sample(g, Spd::identity(3), 2000, 26);
  std::mt19937_64 rng(27);
  Mat m = Mat::Random(3, 3) + 2.0 * Mat::Identity(3, 3);
  const Dataset moved = Dataset::from_rows(ds.rows() * m.transpose());
  FitOptions o;
  o.method = FitMethod::Fp2;
  o.tol = 1e-12;
  const Spd s = mle_fit(g, ds, o).scatter;
  const Spd t = mle_fit(g, moved, o).scatter;
  EXPECT_LE(dist_thompson(t, Spd::trusted(m * s.matrix() * m.transpose())), 1e-6);
}

TEST(MleFit, TracesRecordCostAndGradient) {
  const Dgf g = Dgf::kotz(1.0, 2.0, 0.5);
  const Dataset ds = sample(g, Spd::identity(3), 1000, 28);
  for (FitMethod m : {FitMethod::Fp, FitMethod::Lbfgs}) {
    FitOptions o;
    o.method = m;
    const FitReport r = mle_fit(g, ds, o);
    ASSERT_FALSE(r.trace.empty());
    EXPECT_EQ(r.trace.front().iter, 0);
    EXPECT_EQ(r.final_cost, r.trace.back().cost);
    EXPECT_NEAR(r.final_cost, EcdProblem(g, ds).nll(r.scatter) / 1000, 1e-12);
    EXPECT_EQ(std::isnan(r.trace[1].delta_t_step), m == FitMethod::Lbfgs);
  }
}

}  // namespace
}  // namespace spdgeo::ecd
