#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "spdgeo/optim.hpp"

namespace spdgeo {
namespace {

using test::diag;
using test::rel_err;

std::vector<Spd> random_set(int k, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Spd> out;
  for (int i = 0; i < k; ++i) out.push_back(test::rand_spd(d, rng));
  return out;
}

SolverConfig config(Method m, double tol = 1e-10) {
  SolverConfig c;
  c.method = m;
  c.grad_tol = tol;
  c.max_iter = 5000;
  return c;
}

const Method kMethods[] = {Method::SteepestDescent, Method::ConjugateGradient, Method::Lbfgs};

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.c1 = 0.95;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = SolverConfig{};
  c.memory = 0;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = SolverConfig{};
  c.grad_tol = -1;
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(Methods, ParseAndPrint) {
  for (Method m : kMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("newton"), InvalidInput);
}

TEST(Problems, EuclideanGradientsMatchFiniteDifferences) {
  const auto mats = random_set(4, 4, 1);
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  std::mt19937_64 rng(2);
  for (const Problem& p : {karcher_problem(w, mats), median_problem(w, mats), sdiv_problem(w, mats)}) {
    for (int k = 0; k < 5; ++k) {
      const Spd x = test::rand_spd(4, rng);
      const Sym dir = random_sym<double>(4, rng);
      const double h = 1e-6;
      const double fd =
          (p.cost(Spd::trusted(x.matrix() + h * dir)) - p.cost(Spd::trusted(x.matrix() - h * dir))) /
          (2 * h);
      const double an = (p.egrad(x) * dir).trace();
      EXPECT_NEAR(fd, an, 1e-5 * std::max(1.0, std::abs(an)));
      const Evaluation e = p.eval(x);
      EXPECT_DOUBLE_EQ(e.cost, p.cost(x));
    }
  }
}

TEST(Problems, InputValidation) {
  const auto mats = random_set(2, 3, 3);
  EXPECT_THROW(karcher_problem({}, {}), InvalidInput);
  EXPECT_THROW(karcher_problem({0.5}, mats), InvalidInput);
  EXPECT_THROW(karcher_problem({0.7, 0.7}, mats), InvalidInput);
  EXPECT_THROW(karcher_problem({1.5, -0.5}, mats), InvalidInput);
  EXPECT_THROW(median_problem({0.5, 0.5}, {mats[0], Spd::identity(2)}), InvalidInput);
}

TEST(Solve, TwoMatrixKarcherMeanIsGeometricMean) {
  const auto mats = random_set(2, 5, 4);
  const Spd gm = geometric_mean(mats[0], mats[1]);
  for (Method m : kMethods) {
    const SolveReport r = solve(karcher_problem({0.5, 0.5}, mats), config(m));
    EXPECT_EQ(r.status, Status::Converged) << to_string(m);
    EXPECT_LE(dist_thompson(r.minimizer, gm), 1e-8) << to_string(m);
  }
}

TEST(Solve, SingleMatrixIsItsOwnMean) {
  const auto mats = random_set(1, 4, 5);
  for (Method m : kMethods) {
    const SolveReport r = solve(karcher_problem({1.0}, mats), config(m));
    EXPECT_EQ(r.status, Status::Converged);
    EXPECT_LE(dist_thompson(r.minimizer, mats[0]), 1e-8);
    const SolveReport med = solve(median_problem({1.0}, mats), config(m, 1e-8));
    EXPECT_LE(dist_thompson(med.minimizer, mats[0]), 1e-6);
  }
}

TEST(Solve, CommutingDiagonalsGiveElementwiseWeightedMean) {
  const std::vector<Spd> mats{diag({1, 2, 3}), diag({4, 0.5, 2}), diag({9, 1, 0.1})};
  const std::vector<double> w{0.2, 0.3, 0.5};
  Vec expected(3);
  for (Index j = 0; j < 3; ++j) {
    double s = 0;
    for (int i = 0; i < 3; ++i) s += w[static_cast<std::size_t>(i)] * std::log(mats[static_cast<std::size_t>(i)](j, j));
    expected(j) = std::exp(s);
  }
  const SolveReport r = solve(karcher_problem(w, mats), config(Method::Lbfgs));
  EXPECT_LE(rel_err(r.minimizer.matrix(), Mat(expected.asDiagonal())), 1e-9);
}

TEST(Solve, TwoMatrixSDivergenceMeanIsGeometricMean) {
  const auto mats = random_set(2, 4, 6);
  const SolveReport r = solve(sdiv_problem({0.5, 0.5}, mats), config(Method::Lbfgs));
  EXPECT_EQ(r.status, Status::Converged);
  EXPECT_LE(dist_thompson(r.minimizer, geometric_mean(mats[0], mats[1])), 1e-8);
}

TEST(Solve, TracesDecreaseAndMethodsAgree) {
  const auto mats = random_set(6, 5, 7);
  const auto w = uniform_weights(mats.size());
  std::vector<Spd> sols;
  for (Method m : kMethods) {
    SolverConfig c = config(m, 1e-9);
    const SolveReport r = solve(karcher_problem(w, mats), c);
    EXPECT_EQ(r.status, Status::Converged) << to_string(m);
    ASSERT_EQ(r.trace.size(), static_cast<std::size_t>(r.iterations + 1));
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      // Strict decrease until cost differences reach rounding level.
      const auto& prev = r.trace[i - 1];
      if (prev.grad_norm > 1e-6)
        EXPECT_LT(r.trace[i].cost, prev.cost) << to_string(m) << " row " << i;
      else
        EXPECT_LE(r.trace[i].cost, prev.cost + 1e-13 * std::abs(prev.cost));
      EXPECT_GE(r.trace[i].time_s, r.trace[i - 1].time_s);
    }
    EXPECT_LE(r.trace.back().grad_norm, 1e-9);
    EXPECT_LE(karcher_residual(w, mats, r.minimizer), 1e-5 * 5);
    sols.push_back(r.minimizer);
  }
  for (std::size_t i = 0; i < sols.size(); ++i)
    for (std::size_t j = i + 1; j < sols.size(); ++j)
      EXPECT_LE(dist_thompson(sols[i], sols[j]), 1e-5);
}

TEST(Solve, StartsAtIdentityAndHonoursInitialPoint) {
  const auto mats = random_set(3, 3, 8);
  const Problem p = karcher_problem(uniform_weights(3), mats);
  SolverConfig c = config(Method::Lbfgs);
  c.max_iter = 0;
  SolveReport r = solve(p, c);
  EXPECT_EQ(r.status, Status::MaxIter);
  EXPECT_LE(rel_err(r.minimizer.matrix(), Mat::Identity(3, 3)), 0.0);
  c.initial_point = mats[1];
  r = solve(p, c);
  EXPECT_LE(rel_err(r.minimizer.matrix(), mats[1].matrix()), 0.0);
  EXPECT_DOUBLE_EQ(r.trace[0].cost, p.cost(mats[1]));
}

TEST(Solve, MaxIterAndNonFiniteStart) {
  const auto mats = random_set(5, 6, 9);
  SolverConfig c = config(Method::SteepestDescent, 1e-14);
  c.max_iter = 3;
  const SolveReport r = solve(karcher_problem(uniform_weights(5), mats), c);
  EXPECT_EQ(r.status, Status::MaxIter);
  EXPECT_EQ(r.iterations, 3);

  Problem bad;
  bad.dim = 2;
  bad.evaluate = [](const Spd&) {
    return Evaluation{std::numeric_limits<double>::quiet_NaN(), Sym::zero(2)};
  };
  bad.cost = [bad](const Spd& x) { return bad.evaluate(x).cost; };
  bad.egrad = [bad](const Spd& x) { return bad.evaluate(x).egrad; };
  EXPECT_THROW(solve(bad, config(Method::Lbfgs)), NonFiniteCost);
}

TEST(WolfeLineSearch, AcceptsUnitStepOnExactNewtonSection) {
  // f(X) = delta_R(X, I)^2 at X = exp(L): xi = -X log X lands on I at step 1.
  const Spd xs = diag({2.0, 0.5, 3.0});
  const Problem p = karcher_problem({1.0}, {Spd::identity(3)});
  const Point x(xs);
  const Sym xi = Sym::from(-xs.matrix() * logm(xs));
  const LineSearchResult ls = wolfe_line_search(p, x, p.eval(xs), xi, 1.0, SolverConfig{});
  EXPECT_TRUE(ls.ok);
  EXPECT_DOUBLE_EQ(ls.step, 1.0);
  EXPECT_EQ(ls.evaluations, 1);
  EXPECT_LE(rel_err(ls.point.matrix(), Mat::Identity(3, 3)), 1e-12);
}

TEST(WolfeLineSearch, AscentDirectionIsRejected) {
  const auto mats = random_set(2, 3, 10);
  const Problem p = karcher_problem({0.5, 0.5}, mats);
  const Point x(Spd::identity(3));
  const Evaluation e = p.eval(x.value());
  const Sym ascent = egrad_to_rgrad(x, e.egrad);
  EXPECT_THROW(wolfe_line_search(p, x, e, ascent, 1.0, SolverConfig{}), NotDescent);
}

TEST(WolfeLineSearch, AcceptedStepSatisfiesBothConditions) {
  const auto mats = random_set(4, 4, 11);
  const Problem p = karcher_problem(uniform_weights(4), mats);
  std::mt19937_64 rng(12);
  const SolverConfig cfg;
  for (int k = 0; k < 10; ++k) {
    const Spd xs = test::rand_spd(4, rng);
    const Point x(xs);
    const Evaluation e = p.eval(xs);
    const Sym xi = Sym(-egrad_to_rgrad(x, e.egrad));
    for (double a0 : {1e-3, 1.0, 30.0}) {
      const LineSearchResult ls = wolfe_line_search(p, x, e, xi, a0, cfg);
      ASSERT_TRUE(ls.ok);
      const double slope0 = (e.egrad * xi).trace();
      EXPECT_LE(ls.eval.cost, e.cost + cfg.c1 * ls.step * slope0);
      const Sym v = geodesic_velocity(x, xi, ls.point);
      EXPECT_GE((ls.eval.egrad * v).trace(), cfg.c2 * slope0);
    }
  }
}

TEST(Solve, LbfgsNeedsFewerIterationsThanSd) {
  const auto mats = random_set(10, 16, 13);
  const Problem p = karcher_problem(uniform_weights(10), mats);
  const SolveReport sd = solve(p, config(Method::SteepestDescent, 1e-6));
  const SolveReport lb = solve(p, config(Method::Lbfgs, 1e-6));
  EXPECT_EQ(sd.status, Status::Converged);
  EXPECT_EQ(lb.status, Status::Converged);
  EXPECT_LE(lb.iterations, sd.iterations);
}

}  // namespace
}  // namespace spdgeo
