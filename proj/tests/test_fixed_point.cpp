#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "spdgeo/ecd.hpp"
#include "spdgeo/fixed_point.hpp"

namespace spdgeo {
namespace {

using test::rel_err;

ecd::Dataset kotz_data(Index d, Index n, std::uint64_t seed) {
  return ecd::sample(ecd::Dgf::kotz(1.0, 2.0, 0.5), Spd::identity(d), n, seed);
}

TEST(Picard, ConstantMapConvergesInOneStep) {
  std::mt19937_64 rng(1);
  const Spd c = test::rand_spd(4, rng);
  const FpReport r = picard_solve(constant_map(c), FpConfig{});
  EXPECT_EQ(r.status, Status::Converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LE(rel_err(r.fixed_point.matrix(), c.matrix()), 1e-15);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_TRUE(std::isnan(r.trace[0].delta_t_step));
  EXPECT_NEAR(r.trace[1].delta_t_step, dist_thompson(c, Spd::identity(4)), 1e-12);
  EXPECT_LE(r.trace[1].residual, 1e-14);
}

TEST(Picard, GaussianMapGivesSecondMomentInOneStep) {
  const ecd::Dataset data = ecd::sample(ecd::Dgf::gaussian(3), Spd::identity(3), 500, 2);
  const ecd::EcdProblem p(ecd::Dgf::gaussian(3), data);
  const FpReport r = picard_solve(p.as_map(), FpConfig{});
  EXPECT_EQ(r.status, Status::Converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LE(rel_err(r.fixed_point.matrix(), data.second_moment()), 1e-12);
}

TEST(Picard, StatusesAndValidation) {
  FpConfig cfg;
  cfg.max_iter = 3;
  const FpReport slow = picard_solve(power_map(3, 0.999), cfg);
  cfg.initial = Spd::identity(3).scaled(100.0);
  const FpReport r = picard_solve(power_map(3, 0.999), cfg);
  EXPECT_EQ(r.status, Status::MaxIter);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_EQ(slow.status, Status::Converged);  // I is already fixed

  FixedPointMap bad{2, [](const Spd&) { return Spd::trusted(Mat(-Mat::Identity(2, 2))); }};
  EXPECT_EQ(picard_solve(bad, FpConfig{}).status, Status::NonFinite);

  FpConfig neg;
  neg.step_tol = 0;
  EXPECT_THROW(picard_solve(identity_map(2), neg), InvalidInput);
  FpConfig wrong;
  wrong.initial = Spd::identity(3);
  EXPECT_THROW(picard_solve(identity_map(2), wrong), InvalidInput);
}

TEST(Picard, ConvergedResidualWithinTenTimesTolerance) {
  const ecd::Dataset data = kotz_data(4, 2000, 3);
  const ecd::EcdProblem p(ecd::Dgf::kotz(1.0, 2.0, 0.5), data);
  for (Scaling s : {Scaling::Off, Scaling::TraceD}) {
    FpConfig cfg;
    cfg.scaling = s;
    const FpReport r = picard_solve(p.as_map(), cfg);
    ASSERT_EQ(r.status, Status::Converged);
    const Spd g = p.as_map().apply(r.fixed_point);
    EXPECT_LE(dist_thompson(g, r.fixed_point), 10 * cfg.step_tol);
  }
}

TEST(Picard, StepsNonIncreasingForNonexpansiveMaps) {
  const ecd::Dataset data = kotz_data(4, 2000, 4);
  const ecd::EcdProblem p(ecd::Dgf::kotz(1.0, 2.0, 0.5), data);
  std::mt19937_64 rng(5);
  for (const FixedPointMap& g : {power_map(4, 0.5), p.as_map(),
                                 sum_map(identity_map(4), power_map(4, 0.5))}) {
    FpConfig cfg;
    cfg.initial = test::rand_spd(4, rng);
    cfg.max_iter = 200;
    const FpReport r = picard_solve(g, cfg);
    for (std::size_t i = 2; i < r.trace.size(); ++i)
      EXPECT_LE(r.trace[i].delta_t_step, r.trace[i - 1].delta_t_step + 1e-12) << i;
  }
}

TEST(TraceScale, EnforcesTraceConditionAndFallsBack) {
  const ecd::Dataset data = kotz_data(5, 3000, 6);
  const ecd::EcdProblem p(ecd::Dgf::kotz(1.0, 2.0, 0.5), data);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    const Spd t = test::rand_spd(5, rng);
    const ScaleResult s = trace_scale(p.as_map(), t);
    ASSERT_TRUE(s.scaled);
    EXPECT_LE(s.evaluations, 8);
    EXPECT_NEAR(trace_ratio(s.point, s.image), 5.0, 1e-8);
    EXPECT_LE(rel_err(s.point.matrix(), s.alpha * t.matrix()), 1e-14);
  }
  // Identity map: psi is already d.
  const Spd c = Spd::identity(3).scaled(2.0);
  const ScaleResult same = trace_scale(identity_map(3), c);
  EXPECT_TRUE(same.scaled);
  EXPECT_EQ(same.alpha, 1.0);
  // S -> 2S: psi = 2d at every scale, no root.
  const ScaleResult none = trace_scale(sum_map(identity_map(3), identity_map(3)), c);
  EXPECT_FALSE(none.scaled);
  EXPECT_EQ(none.alpha, 1.0);
  EXPECT_EQ(none.point.matrix(), c.matrix());
}

TEST(Picard, Fp2IteratesSatisfyTraceCondition) {
  const ecd::Dataset data = kotz_data(4, 3000, 8);
  const ecd::EcdProblem p(ecd::Dgf::kotz(1.0, 2.0, 0.5), data);
  for (int k = 1; k <= 6; ++k) {
    FpConfig cfg;
    cfg.scaling = Scaling::TraceD;
    cfg.max_iter = k;
    const FpReport r = picard_solve(p.as_map(), cfg);
    if (r.trace.back().alpha == 1.0) continue;
    EXPECT_NEAR(trace_ratio(r.fixed_point, p.as_map().apply(r.fixed_point)), 4.0, 1e-8) << k;
  }
}

TEST(Picard, FpAndFp2AgreeAndFp2IsFaster) {
  for (double beta : {0.3, 0.5, 1.0, 1.5}) {
    const ecd::Dgf g = ecd::Dgf::kotz(2 * beta, 2.0, beta);
    const ecd::Dataset data = ecd::sample(g, Spd::identity(6), 3000, 9);
    const ecd::EcdProblem p(g, data);
    FpConfig cfg;
    cfg.max_iter = 20000;
    const FpReport fp = picard_solve(p.as_map(), cfg);
    cfg.scaling = Scaling::TraceD;
    const FpReport fp2 = picard_solve(p.as_map(), cfg);
    ASSERT_EQ(fp.status, Status::Converged);
    ASSERT_EQ(fp2.status, Status::Converged);
    EXPECT_LE(dist_thompson(fp.fixed_point, fp2.fixed_point), 1e-6) << beta;
    EXPECT_LE(fp2.iterations, fp.iterations) << beta;
  }
}

TEST(EstimateContraction, Examples) {
  EXPECT_NEAR(estimate_contraction(identity_map(4), 50, 1), 1.0, 1e-12);
  EXPECT_LE(estimate_contraction(power_map(4, 0.5), 200, 2), 0.5 + 1e-9);
  EXPECT_GT(estimate_contraction(power_map(4, 0.5), 200, 2), 0.45);
  const ecd::Dataset data = kotz_data(4, 2000, 3);
  const ecd::EcdProblem p(ecd::Dgf::kotz(1.0, 2.0, 0.5), data);
  EXPECT_LT(estimate_contraction(p.as_map(), 200, 4, p.default_start()), 1.0);
  EXPECT_THROW(estimate_contraction(identity_map(2), 0, 1), InvalidInput);
}

TEST(EstimateContraction, SumOfNonexpansiveAndContractiveIsContractive) {
  const FixedPointMap g = sum_map(identity_map(5), power_map(5, 0.5));
  EXPECT_LT(estimate_contraction(g, 300, 5), 1.0);
  EXPECT_LE(estimate_contraction(power_map(5, -1.0), 100, 6), 1.0 + 1e-9);
}

}  // namespace
}  // namespace spdgeo
