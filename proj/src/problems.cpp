#include <cmath>
#include <memory>

#include "spdgeo/optim.hpp"

namespace spdgeo {

namespace {

struct MeanData {
  std::vector<double> w;
  std::vector<Spd> mats;
};

std::shared_ptr<const MeanData> check_inputs(const std::vector<double>& weights,
                                             const std::vector<Spd>& mats, const char* who) {
  if (mats.empty()) throw InvalidInput(std::string(who) + ": empty matrix list");
  if (weights.size() != mats.size())
    throw InvalidInput(std::string(who) + ": weights and matrices differ in length");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidInput(std::string(who) + ": weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10) throw InvalidInput(std::string(who) + ": weights must sum to 1");
  for (const auto& m : mats)
    if (m.dim() != mats.front().dim()) throw InvalidInput(std::string(who) + ": dimension mismatch");
  return std::make_shared<const MeanData>(MeanData{weights, mats});
}

// For each A_i: L_i = log(X^{-1/2} A_i X^{-1/2}), with X^{-1/2} shared.
struct LogTerms {
  Mat inv_sqrt;
  std::vector<Mat> logs;
  std::vector<double> sq;  // ||L_i||_F^2 = delta_R(X, A_i)^2
};

LogTerms log_terms(const MeanData& md, const Spd& x) {
  LogTerms t;
  t.inv_sqrt = mat_fn(x.matrix(), MatFn::inv_sqrt());
  t.logs.reserve(md.mats.size());
  for (const auto& a : md.mats) {
    const Mat m = symmetric_part(t.inv_sqrt * a.matrix() * t.inv_sqrt);
    const auto e = eig_sym(m);
    if (!(e.min() > 0.0)) throw DomainError("karcher: congruence lost definiteness");
    t.logs.push_back(e.apply([](double v) { return std::log(v); }));
    t.sq.push_back(e.values.array().log().square().sum());
  }
  return t;
}

}  // namespace

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
}

Problem karcher_problem(const std::vector<double>& weights, const std::vector<Spd>& mats) {
  auto md = check_inputs(weights, mats, "karcher_problem");
  Problem p;
  p.dim = mats.front().dim();
  p.evaluate = [md](const Spd& x) {
    const LogTerms t = log_terms(*md, x);
    Evaluation ev;
    Mat acc = Mat::Zero(x.dim(), x.dim());
    for (std::size_t i = 0; i < md->w.size(); ++i) {
      ev.cost += md->w[i] * t.sq[i];
      acc += md->w[i] * t.logs[i];
    }
    ev.egrad = Sym::from(-2.0 * t.inv_sqrt * acc * t.inv_sqrt);
    return ev;
  };
  p.cost = [p](const Spd& x) { return p.evaluate(x).cost; };
  p.egrad = [p](const Spd& x) { return p.evaluate(x).egrad; };
  return p;
}

Problem median_problem(const std::vector<double>& weights, const std::vector<Spd>& mats,
                       double eps) {
  auto md = check_inputs(weights, mats, "median_problem");
  if (!(eps > 0.0)) throw InvalidInput("median_problem: eps must be positive");
  Problem p;
  p.dim = mats.front().dim();
  p.evaluate = [md, eps](const Spd& x) {
    const LogTerms t = log_terms(*md, x);
    Evaluation ev;
    Mat acc = Mat::Zero(x.dim(), x.dim());
    for (std::size_t i = 0; i < md->w.size(); ++i) {
      const double r = std::sqrt(t.sq[i] + eps * eps);
      ev.cost += md->w[i] * r;
      acc += (md->w[i] / r) * t.logs[i];
    }
    ev.egrad = Sym::from(-t.inv_sqrt * acc * t.inv_sqrt);
    return ev;
  };
  p.cost = [p](const Spd& x) { return p.evaluate(x).cost; };
  p.egrad = [p](const Spd& x) { return p.evaluate(x).egrad; };
  return p;
}

Problem sdiv_problem(const std::vector<double>& weights, const std::vector<Spd>& mats) {
  auto md = check_inputs(weights, mats, "sdiv_problem");
  Problem p;
  p.dim = mats.front().dim();
  p.evaluate = [md](const Spd& x) {
    const Index d = x.dim();
    Eigen::LLT<Mat> lx(x.matrix());
    if (lx.info() != Eigen::Success) throw DomainError("sdiv: X is not positive definite");
    const Mat x_inv = lx.solve(Mat::Identity(d, d));
    const double logdet_x = 2.0 * lx.matrixLLT().diagonal().array().log().sum();
    Evaluation ev;
    Mat acc = Mat::Zero(d, d);
    for (std::size_t i = 0; i < md->w.size(); ++i) {
      const Mat& a = md->mats[i].matrix();
      Eigen::LLT<Mat> ls(0.5 * (x.matrix() + a));
      const double logdet_mid = 2.0 * ls.matrixLLT().diagonal().array().log().sum();
      ev.cost += md->w[i] * (logdet_mid - 0.5 * (logdet_x + logdet(md->mats[i])));
      acc += md->w[i] * (0.5 * ls.solve(Mat::Identity(d, d)) - 0.5 * x_inv);
    }
    ev.egrad = Sym::from(acc);
    return ev;
  };
  p.cost = [p](const Spd& x) { return p.evaluate(x).cost; };
  p.egrad = [p](const Spd& x) { return p.evaluate(x).egrad; };
  return p;
}

double karcher_residual(const std::vector<double>& weights, const std::vector<Spd>& mats,
                        const Spd& x) {
  auto md = check_inputs(weights, mats, "karcher_residual");
  const LogTerms t = log_terms(*md, x);
  Mat acc = Mat::Zero(x.dim(), x.dim());
  for (std::size_t i = 0; i < md->w.size(); ++i) acc += md->w[i] * t.logs[i];
  return acc.norm();
}

}  // namespace spdgeo
