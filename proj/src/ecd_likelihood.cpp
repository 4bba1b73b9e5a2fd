#include <cmath>

#include "spdgeo/ecd.hpp"

namespace spdgeo::ecd {

Dataset Dataset::from_rows(const Mat& rows) {
  if (rows.cols() == 0) throw InvalidInput("Dataset: dimension must be positive");
  if (!rows.allFinite()) throw InvalidInput("Dataset: non-finite entries");
  for (Index i = 0; i < rows.rows(); ++i)
    if (rows.row(i).squaredNorm() == 0.0)
      throw InvalidInput("Dataset: row " + std::to_string(i) + " is zero");
  Dataset ds;
  ds.x_ = rows.transpose();
  return ds;
}

Dataset Dataset::empty(Index d) {
  if (d <= 0) throw InvalidInput("Dataset: dimension must be positive");
  Dataset ds;
  ds.x_.resize(d, 0);
  return ds;
}

Index Dataset::rank() const {
  if (n() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Mat> es(x_ * x_.transpose(), Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  if (!(top > 0.0)) return 0;
  const double cut = top * 1e-12 * static_cast<double>(std::max(n(), d()));
  return (ev.array() > cut).count();
}

Mat Dataset::second_moment() const {
  if (n() == 0) throw InvalidInput("Dataset: empty");
  return symmetric_part(x_ * x_.transpose()) / static_cast<double>(n());
}

EcdProblem::EcdProblem(Dgf dgf, Dataset data)
    : dgf_(std::move(dgf)), data_(std::make_shared<const Dataset>(std::move(data))) {
  dgf_.validate();
  if (data_->n() == 0) throw RankError("EcdProblem: empty dataset");
  rank_ = data_->rank();
}

void EcdProblem::require_full_rank(const char* who) const {
  if (rank_ < dim())
    throw RankError(std::string(who) + ": data span a subspace of dimension " +
                    std::to_string(rank_) + " < " + std::to_string(dim()));
}

EcdProblem::Work EcdProblem::work(const Spd& s) const {
  if (s.dim() != dim()) throw InvalidInput("EcdProblem: scatter has the wrong dimension");
  Work w;
  w.llt.compute(s.matrix());
  if (w.llt.info() != Eigen::Success) throw DomainError("EcdProblem: scatter is not PD");
  w.z = w.llt.matrixL().solve(data_->columns());
  w.t = w.z.colwise().squaredNorm().transpose();
  return w;
}

Vec EcdProblem::weights(const Vec& t) const {
  Vec h(t.size());
  for (Index i = 0; i < t.size(); ++i) h(i) = dgf_.h(t(i), dim());
  return h;
}

Vec EcdProblem::mahalanobis(const Spd& s) const { return work(s).t; }

double EcdProblem::nll(const Spd& s) const {
  const Work w = work(s);
  const double logdet = 2.0 * w.llt.matrixLLT().diagonal().array().log().sum();
  double sum = 0.0;
  for (Index i = 0; i < w.t.size(); ++i) sum += dgf_.neg_log_phi(w.t(i), dim());
  return 0.5 * static_cast<double>(n()) * logdet + sum;
}

Evaluation EcdProblem::evaluate(const Spd& s) const {
  const Work w = work(s);
  const Index d = dim();
  const double logdet = 2.0 * w.llt.matrixLLT().diagonal().array().log().sum();
  double sum = 0.0;
  for (Index i = 0; i < w.t.size(); ++i) sum += dgf_.neg_log_phi(w.t(i), d);
  Evaluation ev;
  ev.cost = 0.5 * static_cast<double>(n()) * logdet + sum;
  // S^{-1} X = L^{-T} Z.
  const Mat sx = w.llt.matrixU().solve(w.z);
  const Vec h = weights(w.t);
  const Mat s_inv = w.llt.solve(Mat::Identity(d, d));
  ev.egrad = Sym::from(0.5 * static_cast<double>(n()) * s_inv -
                       sx * h.asDiagonal() * sx.transpose());
  return ev;
}

Sym EcdProblem::nll_egrad(const Spd& s) const { return evaluate(s).egrad; }

Spd EcdProblem::fp_map(const Spd& s) const {
  require_full_rank("fp_map");
  const Work w = work(s);
  const Vec h = weights(w.t);
  const Mat& x = data_->columns();
  const Mat m = (2.0 / static_cast<double>(n())) * (x * h.asDiagonal() * x.transpose());
  return Spd::trusted(m);
}

Spd EcdProblem::cccp_step(const Spd& p) const {
  if (p.dim() != dim()) throw InvalidInput("cccp_step: wrong dimension");
  require_full_rank("cccp_step");
  const Mat& x = data_->columns();
  const Vec t = (x.transpose() * p.matrix()).cwiseProduct(x.transpose()).rowwise().sum();
  const Vec h = weights(t);
  if ((h.array() < 0.0).any()) throw ClassViolation("cccp_step: h < 0 outside the LC class");
  if (!h.allFinite()) throw DomainError("cccp_step: h is not finite");
  const Mat m = (2.0 / static_cast<double>(n())) * (x * h.asDiagonal() * x.transpose());
  Eigen::LLT<Mat> llt(symmetric_part(m));
  if (llt.info() != Eigen::Success) throw DomainError("cccp_step: weighted moment is not PD");
  return Spd::trusted(llt.solve(Mat::Identity(dim(), dim())));
}

Problem EcdProblem::as_problem() const {
  Problem p;
  p.dim = dim();
  const double inv_n = 1.0 / static_cast<double>(n());
  auto self = std::make_shared<const EcdProblem>(*this);
  p.evaluate = [self, inv_n](const Spd& s) {
    Evaluation ev = self->evaluate(s);
    ev.cost *= inv_n;
    ev.egrad *= inv_n;
    return ev;
  };
  p.cost = [self, inv_n](const Spd& s) { return self->nll(s) * inv_n; };
  p.egrad = [self, inv_n](const Spd& s) { return Sym(self->nll_egrad(s) * inv_n); };
  return p;
}

FixedPointMap EcdProblem::as_map() const {
  auto self = std::make_shared<const EcdProblem>(*this);
  return {dim(), [self](const Spd& s) { return self->fp_map(s); }};
}

Spd EcdProblem::default_start() const {
  const Mat c = data_->second_moment();
  double scale = c.trace() / static_cast<double>(dim());
  if (dgf_.kind == DgfKind::PearsonII)
    scale = std::max(scale, 2.0 * data_->columns().colwise().squaredNorm().maxCoeff());
  return Spd::identity(dim()).scaled(scale);
}

}  // namespace spdgeo::ecd
