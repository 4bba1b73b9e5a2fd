#pragma once

// Dense symmetric / symmetric-positive-definite matrix types and the
// eigendecomposition-backed matrix functions built on them. Everything here
// is templated on the scalar type; `double` aliases live at the bottom.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "spdgeo/errors.hpp"

namespace spdgeo {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// max|M_ij - M_ji| / max|M_ij|; zero for the zero matrix.
template <typename Derived>
typename Derived::Scalar relative_asymmetry(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Scalar scale = m.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) return Scalar(0);
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m,
                  typename Derived::Scalar rel_tol = typename Derived::Scalar(1e-12)) {
  return m.rows() == m.cols() && relative_asymmetry(m) <= rel_tol;
}

/// Symmetric part (M + M^T) / 2.
template <typename Derived>
Matrix<typename Derived::Scalar> symmetric_part(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.transpose()) / typename Derived::Scalar(2);
}

/// Real symmetric matrix; tangent vectors and Euclidean gradients.
///
/// Inherits the full Eigen expression API, so `a + 2 * b` and friends work
/// unchanged. Symmetry of the result of an arbitrary expression is the
/// caller's responsibility; use `SymMatrix::from` to symmetrize.
template <typename Scalar_>
class SymMatrix : public Matrix<Scalar_> {
 public:
  using Scalar = Scalar_;
  using Base = Matrix<Scalar_>;

  SymMatrix() = default;

  template <typename OtherDerived>
  SymMatrix(const Eigen::MatrixBase<OtherDerived>& other) : Base(other) {}

  template <typename OtherDerived>
  SymMatrix& operator=(const Eigen::MatrixBase<OtherDerived>& other) {
    Base::operator=(other);
    return *this;
  }

  /// Symmetric part of an arbitrary square expression.
  template <typename OtherDerived>
  static SymMatrix from(const Eigen::MatrixBase<OtherDerived>& other) {
    return SymMatrix(symmetric_part(other));
  }

  static SymMatrix zero(Index d) { return SymMatrix(Base::Zero(d, d)); }
  static SymMatrix identity(Index d) { return SymMatrix(Base::Identity(d, d)); }

  Index dim() const { return this->rows(); }
};

/// Real symmetric positive definite matrix.
///
/// Validated on construction: symmetric to 1e-12 relative and
/// lambda_min > 1e-14 * lambda_max. The stored matrix is exactly symmetric.
template <typename Scalar_>
class SpdMatrix {
 public:
  using Scalar = Scalar_;
  using MatrixType = Matrix<Scalar_>;

  static constexpr Scalar kPdTolerance = Scalar(1e-14);

  SpdMatrix() = default;

  template <typename Derived>
  explicit SpdMatrix(const Eigen::MatrixBase<Derived>& m) : m_(m) {
    validate();
  }

  /// Skips the definiteness check; for results that are PD by construction.
  template <typename Derived>
  static SpdMatrix trusted(const Eigen::MatrixBase<Derived>& m) {
    SpdMatrix s;
    s.m_ = symmetric_part(m);
    return s;
  }

  static SpdMatrix identity(Index d) { return trusted(MatrixType::Identity(d, d)); }

  Index dim() const { return m_.rows(); }
  const MatrixType& matrix() const { return m_; }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  /// c * S for c > 0.
  SpdMatrix scaled(Scalar c) const {
    if (!(c > Scalar(0))) throw DomainError("SpdMatrix::scaled: factor must be positive");
    return trusted(c * m_);
  }

 private:
  void validate() {
    if (m_.rows() != m_.cols()) throw InvalidInput("SpdMatrix: matrix is not square");
    if (m_.rows() == 0) throw InvalidInput("SpdMatrix: empty matrix");
    if (!m_.allFinite()) throw InvalidInput("SpdMatrix: non-finite entries");
    if (!is_symmetric(m_)) throw InvalidInput("SpdMatrix: matrix is not symmetric");
    m_ = symmetric_part(m_);
    Eigen::SelfAdjointEigenSolver<MatrixType> es(m_, Eigen::EigenvaluesOnly);
    const Scalar lo = es.eigenvalues()(0);
    const Scalar hi = es.eigenvalues()(m_.rows() - 1);
    if (!(lo > kPdTolerance * hi) || !(hi > Scalar(0)))
      throw DomainError("SpdMatrix: matrix is not positive definite");
  }

  MatrixType m_;
};

/// Symmetric eigendecomposition with eigenvalues sorted descending.
template <typename Scalar>
struct EigDecomp {
  Vector<Scalar> values;
  Matrix<Scalar> vectors;

  Matrix<Scalar> reconstruct() const {
    return vectors * values.asDiagonal() * vectors.transpose();
  }

  /// U f(Lambda) U^T.
  template <typename F>
  Matrix<Scalar> apply(F f) const {
    Vector<Scalar> fv = values.unaryExpr(f);
    return vectors * fv.asDiagonal() * vectors.transpose();
  }

  Scalar min() const { return values(values.size() - 1); }
  Scalar max() const { return values(0); }
};

template <typename Derived>
EigDecomp<typename Derived::Scalar> eig_sym(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw InvalidInput("eig_sym: matrix is not square");
  if (!is_symmetric(m)) throw InvalidInput("eig_sym: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(symmetric_part(m));
  if (es.info() != Eigen::Success) throw DomainError("eig_sym: eigensolver did not converge");
  EigDecomp<Scalar> out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

template <typename Scalar>
EigDecomp<Scalar> eig_sym(const SpdMatrix<Scalar>& s) {
  return eig_sym(s.matrix());
}

/// Scalar functions available through `mat_fn`.
struct MatFn {
  enum class Kind { Sqrt, InvSqrt, Log, Exp, Pow };
  Kind kind;
  double exponent = 1.0;

  static MatFn sqrt() { return {Kind::Sqrt}; }
  static MatFn inv_sqrt() { return {Kind::InvSqrt}; }
  static MatFn log() { return {Kind::Log}; }
  static MatFn exp() { return {Kind::Exp}; }
  static MatFn pow(double p) { return {Kind::Pow, p}; }

  bool needs_positive() const { return kind != Kind::Exp; }
};

/// f applied to the spectrum of a symmetric matrix, eigenvectors preserved.
/// Throws DomainError when f needs a positive spectrum and the input lacks one.
template <typename Derived>
SymMatrix<typename Derived::Scalar> mat_fn(const Eigen::MatrixBase<Derived>& m, MatFn f) {
  using Scalar = typename Derived::Scalar;
  const auto e = eig_sym(m);
  if (f.needs_positive() && !(e.min() > SpdMatrix<Scalar>::kPdTolerance * e.max()))
    throw DomainError("mat_fn: input is not positive definite");
  switch (f.kind) {
    case MatFn::Kind::Sqrt:
      return e.apply([](Scalar x) { return std::sqrt(x); });
    case MatFn::Kind::InvSqrt:
      return e.apply([](Scalar x) { return Scalar(1) / std::sqrt(x); });
    case MatFn::Kind::Log:
      return e.apply([](Scalar x) { return std::log(x); });
    case MatFn::Kind::Exp:
      return e.apply([](Scalar x) { return std::exp(x); });
    case MatFn::Kind::Pow: {
      const Scalar p = static_cast<Scalar>(f.exponent);
      return e.apply([p](Scalar x) { return std::pow(x, p); });
    }
  }
  throw InvalidInput("mat_fn: unknown function");
}

template <typename Scalar>
SpdMatrix<Scalar> sqrtm(const SpdMatrix<Scalar>& s) {
  return SpdMatrix<Scalar>::trusted(mat_fn(s.matrix(), MatFn::sqrt()));
}

template <typename Scalar>
SpdMatrix<Scalar> invsqrtm(const SpdMatrix<Scalar>& s) {
  return SpdMatrix<Scalar>::trusted(mat_fn(s.matrix(), MatFn::inv_sqrt()));
}

template <typename Scalar>
SpdMatrix<Scalar> powm(const SpdMatrix<Scalar>& s, double p) {
  return SpdMatrix<Scalar>::trusted(mat_fn(s.matrix(), MatFn::pow(p)));
}

template <typename Scalar>
SymMatrix<Scalar> logm(const SpdMatrix<Scalar>& s) {
  return mat_fn(s.matrix(), MatFn::log());
}

template <typename Scalar>
SpdMatrix<Scalar> expm(const SymMatrix<Scalar>& x) {
  return SpdMatrix<Scalar>::trusted(mat_fn(x, MatFn::exp()));
}

template <typename Scalar>
SpdMatrix<Scalar> inverse(const SpdMatrix<Scalar>& s) {
  Eigen::LLT<Matrix<Scalar>> llt(s.matrix());
  return SpdMatrix<Scalar>::trusted(llt.solve(Matrix<Scalar>::Identity(s.dim(), s.dim())));
}

template <typename Scalar>
Scalar logdet(const SpdMatrix<Scalar>& s) {
  Eigen::LLT<Matrix<Scalar>> llt(s.matrix());
  return Scalar(2) * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

namespace detail {
template <typename Scalar>
void require_same_dim(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b, const char* who) {
  if (a.dim() != b.dim()) throw InvalidInput(std::string(who) + ": dimension mismatch");
}
}  // namespace detail

/// Point A #_t B on the geodesic from A (t = 0) to B (t = 1):
/// A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}.
///
/// With Cholesky factors A = L L^T, B = R R^T and the SVD L^{-1} R = U S V^T
/// this is L U S^{2t} U^T L^T. Working with singular values of L^{-1} R
/// rather than eigenvalues of L^{-1} B L^{-T} keeps relative accuracy when
/// A and B are badly conditioned.
template <typename Scalar>
SpdMatrix<Scalar> geodesic(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b, double t) {
  detail::require_same_dim(a, b, "geodesic");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("geodesic: t must lie in [0, 1]");
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  const Eigen::LLT<Matrix<Scalar>> la(a.matrix()), lb(b.matrix());
  const Matrix<Scalar> l = la.matrixL();
  const Matrix<Scalar> k =
      l.template triangularView<Eigen::Lower>().solve(Matrix<Scalar>(lb.matrixL()));
  const Eigen::JacobiSVD<Matrix<Scalar>> svd(k, Eigen::ComputeFullU);
  const Matrix<Scalar> lu = l * svd.matrixU();
  const Scalar p = static_cast<Scalar>(2.0 * t);
  const Vector<Scalar> s = svd.singularValues().array().pow(p);
  return SpdMatrix<Scalar>::trusted(symmetric_part(Matrix<Scalar>(lu * s.asDiagonal() * lu.transpose())));
}

/// Matrix geometric mean A # B, the geodesic midpoint.
template <typename Scalar>
SpdMatrix<Scalar> geometric_mean(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b) {
  return geodesic(a, b, 0.5);
}

/// Parallel sum A : B = (A^{-1} + B^{-1})^{-1}, evaluated as A (A + B)^{-1} B.
template <typename Scalar>
SpdMatrix<Scalar> parallel_sum(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b) {
  detail::require_same_dim(a, b, "parallel_sum");
  Eigen::LLT<Matrix<Scalar>> llt(a.matrix() + b.matrix());
  return SpdMatrix<Scalar>::trusted(a.matrix() * llt.solve(b.matrix()));
}

/// Loewner order test A <= B, i.e. lambda_min(B - A) >= -tol.
template <typename DerivedA, typename DerivedB>
bool loewner_leq(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                 typename DerivedA::Scalar tol) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInput("loewner_leq: dimension mismatch");
  const Matrix<Scalar> diff = symmetric_part(b - a);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) >= -tol;
}

template <typename Scalar>
bool loewner_leq(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b, Scalar tol) {
  return loewner_leq(a.matrix(), b.matrix(), tol);
}

/// Random SPD matrix M M^T + ridge * I with standard normal M, resampled until
/// its condition number is at most `max_condition`.
template <typename Scalar, typename Rng>
SpdMatrix<Scalar> random_spd(Index d, Rng& rng, Scalar ridge = Scalar(1e-3),
                             Scalar max_condition = Scalar(1e6)) {
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  for (;;) {
    Matrix<Scalar> m(d, d);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i) m(i, j) = normal(rng);
    Matrix<Scalar> s = m * m.transpose() + ridge * Matrix<Scalar>::Identity(d, d);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(s, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(d - 1) <= max_condition * es.eigenvalues()(0))
      return SpdMatrix<Scalar>::trusted(s);
  }
}

/// Random symmetric matrix with independent N(0, scale^2) entries on and
/// above the diagonal.
template <typename Scalar, typename Rng>
SymMatrix<Scalar> random_sym(Index d, Rng& rng, Scalar scale = Scalar(1)) {
  std::normal_distribution<Scalar> normal(Scalar(0), scale);
  Matrix<Scalar> m(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i <= j; ++i) m(i, j) = m(j, i) = normal(rng);
  return SymMatrix<Scalar>(m);
}

/// Kronecker product A (x) B.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  Matrix<typename DerivedA::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

using Mat = Matrix<double>;
using Vec = Vector<double>;
using Sym = SymMatrix<double>;
using Spd = SpdMatrix<double>;

}  // namespace spdgeo
