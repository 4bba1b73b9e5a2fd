#pragma once

// Riemannian geometry of the SPD cone under the affine-invariant metric
// g_X(eta, xi) = trace(eta X^{-1} xi X^{-1}), plus the Riemannian and
// Thompson distances.

#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "spdgeo/spd.hpp"

namespace spdgeo {

/// A point on the manifold with lazily cached eigendecomposition, inverse,
/// square root and inverse square root. The cache is filled once under
/// std::call_once and shared between copies, so points are safe to share
/// across threads.
template <typename Scalar>
class ManifoldPoint {
 public:
  ManifoldPoint() = default;
  explicit ManifoldPoint(SpdMatrix<Scalar> value)
      : value_(std::move(value)), cache_(std::make_shared<Cache>()) {}

  const SpdMatrix<Scalar>& value() const { return value_; }
  const Matrix<Scalar>& matrix() const { return value_.matrix(); }
  Index dim() const { return value_.dim(); }

  const EigDecomp<Scalar>& eig() const { return cache().eig; }
  const Matrix<Scalar>& inverse() const { return cache().inverse; }
  const Matrix<Scalar>& sqrt() const { return cache().sqrt; }
  const Matrix<Scalar>& inv_sqrt() const { return cache().inv_sqrt; }

  /// Reconstruction error of the cached decomposition, relative Frobenius.
  Scalar cache_error() const {
    return (eig().reconstruct() - matrix()).norm() / matrix().norm();
  }

 private:
  struct Cache {
    std::once_flag once;
    EigDecomp<Scalar> eig;
    Matrix<Scalar> inverse, sqrt, inv_sqrt;
  };

  const Cache& cache() const {
    if (!cache_) throw InvalidInput("ManifoldPoint: empty point");
    std::call_once(cache_->once, [this] {
      Cache& c = *cache_;
      c.eig = eig_sym(value_.matrix());
      c.inverse = symmetric_part(c.eig.apply([](Scalar x) { return Scalar(1) / x; }));
      c.sqrt = symmetric_part(c.eig.apply([](Scalar x) { return std::sqrt(x); }));
      c.inv_sqrt =
          symmetric_part(c.eig.apply([](Scalar x) { return Scalar(1) / std::sqrt(x); }));
    });
    return *cache_;
  }

  SpdMatrix<Scalar> value_;
  std::shared_ptr<Cache> cache_;
};

namespace detail {
template <typename Scalar, typename D1, typename D2>
void require_tangent(const ManifoldPoint<Scalar>& x, const Eigen::MatrixBase<D1>& a,
                     const Eigen::MatrixBase<D2>& b, const char* who) {
  if (a.rows() != x.dim() || a.cols() != x.dim() || b.rows() != x.dim() || b.cols() != x.dim())
    throw InvalidInput(std::string(who) + ": dimension mismatch");
}
}  // namespace detail

/// g_X(eta, xi) = trace(eta X^{-1} xi X^{-1}).
template <typename Scalar, typename D1, typename D2>
Scalar inner(const ManifoldPoint<Scalar>& x, const Eigen::MatrixBase<D1>& eta,
             const Eigen::MatrixBase<D2>& xi) {
  detail::require_tangent(x, eta, xi, "inner");
  const Matrix<Scalar> p = x.inverse() * eta;
  const Matrix<Scalar> q = x.inverse() * xi;
  return p.cwiseProduct(q.transpose()).sum();
}

template <typename Scalar, typename D>
Scalar norm(const ManifoldPoint<Scalar>& x, const Eigen::MatrixBase<D>& eta) {
  return std::sqrt(std::max(inner(x, eta, eta), Scalar(0)));
}

/// Riemannian gradient X G X from the (symmetrized) Euclidean gradient G.
template <typename Scalar, typename D>
SymMatrix<Scalar> egrad_to_rgrad(const ManifoldPoint<Scalar>& x,
                                 const Eigen::MatrixBase<D>& egrad) {
  detail::require_tangent(x, egrad, egrad, "egrad_to_rgrad");
  return SymMatrix<Scalar>::from(x.matrix() * symmetric_part(egrad) * x.matrix());
}

/// Exponential-map retraction R_X(xi) = X exp(X^{-1} xi).
///
/// X^{-1} xi is diagonalised through the symmetric-definite pencil
/// (xi, X): xi V = X V Lambda with V^T X V = I, so that
/// X exp(X^{-1} xi) = (X V) exp(Lambda) (X V)^T.
template <typename Scalar, typename D>
SpdMatrix<Scalar> retract(const ManifoldPoint<Scalar>& x, const Eigen::MatrixBase<D>& xi) {
  detail::require_tangent(x, xi, xi, "retract");
  const Matrix<Scalar> sxi = symmetric_part(xi);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix<Scalar>> ges(sxi, x.matrix());
  if (ges.info() != Eigen::Success) throw DomainError("retract: eigensolver failed");
  const Vector<Scalar>& lambda = ges.eigenvalues();
  constexpr Scalar kMaxExponent = Scalar(200);
  if (!lambda.allFinite() || lambda.cwiseAbs().maxCoeff() > kMaxExponent)
    throw StepTooLarge("retract: step overflows the matrix exponential");
  const Matrix<Scalar> w = x.matrix() * ges.eigenvectors();
  return SpdMatrix<Scalar>::trusted(w * lambda.array().exp().matrix().asDiagonal() *
                                    w.transpose());
}

/// Velocity of t -> R_X(t xi) at t = 1, i.e. xi X^{-1} Y with Y = R_X(xi).
/// Equals the parallel transport of xi from X to Y along the geodesic.
template <typename Scalar, typename D>
SymMatrix<Scalar> geodesic_velocity(const ManifoldPoint<Scalar>& x,
                                    const Eigen::MatrixBase<D>& xi,
                                    const SpdMatrix<Scalar>& y) {
  return SymMatrix<Scalar>::from(xi * x.inverse() * y.matrix());
}

/// Parallel transport T(eta) = E eta E^T with E = (Y X^{-1})^{1/2}, together
/// with its inverse.
///
/// E is realised as Y^{1/2} (Y^{1/2} X^{-1} Y^{1/2})^{1/2} Y^{-1/2}, the
/// principal square root of Y X^{-1} expressed through symmetric kernels.
template <typename Scalar>
class ParallelTransport {
 public:
  ParallelTransport(const ManifoldPoint<Scalar>& from, const ManifoldPoint<Scalar>& to) {
    if (from.dim() != to.dim()) throw InvalidInput("transport: dimension mismatch");
    const Matrix<Scalar> inner = symmetric_part(to.sqrt() * from.inverse() * to.sqrt());
    const auto e = eig_sym(inner);
    const Matrix<Scalar> root = e.apply([](Scalar v) { return std::sqrt(v); });
    const Matrix<Scalar> inv_root = e.apply([](Scalar v) { return Scalar(1) / std::sqrt(v); });
    e_ = to.sqrt() * root * to.inv_sqrt();
    e_inv_ = to.sqrt() * inv_root * to.inv_sqrt();
  }

  template <typename D>
  SymMatrix<Scalar> apply(const Eigen::MatrixBase<D>& eta) const {
    return SymMatrix<Scalar>::from(e_ * eta * e_.transpose());
  }

  template <typename D>
  SymMatrix<Scalar> apply_inverse(const Eigen::MatrixBase<D>& eta) const {
    return SymMatrix<Scalar>::from(e_inv_ * eta * e_inv_.transpose());
  }

  const Matrix<Scalar>& e() const { return e_; }
  const Matrix<Scalar>& e_inverse() const { return e_inv_; }

 private:
  Matrix<Scalar> e_, e_inv_;
};

template <typename Scalar, typename D>
SymMatrix<Scalar> transport(const ManifoldPoint<Scalar>& x, const ManifoldPoint<Scalar>& y,
                            const Eigen::MatrixBase<D>& eta) {
  return ParallelTransport<Scalar>(x, y).apply(eta);
}

template <typename Scalar, typename D>
SymMatrix<Scalar> transport_inv(const ManifoldPoint<Scalar>& x, const ManifoldPoint<Scalar>& y,
                                const Eigen::MatrixBase<D>& eta) {
  return ParallelTransport<Scalar>(x, y).apply_inverse(eta);
}

/// Eigenvalues of A^{-1/2} B A^{-1/2} (the pencil (B, A)), ascending.
/// Squared singular values of L_A^{-1} L_B for Cholesky factors, which keeps
/// small eigenvalues accurate relative to their size.
template <typename Scalar>
Vector<Scalar> relative_spectrum(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b) {
  detail::require_same_dim(a, b, "relative_spectrum");
  const Eigen::LLT<Matrix<Scalar>> la(a.matrix()), lb(b.matrix());
  if (la.info() != Eigen::Success || lb.info() != Eigen::Success)
    throw DomainError("relative_spectrum: Cholesky factorization failed");
  const Matrix<Scalar> k = la.matrixL().solve(Matrix<Scalar>(lb.matrixL()));
  const Eigen::JacobiSVD<Matrix<Scalar>> svd(k);
  return svd.singularValues().array().square().reverse();
}

/// delta_R(A, B) = ||log(A^{-1/2} B A^{-1/2})||_F.
template <typename Scalar>
Scalar dist_riem(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b) {
  return relative_spectrum(a, b).array().log().matrix().norm();
}

/// delta_T(A, B) = ||log(B^{-1/2} A B^{-1/2})||_2.
template <typename Scalar>
Scalar dist_thompson(const SpdMatrix<Scalar>& a, const SpdMatrix<Scalar>& b) {
  return relative_spectrum(b, a).array().log().abs().maxCoeff();
}

using Point = ManifoldPoint<double>;
using Transport = ParallelTransport<double>;

}  // namespace spdgeo
