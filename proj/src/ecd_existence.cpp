#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "spdgeo/ecd.hpp"

namespace spdgeo::ecd {

namespace {

constexpr double kDirTol = 1e-9;
constexpr std::size_t kMaxExactDirections = 2000;

// Unit direction with the sign fixed by the first entry of significant size.
Vec canonical(const Vec& x) {
  Vec u = x.normalized();
  for (Index j = 0; j < u.size(); ++j) {
    if (std::abs(u(j)) > kDirTol) {
      if (u(j) < 0.0) u = -u;
      break;
    }
  }
  return u;
}

struct Direction {
  Vec u;
  std::size_t count;
};

// Groups data points by the line through the origin they lie on.
std::vector<Direction> group_directions(const Mat& x) {
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(x.cols()));
  for (Index i = 0; i < x.cols(); ++i) dirs.push_back(canonical(x.col(i)));
  std::sort(dirs.begin(), dirs.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                        b.data() + b.size());
  });
  std::vector<Direction> out;
  for (const Vec& u : dirs) {
    bool merged = false;
    // Near-equal directions end up adjacent except when a tiny perturbation
    // reorders a leading coordinate; scan the last few groups.
    for (std::size_t k = out.size(); k-- > 0 && out.size() - k <= 8;) {
      if ((out[k].u - u).norm() <= 1e-7) {
        ++out[k].count;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back({u, 1});
  }
  return out;
}

// Number of columns of x within relative distance tol of span(basis).
std::size_t count_in_subspace(const Mat& x, const Mat& basis) {
  const Mat proj = basis * (basis.transpose() * x);
  std::size_t c = 0;
  for (Index i = 0; i < x.cols(); ++i)
    if ((x.col(i) - proj.col(i)).norm() <= kDirTol * x.col(i).norm()) ++c;
  return c;
}

ExistenceResult warning(const Mat& basis, std::size_t count, std::size_t n, double bound,
                        const std::string& what) {
  ExistenceResult r;
  r.ok = false;
  r.witness = basis;
  r.fraction = static_cast<double>(count) / static_cast<double>(n);
  r.bound = bound;
  std::ostringstream ss;
  ss << what << ": " << count << " of " << n << " points lie in a subspace of dimension "
     << basis.cols() << " (fraction " << r.fraction << " >= bound " << bound << ")";
  r.message = ss.str();
  return r;
}

}  // namespace

ExistenceResult existence_check(const Dataset& data, double alpha) {
  const Index d = data.d();
  const std::size_t n = static_cast<std::size_t>(data.n());
  ExistenceResult ok;
  if (n == 0) {
    ok.ok = false;
    ok.message = "empty dataset";
    return ok;
  }
  const Mat& x = data.columns();

  const Index rank = data.rank();
  if (rank < d) {
    Eigen::SelfAdjointEigenSolver<Mat> es(x * x.transpose());
    const Mat basis = es.eigenvectors().rightCols(rank);
    ExistenceResult r = warning(basis, n, n, 0.0, "data do not span the space");
    r.fraction = 1.0;
    return r;
  }

  const double gap = static_cast<double>(d) - 2.0 * alpha;
  if (!(gap > 0.0)) {
    ok.message = "condition is vacuous for alpha >= d/2";
    return ok;
  }
  const auto bound_for = [&](Index dl) { return static_cast<double>(dl) / gap; };
  const auto violates = [&](std::size_t count, Index dl) {
    return static_cast<double>(count) / static_cast<double>(n) >= bound_for(dl);
  };

  // Lines.
  const auto dirs = group_directions(x);
  if (bound_for(1) <= 1.0) {
    for (const auto& g : dirs)
      if (violates(g.count, 1)) return warning(g.u, g.count, n, bound_for(1), "line");
  }

  // Planes in three dimensions: every plane spanned by two distinct data
  // directions, grouped by normal.
  if (d == 3 && bound_for(2) <= 1.0) {
    if (dirs.size() <= kMaxExactDirections) {
      for (std::size_t i = 0; i < dirs.size(); ++i) {
        std::map<std::vector<long long>, std::size_t> planes;
        for (std::size_t j = 0; j < dirs.size(); ++j) {
          if (j == i) continue;
          Eigen::Vector3d a = dirs[i].u, b = dirs[j].u;
          Vec nrm = canonical(Vec(a.cross(b)));
          std::vector<long long> key(3);
          for (int k = 0; k < 3; ++k) key[k] = std::llround(nrm(k) * 1e7);
          planes[key] += dirs[j].count;
        }
        for (const auto& [key, cnt] : planes) {
          const std::size_t total = cnt + dirs[i].count;
          if (violates(total, 2)) {
            Eigen::Vector3d nrm(key[0] * 1e-7, key[1] * 1e-7, key[2] * 1e-7);
            Eigen::JacobiSVD<Mat> svd(Mat(nrm.normalized().transpose()), Eigen::ComputeFullV);
            return warning(svd.matrixV().rightCols(2), total, n, bound_for(2), "plane");
          }
        }
      }
      ok.message = "all lines and planes satisfy the condition";
      return ok;
    }
    ok.exact = false;
  }

  if (d > 3) ok.exact = false;

  // Heuristic: leading and trailing eigen-subspaces of the second moment.
  if (!ok.exact) {
    Eigen::SelfAdjointEigenSolver<Mat> es(x * x.transpose());
    const Mat& v = es.eigenvectors();
    for (Index k = 2; k < d; ++k) {
      if (bound_for(k) > 1.0) break;
      for (const Mat& basis : {Mat(v.rightCols(k)), Mat(v.leftCols(k))}) {
        const std::size_t c = count_in_subspace(x, basis);
        if (violates(c, k)) return warning(basis, c, n, bound_for(k), "eigen-subspace");
      }
    }
    ok.message = "heuristic check passed (lines exact, higher subspaces sampled)";
    return ok;
  }
  ok.message = "all lines satisfy the condition";
  return ok;
}

}  // namespace spdgeo::ecd
