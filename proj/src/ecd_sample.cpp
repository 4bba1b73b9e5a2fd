#include <cmath>
#include <functional>
#include <random>

#include "spdgeo/ecd.hpp"

namespace spdgeo::ecd {

Dataset sample(const Dgf& dgf, const Spd& scatter, Index n, std::uint64_t seed) {
  dgf.validate();
  if (n < 0) throw InvalidInput("sample: n must be non-negative");
  const Index d = scatter.dim();
  const auto kotz = dgf.as_kotz(d);
  if (!kotz && dgf.kind != DgfKind::StudentT && dgf.kind != DgfKind::PearsonII)
    throw Unsupported("sample: no sampler for dgf " + dgf.name());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Mat root = mat_fn(scatter.matrix(), MatFn::sqrt());

  // Radius of S^{-1/2} x for one draw.
  std::function<double()> radius;
  if (kotz) {
    std::gamma_distribution<double> gamma(kotz->alpha / kotz->beta, 1.0);
    radius = [=, &rng]() mutable {
      const double y = gamma(rng);
      return std::sqrt(kotz->b) * std::pow(y, 1.0 / (2.0 * kotz->beta));
    };
  } else if (dgf.kind == DgfKind::StudentT) {
    // ||z|| / sqrt(w / nu), z ~ N(0, I_d), w ~ chi^2_nu.
    std::chi_squared_distribution<double> chi_d(static_cast<double>(d));
    std::chi_squared_distribution<double> chi_nu(dgf.nu);
    radius = [=, &rng]() mutable {
      const double z2 = chi_d(rng);
      const double w = chi_nu(rng);
      return std::sqrt(z2 * dgf.nu / w);
    };
  } else {
    // r^2 ~ Beta(d/2, nu + 1).
    std::gamma_distribution<double> ga(0.5 * static_cast<double>(d), 1.0);
    std::gamma_distribution<double> gb(dgf.nu + 1.0, 1.0);
    radius = [=, &rng]() mutable {
      const double a = ga(rng);
      const double b = gb(rng);
      return std::sqrt(a / (a + b));
    };
  }

  Mat rows(n, d);
  Vec u(d);
  for (Index i = 0; i < n; ++i) {
    double nu2 = 0.0;
    do {
      for (Index j = 0; j < d; ++j) u(j) = normal(rng);
      nu2 = u.squaredNorm();
    } while (nu2 == 0.0);
    double r = 0.0;
    while (!(r > 0.0)) r = radius();
    rows.row(i) = (r / std::sqrt(nu2)) * (root * u).transpose();
  }

  Dataset ds = n > 0 ? Dataset::from_rows(rows) : Dataset::empty(d);
  ds.provenance = Provenance{seed, dgf, scatter};
  return ds;
}

}  // namespace spdgeo::ecd
