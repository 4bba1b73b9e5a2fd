#include <cmath>
#include <limits>

#include "spdgeo/ecd.hpp"

namespace spdgeo::ecd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double half_d(Index d) { return 0.5 * static_cast<double>(d); }
}  // namespace

Dgf Dgf::kotz(double alpha, double b, double beta) {
  Dgf g;
  g.kind = DgfKind::Kotz;
  g.alpha = alpha;
  g.b = b;
  g.beta = beta;
  g.validate();
  return g;
}

Dgf Dgf::gaussian(Index d) { return kotz(half_d(d), 2.0, 1.0); }

Dgf Dgf::student_t(double nu) {
  Dgf g;
  g.kind = DgfKind::StudentT;
  g.nu = nu;
  g.validate();
  return g;
}

Dgf Dgf::power_exponential(double nu, double b) {
  Dgf g;
  g.kind = DgfKind::PowerExponential;
  g.nu = nu;
  g.b = b;
  g.validate();
  return g;
}

Dgf Dgf::wdist(double nu, double b) {
  Dgf g = power_exponential(nu, b);
  g.kind = DgfKind::WDist;
  return g;
}

Dgf Dgf::elliptical_gamma(double nu, double b) {
  Dgf g = power_exponential(nu, b);
  g.kind = DgfKind::EllipticalGamma;
  return g;
}

Dgf Dgf::pearson2(double nu) {
  Dgf g;
  g.kind = DgfKind::PearsonII;
  g.nu = nu;
  g.validate();
  return g;
}

Dgf Dgf::logistic() {
  Dgf g;
  g.kind = DgfKind::Logistic;
  return g;
}

void Dgf::validate() const {
  const auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidInput(std::string("dgf: ") + what + " must be positive and finite");
  };
  switch (kind) {
    case DgfKind::Kotz:
      positive(alpha, "alpha");
      positive(b, "b");
      positive(beta, "beta");
      break;
    case DgfKind::StudentT:
      positive(nu, "nu");
      break;
    case DgfKind::PowerExponential:
    case DgfKind::WDist:
    case DgfKind::EllipticalGamma:
      positive(nu, "nu");
      positive(b, "b");
      break;
    case DgfKind::PearsonII:
      if (!(nu > -1.0) || !std::isfinite(nu)) throw InvalidInput("dgf: PearsonII needs nu > -1");
      break;
    case DgfKind::Logistic:
      break;
  }
}

std::optional<KotzParams> Dgf::as_kotz(Index d) const {
  switch (kind) {
    case DgfKind::Kotz:
      return KotzParams{alpha, b, beta};
    case DgfKind::PowerExponential:
      return KotzParams{half_d(d), std::pow(b, 1.0 / nu), nu};
    case DgfKind::WDist:
      return KotzParams{half_d(d) + nu - 1.0, std::pow(b, 1.0 / nu), nu};
    case DgfKind::EllipticalGamma:
      return KotzParams{nu, b, 1.0};
    default:
      return std::nullopt;
  }
}

double Dgf::neg_log_phi(double t, Index d) const {
  if (auto k = as_kotz(d)) {
    const double c = half_d(d) - k->alpha;
    const double log_term = (c == 0.0) ? 0.0 : c * std::log(t);
    return log_term + std::pow(t / k->b, k->beta);
  }
  switch (kind) {
    case DgfKind::StudentT:
      return 0.5 * (nu + static_cast<double>(d)) * std::log1p(t / nu);
    case DgfKind::PearsonII:
      if (t >= 1.0) return kInf;
      return -nu * std::log1p(-t);
    case DgfKind::Logistic: {
      const double s = std::sqrt(t);
      return s + 2.0 * std::log1p(std::exp(-s));
    }
    default:
      break;
  }
  throw InvalidInput("dgf: unknown variant");
}

double Dgf::h(double t, Index d) const {
  if (auto k = as_kotz(d)) {
    const double c = half_d(d) - k->alpha;
    const double first = (c == 0.0) ? 0.0 : c / t;
    return first + (k->beta / k->b) * std::pow(t / k->b, k->beta - 1.0);
  }
  switch (kind) {
    case DgfKind::StudentT:
      return 0.5 * (nu + static_cast<double>(d)) / (nu + t);
    case DgfKind::PearsonII:
      if (nu == 0.0) return 0.0;
      if (t >= 1.0) return kInf;
      return nu / (1.0 - t);
    case DgfKind::Logistic: {
      const double s = std::sqrt(t);
      if (s < 1e-4) return 0.25 - s * s / 48.0;
      return std::tanh(0.5 * s) / (2.0 * s);
    }
    default:
      break;
  }
  throw InvalidInput("dgf: unknown variant");
}

const char* to_string(DgfKind k) {
  switch (k) {
    case DgfKind::Kotz:
      return "kotz";
    case DgfKind::StudentT:
      return "student_t";
    case DgfKind::PowerExponential:
      return "power_exponential";
    case DgfKind::WDist:
      return "wdist";
    case DgfKind::EllipticalGamma:
      return "elliptical_gamma";
    case DgfKind::PearsonII:
      return "pearson2";
    case DgfKind::Logistic:
      return "logistic";
  }
  return "unknown";
}

DgfKind parse_dgf_kind(const std::string& name) {
  for (DgfKind k : {DgfKind::Kotz, DgfKind::StudentT, DgfKind::PowerExponential, DgfKind::WDist,
                    DgfKind::EllipticalGamma, DgfKind::PearsonII, DgfKind::Logistic})
    if (name == to_string(k)) return k;
  throw InvalidInput("unknown dgf: " + name);
}

std::string Dgf::name() const { return to_string(kind); }

std::vector<std::pair<std::string, double>> Dgf::params() const {
  switch (kind) {
    case DgfKind::Kotz:
      return {{"alpha", alpha}, {"b", b}, {"beta", beta}};
    case DgfKind::StudentT:
    case DgfKind::PearsonII:
      return {{"nu", nu}};
    case DgfKind::PowerExponential:
    case DgfKind::WDist:
    case DgfKind::EllipticalGamma:
      return {{"nu", nu}, {"b", b}};
    case DgfKind::Logistic:
      return {};
  }
  return {};
}

const char* to_string(Solver s) {
  switch (s) {
    case Solver::FixedPoint:
      return "fixed_point";
    case Solver::Cccp:
      return "cccp";
    case Solver::Manifold:
      return "manifold";
  }
  return "unknown";
}

DgfClass classify(const Dgf& dgf, Index d) {
  dgf.validate();
  DgfClass c;
  if (auto k = dgf.as_kotz(d)) {
    const bool below = k->alpha <= half_d(d);
    c.gconvex = below;
    c.ln = below && k->beta > 0.0 && k->beta < 2.0;
    c.lc = below && k->beta >= 1.0;
  } else {
    switch (dgf.kind) {
      case DgfKind::StudentT:
      case DgfKind::Logistic:
        c.gconvex = c.ln = c.lc = true;
        break;
      case DgfKind::PearsonII:
        c.gconvex = dgf.nu > 0.0;
        break;
      default:
        break;
    }
  }
  c.recommended = (c.ln || c.lc) ? Solver::FixedPoint : Solver::Manifold;
  return c;
}

}  // namespace spdgeo::ecd
