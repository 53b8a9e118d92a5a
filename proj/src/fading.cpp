#include "crcap/fading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "crcap/errors.hpp"

namespace crcap::fading {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(4096);
    t[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (n < static_cast<int>(table.size())) return table[static_cast<std::size_t>(n)];
  return std::lgamma(n + 1.0);
}

double log_poisson(int j, double mean) {
  if (mean == 0.0) return j == 0 ? 0.0 : -kInf;
  return -mean + j * std::log(mean) - log_factorial(j);
}

// Regularized lower incomplete gamma P(n, z) for integer n >= 1, z < n, by
// its power series.
double gamma_p_series(int n, double z) {
  if (z <= 0.0) return 0.0;
  double sum = 1.0;
  double term = 1.0;
  for (int i = 1; i < 100000; ++i) {
    term *= z / (n + i);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return std::exp(-z + n * std::log(z) - log_factorial(n)) * sum;
}

// Poisson(K)-mixture of Gamma(j+1, 1) CDFs at z. See power_cdf.
double poisson_gamma_mixture_cdf(double k, double z) {
  if (z <= 0.0) return 0.0;
  constexpr double kRelTrunc = 1e-10;
  const double log_z = std::log(z);
  double sum = 0.0;
  double weight_mass = 0.0;
  // Q(n, z) = exp(-z) sum_{i<n} z^i / i!, accumulated upward while z >= n.
  double q = 0.0;
  for (int j = 0; j < 1000000; ++j) {
    const int n = j + 1;
    const double w = std::exp(log_poisson(j, k));
    double p = 0.0;
    if (z >= n) {
      q += std::exp(-z + j * log_z - log_factorial(j));
      p = std::max(0.0, 1.0 - q);
    } else {
      p = gamma_p_series(n, z);
    }
    sum += w * p;
    weight_mass += w;
    const double tail = std::max(0.0, 1.0 - weight_mass);
    // Later terms have smaller P, so tail * p bounds the remainder.
    if (j >= k && tail * p <= kRelTrunc * sum) break;
    if (k == 0.0) break;
  }
  return std::min(sum, 1.0);
}

double poisson_gamma_mixture_pdf(double k, double rate, double v) {
  if (v < 0.0) return 0.0;
  if (v == 0.0) return rate * std::exp(-k);
  if (k == 0.0) return rate * std::exp(-rate * v);
  const double log_rv = std::log(rate * v);
  double sum = 0.0;
  double prev = 0.0;
  for (int j = 0; j < 1000000; ++j) {
    const double log_term =
        log_poisson(j, k) + std::log(rate) + j * log_rv - rate * v - log_factorial(j);
    const double term = std::exp(log_term);
    sum += term;
    if (j > k && term < prev && term <= 1e-17 * sum) break;
    prev = term;
  }
  return sum;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

FadingKind FadingKind::rician(double k_linear) {
  FadingKind kind{Family::Rician, k_linear};
  kind.validate();
  return kind;
}

void FadingKind::validate() const {
  if (is_rician() && !(k_factor >= 0.0 && std::isfinite(k_factor)))
    throw ConfigError("k_factor", "Rician K must be finite and >= 0");
}

double ShadowingParams::sigma_sf() const { return std::numbers::ln10 / 10.0 * sigma_db; }

void ShadowingParams::validate() const {
  if (!(sigma_db >= 0.0) || !std::isfinite(sigma_db))
    throw ConfigError("sigma_db", "shadowing standard deviation must be finite and >= 0");
}

double sample_power_gain(const FadingKind& kind, RandomStream& rng) {
  if (!kind.is_rician()) return rng.exponential();
  const double k = kind.k_factor;
  const double los = std::sqrt(k / (k + 1.0));
  const double scatter = std::sqrt(0.5 / (k + 1.0));
  const double re = los + scatter * rng.normal();
  const double im = scatter * rng.normal();
  return re * re + im * im;
}

double sample_shadowing(const ShadowingParams& params, RandomStream& rng) {
  const double s = params.sigma_sf();
  if (s == 0.0) return 0.0;
  return s * rng.normal();
}

double power_cdf(const FadingKind& kind, double v) {
  if (!(v > 0.0)) return 0.0;
  if (std::isinf(v)) return 1.0;
  if (!kind.is_rician()) return -std::expm1(-v);
  const double k = kind.k_factor;
  return poisson_gamma_mixture_cdf(k, (k + 1.0) * v);
}

double power_pdf(const FadingKind& kind, double v) {
  if (v < 0.0 || std::isinf(v)) return 0.0;
  if (!kind.is_rician()) return std::exp(-v);
  const double k = kind.k_factor;
  return poisson_gamma_mixture_pdf(k, k + 1.0, v);
}

// ---------------------------------------------------------------------------

RatioScenario RatioScenario::from_links(const FadingKind& cp, const FadingKind& cc) {
  cp.validate();
  cc.validate();
  if (!cp.is_rician() && !cc.is_rician()) return ray_ray();
  if (!cp.is_rician()) return ray_ric(cc.k_factor);
  if (!cc.is_rician()) return ric_ray(cp.k_factor);
  if (cp.k_factor != cc.k_factor)
    throw UnsupportedConfigError("Rician/Rician ratio density requires equal K on the CP and CC links");
  return ric_ric(cp.k_factor);
}

void RatioScenario::validate() const {
  if (!(k_factor >= 0.0) || !std::isfinite(k_factor))
    throw ConfigError("k_factor", "Rician K must be finite and >= 0");
  if (series_terms && *series_terms < 1) throw ConfigError("series_terms", "must be >= 1");
}

int RatioScenario::effective_series_terms() const {
  if (series_terms) return *series_terms;
  // Smallest n >= kMinSeriesTerms with P(Pois(K) >= n) < 1e-15.
  const double k = k_factor;
  if (k == 0.0) return kMinSeriesTerms;
  const int upper = static_cast<int>(k + 40.0 * std::sqrt(k) + 60.0);
  std::vector<double> w(static_cast<std::size_t>(upper) + 1);
  for (int j = 0; j <= upper; ++j) w[static_cast<std::size_t>(j)] = std::exp(log_poisson(j, k));
  double tail = 0.0;
  int n = upper + 1;
  for (int j = upper; j >= kMinSeriesTerms; --j) {
    tail += w[static_cast<std::size_t>(j)];
    if (tail >= 1e-15) break;
    n = j;
  }
  return std::max(n, kMinSeriesTerms);
}

std::string_view to_string(RatioScenario::Kind kind) {
  switch (kind) {
    case RatioScenario::Kind::RayRay: return "rayray";
    case RatioScenario::Kind::RayRic: return "rayric";
    case RatioScenario::Kind::RicRay: return "ricray";
    case RatioScenario::Kind::RicRic: return "ricric";
  }
  return "?";
}

std::optional<RatioScenario::Kind> parse_ratio_kind(std::string_view name) {
  for (auto kind : {RatioScenario::Kind::RayRay, RatioScenario::Kind::RayRic, RatioScenario::Kind::RicRay,
                    RatioScenario::Kind::RicRic})
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

RatioDensity::RatioDensity(const RatioScenario& scenario) : scenario_(scenario) {
  scenario_.validate();
  if (scenario_.kind != RatioScenario::Kind::RicRic) return;
  terms_ = scenario_.effective_series_terms();
  // Both chi-square variates carry noncentrality 2K, i.e. Poisson mean K.
  const double half_lambda = 0.5 * scenario_.noncentrality();
  log_weight_.resize(static_cast<std::size_t>(terms_));
  for (int j = 0; j < terms_; ++j) log_weight_[static_cast<std::size_t>(j)] = log_poisson(j, half_lambda);
  log_factorial_.resize(2 * static_cast<std::size_t>(terms_));
  for (int n = 0; n < 2 * terms_; ++n) log_factorial_[static_cast<std::size_t>(n)] = log_factorial(n);
}

double RatioDensity::operator()(double y) const {
  if (!(y >= 0.0)) throw DomainError("ratio_pdf: y must be >= 0");
  if (std::isinf(y)) return 0.0;
  const double k = scenario_.k_factor;
  switch (scenario_.kind) {
    case RatioScenario::Kind::RayRay: {
      const double s = 1.0 + y;
      return 1.0 / (s * s);
    }
    case RatioScenario::Kind::RayRic: {
      const double d = y + k + 1.0;
      return (k + 1.0) * (y + (k + 1.0) * (k + 1.0)) / (d * d * d) * std::exp(-k + (k * k + k) / d);
    }
    case RatioScenario::Kind::RicRay: {
      const double d = y + k * y + 1.0;
      const double first = k * (1.0 + k) / (d * d) * std::exp(-k / d);
      const double second = (1.0 - k * k + y * (1.0 + 2.0 * k + k * k)) / (d * d * d) *
                            std::exp(-k + (k * y + k * k * y) / d);
      return first + second;
    }
    case RatioScenario::Kind::RicRic:
      return ric_ric(y);
  }
  return 0.0;
}

// Doubly noncentral F with nu1 = nu2 = 2:
//   sum_{j,k} w_j w_k / B(1+j, 1+k) y^j (1+y)^(-2-j-k),
// where 1/B(1+j, 1+k) = (j+k+1)! / (j! k!).
double RatioDensity::ric_ric(double y) const {
  const double log1p_y = std::log1p(y);
  const double log_y = y > 0.0 ? std::log(y) : -kInf;
  double sum = 0.0;
  for (int j = 0; j < terms_; ++j) {
    const double jly = j == 0 ? 0.0 : j * log_y;
    const double row = log_weight_[static_cast<std::size_t>(j)] - log_factorial_[static_cast<std::size_t>(j)] +
                       jly - (2.0 + j) * log1p_y;
    if (row == -kInf) continue;
    for (int k = 0; k < terms_; ++k) {
      const double log_term = row + log_weight_[static_cast<std::size_t>(k)] -
                              log_factorial_[static_cast<std::size_t>(k)] +
                              log_factorial_[static_cast<std::size_t>(j + k + 1)] - k * log1p_y;
      sum += std::exp(log_term);
    }
  }
  return sum;
}

double ratio_pdf(const RatioScenario& scenario, double y) { return RatioDensity(scenario)(y); }

double series_truncation_error(const RatioScenario& scenario, double y, int terms_a, int terms_b) {
  if (scenario.kind != RatioScenario::Kind::RicRic)
    throw UnsupportedConfigError("series_truncation_error applies to the Rician/Rician series only");
  if (!(terms_a >= 1 && terms_b > terms_a)) throw DomainError("series_truncation_error: need terms_b > terms_a >= 1");
  RatioScenario a = scenario;
  RatioScenario b = scenario;
  a.series_terms = terms_a;
  b.series_terms = terms_b;
  return std::abs(RatioDensity(a)(y) - RatioDensity(b)(y));
}

}  // namespace crcap::fading
