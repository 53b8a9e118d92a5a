#include "crcap/powerloss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "crcap/errors.hpp"
#include "crcap/specfun.hpp"

namespace crcap::powerloss {

namespace {

void require_unit_interval(double x, const char* who) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(who) + ": x must lie in [0, 1]");
}

// Scale-aware breakpoints around each characteristic point.
std::vector<double> around(std::initializer_list<double> centers) {
  std::vector<double> out;
  for (double c : centers) {
    if (!(c > 0.0) || !std::isfinite(c)) continue;
    for (double f : {0.01, 0.1, 1.0, 10.0, 100.0}) out.push_back(c * f);
  }
  return out;
}

}  // namespace

void LinkBudget::validate() const {
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(mu_s)) throw ConfigError("mu_s", "must be positive");
  if (!positive(mu_t)) throw ConfigError("mu_t", "must be positive");
  if (!positive(d)) throw ConfigError("d", "must be positive");
  if (!positive(gamma_cc)) throw ConfigError("gamma_cc", "must be positive");
  if (!positive(p_c)) throw ConfigError("p_c", "must be positive");
  if (!positive(n_c)) throw ConfigError("n_c", "must be positive");
}

double exact_alpha(double s_sq, double t_sq) {
  if (!(s_sq >= 0.0) || !(t_sq >= 0.0)) throw DomainError("exact_alpha: inputs must be >= 0");
  // sqrt(1+x) - 1 = x / (sqrt(1+x) + 1) turns the bracket into t^2 / (1 + sqrt(1+x)).
  const double root = 1.0 + std::sqrt(1.0 + t_sq * (1.0 + s_sq));
  return s_sq * t_sq / (root * root);
}

double alpha_approx(double s_sq, double t_sq) {
  if (!(s_sq >= 0.0) || !(t_sq >= 0.0)) throw DomainError("alpha_approx: inputs must be >= 0");
  return 0.25 * s_sq * t_sq;
}

double alpha_approx_cdf_rayleigh(double x, const LinkBudget& budget) {
  if (!(x >= 0.0)) throw DomainError("alpha_approx_cdf_rayleigh: x must be >= 0");
  budget.validate();
  const double z = std::sqrt(16.0 * (1.0 + budget.d) * x / (budget.mu_s * budget.mu_t));
  return specfun::one_minus_z_bessel_k1(z);
}

double alpha_hat_cdf_rayleigh(double x, const LinkBudget& budget) {
  require_unit_interval(x, "alpha_hat_cdf_rayleigh");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return alpha_approx_cdf_rayleigh(x, budget) / alpha_approx_cdf_rayleigh(1.0, budget);
}

double alpha_approx_cdf_general(double x, const LinkBudget& budget, const AlphaFading& fading,
                                const specfun::QuadratureSpec& spec) {
  if (!(x >= 0.0)) throw DomainError("alpha_approx_cdf_general: x must be >= 0");
  budget.validate();
  fading.u.validate();
  fading.v.validate();
  fading.w.validate();
  if (x == 0.0) return 0.0;

  using fading::power_cdf;
  using fading::power_pdf;
  const double d = budget.d;
  const double zx = budget.zeta() * x;

  const double denominator = specfun::integrate(
      [&](double v) { return power_cdf(fading.u, v / d) * power_pdf(fading.v, v); }, 0.0,
      std::numeric_limits<double>::infinity(), spec, around({d, 1.0}));

  // U below both zeta x / W and V / d, split on which bound is active.
  const double v_limited = specfun::integrate(
      [&](double v) {
        if (v <= 0.0) return 0.0;
        return power_cdf(fading.w, zx * d / v) * power_cdf(fading.u, v / d) * power_pdf(fading.v, v);
      },
      0.0, std::numeric_limits<double>::infinity(), spec, around({zx * d, d, 1.0}));
  const double w_limited = specfun::integrate(
      [&](double w) {
        if (w <= 0.0) return 0.0;
        const double survival = 1.0 - power_cdf(fading.v, zx * d / w);
        if (survival == 0.0) return 0.0;
        return power_cdf(fading.u, zx / w) * survival * power_pdf(fading.w, w);
      },
      0.0, std::numeric_limits<double>::infinity(), spec, around({zx, zx * d, 1.0}));

  return (v_limited + w_limited) / denominator;
}

double alpha_hat_cdf_general(double x, const LinkBudget& budget, const AlphaFading& fading,
                             const specfun::QuadratureSpec& spec) {
  require_unit_interval(x, "alpha_hat_cdf_general");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return alpha_approx_cdf_general(x, budget, fading, spec) / alpha_approx_cdf_general(1.0, budget, fading, spec);
}

double cr_rate(double c_sq, double alpha, double p_c, double n_c) {
  if (!(c_sq >= 0.0)) throw DomainError("cr_rate: |c|^2 must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("cr_rate: alpha must lie in [0, 1]");
  if (!(p_c > 0.0) || !(n_c > 0.0)) throw DomainError("cr_rate: powers must be positive");
  return std::log1p(c_sq * (1.0 - alpha) * p_c / n_c) / std::numbers::ln2;
}

double cr_rate_cdf(double x, const LinkBudget& budget, const AlphaCdf& alpha_cdf,
                   const fading::FadingKind& cc_fading, const specfun::QuadratureSpec& spec) {
  if (!(x >= 0.0)) throw DomainError("cr_rate_cdf: x must be >= 0");
  budget.validate();
  cc_fading.validate();
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  // R_CR < x  <=>  alpha > 1 - u_star / u, with u = |c~|^2.
  const double u_star = std::expm1(x * std::numbers::ln2) * budget.n_c / (budget.gamma_cc * budget.p_c);
  const auto clamped_cdf = [&](double a) {
    if (a <= 0.0) return 0.0;
    if (a >= 1.0) return 1.0;
    return alpha_cdf(a);
  };

  // Below u_star the alpha condition holds surely.
  const double sure = fading::power_cdf(cc_fading, u_star);
  const double rest = specfun::integrate(
      [&](double u) {
        if (u <= u_star) return 0.0;
        return (1.0 - clamped_cdf(1.0 - u_star / u)) * fading::power_pdf(cc_fading, u);
      },
      u_star, std::numeric_limits<double>::infinity(), spec, around({u_star, 1.0}));
  return std::clamp(sure + rest, 0.0, 1.0);
}

}  // namespace crcap::powerloss
