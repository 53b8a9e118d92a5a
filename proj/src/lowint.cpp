#include "crcap/lowint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "crcap/errors.hpp"
#include "crcap/specfun.hpp"

namespace crcap::lowint {

namespace {

// v = y / (1 + y) for y = exp(log_y), without overflow.
double v_from_log_y(double log_y) { return 1.0 / (1.0 + std::exp(-log_y)); }

}  // namespace

void LowIntConfig::validate() const {
  geom.validate();
  shadowing.validate();
  scenario.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "path-loss exponent must be positive");
  if (!(noise_ratio > 0.0) || !std::isfinite(noise_ratio))
    throw ConfigError("noise_ratio", "N_p / N_c must be positive");
}

double integral_I(int m, double theta, double kappa, const LowIntConfig& cfg,
                  const specfun::QuadratureSpec& spec) {
  return integral_I(m, theta, kappa, cfg, fading::RatioDensity(cfg.scenario), spec);
}

double integral_I(int m, double theta, double kappa, const LowIntConfig& cfg,
                  const fading::RatioDensity& density, const specfun::QuadratureSpec& spec) {
  if (m < -1 || m > 1) throw DomainError("integral_I: m must be -1, 0 or 1");
  if (!(theta >= 0.0) || !(kappa > theta)) throw DomainError("integral_I: need 0 <= theta < kappa");
  cfg.validate();

  const double g = cfg.gamma;
  const double log_k = std::log(cfg.noise_ratio);
  const double sigma = cfg.shadowing.sigma_sf();
  const double exponent = 2.0 * m / g;  // W^{2m} = (K e^X / Y)^{exponent}
  const double scale = std::exp(exponent * log_k + 4.0 * m * m * sigma * sigma / (g * g));
  const double shift = 4.0 * m * sigma * sigma / g;
  const double width = std::numbers::sqrt2 * sigma;

  // A and B are affine in log y: A = offset_lo + log y, B = offset_hi + log y.
  const double offset_lo = theta > 0.0 ? g * std::log(theta) - log_k : -std::numeric_limits<double>::infinity();
  const double offset_hi = std::isinf(kappa) ? std::numeric_limits<double>::infinity() : g * std::log(kappa) - log_k;

  const auto gaussian_mass = [&](double log_y) {
    const double a = offset_lo + log_y - shift;
    const double b = offset_hi + log_y - shift;
    if (width == 0.0) return (a <= 0.0 && b >= 0.0) ? 1.0 : 0.0;
    return specfun::normal_cdf_diff(a / width, b / width);
  };

  const specfun::Integrand integrand = [&](double v) {
    if (!(v > 0.0 && v < 1.0)) return 0.0;
    const double one_minus = 1.0 - v;
    const double log_y = std::log(v) - std::log1p(-v);
    const double mass = gaussian_mass(log_y);
    if (mass == 0.0) return 0.0;
    const double y = v / one_minus;
    const double fy_dv = density(y) / (one_minus * one_minus);
    return scale * std::exp(-exponent * log_y) * mass * fy_dv;
  };

  // The Gaussian window in log y is centred where A or B equals the shift.
  std::vector<double> breaks;
  const auto add_transition = [&](double center) {
    if (!std::isfinite(center)) return;
    breaks.push_back(v_from_log_y(center));
    if (width == 0.0) return;
    for (double k : {1.0, 3.0, 6.0}) {
      breaks.push_back(v_from_log_y(center - k * width));
      breaks.push_back(v_from_log_y(center + k * width));
    }
  };
  add_transition(shift - offset_lo);
  add_transition(shift - offset_hi);

  return specfun::integrate(integrand, 0.0, 1.0, spec, breaks);
}

double prob_low_interference(const LowIntConfig& cfg, const specfun::QuadratureSpec& spec) {
  cfg.validate();
  const auto cdf = geometry::piecewise_coefficients(cfg.geom);
  const fading::RatioDensity density(cfg.scenario);

  double total = 0.0;
  for (int i = 1; i <= 4; ++i) {
    const double lo = cdf.thetas[static_cast<std::size_t>(i)];
    const double hi = cdf.thetas[static_cast<std::size_t>(i) + 1];
    if (!(hi > lo)) continue;
    for (int j = 0; j < 3; ++j) {
      const double c = cdf.coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (c == 0.0) continue;
      total += c * integral_I(j - 1, lo, hi, cfg, density, spec);
    }
  }
  if (total < -1e-6 || total > 1.0 + 1e-6)
    throw ConsistencyError("prob_low_interference: result " + std::to_string(total) + " outside [0, 1]");
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace crcap::lowint
