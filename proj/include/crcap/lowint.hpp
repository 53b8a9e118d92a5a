#pragma once

#include "crcap/fading.hpp"
#include "crcap/geometry.hpp"
#include "crcap/quadrature.hpp"

namespace crcap::lowint {

/// Inputs of P(a < 1). Transmit powers are deliberately absent: the
/// low-interference condition does not involve them.
struct LowIntConfig {
  geometry::Geometry geom;
  double gamma = 3.5;         // path-loss exponent
  fading::ShadowingParams shadowing;
  double noise_ratio = 1.0;   // N_p / N_c
  fading::RatioScenario scenario;

  void validate() const;
};

/// Default tolerances for the single v-integral behind every I(m, theta, kappa).
inline specfun::QuadratureSpec default_quadrature() { return {1e-12, 1e-10, 2000}; }

/// I(m, theta, kappa) = E[W^{2m} ; theta <= W <= kappa] with
/// W = (N_p/N_c)^{1/gamma} e^{X/gamma} Y^{-1/gamma}, X ~ N(0, 2 sigma_sf^2).
///
/// The Gaussian part is integrated in closed form (a difference of normal
/// CDFs); the remaining integral over Y is taken in v = y / (1 + y) on (0, 1).
/// `kappa` may be +inf. Requires m in {-1, 0, 1} and 0 <= theta < kappa.
double integral_I(int m, double theta, double kappa, const LowIntConfig& cfg,
                  const specfun::QuadratureSpec& spec = default_quadrature());

/// Same integral using a prebuilt density of Y (the form used internally).
double integral_I(int m, double theta, double kappa, const LowIntConfig& cfg,
                  const fading::RatioDensity& density, const specfun::QuadratureSpec& spec);

/// P(a < 1) = sum_i sum_j c_ij I(j - 1, theta_i, theta_{i+1}).
///
/// Throws ConsistencyError if the raw sum leaves [-1e-6, 1 + 1e-6]; the
/// returned value is clamped to [0, 1].
double prob_low_interference(const LowIntConfig& cfg,
                             const specfun::QuadratureSpec& spec = default_quadrature());

}  // namespace crcap::lowint
