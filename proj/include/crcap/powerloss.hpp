#pragma once

#include <functional>

#include "crcap/fading.hpp"
#include "crcap/quadrature.hpp"

namespace crcap::powerloss {

/// Link gains frozen for one drop, expressed as the quantities the power-loss
/// statistics need.
struct LinkBudget {
  double mu_s = 1.0;      // E|s|^2 = P_p Gamma_pp / N_p
  double mu_t = 1.0;      // E|t|^2 = P_c Gamma_cp / N_p
  double d = 1.0;         // (N_c / N_p) (Gamma_cp / Gamma_cc); a < 1 iff U < V / d
  double gamma_cc = 1.0;  // Gamma_cc
  double p_c = 1.0;
  double n_c = 1.0;

  double zeta() const { return 4.0 / (mu_s * mu_t); }
  void validate() const;
};

/// Power loss alpha for |s|^2 and |t|^2, evaluated as
/// s^2 t^2 / (1 + sqrt(1 + t^2 (1 + s^2)))^2, an exact rearrangement with no
/// cancellation as t -> 0. Lies in [0, 1).
double exact_alpha(double s_sq, double t_sq);

/// First-order approximation s^2 t^2 / 4 (an upper bound on exact_alpha).
double alpha_approx(double s_sq, double t_sq);

/// P(alpha_approx < x | a < 1) for all-Rayleigh fading:
/// 1 - z K1(z) with z = sqrt(16 (1 + d) x / (mu_s mu_t)). x >= 0.
double alpha_approx_cdf_rayleigh(double x, const LinkBudget& budget);

/// CDF of alpha-hat (alpha_approx conditioned on being below 1), all-Rayleigh.
/// Requires 0 <= x <= 1.
double alpha_hat_cdf_rayleigh(double x, const LinkBudget& budget);

/// Fading laws of U = |f|^2 (CP), V = |c|^2 (CC) and W = |p|^2 (PP).
struct AlphaFading {
  fading::FadingKind u;
  fading::FadingKind v;
  fading::FadingKind w;
};

inline specfun::QuadratureSpec default_quadrature() { return {1e-13, 1e-11, 4000}; }

/// P(alpha_approx < x | a < 1) for arbitrary link fading, by one-dimensional
/// quadrature of
///   [ int F_W(zeta x d / v) F_U(v / d) f_V(v) dv
///     + int F_U(zeta x / w) (1 - F_V(zeta x d / w)) f_W(w) dw ]
///   / int F_U(v / d) f_V(v) dv.
double alpha_approx_cdf_general(double x, const LinkBudget& budget, const AlphaFading& fading,
                                const specfun::QuadratureSpec& spec = default_quadrature());

/// alpha-hat CDF from the general form. Requires 0 <= x <= 1.
double alpha_hat_cdf_general(double x, const LinkBudget& budget, const AlphaFading& fading,
                             const specfun::QuadratureSpec& spec = default_quadrature());

/// CR rate log2(1 + |c|^2 (1 - alpha) P_c / N_c) in bits per channel use.
double cr_rate(double c_sq, double alpha, double p_c, double n_c);

/// CDF of alpha on [0, 1]; arguments below 0 / above 1 are treated as 0 / 1.
using AlphaCdf = std::function<double(double)>;

/// P(R_CR < x) for fixed link gains:
///   int (1 - F_alpha(1 - (2^x - 1) N_c / (|c|^2 P_c))) f_{|c|^2} d|c|^2
/// with |c|^2 = Gamma_cc |c~|^2 and |c~|^2 following `cc_fading`.
double cr_rate_cdf(double x, const LinkBudget& budget, const AlphaCdf& alpha_cdf,
                   const fading::FadingKind& cc_fading = fading::FadingKind::rayleigh(),
                   const specfun::QuadratureSpec& spec = default_quadrature());

}  // namespace crcap::powerloss
