#pragma once

namespace crcap::specfun {

/// Standard Gaussian CDF. Total on the extended reals.
double normal_cdf(double z);

/// Phi(hi) - Phi(lo) without cancellation when both arguments sit in the
/// same tail. Either argument may be infinite.
double normal_cdf_diff(double lo, double hi);

/// Modified Bessel function of the second kind, order one. Throws
/// DomainError for z <= 0.
///
/// Power series for z < 2, Steed's continued fraction above.
double bessel_k1(double z);

/// 1 - z*K1(z) for z >= 0, accurate in relative terms as z -> 0 where the
/// direct form cancels. Equals 0 at z = 0.
double one_minus_z_bessel_k1(double z);

/// Euler beta function B(a,b) for a,b > 0.
double beta_fn(double a, double b);

}  // namespace crcap::specfun
