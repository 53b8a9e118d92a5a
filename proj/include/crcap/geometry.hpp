#pragma once

#include <array>

#include "crcap/random.hpp"

namespace crcap::geometry {

/// Annulus radii in meters. PU and CR transmitters sit in [r0, rp] around the
/// PU receiver; the CR receiver sits in [r0, rc] around the CR transmitter.
struct Geometry {
  double r0 = 1.0;
  double rc = 100.0;
  double rp = 1000.0;

  /// Throws ConfigError unless 0 < r0 < rc and r0 < rp.
  void validate() const;
};

/// CDF of Z = r_cc / r_cp written piecewise as c0 x^-2 + c1 + c2 x^2.
///
/// Piece i (0-based) covers (thetas[i], thetas[i+1]]. thetas[0] = 0 and
/// thetas[5] = +inf; the interior breakpoints are R0/Rp, Rc/Rp, 1 and Rc/R0
/// in increasing order, so Rc/Rp and 1 trade places when Rc > Rp. Piece 0 is
/// identically zero and piece 4 is identically one.
struct PiecewiseRatioCdf {
  std::array<double, 6> thetas{};
  std::array<std::array<double, 3>, 5> coeffs{};

  /// Index of the piece containing x (breakpoints belong to the left piece).
  int piece_of(double x) const;
  /// Evaluates the CDF; 0 for x <= thetas[1], 1 for x >= thetas[4].
  double operator()(double x) const;
};

PiecewiseRatioCdf piecewise_coefficients(const Geometry& geom);

/// P(r_cc / r_cp < x). Throws DomainError for negative or NaN x.
double ratio_cdf(double x, const Geometry& geom);

/// Distance with density 2r / (r_out^2 - r_in^2) on [r_in, r_out]: the
/// radius of a point uniform in the annulus. Throws DomainError unless
/// 0 < r_in < r_out.
double sample_annulus_distance(double r_in, double r_out, RandomStream& rng);

}  // namespace crcap::geometry
