#include "crcap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crcap/errors.hpp"

namespace crcap::geometry {

void Geometry::validate() const {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw ConfigError("r0", "inner radius must be positive and finite");
  if (!(rc > r0) || !std::isfinite(rc)) throw ConfigError("rc", "CR radius must exceed r0");
  if (!(rp > r0) || !std::isfinite(rp)) throw ConfigError("rp", "PU radius must exceed r0");
}

int PiecewiseRatioCdf::piece_of(double x) const {
  for (int i = 0; i < 4; ++i)
    if (x <= thetas[i + 1]) return i;
  return 4;
}

double PiecewiseRatioCdf::operator()(double x) const {
  if (x <= thetas[1]) return 0.0;
  if (x >= thetas[4]) return 1.0;
  const auto& c = coeffs[piece_of(x)];
  const double x2 = x * x;
  return std::clamp(c[0] / x2 + c[1] + c[2] * x2, 0.0, 1.0);
}

// With r = r_cp (density 2r / (Rp^2 - R0^2)) and
// P(r_cc < x r) = (x^2 r^2 - R0^2) / (Rc^2 - R0^2) for R0 < x r < Rc,
// the CDF splits into a partial band r in (max(R0, R0/x), min(Rp, Rc/x)) and,
// when Rc/x < Rp, a band r in (max(R0, Rc/x), Rp) where the event is sure.
// Which end of each max/min is active is constant between breakpoints, and
// every active choice contributes only x^-2, x^0 or x^2 terms.
PiecewiseRatioCdf piecewise_coefficients(const Geometry& geom) {
  geom.validate();
  const double r0 = geom.r0;
  const double rc = geom.rc;
  const double rp = geom.rp;
  const double r02 = r0 * r0;
  const double rc2 = rc * rc;
  const double rp2 = rp * rp;
  const double delta = (rc2 - r02) * (rp2 - r02);

  std::array<double, 4> interior = {r0 / rp, rc / rp, 1.0, rc / r0};
  std::sort(interior.begin(), interior.end());

  PiecewiseRatioCdf cdf;
  cdf.thetas = {0.0, interior[0], interior[1], interior[2], interior[3],
                std::numeric_limits<double>::infinity()};

  for (int i = 1; i <= 3; ++i) {
    const double lo = cdf.thetas[i];
    const double hi = cdf.thetas[i + 1];
    const double x = 0.5 * (lo + hi);  // any interior point fixes the active branches
    auto& c = cdf.coeffs[i];
    c = {0.0, 0.0, 0.0};

    // Partial band, lower end.
    if (x < 1.0) {
      c[0] += 0.5 * r02 * r02;  // alpha = R0/x
    } else {
      c[2] -= 0.5 * r02 * r02;  // alpha = R0
      c[1] += r02 * r02;
    }
    // Partial band, upper end.
    if (x * rp < rc) {
      c[2] += 0.5 * rp2 * rp2;  // beta = Rp
      c[1] -= r02 * rp2;
    } else {
      c[0] += 0.5 * rc2 * rc2 - r02 * rc2;  // beta = Rc/x
      // Sure band from Rc/x up to Rp.
      c[1] += rp2 * (rc2 - r02);
      c[0] -= rc2 * (rc2 - r02);
    }
    for (double& v : c) v /= delta;
  }
  cdf.coeffs[0] = {0.0, 0.0, 0.0};
  cdf.coeffs[4] = {0.0, 1.0, 0.0};
  return cdf;
}

double ratio_cdf(double x, const Geometry& geom) {
  if (!(x >= 0.0)) throw DomainError("ratio_cdf: x must be >= 0");
  return piecewise_coefficients(geom)(x);
}

double sample_annulus_distance(double r_in, double r_out, RandomStream& rng) {
  if (!(r_in > 0.0) || !(r_out > r_in))
    throw DomainError("sample_annulus_distance: need 0 < r_in < r_out");
  const double lo2 = r_in * r_in;
  const double r = std::sqrt(lo2 + rng.uniform() * (r_out * r_out - lo2));
  return std::clamp(r, r_in, r_out);
}

}  // namespace crcap::geometry
