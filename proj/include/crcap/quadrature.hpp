#pragma once

#include <functional>
#include <span>

namespace crcap::specfun {

/// Tolerances for the adaptive integrator. The estimate is accepted once the
/// summed panel error is below max(abs_tol, rel_tol * |estimate|).
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 200;

  /// Throws DomainError when a field violates its invariant.
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
///
/// The panel with the largest error estimate is bisected until the tolerance
/// is met. `breakpoints` seed the initial partition (points outside (a, b) are
/// ignored); pass the locations of kinks or steep transitions there. An
/// infinite upper limit is mapped onto [0, 1) with x = a + t / (1 - t).
///
/// Throws NonConvergenceError carrying the best estimate and its error bound
/// when max_subdivisions panels are in use and the tolerance is still unmet.
QuadratureResult integrate_detailed(const Integrand& f, double a, double b,
                                    const QuadratureSpec& spec = {},
                                    std::span<const double> breakpoints = {});

/// Value-only convenience wrapper around integrate_detailed.
double integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec = {},
                 std::span<const double> breakpoints = {});

}  // namespace crcap::specfun
