#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "crcap/random.hpp"

namespace crcap::fading {

double db_to_linear(double db);

/// Fast-fading law of one link. Powers are normalized to unit mean; a Rician
/// link splits into a deterministic part K/(K+1) and a scattered part 1/(K+1).
struct FadingKind {
  enum class Family { Rayleigh, Rician };

  Family family = Family::Rayleigh;
  double k_factor = 0.0;  // linear LOS-to-scatter power ratio; Rician only

  static FadingKind rayleigh() { return {}; }
  static FadingKind rician(double k_linear);
  static FadingKind rician_db(double k_db) { return rician(db_to_linear(k_db)); }

  bool is_rician() const { return family == Family::Rician; }
  /// K for Rician, 0 for Rayleigh (the two laws coincide at K = 0).
  double k() const { return is_rician() ? k_factor : 0.0; }
  void validate() const;
};

/// Lognormal shadowing; the natural-log gain X has standard deviation
/// sigma_sf = (ln 10 / 10) * sigma_db.
struct ShadowingParams {
  double sigma_db = 8.0;

  double sigma_sf() const;
  void validate() const;
};

/// Unit-mean fast-fading power |h|^2.
double sample_power_gain(const FadingKind& kind, RandomStream& rng);

/// Natural-log shadowing gain X ~ N(0, sigma_sf^2).
double sample_shadowing(const ShadowingParams& params, RandomStream& rng);

/// CDF of a unit-mean fading power. The Rician form is the Poisson mixture
/// sum_j Pois(j; K) P(j+1, (K+1) v) (the Marcum-Q series), truncated once the
/// remaining terms are below 1e-10 of the partial sum.
double power_cdf(const FadingKind& kind, double v);
/// Density of a unit-mean fading power (same mixture, Gamma(j+1) components).
double power_pdf(const FadingKind& kind, double v);

/// Law of Y = |f|^2 / |c|^2 (CP fading over CC fading).
struct RatioScenario {
  enum class Kind { RayRay, RayRic, RicRay, RicRic };

  Kind kind = Kind::RayRay;
  double k_factor = 0.0;  // linear K of the Rician link(s)
  /// Terms per index of the Rician/Rician double series. Unset means
  /// max(18, terms needed for a Poisson tail below 1e-15).
  std::optional<int> series_terms;

  static RatioScenario ray_ray() { return {}; }
  static RatioScenario ray_ric(double k_linear) { return {Kind::RayRic, k_linear, std::nullopt}; }
  static RatioScenario ric_ray(double k_linear) { return {Kind::RicRay, k_linear, std::nullopt}; }
  static RatioScenario ric_ric(double k_linear) { return {Kind::RicRic, k_linear, std::nullopt}; }

  /// Builds the scenario from the CP and CC link laws. Rician/Rician with
  /// unequal K throws UnsupportedConfigError.
  static RatioScenario from_links(const FadingKind& cp, const FadingKind& cc);

  /// Noncentral chi-square parameters used by the Rician/Rician series.
  static constexpr int dof = 2;
  double noncentrality() const { return 2.0 * k_factor; }

  int effective_series_terms() const;
  void validate() const;
};

std::string_view to_string(RatioScenario::Kind kind);
std::optional<RatioScenario::Kind> parse_ratio_kind(std::string_view name);

/// Minimum per-index term count for the Rician/Rician series.
inline constexpr int kMinSeriesTerms = 18;

/// Precomputed evaluator for the density of Y. Holds the Poisson weights and
/// log-factorials of the Rician/Rician series so repeated calls inside a
/// quadrature do not rebuild them.
class RatioDensity {
 public:
  explicit RatioDensity(const RatioScenario& scenario);

  double operator()(double y) const;
  const RatioScenario& scenario() const { return scenario_; }

 private:
  double ric_ric(double y) const;

  RatioScenario scenario_;
  int terms_ = 0;
  std::vector<double> log_weight_;     // log Pois(j; K)
  std::vector<double> log_factorial_;  // log n!, n < 2 * terms_
};

/// f_Y(y). Throws DomainError for y < 0.
double ratio_pdf(const RatioScenario& scenario, double y);

/// |f_Y(y) at terms_a - f_Y(y) at terms_b| for the Rician/Rician series.
/// Requires terms_b > terms_a >= 1.
double series_truncation_error(const RatioScenario& scenario, double y, int terms_a, int terms_b);

}  // namespace crcap::fading
