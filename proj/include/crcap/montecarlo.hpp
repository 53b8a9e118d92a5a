#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crcap/fading.hpp"
#include "crcap/geometry.hpp"
#include "crcap/lowint.hpp"
#include "crcap/powerloss.hpp"
#include "crcap/random.hpp"

namespace crcap::montecarlo {

inline constexpr std::uint64_t kDefaultSeed = 20090601;

/// Fast-fading law per link. PP and PC default to Rayleigh.
struct LinkFading {
  fading::FadingKind pp;
  fading::FadingKind pc;
  fading::FadingKind cp;
  fading::FadingKind cc;
};

/// Full drop-model configuration. Powers, noises and gain constants are linear.
struct ScenarioConfig {
  geometry::Geometry geom;
  double gamma = 3.5;
  fading::ShadowingParams shadowing;
  LinkFading fading;
  double p_p = 1.0;
  double p_c = 1.0;
  double n_p = 1.0;
  double n_c = 1.0;
  double a_p = 1.0;  // gain constant of links from the PU transmitter
  double a_c = 1.0;  // gain constant of links from the CR transmitter
  std::uint64_t seed = kDefaultSeed;

  void validate() const;

  /// Analytical low-interference inputs implied by this scenario.
  lowint::LowIntConfig low_interference() const;
};

struct CalibrationOptions {
  double quantile_prob = 0.95;
  double snr_threshold_db = 5.0;
  std::size_t samples = 1'000'000;
  /// Include fast fading of the PP link in the SNR being calibrated.
  bool include_fading = true;
};

struct Calibration {
  double a_p = 0.0;
  double a_c = 0.0;
};

inline constexpr std::size_t kMinCalibrationSamples = 100'000;

/// a_p makes the PP-link SNR exceed snr_threshold_db with probability
/// quantile_prob (empirically, over drops); a_c = a_p (R_c / R_p)^gamma gives
/// both devices the same received power at their cell edges. cfg.a_p and
/// cfg.a_c are ignored. Throws InsufficientSamplesError below
/// kMinCalibrationSamples.
Calibration calibrate_constants(const ScenarioConfig& cfg, const CalibrationOptions& options = {});

/// Placement and shadowing of one drop (everything but fast fading).
struct LinkGains {
  double r_pp = 0.0;
  double r_cp = 0.0;
  double r_cc = 0.0;
  double x_pp = 0.0;
  double x_cp = 0.0;
  double x_cc = 0.0;
  double x_pc = 0.0;
};

/// One realization of the system.
struct Drop {
  LinkGains gains;
  double fp_pp = 0.0;  // |p~|^2
  double fp_cp = 0.0;  // |f~|^2
  double fp_cc = 0.0;  // |c~|^2
  double fp_pc = 0.0;  // |g~|^2, sampled but unused by any statistic
  double gamma_pp = 0.0;
  double gamma_cp = 0.0;
  double gamma_cc = 0.0;
  double a = 0.0;
  double alpha_exact = 0.0;
  double alpha_approx = 0.0;
  std::optional<double> r_cr;  // present only when a < 1

  bool low_interference() const { return a < 1.0; }
};

LinkGains sample_link_gains(const ScenarioConfig& cfg, RandomStream& rng);

/// Samples a full drop.
Drop run_drop(const ScenarioConfig& cfg, RandomStream& rng);

/// Frozen-gain mode: placement and shadowing come from `frozen`, only fast
/// fading is drawn from `rng`.
Drop run_drop(const ScenarioConfig& cfg, const LinkGains& frozen, RandomStream& rng);

/// Placement and shadowing of drop `index` of the seeded sequence.
LinkGains frozen_link_gains(const ScenarioConfig& cfg, std::uint64_t index);

/// Budget of the power-loss formulas for fixed link gains.
powerloss::LinkBudget link_budget(const ScenarioConfig& cfg, const LinkGains& gains);

/// U = CP, V = CC, W = PP fading.
powerloss::AlphaFading alpha_fading(const ScenarioConfig& cfg);

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t n_effective = 0;
};

/// Execution knobs. Results never depend on `workers`.
struct RunOptions {
  unsigned workers = 0;  // 0 selects std::thread::hardware_concurrency()
};

/// Fraction of drops with a < 1 and its binomial standard error.
EstimateWithError estimate_p_low_interference(const ScenarioConfig& cfg, std::size_t n,
                                              const RunOptions& run = {});

inline constexpr std::size_t kMinConditionedSamples = 1000;

/// Conditional samples of the power loss. `alpha` and `alpha_approx` are
/// conditioned on a < 1; the *_hat_set members additionally on
/// alpha_approx < 1 (the set on which alpha-hat is defined).
struct AlphaStats {
  std::size_t n = 0;
  std::size_t n_low_interference = 0;
  std::size_t n_hat_set = 0;
  double discarded_fraction = 0.0;  // drops with a >= 1

  EstimateWithError mean_alpha;
  EstimateWithError mean_alpha_approx;
  EstimateWithError mean_alpha_hat;
  EstimateWithError mean_alpha_on_hat_set;

  std::vector<double> alpha;              // sorted
  std::vector<double> alpha_hat;          // sorted
  std::vector<double> alpha_on_hat_set;   // sorted
};

/// Throws InsufficientSamplesError when fewer than kMinConditionedSamples
/// drops survive either conditioning.
AlphaStats estimate_alpha_stats(const ScenarioConfig& cfg, std::size_t n, const RunOptions& run = {});

struct RateStats {
  std::size_t n = 0;
  std::size_t n_low_interference = 0;
  std::size_t n_hat_set = 0;
  double discarded_fraction = 0.0;

  EstimateWithError p_low_interference;
  EstimateWithError mean_rate;      // exact alpha, given a < 1
  EstimateWithError mean_loss_pct;  // 100 [R(0) - R(alpha)] / R(0), same |c|^2

  std::vector<double> rate;                // exact alpha, a < 1, sorted
  std::vector<double> rate_hat;            // alpha-hat, hat set, sorted
  std::vector<double> rate_on_hat_set;     // exact alpha, hat set, sorted
};

RateStats estimate_rate_stats(const ScenarioConfig& cfg, std::size_t n, const RunOptions& run = {},
                              bool keep_samples = true);

struct PowerInflationPoint {
  double beta = 1.0;
  EstimateWithError mean_rate;
  EstimateWithError p_low_interference;
};

/// Mean conditional CR rate with P_c scaled by each beta (A_c held fixed).
std::vector<PowerInflationPoint> sweep_power_inflation(const ScenarioConfig& cfg, std::span<const double> betas,
                                                       std::size_t n, const RunOptions& run = {});

/// Fixed-gain empirical CDFs at the points `xs`.
struct FixedAlphaCdf {
  std::vector<EstimateWithError> alpha_hat;  // P(alpha_approx < x | a < 1, alpha_approx < 1)
  std::vector<EstimateWithError> alpha;      // P(alpha < x | a < 1)
};

/// Draws only fast fading (W, U, V per `fading`) around a fixed budget.
FixedAlphaCdf estimate_alpha_cdf_fixed(const powerloss::LinkBudget& budget, const powerloss::AlphaFading& fading,
                                       std::span<const double> xs, std::size_t n, std::uint64_t seed,
                                       const RunOptions& run = {});

struct FixedRateCdf {
  std::vector<EstimateWithError> under_alpha_hat;  // given a < 1 and alpha_approx < 1
  std::vector<EstimateWithError> under_alpha;      // given a < 1
  /// alpha-hat as above, but |c~|^2 drawn independently of the conditioning:
  /// the premise of the single-integral rate CDF.
  std::vector<EstimateWithError> under_alpha_hat_independent_c;
};

FixedRateCdf estimate_rate_cdf_fixed(const powerloss::LinkBudget& budget, const powerloss::AlphaFading& fading,
                                     std::span<const double> xs, std::size_t n, std::uint64_t seed,
                                     const RunOptions& run = {});

// ---- sample statistics ----------------------------------------------------

/// Fraction of the sorted sample strictly below x.
double empirical_cdf(std::span<const double> sorted, double x);

/// Two-sample Kolmogorov-Smirnov statistic of sorted samples.
double ks_distance(std::span<const double> sorted_a, std::span<const double> sorted_b);

/// Density histogram of log10(values) on [lo, hi) with `bins` bins. Values
/// outside the range are counted in the normalization but not binned.
std::vector<double> log10_histogram(std::span<const double> values, double lo, double hi, int bins);

}  // namespace crcap::montecarlo
