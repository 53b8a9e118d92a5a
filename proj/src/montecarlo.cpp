#include "crcap/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <utility>

#include "crcap/errors.hpp"

namespace crcap::montecarlo {

namespace {

constexpr std::size_t kBlockSize = 8192;

// Salts separating the independent random sequences derived from one seed.
constexpr std::uint64_t kCalibrationSalt = 0x63616c6962726174ULL;
constexpr std::uint64_t kFrozenSalt = 0x66726f7a656e6761ULL;

unsigned resolve_workers(const RunOptions& run, std::size_t blocks) {
  unsigned w = run.workers;
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(blocks, 1)));
}

// Evaluates `body(first, last, partial)` on fixed-size index blocks and folds
// the partials in block order, so the result is independent of the number of
// workers.
template <typename Partial, typename Body, typename Merge>
Partial run_blocks(std::size_t n, const RunOptions& run, const Partial& init, Body body, Merge merge) {
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<Partial> partials(blocks, init);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      const std::size_t first = b * kBlockSize;
      body(first, std::min(n, first + kBlockSize), partials[b]);
    }
  };
  const unsigned workers = resolve_workers(run, blocks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  Partial total = init;
  for (auto& p : partials) merge(total, std::move(p));
  return total;
}

// Running mean and sum of squared deviations (Welford), mergeable (Chan et al.).
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    const double n = na + nb;
    mean += delta * nb / n;
    m2 += o.m2 + delta * delta * na * nb / n;
    count += o.count;
  }

  EstimateWithError estimate(std::size_t n_total) const {
    EstimateWithError e;
    e.value = mean;
    e.n = n_total;
    e.n_effective = count;
    if (count > 1) e.std_error = std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
    return e;
  }
};

EstimateWithError proportion(std::size_t hits, std::size_t trials, std::size_t n_total) {
  EstimateWithError e;
  e.n = n_total;
  e.n_effective = trials;
  if (trials == 0) return e;
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  e.value = p;
  e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return e;
}

void append(std::vector<double>& into, std::vector<double>&& from) {
  into.insert(into.end(), from.begin(), from.end());
}

double path_gain(double a, double x, double r, double gamma) { return a * std::exp(x - gamma * std::log(r)); }

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive and finite");
}

}  // namespace

void ScenarioConfig::validate() const {
  geom.validate();
  shadowing.validate();
  fading.pp.validate();
  fading.pc.validate();
  fading.cp.validate();
  fading.cc.validate();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "path-loss exponent must be positive");
  require_positive(p_p, "p_p");
  require_positive(p_c, "p_c");
  require_positive(n_p, "n_p");
  require_positive(n_c, "n_c");
  require_positive(a_p, "a_p");
  require_positive(a_c, "a_c");
}

lowint::LowIntConfig ScenarioConfig::low_interference() const {
  lowint::LowIntConfig out;
  out.geom = geom;
  out.gamma = gamma;
  out.shadowing = shadowing;
  out.noise_ratio = n_p / n_c;
  out.scenario = fading::RatioScenario::from_links(fading.cp, fading.cc);
  return out;
}

Calibration calibrate_constants(const ScenarioConfig& cfg, const CalibrationOptions& options) {
  if (options.samples < kMinCalibrationSamples)
    throw InsufficientSamplesError("calibrate_constants: need at least " + std::to_string(kMinCalibrationSamples) +
                                   " samples, got " + std::to_string(options.samples));
  if (!(options.quantile_prob > 0.0 && options.quantile_prob < 1.0))
    throw ConfigError("cal_quantile_prob", "must lie in (0, 1)");
  if (!std::isfinite(options.snr_threshold_db)) throw ConfigError("cal_snr_threshold_db", "must be finite");
  ScenarioConfig checked = cfg;
  checked.a_p = 1.0;
  checked.a_c = 1.0;
  checked.validate();

  const std::size_t n = options.samples;
  auto gains = run_blocks<std::vector<double>>(
      n, {}, {},
      [&](std::size_t first, std::size_t last, std::vector<double>& out) {
        out.reserve(last - first);
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng(cfg.seed ^ kCalibrationSalt, i);
          const double r = geometry::sample_annulus_distance(cfg.geom.r0, cfg.geom.rp, rng);
          const double x = fading::sample_shadowing(cfg.shadowing, rng);
          const double h = options.include_fading ? fading::sample_power_gain(cfg.fading.pp, rng) : 1.0;
          out.push_back(path_gain(1.0, x, r, cfg.gamma) * h);
        }
      },
      [](std::vector<double>& total, std::vector<double>&& part) { append(total, std::move(part)); });

  const auto k = static_cast<std::size_t>(std::floor((1.0 - options.quantile_prob) * static_cast<double>(n)));
  std::nth_element(gains.begin(), gains.begin() + static_cast<std::ptrdiff_t>(k), gains.end());
  const double q = gains[k];

  Calibration out;
  out.a_p = std::pow(10.0, options.snr_threshold_db / 10.0) * cfg.n_p / (cfg.p_p * q);
  out.a_c = out.a_p * std::pow(cfg.geom.rc / cfg.geom.rp, cfg.gamma);
  return out;
}

LinkGains sample_link_gains(const ScenarioConfig& cfg, RandomStream& rng) {
  LinkGains g;
  g.r_pp = geometry::sample_annulus_distance(cfg.geom.r0, cfg.geom.rp, rng);
  g.r_cp = geometry::sample_annulus_distance(cfg.geom.r0, cfg.geom.rp, rng);
  g.r_cc = geometry::sample_annulus_distance(cfg.geom.r0, cfg.geom.rc, rng);
  g.x_pp = fading::sample_shadowing(cfg.shadowing, rng);
  g.x_cp = fading::sample_shadowing(cfg.shadowing, rng);
  g.x_cc = fading::sample_shadowing(cfg.shadowing, rng);
  g.x_pc = fading::sample_shadowing(cfg.shadowing, rng);
  return g;
}

Drop run_drop(const ScenarioConfig& cfg, RandomStream& rng) {
  const LinkGains gains = sample_link_gains(cfg, rng);
  return run_drop(cfg, gains, rng);
}

Drop run_drop(const ScenarioConfig& cfg, const LinkGains& frozen, RandomStream& rng) {
  Drop d;
  d.gains = frozen;
  d.fp_pp = fading::sample_power_gain(cfg.fading.pp, rng);
  d.fp_pc = fading::sample_power_gain(cfg.fading.pc, rng);
  d.fp_cp = fading::sample_power_gain(cfg.fading.cp, rng);
  d.fp_cc = fading::sample_power_gain(cfg.fading.cc, rng);

  d.gamma_pp = path_gain(cfg.a_p, frozen.x_pp, frozen.r_pp, cfg.gamma);
  d.gamma_cp = path_gain(cfg.a_c, frozen.x_cp, frozen.r_cp, cfg.gamma);
  d.gamma_cc = path_gain(cfg.a_c, frozen.x_cc, frozen.r_cc, cfg.gamma);

  d.a = std::sqrt(cfg.n_c * d.gamma_cp * d.fp_cp / (cfg.n_p * d.gamma_cc * d.fp_cc));
  const double s_sq = cfg.p_p * d.gamma_pp * d.fp_pp / cfg.n_p;
  const double t_sq = cfg.p_c * d.gamma_cp * d.fp_cp / cfg.n_p;
  d.alpha_exact = powerloss::exact_alpha(s_sq, t_sq);
  d.alpha_approx = powerloss::alpha_approx(s_sq, t_sq);
  if (d.a < 1.0) d.r_cr = powerloss::cr_rate(d.gamma_cc * d.fp_cc, d.alpha_exact, cfg.p_c, cfg.n_c);
  return d;
}

LinkGains frozen_link_gains(const ScenarioConfig& cfg, std::uint64_t index) {
  RandomStream rng(cfg.seed ^ kFrozenSalt, index);
  return sample_link_gains(cfg, rng);
}

powerloss::LinkBudget link_budget(const ScenarioConfig& cfg, const LinkGains& gains) {
  const double g_pp = path_gain(cfg.a_p, gains.x_pp, gains.r_pp, cfg.gamma);
  const double g_cp = path_gain(cfg.a_c, gains.x_cp, gains.r_cp, cfg.gamma);
  const double g_cc = path_gain(cfg.a_c, gains.x_cc, gains.r_cc, cfg.gamma);
  powerloss::LinkBudget b;
  b.mu_s = cfg.p_p * g_pp / cfg.n_p;
  b.mu_t = cfg.p_c * g_cp / cfg.n_p;
  b.d = (cfg.n_c / cfg.n_p) * (g_cp / g_cc);
  b.gamma_cc = g_cc;
  b.p_c = cfg.p_c;
  b.n_c = cfg.n_c;
  return b;
}

powerloss::AlphaFading alpha_fading(const ScenarioConfig& cfg) {
  return {cfg.fading.cp, cfg.fading.cc, cfg.fading.pp};
}

EstimateWithError estimate_p_low_interference(const ScenarioConfig& cfg, std::size_t n, const RunOptions& run) {
  if (n < 1) throw InsufficientSamplesError("estimate_p_low_interference: n must be >= 1");
  cfg.validate();
  const std::size_t hits = run_blocks<std::size_t>(
      n, run, 0,
      [&](std::size_t first, std::size_t last, std::size_t& count) {
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng(cfg.seed, i);
          if (run_drop(cfg, rng).low_interference()) ++count;
        }
      },
      [](std::size_t& total, std::size_t part) { total += part; });
  return proportion(hits, n, n);
}

AlphaStats estimate_alpha_stats(const ScenarioConfig& cfg, std::size_t n, const RunOptions& run) {
  cfg.validate();
  struct Partial {
    Moments alpha, approx, hat, on_hat;
    std::vector<double> alpha_s, hat_s, on_hat_s;
  };
  Partial p = run_blocks<Partial>(
      n, run, {},
      [&](std::size_t first, std::size_t last, Partial& out) {
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng(cfg.seed, i);
          const Drop d = run_drop(cfg, rng);
          if (!d.low_interference()) continue;
          out.alpha.add(d.alpha_exact);
          out.approx.add(d.alpha_approx);
          out.alpha_s.push_back(d.alpha_exact);
          if (d.alpha_approx < 1.0) {
            out.hat.add(d.alpha_approx);
            out.on_hat.add(d.alpha_exact);
            out.hat_s.push_back(d.alpha_approx);
            out.on_hat_s.push_back(d.alpha_exact);
          }
        }
      },
      [](Partial& total, Partial&& part) {
        total.alpha.merge(part.alpha);
        total.approx.merge(part.approx);
        total.hat.merge(part.hat);
        total.on_hat.merge(part.on_hat);
        append(total.alpha_s, std::move(part.alpha_s));
        append(total.hat_s, std::move(part.hat_s));
        append(total.on_hat_s, std::move(part.on_hat_s));
      });

  if (p.alpha.count < kMinConditionedSamples || p.hat.count < kMinConditionedSamples)
    throw InsufficientSamplesError("estimate_alpha_stats: " + std::to_string(p.alpha.count) + " drops with a < 1 and " +
                                   std::to_string(p.hat.count) + " with alpha_approx < 1; need " +
                                   std::to_string(kMinConditionedSamples));

  AlphaStats s;
  s.n = n;
  s.n_low_interference = p.alpha.count;
  s.n_hat_set = p.hat.count;
  s.discarded_fraction = 1.0 - static_cast<double>(p.alpha.count) / static_cast<double>(n);
  s.mean_alpha = p.alpha.estimate(n);
  s.mean_alpha_approx = p.approx.estimate(n);
  s.mean_alpha_hat = p.hat.estimate(n);
  s.mean_alpha_on_hat_set = p.on_hat.estimate(n);
  s.alpha = std::move(p.alpha_s);
  s.alpha_hat = std::move(p.hat_s);
  s.alpha_on_hat_set = std::move(p.on_hat_s);
  std::sort(s.alpha.begin(), s.alpha.end());
  std::sort(s.alpha_hat.begin(), s.alpha_hat.end());
  std::sort(s.alpha_on_hat_set.begin(), s.alpha_on_hat_set.end());
  return s;
}

RateStats estimate_rate_stats(const ScenarioConfig& cfg, std::size_t n, const RunOptions& run, bool keep_samples) {
  cfg.validate();
  struct Partial {
    Moments rate, loss;
    std::size_t hat = 0;
    std::vector<double> rate_s, hat_s, on_hat_s;
  };
  Partial p = run_blocks<Partial>(
      n, run, {},
      [&](std::size_t first, std::size_t last, Partial& out) {
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng(cfg.seed, i);
          const Drop d = run_drop(cfg, rng);
          if (!d.r_cr) continue;
          const double c_sq = d.gamma_cc * d.fp_cc;
          const double rate = *d.r_cr;
          const double full = powerloss::cr_rate(c_sq, 0.0, cfg.p_c, cfg.n_c);
          out.rate.add(rate);
          out.loss.add(full > 0.0 ? 100.0 * (full - rate) / full : 0.0);
          if (keep_samples) out.rate_s.push_back(rate);
          if (d.alpha_approx < 1.0) {
            ++out.hat;
            if (keep_samples) {
              out.hat_s.push_back(powerloss::cr_rate(c_sq, d.alpha_approx, cfg.p_c, cfg.n_c));
              out.on_hat_s.push_back(rate);
            }
          }
        }
      },
      [](Partial& total, Partial&& part) {
        total.rate.merge(part.rate);
        total.loss.merge(part.loss);
        total.hat += part.hat;
        append(total.rate_s, std::move(part.rate_s));
        append(total.hat_s, std::move(part.hat_s));
        append(total.on_hat_s, std::move(part.on_hat_s));
      });

  if (p.rate.count < kMinConditionedSamples)
    throw InsufficientSamplesError("estimate_rate_stats: " + std::to_string(p.rate.count) +
                                   " drops with a < 1; need " + std::to_string(kMinConditionedSamples));

  RateStats s;
  s.n = n;
  s.n_low_interference = p.rate.count;
  s.n_hat_set = p.hat;
  s.discarded_fraction = 1.0 - static_cast<double>(p.rate.count) / static_cast<double>(n);
  s.p_low_interference = proportion(p.rate.count, n, n);
  s.mean_rate = p.rate.estimate(n);
  s.mean_loss_pct = p.loss.estimate(n);
  s.rate = std::move(p.rate_s);
  s.rate_hat = std::move(p.hat_s);
  s.rate_on_hat_set = std::move(p.on_hat_s);
  std::sort(s.rate.begin(), s.rate.end());
  std::sort(s.rate_hat.begin(), s.rate_hat.end());
  std::sort(s.rate_on_hat_set.begin(), s.rate_on_hat_set.end());
  return s;
}

std::vector<PowerInflationPoint> sweep_power_inflation(const ScenarioConfig& cfg, std::span<const double> betas,
                                                       std::size_t n, const RunOptions& run) {
  for (double beta : betas)
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("betas", "every beta must be positive");
  std::vector<PowerInflationPoint> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    ScenarioConfig scaled = cfg;
    scaled.p_c = cfg.p_c * beta;
    const RateStats stats = estimate_rate_stats(scaled, n, run, false);
    out.push_back({beta, stats.mean_rate, stats.p_low_interference});
  }
  return out;
}

namespace {

struct FixedDraw {
  double v = 0.0;  // |c~|^2
  double alpha = 0.0;
  double approx = 0.0;
  double v_independent = 0.0;  // a second |c~|^2, independent of the conditioning
  bool low = false;
};

FixedDraw fixed_draw(const powerloss::LinkBudget& b, const powerloss::AlphaFading& f, RandomStream& rng) {
  FixedDraw out;
  const double w = fading::sample_power_gain(f.w, rng);
  const double u = fading::sample_power_gain(f.u, rng);
  out.v = fading::sample_power_gain(f.v, rng);
  out.v_independent = fading::sample_power_gain(f.v, rng);
  out.low = u < out.v / b.d;
  const double s_sq = b.mu_s * w;
  const double t_sq = b.mu_t * u;
  out.alpha = powerloss::exact_alpha(s_sq, t_sq);
  out.approx = powerloss::alpha_approx(s_sq, t_sq);
  return out;
}

struct GridCounts {
  std::size_t trials_a = 0;
  std::size_t trials_b = 0;
  std::size_t trials_c = 0;
  std::vector<std::size_t> a, b, c;
};

void count_below(std::span<const double> xs, double value, std::vector<std::size_t>& counts) {
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (value < xs[k]) ++counts[k];
}

void merge_counts(GridCounts& total, GridCounts&& part) {
  total.trials_a += part.trials_a;
  total.trials_b += part.trials_b;
  total.trials_c += part.trials_c;
  for (std::size_t k = 0; k < total.a.size(); ++k) {
    total.a[k] += part.a[k];
    total.b[k] += part.b[k];
    total.c[k] += part.c[k];
  }
}

std::vector<EstimateWithError> to_estimates(const std::vector<std::size_t>& hits, std::size_t trials, std::size_t n) {
  std::vector<EstimateWithError> out;
  out.reserve(hits.size());
  for (std::size_t h : hits) out.push_back(proportion(h, trials, n));
  return out;
}

GridCounts empty_counts(std::size_t size) {
  GridCounts g;
  g.a.assign(size, 0);
  g.b.assign(size, 0);
  g.c.assign(size, 0);
  return g;
}

}  // namespace

FixedAlphaCdf estimate_alpha_cdf_fixed(const powerloss::LinkBudget& budget, const powerloss::AlphaFading& fading,
                                       std::span<const double> xs, std::size_t n, std::uint64_t seed,
                                       const RunOptions& run) {
  budget.validate();
  const GridCounts g = run_blocks<GridCounts>(
      n, run, empty_counts(xs.size()),
      [&](std::size_t first, std::size_t last, GridCounts& out) {
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng(seed, i);
          const FixedDraw d = fixed_draw(budget, fading, rng);
          if (!d.low) continue;
          ++out.trials_b;
          count_below(xs, d.alpha, out.b);
          if (d.approx < 1.0) {
            ++out.trials_a;
            count_below(xs, d.approx, out.a);
          }
        }
      },
      merge_counts);
  if (g.trials_a < kMinConditionedSamples)
    throw InsufficientSamplesError("estimate_alpha_cdf_fixed: only " + std::to_string(g.trials_a) +
                                   " conditioned draws");
  return {to_estimates(g.a, g.trials_a, n), to_estimates(g.b, g.trials_b, n)};
}

FixedRateCdf estimate_rate_cdf_fixed(const powerloss::LinkBudget& budget, const powerloss::AlphaFading& fading,
                                     std::span<const double> xs, std::size_t n, std::uint64_t seed,
                                     const RunOptions& run) {
  budget.validate();
  const GridCounts g = run_blocks<GridCounts>(
      n, run, empty_counts(xs.size()),
      [&](std::size_t first, std::size_t last, GridCounts& out) {
        for (std::size_t i = first; i < last; ++i) {
          RandomStream rng(seed, i);
          const FixedDraw d = fixed_draw(budget, fading, rng);
          if (!d.low) continue;
          ++out.trials_b;
          count_below(xs, powerloss::cr_rate(budget.gamma_cc * d.v, d.alpha, budget.p_c, budget.n_c), out.b);
          if (d.approx < 1.0) {
            ++out.trials_a;
            ++out.trials_c;
            count_below(xs, powerloss::cr_rate(budget.gamma_cc * d.v, d.approx, budget.p_c, budget.n_c), out.a);
            count_below(xs, powerloss::cr_rate(budget.gamma_cc * d.v_independent, d.approx, budget.p_c, budget.n_c),
                        out.c);
          }
        }
      },
      merge_counts);
  if (g.trials_a < kMinConditionedSamples)
    throw InsufficientSamplesError("estimate_rate_cdf_fixed: only " + std::to_string(g.trials_a) +
                                   " conditioned draws");
  return {to_estimates(g.a, g.trials_a, n), to_estimates(g.b, g.trials_b, n), to_estimates(g.c, g.trials_c, n)};
}

double empirical_cdf(std::span<const double> sorted, double x) {
  if (sorted.empty()) return 0.0;
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InsufficientSamplesError("ks_distance: empty sample");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

std::vector<double> log10_histogram(std::span<const double> values, double lo, double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw DomainError("log10_histogram: need hi > lo and bins >= 1");
  std::vector<double> density(static_cast<std::size_t>(bins), 0.0);
  if (values.empty()) return density;
  const double width = (hi - lo) / bins;
  for (double v : values) {
    if (!(v > 0.0)) continue;
    const double l = std::log10(v);
    if (l < lo || l >= hi) continue;
    const auto k = std::min(static_cast<std::size_t>((l - lo) / width), density.size() - 1);
    density[k] += 1.0;
  }
  for (double& d : density) d /= static_cast<double>(values.size()) * width;
  return density;
}

}  // namespace crcap::montecarlo
