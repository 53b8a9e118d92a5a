// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "crcap/fading.hpp"
#include "crcap/lowint.hpp"
#include "crcap/montecarlo.hpp"
#include "crcap/powerloss.hpp"
#include "crcap/quadrature.hpp"
#include "crcap/random.hpp"

using namespace crcap;
using montecarlo::EstimateWithError;
using montecarlo::ScenarioConfig;
using Kind = fading::RatioScenario::Kind;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMillion = 1'000'000;
const double k5 = fading::db_to_linear(5.0);
const Kind kKinds[] = {Kind::RayRay, Kind::RayRic, Kind::RicRay, Kind::RicRic};

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { notes.push_back("info " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ScenarioConfig calibrated(ScenarioConfig cfg) {
  const auto cal = montecarlo::calibrate_constants(cfg);
  cfg.a_p = cal.a_p;
  cfg.a_c = cal.a_c;
  return cfg;
}

ScenarioConfig with_links(ScenarioConfig cfg, Kind kind) {
  const auto ric = fading::FadingKind::rician(k5);
  const auto ray = fading::FadingKind::rayleigh();
  cfg.fading.cp = (kind == Kind::RicRay || kind == Kind::RicRic) ? ric : ray;
  cfg.fading.cc = (kind == Kind::RayRic || kind == Kind::RicRic) ? ric : ray;
  return cfg;
}

// |analytic - mc| in units of the larger of the MC standard error and the
// binomial standard error implied by the analytic value.
double z_score(double analytic, const EstimateWithError& e) {
  const double n = static_cast<double>(e.n_effective);
  const double se = std::max(e.std_error, std::sqrt(std::clamp(analytic, 0.0, 1.0) * (1.0 - std::clamp(analytic, 0.0, 1.0)) / n));
  const double diff = std::abs(analytic - e.value);
  if (se == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
  return diff / se;
}

double quantile(const std::function<double(double)>& cdf, double q, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const ScenarioConfig& defaults() {
  static const ScenarioConfig cfg = calibrated({});
  return cfg;
}

Verdict criterion1() {
  Verdict v;
  for (Kind kind : {Kind::RayRay, Kind::RicRic}) {
    ScenarioConfig cfg = with_links(defaults(), kind);
    cfg.geom = {1.0, 1000.0, 1000.0};
    const double analytic = lowint::prob_low_interference(cfg.low_interference());
    const auto mc = montecarlo::estimate_p_low_interference(cfg, kMillion);
    const std::string name(fading::to_string(kind));
    v.require(std::abs(analytic - 0.5) < 1e-3, fmt("%s analytic %.10f within 1e-3 of 0.5", name.c_str(), analytic));
    v.require(std::abs(mc.value - 0.5) < 3 * mc.std_error,
              fmt("%s MC %.6f +- %.6f within 3 SE of 0.5", name.c_str(), mc.value, mc.std_error));
  }
  return v;
}

Verdict criterion2() {
  Verdict v;
  for (Kind kind : kKinds) {
    const auto cfg = with_links(defaults(), kind);
    const double analytic = lowint::prob_low_interference(cfg.low_interference());
    const auto mc = montecarlo::estimate_p_low_interference(cfg, kMillion);
    const std::string name(fading::to_string(kind));
    v.require(analytic > 0.9, fmt("%s analytic %.8f > 0.9", name.c_str(), analytic));
    const double z = (mc.value - analytic) / mc.std_error;
    v.require(std::abs(z) < 3.0, fmt("%s MC %.6f +- %.6f, z = %.2f", name.c_str(), mc.value, mc.std_error, z));
  }
  return v;
}

Verdict criterion3() {
  Verdict v;
  for (Kind kind : kKinds) {
    const std::string name(fading::to_string(kind));
    const auto base = with_links(defaults(), kind);
    std::string row;
    bool ok = true;
    double prev = 2.0;
    for (double sigma : {4.0, 6.0, 8.0, 10.0, 12.0}) {
      auto cfg = base;
      cfg.shadowing.sigma_db = sigma;
      const double p = lowint::prob_low_interference(cfg.low_interference());
      ok = ok && p <= prev;
      prev = p;
      row += fmt(" %.6f", p);
    }
    v.require(ok, name + " nonincreasing in sigma:" + row);
    row.clear();
    ok = true;
    prev = -1.0;
    for (double gamma : {2.5, 3.0, 3.5, 4.0}) {
      auto cfg = base;
      cfg.gamma = gamma;
      const double p = lowint::prob_low_interference(cfg.low_interference());
      ok = ok && p >= prev;
      prev = p;
      row += fmt(" %.6f", p);
    }
    v.require(ok, name + " nondecreasing in gamma:" + row);
  }
  ScenarioConfig louder = defaults();
  louder.p_c *= 100.0;
  const double a = lowint::prob_low_interference(defaults().low_interference());
  const double b = lowint::prob_low_interference(louder.low_interference());
  v.require(a == b, fmt("analytic invariant under P_c x100: %.12f vs %.12f", a, b));
  const auto ma = montecarlo::estimate_p_low_interference(defaults(), kMillion);
  const auto mb = montecarlo::estimate_p_low_interference(louder, kMillion);
  v.require(ma.value == mb.value, fmt("MC invariant under P_c x100: %.6f vs %.6f", ma.value, mb.value));
  return v;
}

Verdict criterion4() {
  Verdict v;
  const auto& cfg = defaults();
  const auto fad = montecarlo::alpha_fading(cfg);
  double worst_form = 0.0, worst_z_bessel = 0.0, worst_z_general = 0.0;
  for (std::uint64_t k = 0; k < 5; ++k) {
    const auto budget = montecarlo::link_budget(cfg, montecarlo::frozen_link_gains(cfg, k));
    const auto bessel = [&](double x) { return powerloss::alpha_hat_cdf_rayleigh(x, budget); };
    std::vector<double> xs;
    for (int q = 1; q <= 20; ++q) xs.push_back(quantile(bessel, (q - 0.5) / 20.0, 0.0, 1.0));
    const auto mc = montecarlo::estimate_alpha_cdf_fixed(budget, fad, xs, 10 * kMillion, 4000 + k);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double b = bessel(xs[i]);
      const double g = powerloss::alpha_hat_cdf_general(xs[i], budget, fad);
      worst_form = std::max(worst_form, std::abs(b - g));
      worst_z_bessel = std::max(worst_z_bessel, z_score(b, mc.alpha_hat[i]));
      worst_z_general = std::max(worst_z_general, z_score(g, mc.alpha_hat[i]));
    }
    v.note(fmt("budget %llu: mu_s %.4g mu_t %.4g d %.4g", static_cast<unsigned long long>(k), budget.mu_s,
               budget.mu_t, budget.d));
  }
  v.require(worst_form < 1e-6, fmt("max |Bessel - generic| over 100 points = %.3g", worst_form));
  v.require(worst_z_bessel < 3.0, fmt("Bessel form vs 1e7-draw MC: worst z = %.2f", worst_z_bessel));
  v.require(worst_z_general < 3.0, fmt("generic form vs 1e7-draw MC: worst z = %.2f", worst_z_general));
  return v;
}

Verdict criterion5() {
  Verdict v;
  const auto s = montecarlo::estimate_alpha_stats(defaults(), kMillion);
  const double ks_common = montecarlo::ks_distance(s.alpha_on_hat_set, s.alpha_hat);
  const double ks_own = montecarlo::ks_distance(s.alpha, s.alpha_hat);
  v.require(ks_common < 0.05, fmt("KS(exact alpha, alpha-hat) on the common conditioning set = %.4f", ks_common));
  v.note(fmt("KS with exact alpha conditioned on a<1 only = %.4f", ks_own));
  v.note(fmt("E[alpha] = %.4f, E[alpha-hat] = %.4f, hat set %zu of %zu low-interference drops", s.mean_alpha.value,
             s.mean_alpha_hat.value, s.n_hat_set, s.n_low_interference));
  RandomStream rng(55);
  bool ok = true;
  for (std::size_t i = 0; i < kMillion; ++i) {
    const double s_sq = std::pow(10.0, -6.0 + 12.0 * rng.uniform());
    const double t_sq = std::pow(10.0, -6.0 + 12.0 * rng.uniform());
    ok = ok && powerloss::exact_alpha(s_sq, t_sq) <= powerloss::alpha_approx(s_sq, t_sq);
  }
  v.require(ok, "alpha <= alpha_approx on a 1e6-point sweep");
  return v;
}

Verdict criterion6() {
  Verdict v;
  const auto& cfg = defaults();
  const auto fad = montecarlo::alpha_fading(cfg);
  const auto budget = montecarlo::link_budget(cfg, montecarlo::frozen_link_gains(cfg, 0));
  const auto f_alpha = [&](double a) { return powerloss::alpha_hat_cdf_rayleigh(a, budget); };
  const double x_max = std::log2(1.0 + 10.0 * budget.gamma_cc * budget.p_c / budget.n_c);
  std::vector<double> xs;
  for (int k = 1; k <= 20; ++k) xs.push_back(x_max * k / 20.0);
  const auto mc = montecarlo::estimate_rate_cdf_fixed(budget, fad, xs, 10 * kMillion, 6000);
  double worst_indep = 0.0, worst_joint = 0.0, worst_exact = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double p = powerloss::cr_rate_cdf(xs[i], budget, f_alpha, fad.v);
    worst_indep = std::max(worst_indep, z_score(p, mc.under_alpha_hat_independent_c[i]));
    worst_joint = std::max(worst_joint, z_score(p, mc.under_alpha_hat[i]));
    worst_exact = std::max(worst_exact, z_score(p, mc.under_alpha[i]));
  }
  v.require(worst_indep < 3.0,
            fmt("rate CDF vs 1e7-draw MC under alpha-hat (fixed gains, |c|^2 independent), 20 points: worst z = %.2f",
                worst_indep));
  v.note(fmt("same MC with |c|^2 jointly conditioned on a<1: worst z = %.2f", worst_joint));
  v.note(fmt("same MC with exact alpha: worst z = %.2f", worst_exact));
  const auto r = montecarlo::estimate_rate_stats(cfg, kMillion);
  const double ks = montecarlo::ks_distance(r.rate_on_hat_set, r.rate_hat);
  v.require(ks < 0.05, fmt("KS(rate under alpha, rate under alpha-hat) over drops = %.4f", ks));
  return v;
}

Verdict criterion7() {
  Verdict v;
  const std::size_t n = kMillion;
  std::string row;
  bool ok = true;
  double prev = 101.0;
  for (double gamma : {2.5, 3.0, 3.5, 4.0}) {
    ScenarioConfig cfg;
    cfg.gamma = gamma;
    const auto s = montecarlo::estimate_rate_stats(calibrated(cfg), n, {}, false);
    ok = ok && s.mean_loss_pct.value < prev;
    prev = s.mean_loss_pct.value;
    row += fmt(" %.3f", prev);
  }
  v.require(ok, "mean loss % decreasing in gamma:" + row);
  row.clear();
  ok = true;
  prev = -1.0;
  for (double sigma : {4.0, 6.0, 8.0, 10.0, 12.0}) {
    ScenarioConfig cfg;
    cfg.shadowing.sigma_db = sigma;
    const auto s = montecarlo::estimate_rate_stats(calibrated(cfg), n, {}, false);
    ok = ok && s.mean_loss_pct.value > prev;
    prev = s.mean_loss_pct.value;
    row += fmt(" %.3f", prev);
  }
  v.require(ok, "mean loss % increasing in sigma:" + row);
  const std::vector<double> betas = {1, 2, 4, 8};
  const auto points = montecarlo::sweep_power_inflation(defaults(), betas, n);
  row.clear();
  ok = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) ok = ok && points[i].mean_rate.value >= points[i - 1].mean_rate.value;
    row += fmt(" %.4f", points[i].mean_rate.value);
  }
  v.require(ok, "mean rate nondecreasing in beta:" + row);
  return v;
}

Verdict criterion8() {
  Verdict v;
  const fading::RatioScenario scenarios[] = {fading::RatioScenario::ray_ray(), fading::RatioScenario::ray_ric(k5),
                                             fading::RatioScenario::ric_ray(k5), fading::RatioScenario::ric_ric(k5)};
  const specfun::QuadratureSpec spec{1e-13, 1e-12, 4000};
  for (const auto& sc : scenarios) {
    const std::string name(fading::to_string(sc.kind));
    const fading::RatioDensity pdf(sc);
    const auto f = [&](double y) { return pdf(y); };
    const std::vector<double> split = {1.0};
    const double mass = specfun::integrate(f, 0.0, INFINITY, spec, split);
    v.require(std::abs(mass - 1.0) < 1e-6, fmt("%s density integrates to 1 - %.3g", name.c_str(), 1.0 - mass));

    const auto cp = sc.kind == Kind::RicRay || sc.kind == Kind::RicRic ? fading::FadingKind::rician(k5)
                                                                      : fading::FadingKind::rayleigh();
    const auto cc = sc.kind == Kind::RayRic || sc.kind == Kind::RicRic ? fading::FadingKind::rician(k5)
                                                                      : fading::FadingKind::rayleigh();
    std::vector<double> y(kMillion);
    for (std::size_t i = 0; i < y.size(); ++i) {
      RandomStream rng(8000 + static_cast<std::uint64_t>(sc.kind), i);
      const double u = fading::sample_power_gain(cp, rng);
      y[i] = u / fading::sample_power_gain(cc, rng);
    }
    std::sort(y.begin(), y.end());
    // Analytic CDF accumulated along every 100th order statistic; the
    // empirical CDF moves by at most 1e-4 between evaluation points.
    const std::size_t stride = 100;
    double cdf = 0.0, prev_y = 0.0, ks = 0.0;
    const double n = static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); i += stride) {
      cdf += specfun::integrate(f, prev_y, y[i], spec, split);
      prev_y = y[i];
      ks = std::max({ks, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
    }
    v.require(ks < 0.002, fmt("%s KS vs 1e6 samples = %.5f", name.c_str(), ks));
  }
  for (double k_db : {0.0, 2.5, 5.0, 7.5, 10.0}) {
    const auto sc = fading::RatioScenario::ric_ric(fading::db_to_linear(k_db));
    double worst = 0.0;
    for (int j = 0; j <= 400; ++j) {
      const double yv = std::pow(10.0, -3.0 + 6.0 * j / 400.0);
      worst = std::max(worst, fading::series_truncation_error(sc, yv, 18, 50));
    }
    v.require(worst < 1e-6, fmt("K = %.1f dB: max |f(18 terms) - f(50 terms)| on y in [1e-3, 1e3] = %.3g", k_db, worst));
  }
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion9() {
  Verdict v;
  const fs::path dir = fs::temp_directory_path() / "crcap_acceptance";
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"seed": 11, "cal_samples": 200000})";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"lowint", "lowint --scenario all --with-mc --drops 200000"},
      {"alpha_pdf", "alpha --mode pdf --drops 200000"},
      {"alpha_cdf", "alpha --mode cdf --drops 100000 --frozen-drops 2"},
      {"rate_beta", "rate --mode beta-sweep --drops 200000"},
      {"rate_cdf", "rate --mode cdf --drops 100000 --frozen-drops 1"},
  };
  for (const auto& [name, args] : commands) {
    const fs::path first = dir / (name + "_first.csv");
    const fs::path second = dir / (name + "_replay.csv");
    const std::string exe = std::string("\"") + CRCAP_EXE + "\" ";
    const int a = std::system((exe + args + " --threads 1 --config \"" + cfg.string() + "\" --out \"" +
                               first.string() + "\"").c_str());
    const int b = std::system((exe + "replay --threads 4 --manifest \"" + first.string() + ".manifest.json\" --out \"" +
                               second.string() + "\"").c_str());
    const std::string x = slurp(first), y = slurp(second);
    v.require(a == 0 && b == 0 && !x.empty() && x == y,
              fmt("%s: replay with 4 workers reproduces %zu bytes exactly", name.c_str(), x.size()));
  }
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"1 symmetry point", criterion1},
      {"2 dominance at defaults", criterion2},
      {"3 P(a<1) trends and P_c invariance", criterion3},
      {"4 Bessel form vs generic form vs MC", criterion4},
      {"5 approximation quality", criterion5},
      {"6 rate CDF", criterion6},
      {"7 rate-loss trends", criterion7},
      {"8 ratio densities and series truncation", criterion8},
      {"9 manifest determinism", criterion9},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& line : v.notes) std::printf("    %s\n", line.c_str());
    std::printf("%s criterion %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", name, secs);
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
