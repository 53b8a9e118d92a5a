#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crcap/cli.hpp"
#include "crcap/errors.hpp"

namespace crcap::cli {

namespace {

using nlohmann::json;
using montecarlo::ScenarioConfig;
using Kind = fading::RatioScenario::Kind;

constexpr const char* kLowintHelp =
    "CSV columns: scenario,axis,value,p_analytic and, with --with-mc, p_mc,p_mc_std_error,drops.\n"
    "One row per sweep value per scenario.";
constexpr const char* kAlphaHelp =
    "CSV columns by mode:\n"
    "  pdf:        scenario,log10_alpha,density_alpha,density_alpha_hat\n"
    "              (bin centres; alpha given a<1, alpha-hat given a<1 and alpha_approx<1)\n"
    "  cdf:        scenario,drop,mu_s,mu_t,d,x,cdf_analytic,cdf_mc_alpha_hat,cdf_mc_alpha_hat_std_error,\n"
    "              cdf_mc_alpha,cdf_mc_alpha_std_error  (fixed link gains of --frozen-drops drops)\n"
    "  mean-sweep: scenario,axis,value,a_p,a_c,mean_alpha,mean_alpha_std_error,mean_alpha_hat,\n"
    "              mean_alpha_hat_std_error,n_low_interference,discarded_fraction";
constexpr const char* kRateHelp =
    "CSV columns by mode:\n"
    "  cdf:        scenario,drop,x,cdf_analytic,cdf_mc_alpha_hat,cdf_mc_alpha_hat_std_error,cdf_mc_alpha,\n"
    "              cdf_mc_alpha_std_error,cdf_mc_alpha_hat_independent_c,cdf_mc_alpha_hat_independent_c_std_error\n"
    "              (fixed link gains; the last pair draws |c|^2 independently of the a<1 conditioning)\n"
    "  loss-sweep: scenario,axis,value,a_p,a_c,mean_rate,mean_rate_std_error,mean_loss_pct,\n"
    "              mean_loss_pct_std_error,p_low_interference,n_low_interference\n"
    "  beta-sweep: scenario,beta,mean_rate,mean_rate_std_error,p_low_interference,p_low_interference_std_error";
constexpr const char* kCalibrateHelp =
    "CSV columns: a_p,a_c,a_c_over_a_p,quantile_prob,snr_threshold_db,samples,include_fading";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::uint64_t v) { return std::to_string(v); }

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) { row(header); }

  void row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Cells>
  void cells(const Cells&... c) {
    row({to_cell(c)...});
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string to_cell(const std::string& s) { return s; }
  static std::string to_cell(const char* s) { return s; }
  static std::string to_cell(double v) { return num(v); }
  static std::string to_cell(std::uint64_t v) { return num(v); }
  static std::string to_cell(int v) { return std::to_string(v); }

  std::ostringstream out_;
};

std::vector<double> default_values(const std::string& axis) {
  if (axis == "sigma") return {4, 6, 8, 10, 12};
  if (axis == "gamma") return {2.5, 3, 3.5, 4};
  if (axis == "rc_over_rp") return {0.05, 0.1, 0.2, 0.3};
  if (axis == "beta") return {1, 2, 4, 8};
  throw ConfigError("axis", "unknown sweep axis \"" + axis + "\"");
}

void apply_axis(RunConfig& cfg, const std::string& axis, double value) {
  auto& s = cfg.scenario;
  if (axis == "sigma") {
    s.shadowing.sigma_db = value;
  } else if (axis == "gamma") {
    s.gamma = value;
  } else if (axis == "rc_over_rp") {
    s.geom.rc = value * s.geom.rp;
  } else {
    throw ConfigError("axis", "unknown sweep axis \"" + axis + "\"");
  }
  s.validate();
}

void set_links(RunConfig& cfg, Kind kind, double k_db) {
  const auto ric = fading::FadingKind::rician_db(k_db);
  const auto ray = fading::FadingKind::rayleigh();
  const bool cp_ric = kind == Kind::RicRay || kind == Kind::RicRic;
  const bool cc_ric = kind == Kind::RayRic || kind == Kind::RicRic;
  cfg.scenario.fading.cp = cp_ric ? ric : ray;
  cfg.scenario.fading.cc = cc_ric ? ric : ray;
  if (cp_ric) cfg.k_db_cp = k_db;
  if (cc_ric) cfg.k_db_cc = k_db;
}

struct NamedConfig {
  std::string name;
  RunConfig cfg;
};

// The scenarios an invocation covers, with CP/CC fading applied.
std::vector<NamedConfig> scenarios(const Invocation& inv) {
  std::vector<NamedConfig> out;
  if (inv.scenario == "config") {
    RunConfig cfg = inv.config;
    if (inv.k_db) {
      auto& f = cfg.scenario.fading;
      for (auto* link : {&f.pp, &f.pc, &f.cp, &f.cc})
        if (link->is_rician()) *link = fading::FadingKind::rician_db(*inv.k_db);
    }
    const auto kind = fading::RatioScenario::from_links(cfg.scenario.fading.cp, cfg.scenario.fading.cc).kind;
    out.push_back({std::string(fading::to_string(kind)), cfg});
    return out;
  }
  const double k_db = inv.k_db.value_or(5.0);
  std::vector<Kind> kinds;
  if (inv.scenario == "all") {
    kinds = {Kind::RayRay, Kind::RayRic, Kind::RicRay, Kind::RicRic};
  } else if (auto k = fading::parse_ratio_kind(inv.scenario)) {
    kinds = {*k};
  } else {
    throw ConfigError("scenario", "expected config, all, rayray, rayric, ricray or ricric");
  }
  for (Kind k : kinds) {
    RunConfig cfg = inv.config;
    set_links(cfg, k, k_db);
    out.push_back({std::string(fading::to_string(k)), cfg});
  }
  return out;
}

lowint::LowIntConfig analytic_config(const RunConfig& cfg) {
  auto li = cfg.scenario.low_interference();
  li.scenario.series_terms = cfg.series_terms;
  return li;
}

// Scenario with a_p / a_c filled in, calibrating when the configuration
// does not pin them.
ScenarioConfig with_constants(const RunConfig& cfg) {
  ScenarioConfig s = cfg.scenario;
  if (!cfg.constants_given) {
    const auto cal = montecarlo::calibrate_constants(s, cfg.calibration);
    s.a_p = cal.a_p;
    s.a_c = cal.a_c;
  }
  return s;
}

std::uint64_t frozen_seed(std::uint64_t seed, int drop) {
  return seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(drop + 1));
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2) throw ConfigError("points", "need at least 2 grid points");
  std::vector<double> xs(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  xs.back() = hi;
  return xs;
}

bool all_rayleigh(const powerloss::AlphaFading& f) {
  return !f.u.is_rician() && !f.v.is_rician() && !f.w.is_rician();
}

powerloss::AlphaCdf alpha_hat_cdf(const powerloss::LinkBudget& b, const powerloss::AlphaFading& f) {
  if (all_rayleigh(f)) return [b](double x) { return powerloss::alpha_hat_cdf_rayleigh(x, b); };
  return [b, f](double x) { return powerloss::alpha_hat_cdf_general(x, b, f); };
}

std::string run_calibrate(const Invocation& inv) {
  const auto& cfg = inv.config;
  const auto cal = montecarlo::calibrate_constants(cfg.scenario, cfg.calibration);
  Csv csv{"a_p", "a_c", "a_c_over_a_p", "quantile_prob", "snr_threshold_db", "samples", "include_fading"};
  csv.cells(cal.a_p, cal.a_c, cal.a_c / cal.a_p, cfg.calibration.quantile_prob, cfg.calibration.snr_threshold_db,
            static_cast<std::uint64_t>(cfg.calibration.samples), cfg.calibration.include_fading ? 1 : 0);
  return csv.str();
}

std::string run_lowint(const Invocation& inv, const montecarlo::RunOptions& run) {
  const std::string axis = inv.axis.empty() ? "sigma" : inv.axis;
  const auto values = inv.values.empty() ? default_values(axis) : inv.values;
  Csv csv = inv.with_mc ? Csv{"scenario", "axis", "value", "p_analytic", "p_mc", "p_mc_std_error", "drops"}
                        : Csv{"scenario", "axis", "value", "p_analytic"};
  for (const auto& [name, base] : scenarios(inv)) {
    for (double v : values) {
      RunConfig cfg = base;
      apply_axis(cfg, axis, v);
      const double p = lowint::prob_low_interference(analytic_config(cfg));
      if (inv.with_mc) {
        const auto mc = montecarlo::estimate_p_low_interference(cfg.scenario, inv.drops, run);
        csv.cells(name, axis, v, p, mc.value, mc.std_error, static_cast<std::uint64_t>(mc.n));
      } else {
        csv.cells(name, axis, v, p);
      }
    }
  }
  return csv.str();
}

std::string run_alpha(const Invocation& inv, const montecarlo::RunOptions& run) {
  if (inv.mode == "pdf") {
    Csv csv{"scenario", "log10_alpha", "density_alpha", "density_alpha_hat"};
    for (const auto& [name, cfg] : scenarios(inv)) {
      const auto stats = montecarlo::estimate_alpha_stats(with_constants(cfg), inv.drops, run);
      double lo = 0.0, hi = -std::numeric_limits<double>::infinity();
      for (const auto* sample : {&stats.alpha, &stats.alpha_hat}) {
        for (double a : *sample) {
          if (!(a > 0.0)) continue;
          lo = std::min(lo, std::log10(a));
          hi = std::max(hi, std::log10(a));
        }
      }
      lo = std::floor(lo);
      hi = std::floor(hi) + 1.0;
      const auto d_alpha = montecarlo::log10_histogram(stats.alpha, lo, hi, inv.bins);
      const auto d_hat = montecarlo::log10_histogram(stats.alpha_hat, lo, hi, inv.bins);
      const double width = (hi - lo) / inv.bins;
      for (int k = 0; k < inv.bins; ++k) {
        const auto i = static_cast<std::size_t>(k);
        csv.cells(name, lo + (k + 0.5) * width, d_alpha[i], d_hat[i]);
      }
    }
    return csv.str();
  }
  if (inv.mode == "cdf") {
    Csv csv{"scenario", "drop", "mu_s", "mu_t", "d", "x", "cdf_analytic", "cdf_mc_alpha_hat",
            "cdf_mc_alpha_hat_std_error", "cdf_mc_alpha", "cdf_mc_alpha_std_error"};
    const auto xs = linear_grid(0.0, 1.0, inv.points);
    for (const auto& [name, cfg] : scenarios(inv)) {
      const auto scenario = with_constants(cfg);
      const auto fad = montecarlo::alpha_fading(scenario);
      for (int k = 0; k < inv.frozen_drops; ++k) {
        const auto budget = montecarlo::link_budget(scenario, montecarlo::frozen_link_gains(scenario, k));
        const auto analytic = alpha_hat_cdf(budget, fad);
        const auto mc = montecarlo::estimate_alpha_cdf_fixed(budget, fad, xs, inv.drops, frozen_seed(scenario.seed, k), run);
        for (std::size_t i = 0; i < xs.size(); ++i)
          csv.cells(name, k, budget.mu_s, budget.mu_t, budget.d, xs[i], analytic(xs[i]), mc.alpha_hat[i].value,
                    mc.alpha_hat[i].std_error, mc.alpha[i].value, mc.alpha[i].std_error);
      }
    }
    return csv.str();
  }
  if (inv.mode == "mean-sweep") {
    const std::string axis = inv.axis.empty() ? "rc_over_rp" : inv.axis;
    const auto values = inv.values.empty() ? default_values(axis) : inv.values;
    Csv csv{"scenario", "axis", "value", "a_p", "a_c", "mean_alpha", "mean_alpha_std_error", "mean_alpha_hat",
            "mean_alpha_hat_std_error", "n_low_interference", "discarded_fraction"};
    for (const auto& [name, base] : scenarios(inv)) {
      for (double v : values) {
        RunConfig cfg = base;
        apply_axis(cfg, axis, v);
        const auto scenario = with_constants(cfg);
        const auto s = montecarlo::estimate_alpha_stats(scenario, inv.drops, run);
        csv.cells(name, axis, v, scenario.a_p, scenario.a_c, s.mean_alpha.value, s.mean_alpha.std_error,
                  s.mean_alpha_hat.value, s.mean_alpha_hat.std_error,
                  static_cast<std::uint64_t>(s.n_low_interference), s.discarded_fraction);
      }
    }
    return csv.str();
  }
  throw ConfigError("mode", "alpha mode must be pdf, cdf or mean-sweep");
}

std::string run_rate(const Invocation& inv, const montecarlo::RunOptions& run) {
  if (inv.mode == "cdf") {
    Csv csv{"scenario", "drop", "x", "cdf_analytic", "cdf_mc_alpha_hat", "cdf_mc_alpha_hat_std_error",
            "cdf_mc_alpha", "cdf_mc_alpha_std_error", "cdf_mc_alpha_hat_independent_c",
            "cdf_mc_alpha_hat_independent_c_std_error"};
    for (const auto& [name, cfg] : scenarios(inv)) {
      const auto scenario = with_constants(cfg);
      const auto fad = montecarlo::alpha_fading(scenario);
      for (int k = 0; k < inv.frozen_drops; ++k) {
        const auto budget = montecarlo::link_budget(scenario, montecarlo::frozen_link_gains(scenario, k));
        // Up to the rate at ten times the mean |c|^2.
        const double x_max = std::log2(1.0 + 10.0 * budget.gamma_cc * budget.p_c / budget.n_c);
        const auto xs = linear_grid(0.0, x_max, inv.points);
        const auto analytic = alpha_hat_cdf(budget, fad);
        const auto mc = montecarlo::estimate_rate_cdf_fixed(budget, fad, xs, inv.drops, frozen_seed(scenario.seed, k), run);
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double p = powerloss::cr_rate_cdf(xs[i], budget, analytic, fad.v);
          csv.cells(name, k, xs[i], p, mc.under_alpha_hat[i].value, mc.under_alpha_hat[i].std_error,
                    mc.under_alpha[i].value, mc.under_alpha[i].std_error,
                    mc.under_alpha_hat_independent_c[i].value, mc.under_alpha_hat_independent_c[i].std_error);
        }
      }
    }
    return csv.str();
  }
  if (inv.mode == "loss-sweep") {
    const std::string axis = inv.axis.empty() ? "gamma" : inv.axis;
    const auto values = inv.values.empty() ? default_values(axis) : inv.values;
    Csv csv{"scenario", "axis", "value", "a_p", "a_c", "mean_rate", "mean_rate_std_error", "mean_loss_pct",
            "mean_loss_pct_std_error", "p_low_interference", "n_low_interference"};
    for (const auto& [name, base] : scenarios(inv)) {
      for (double v : values) {
        RunConfig cfg = base;
        apply_axis(cfg, axis, v);
        const auto scenario = with_constants(cfg);
        const auto s = montecarlo::estimate_rate_stats(scenario, inv.drops, run, false);
        csv.cells(name, axis, v, scenario.a_p, scenario.a_c, s.mean_rate.value, s.mean_rate.std_error,
                  s.mean_loss_pct.value, s.mean_loss_pct.std_error, s.p_low_interference.value,
                  static_cast<std::uint64_t>(s.n_low_interference));
      }
    }
    return csv.str();
  }
  if (inv.mode == "beta-sweep") {
    const auto betas = inv.values.empty() ? default_values("beta") : inv.values;
    Csv csv{"scenario", "beta", "mean_rate", "mean_rate_std_error", "p_low_interference",
            "p_low_interference_std_error"};
    for (const auto& [name, cfg] : scenarios(inv)) {
      const auto points = montecarlo::sweep_power_inflation(with_constants(cfg), betas, inv.drops, run);
      for (const auto& p : points)
        csv.cells(name, p.beta, p.mean_rate.value, p.mean_rate.std_error, p.p_low_interference.value,
                  p.p_low_interference.std_error);
    }
    return csv.str();
  }
  throw ConfigError("mode", "rate mode must be cdf, loss-sweep or beta-sweep");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write " + path);
  out << text;
  if (!out) throw ConfigError("out", "failed writing " + path);
}

json error_record(const char* kind, const std::string& message, int code) {
  return {{"error", kind}, {"message", message}, {"exit_code", code}};
}

int report(std::ostream& err, json record) {
  err << record.dump() << '\n';
  return record["exit_code"].get<int>();
}

}  // namespace

json invocation_to_json(const Invocation& inv) {
  json j = {
      {"command", inv.command},
      {"mode", inv.mode},
      {"axis", inv.axis},
      {"values", inv.values},
      {"scenario", inv.scenario},
      {"k_db", inv.k_db ? json(*inv.k_db) : json(nullptr)},
      {"with_mc", inv.with_mc},
      {"drops", inv.drops},
      {"bins", inv.bins},
      {"points", inv.points},
      {"frozen_drops", inv.frozen_drops},
      {"config_path", inv.config_path},
      {"config", config_to_json(inv.config)},
  };
  return j;
}

Invocation invocation_from_json(const json& doc) {
  Invocation inv;
  try {
    inv.command = doc.at("command").get<std::string>();
    inv.mode = doc.at("mode").get<std::string>();
    inv.axis = doc.at("axis").get<std::string>();
    inv.values = doc.at("values").get<std::vector<double>>();
    inv.scenario = doc.at("scenario").get<std::string>();
    if (!doc.at("k_db").is_null()) inv.k_db = doc.at("k_db").get<double>();
    inv.with_mc = doc.at("with_mc").get<bool>();
    inv.drops = doc.at("drops").get<std::uint64_t>();
    inv.bins = doc.at("bins").get<int>();
    inv.points = doc.at("points").get<int>();
    inv.frozen_drops = doc.at("frozen_drops").get<int>();
    inv.config_path = doc.at("config_path").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError("manifest", std::string("invalid invocation record: ") + e.what());
  }
  inv.config = parse_config(doc.at("config"));
  return inv;
}

std::string execute(const Invocation& inv, const montecarlo::RunOptions& run) {
  if (inv.drops < 1) throw ConfigError("drops", "must be >= 1");
  if (inv.bins < 1) throw ConfigError("bins", "must be >= 1");
  if (inv.frozen_drops < 1) throw ConfigError("frozen_drops", "must be >= 1");
  if (inv.command == "calibrate") return run_calibrate(inv);
  if (inv.command == "lowint") return run_lowint(inv, run);
  if (inv.command == "alpha") return run_alpha(inv, run);
  if (inv.command == "rate") return run_rate(inv, run);
  throw ConfigError("command", "unknown command \"" + inv.command + "\"");
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cognitive-radio capacity statistics: low-interference probability, power loss and CR rate."};
  app.require_subcommand(1);

  Invocation inv;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string manifest_path;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "JSON configuration file (flat fields)");
    sub->add_option("--out", out_path, "CSV output path; a <out>.manifest.json is written beside it");
    sub->add_option("--seed", seed, "64-bit seed; overrides the configuration");
    sub->add_option("--drops", inv.drops, "Monte Carlo drops (or fading draws for fixed-gain modes)");
    sub->add_option("--scenario", inv.scenario, "config | all | rayray | rayric | ricray | ricric (CP/CC fading)")
        ->check(CLI::IsMember({"config", "all", "rayray", "rayric", "ricray", "ricric"}));
    sub->add_option("--k-db", inv.k_db, "Rician K factor in dB for the selected scenario(s)");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores); never changes results");
  };
  const auto sweep = [&](CLI::App* sub, std::vector<std::string> axes) {
    sub->add_option("--axis", inv.axis, "Sweep axis")->check(CLI::IsMember(axes));
    sub->add_option("--values", inv.values, "Comma-separated sweep values")->delimiter(',');
  };

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate the gain constants a_p and a_c");
  common(calibrate);
  calibrate->footer(kCalibrateHelp);

  auto* lowint_cmd = app.add_subcommand("lowint", "Probability of the low-interference regime P(a<1)");
  common(lowint_cmd);
  sweep(lowint_cmd, {"sigma", "rc_over_rp", "gamma"});
  lowint_cmd->add_flag("--with-mc", inv.with_mc, "Add Monte Carlo estimates");
  lowint_cmd->footer(kLowintHelp);

  auto* alpha_cmd = app.add_subcommand("alpha", "Power-loss parameter statistics");
  common(alpha_cmd);
  sweep(alpha_cmd, {"sigma", "rc_over_rp", "gamma"});
  alpha_cmd->add_option("--mode", inv.mode, "pdf | cdf | mean-sweep")
      ->check(CLI::IsMember({"pdf", "cdf", "mean-sweep"}))
      ->required();
  alpha_cmd->add_option("--bins", inv.bins, "Histogram bins (pdf mode)");
  alpha_cmd->add_option("--points", inv.points, "Grid points (cdf mode)");
  alpha_cmd->add_option("--frozen-drops", inv.frozen_drops, "Fixed-gain drops (cdf mode)");
  alpha_cmd->footer(kAlphaHelp);

  auto* rate_cmd = app.add_subcommand("rate", "CR rate statistics");
  common(rate_cmd);
  sweep(rate_cmd, {"sigma", "rc_over_rp", "gamma"});
  rate_cmd->add_option("--mode", inv.mode, "cdf | loss-sweep | beta-sweep")
      ->check(CLI::IsMember({"cdf", "loss-sweep", "beta-sweep"}))
      ->required();
  rate_cmd->add_option("--points", inv.points, "Grid points (cdf mode)");
  rate_cmd->add_option("--frozen-drops", inv.frozen_drops, "Fixed-gain drops (cdf mode)");
  rate_cmd->footer(kRateHelp);

  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("--manifest", manifest_path, "Manifest written by an earlier run")->required();
  replay->add_option("--out", out_path, "CSV output path (defaults to the recorded one)");
  replay->add_option("--threads", threads, "Worker threads; never changes results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << '\n';
      return kExitOk;
    }
    return report(err, error_record("usage", e.what(), kExitConfig));
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    if (replay->parsed()) {
      std::ifstream in(manifest_path);
      if (!in) throw ConfigError("manifest", "cannot open " + manifest_path);
      json manifest;
      try {
        manifest = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError("manifest", std::string("malformed JSON: ") + e.what());
      }
      inv = invocation_from_json(manifest.at("invocation"));
      if (out_path.empty() && manifest.contains("output") && manifest["output"].is_string())
        out_path = manifest["output"].get<std::string>();
    } else {
      for (auto* sub : app.get_subcommands()) inv.command = sub->get_name();
      inv.config = inv.config_path.empty() ? parse_config(json::object()) : load_config(inv.config_path);
      if (seed) inv.config.scenario.seed = *seed;
    }

    const std::string csv = execute(inv, {threads});
    if (out_path.empty()) {
      out << csv;
      return kExitOk;
    }
    write_file(out_path, csv);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const json manifest = {
        {"tool", "crcap"},
        {"version", kToolVersion},
        {"command", inv.command},
        {"config_path", inv.config_path},
        {"seed", inv.config.scenario.seed},
        {"output", out_path},
        {"threads", threads},
        {"duration_seconds", seconds},
        {"invocation", invocation_to_json(inv)},
    };
    write_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
  } catch (const ConfigError& e) {
    auto rec = error_record("config", e.what(), kExitConfig);
    rec["field"] = e.field();
    return report(err, rec);
  } catch (const UnsupportedConfigError& e) {
    return report(err, error_record("unsupported_config", e.what(), kExitConfig));
  } catch (const DomainError& e) {
    return report(err, error_record("config", e.what(), kExitConfig));
  } catch (const NonConvergenceError& e) {
    auto rec = error_record("non_convergence", e.what(), kExitNonConvergence);
    rec["estimate"] = e.estimate();
    rec["error_bound"] = e.error_bound();
    return report(err, rec);
  } catch (const ConsistencyError& e) {
    return report(err, error_record("non_convergence", e.what(), kExitNonConvergence));
  } catch (const InsufficientSamplesError& e) {
    return report(err, error_record("insufficient_samples", e.what(), kExitInsufficientSamples));
  } catch (const std::exception& e) {
    return report(err, error_record("internal", e.what(), kExitFailure));
  }
}

}  // namespace crcap::cli
