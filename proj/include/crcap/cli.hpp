#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crcap/montecarlo.hpp"

namespace crcap::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitInsufficientSamples = 4,
};

/// Scenario plus calibration settings as loaded from a flat JSON document.
/// a_p / a_c are calibrated on demand when the document leaves them out.
struct RunConfig {
  montecarlo::ScenarioConfig scenario;
  montecarlo::CalibrationOptions calibration;
  bool constants_given = false;
  std::optional<int> series_terms;
  double k_db_pp = 5.0;
  double k_db_pc = 5.0;
  double k_db_cp = 5.0;
  double k_db_cc = 5.0;
};

/// Parses the flat JSON configuration. Unknown fields and wrongly typed or
/// out-of-range values throw ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Complete echo of a configuration; parse_config(config_to_json(c)) == c.
nlohmann::json config_to_json(const RunConfig& cfg);

/// One fully resolved command: everything needed to regenerate its CSV.
struct Invocation {
  std::string command;  // calibrate | lowint | alpha | rate
  std::string mode;     // alpha: pdf | cdf | mean-sweep; rate: cdf | loss-sweep | beta-sweep
  std::string axis;     // sigma | rc_over_rp | gamma (sweeps)
  std::vector<double> values;
  std::string scenario = "config";  // config | all | rayray | rayric | ricray | ricric
  std::optional<double> k_db;
  bool with_mc = false;
  std::uint64_t drops = 1'000'000;
  int bins = 60;
  int points = 21;
  int frozen_drops = 5;
  std::string config_path;
  RunConfig config;
};

nlohmann::json invocation_to_json(const Invocation& inv);
Invocation invocation_from_json(const nlohmann::json& doc);

/// Runs the command and returns the CSV text.
std::string execute(const Invocation& inv, const montecarlo::RunOptions& run);

/// Entry point of the `crcap` executable.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace crcap::cli
