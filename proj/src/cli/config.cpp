#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "crcap/cli.hpp"
#include "crcap/errors.hpp"

namespace crcap::cli {

namespace {

using nlohmann::json;

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

double positive(const json& v, const std::string& field) {
  const double x = number(v, field);
  if (!(x > 0.0)) throw ConfigError(field, "must be positive");
  return x;
}

std::uint64_t unsigned_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ConfigError(field, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

fading::FadingKind::Family family(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected \"rayleigh\" or \"rician\"");
  const auto s = v.get<std::string>();
  if (s == "rayleigh") return fading::FadingKind::Family::Rayleigh;
  if (s == "rician") return fading::FadingKind::Family::Rician;
  throw ConfigError(field, "expected \"rayleigh\" or \"rician\", got \"" + s + "\"");
}

const char* family_name(const fading::FadingKind& k) { return k.is_rician() ? "rician" : "rayleigh"; }

fading::FadingKind make_kind(fading::FadingKind::Family fam, double k_db) {
  if (fam == fading::FadingKind::Family::Rayleigh) return fading::FadingKind::rayleigh();
  return fading::FadingKind::rician_db(k_db);
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  RunConfig cfg;
  auto& s = cfg.scenario;
  auto& cal = cfg.calibration;
  using Family = fading::FadingKind::Family;
  Family f_pp = Family::Rayleigh, f_pc = Family::Rayleigh, f_cp = Family::Rayleigh, f_cc = Family::Rayleigh;
  std::optional<double> a_p, a_c;

  const std::map<std::string, std::function<void(const json&, const std::string&)>> fields = {
      {"r0", [&](const json& v, const std::string& f) { s.geom.r0 = positive(v, f); }},
      {"rc", [&](const json& v, const std::string& f) { s.geom.rc = positive(v, f); }},
      {"rp", [&](const json& v, const std::string& f) { s.geom.rp = positive(v, f); }},
      {"gamma", [&](const json& v, const std::string& f) { s.gamma = positive(v, f); }},
      {"sigma_db", [&](const json& v, const std::string& f) { s.shadowing.sigma_db = number(v, f); }},
      {"fading_pp", [&](const json& v, const std::string& f) { f_pp = family(v, f); }},
      {"fading_pc", [&](const json& v, const std::string& f) { f_pc = family(v, f); }},
      {"fading_cp", [&](const json& v, const std::string& f) { f_cp = family(v, f); }},
      {"fading_cc", [&](const json& v, const std::string& f) { f_cc = family(v, f); }},
      {"k_db_pp", [&](const json& v, const std::string& f) { cfg.k_db_pp = number(v, f); }},
      {"k_db_pc", [&](const json& v, const std::string& f) { cfg.k_db_pc = number(v, f); }},
      {"k_db_cp", [&](const json& v, const std::string& f) { cfg.k_db_cp = number(v, f); }},
      {"k_db_cc", [&](const json& v, const std::string& f) { cfg.k_db_cc = number(v, f); }},
      {"p_p", [&](const json& v, const std::string& f) { s.p_p = positive(v, f); }},
      {"p_c", [&](const json& v, const std::string& f) { s.p_c = positive(v, f); }},
      {"n_p", [&](const json& v, const std::string& f) { s.n_p = positive(v, f); }},
      {"n_c", [&](const json& v, const std::string& f) { s.n_c = positive(v, f); }},
      {"a_p", [&](const json& v, const std::string& f) { a_p = positive(v, f); }},
      {"a_c", [&](const json& v, const std::string& f) { a_c = positive(v, f); }},
      {"seed", [&](const json& v, const std::string& f) { s.seed = unsigned_integer(v, f); }},
      {"series_terms",
       [&](const json& v, const std::string& f) {
         const auto n = unsigned_integer(v, f);
         if (n < 1 || n > 2000) throw ConfigError(f, "must lie in [1, 2000]");
         cfg.series_terms = static_cast<int>(n);
       }},
      {"cal_quantile_prob",
       [&](const json& v, const std::string& f) {
         cal.quantile_prob = number(v, f);
         if (!(cal.quantile_prob > 0.0 && cal.quantile_prob < 1.0)) throw ConfigError(f, "must lie in (0, 1)");
       }},
      {"cal_snr_threshold_db", [&](const json& v, const std::string& f) { cal.snr_threshold_db = number(v, f); }},
      {"cal_samples", [&](const json& v, const std::string& f) { cal.samples = unsigned_integer(v, f); }},
      {"cal_include_fading",
       [&](const json& v, const std::string& f) {
         if (!v.is_boolean()) throw ConfigError(f, "expected true or false");
         cal.include_fading = v.get<bool>();
       }},
  };

  for (const auto& [key, value] : doc.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(key, "unknown field");
    it->second(value, key);
  }

  if (a_p.has_value() != a_c.has_value())
    throw ConfigError(a_p ? "a_c" : "a_p", "a_p and a_c must be given together");
  if (a_p) {
    s.a_p = *a_p;
    s.a_c = *a_c;
    cfg.constants_given = true;
  }
  s.fading.pp = make_kind(f_pp, cfg.k_db_pp);
  s.fading.pc = make_kind(f_pc, cfg.k_db_pc);
  s.fading.cp = make_kind(f_cp, cfg.k_db_cp);
  s.fading.cc = make_kind(f_cc, cfg.k_db_cc);
  s.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const RunConfig& cfg) {
  const auto& s = cfg.scenario;
  json j = {
      {"r0", s.geom.r0},
      {"rc", s.geom.rc},
      {"rp", s.geom.rp},
      {"gamma", s.gamma},
      {"sigma_db", s.shadowing.sigma_db},
      {"fading_pp", family_name(s.fading.pp)},
      {"fading_pc", family_name(s.fading.pc)},
      {"fading_cp", family_name(s.fading.cp)},
      {"fading_cc", family_name(s.fading.cc)},
      {"k_db_pp", cfg.k_db_pp},
      {"k_db_pc", cfg.k_db_pc},
      {"k_db_cp", cfg.k_db_cp},
      {"k_db_cc", cfg.k_db_cc},
      {"p_p", s.p_p},
      {"p_c", s.p_c},
      {"n_p", s.n_p},
      {"n_c", s.n_c},
      {"seed", s.seed},
      {"cal_quantile_prob", cfg.calibration.quantile_prob},
      {"cal_snr_threshold_db", cfg.calibration.snr_threshold_db},
      {"cal_samples", cfg.calibration.samples},
      {"cal_include_fading", cfg.calibration.include_fading},
  };
  if (cfg.constants_given) {
    j["a_p"] = s.a_p;
    j["a_c"] = s.a_c;
  }
  if (cfg.series_terms) j["series_terms"] = *cfg.series_terms;
  return j;
}

}  // namespace crcap::cli
