#include "cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "specid/error.hpp"

namespace specid::cli {

using nlohmann::json;

void RunConfig::validate() const {
  binning.validate();
  filters.validate();
  weights.validate();
  if (ks.empty()) throw ConfigError("k list is empty");
  for (auto k : ks)
    if (k == 0) throw ConfigError("k values must be positive");
  if (fp_radius < 0) throw ConfigError("fingerprint radius must be non-negative");
  if (fp_width < 64 || (fp_width & (fp_width - 1)) != 0)
    throw ConfigError("fingerprint width must be a power of two >= 64");
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + where + key + "'");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  RunConfig cfg;
  try {
    const auto j = json::parse(json_text);
    check_keys(j, {"binning", "filters", "weights", "k", "seed", "fingerprint"}, "");
    if (j.contains("binning")) {
      const auto& b = j["binning"];
      check_keys(b, {"base", "shift"}, "binning.");
      cfg.binning.base = b.value("base", cfg.binning.base);
      cfg.binning.shift = b.value("shift", cfg.binning.shift);
    }
    if (j.contains("filters")) {
      const auto& f = j["filters"];
      check_keys(f, {"max_peaks", "max_mz", "max_smiles_len"}, "filters.");
      cfg.filters.max_peaks = f.value("max_peaks", cfg.filters.max_peaks);
      cfg.filters.max_mz = f.value("max_mz", cfg.filters.max_mz);
      cfg.filters.max_smiles_len = f.value("max_smiles_len", cfg.filters.max_smiles_len);
    }
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      check_keys(w, {"a", "c"}, "weights.");
      cfg.weights.a = w.value("a", cfg.weights.a);
      cfg.weights.c = w.value("c", cfg.weights.c);
    }
    if (j.contains("k")) cfg.ks = j["k"].get<std::vector<std::size_t>>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("fingerprint")) {
      const auto& f = j["fingerprint"];
      check_keys(f, {"radius", "width"}, "fingerprint.");
      cfg.fp_radius = f.value("radius", cfg.fp_radius);
      cfg.fp_width = f.value("width", cfg.fp_width);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path) return load_config(*explicit_path);
  if (const char* env = std::getenv(kConfigEnv); env && *env) return load_config(env);
  return RunConfig{};
}

std::string to_json(const RunConfig& cfg) {
  json j = {
      {"binning", {{"base", cfg.binning.base}, {"shift", cfg.binning.shift}}},
      {"filters",
       {{"max_peaks", cfg.filters.max_peaks},
        {"max_mz", cfg.filters.max_mz},
        {"max_smiles_len", cfg.filters.max_smiles_len}}},
      {"weights", {{"a", cfg.weights.a}, {"c", cfg.weights.c}}},
      {"k", cfg.ks},
      {"seed", cfg.seed},
      {"fingerprint", {{"radius", cfg.fp_radius}, {"width", cfg.fp_width}}},
  };
  return j.dump(2);
}

}  // namespace specid::cli
