#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specid/preprocess.hpp"
#include "specid/search.hpp"

namespace specid::cli {

/// Settings shared by all subcommands. Defaults are the 30-bin final setup.
struct RunConfig {
  preprocess::BinningConfig binning;
  preprocess::FilterConfig filters;
  search::SimilarityWeights weights;
  std::vector<std::size_t> ks{1, 10, 50};
  std::uint64_t seed = 42;
  int fp_radius = 2;
  std::size_t fp_width = 2048;

  void validate() const;
};

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "SPECID_CONFIG";

/// JSON object with optional keys binning{base,shift}, filters{max_peaks,
/// max_mz,max_smiles_len}, weights{a,c}, k[], seed, fingerprint{radius,width}.
/// Unknown keys and bad values throw ConfigError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// `explicit_path` if given, else $SPECID_CONFIG if set, else defaults.
RunConfig resolve_config(const std::optional<std::filesystem::path>& explicit_path);

std::string to_json(const RunConfig& cfg);

}  // namespace specid::cli
