#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ibprf {

enum class SchemeKind { ibprf, ibprf_cells, eg, qcomposite, polypool };

std::string_view to_string(SchemeKind kind);
/// Throws ConfigError for unknown names.
SchemeKind parse_scheme(std::string_view name);

/// How the direct fraction is counted. `one_direction` only looks at whether the larger
/// id's ring holds the smaller id; it exists to check the one-sided closed form and does
/// not change the protocol.
enum class CountMode { bidirectional, one_direction };

/// Flat experiment description; every field has a `key = value` spelling.
struct ExperimentConfig {
  SchemeKind scheme = SchemeKind::ibprf;
  std::uint64_t n = 1000;
  std::uint64_t m = 100;

  // pool-based baselines
  std::uint64_t pool_size = 1000;  // M
  std::uint64_t q = 2;
  std::uint64_t s = 50;
  std::uint64_t sprime = 2;
  std::uint64_t t = 2;
  std::uint64_t prime = 2147483647ULL;

  // deployment, meters
  double width = 200.0;
  double height = 200.0;
  double radius = 30.0;
  bool complete = false;
  std::optional<double> d;

  // improved scheme: cell sizes n_i (or `c` equal cells)
  std::vector<std::uint64_t> cells;
  std::uint64_t c = 0;

  std::uint32_t h_max = 0;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  CountMode count_mode = CountMode::bidirectional;

  // capture experiments
  std::vector<std::uint64_t> captures;
  std::optional<std::uint64_t> plant_poly;

  /// Cell sizes: `cells` when given, else n split into c equal cells, else empty.
  std::vector<std::uint64_t> resolved_cells() const;

  /// Sets one field from its textual form. Throws ConfigError naming the field.
  void set(std::string_view key, std::string_view value);

  /// Throws ConfigError listing every inconsistent field.
  void validate() const;

  /// Canonical, ordered `key = value` echo; parsing it back yields an equal config.
  std::vector<std::pair<std::string, std::string>> to_key_values() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped; keys starting
/// with `manifest.` are metadata and ignored.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

}  // namespace ibprf
