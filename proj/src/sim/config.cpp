#include "ibprf/sim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ibprf/errors.hpp"
#include "ibprf/io/csv.hpp"
#include "ibprf/scheme/poly_pool.hpp"

namespace ibprf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError(std::string(key) + ": " + std::string(why) + " (got '" + std::string(value) +
                    "')");
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    bad_value(key, value, "expected a non-negative integer");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty() ||
      !std::isfinite(out)) {
    bad_value(key, value, "expected a finite number");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "expected true or false");
}

std::vector<std::uint64_t> parse_list(std::string_view key, std::string_view value) {
  std::vector<std::uint64_t> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto end = value.find(',', start);
    if (end == std::string_view::npos) end = value.size();
    out.push_back(parse_u64(key, trim(value.substr(start, end - start))));
    start = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::uint64_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ibprf: return "ibprf";
    case SchemeKind::ibprf_cells: return "ibprf-cells";
    case SchemeKind::eg: return "eg";
    case SchemeKind::qcomposite: return "qcomposite";
    case SchemeKind::polypool: return "polypool";
  }
  return "?";
}

SchemeKind parse_scheme(std::string_view name) {
  for (SchemeKind k : {SchemeKind::ibprf, SchemeKind::ibprf_cells, SchemeKind::eg,
                       SchemeKind::qcomposite, SchemeKind::polypool}) {
    if (to_string(k) == name) return k;
  }
  bad_value("scheme", name, "expected one of ibprf, ibprf-cells, eg, qcomposite, polypool");
}

std::vector<std::uint64_t> ExperimentConfig::resolved_cells() const {
  if (!cells.empty()) return cells;
  if (c == 0) return {};
  return std::vector<std::uint64_t>(c, n / c);
}

void ExperimentConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "scheme") scheme = parse_scheme(value);
  else if (key == "n") n = parse_u64(key, value);
  else if (key == "m") m = parse_u64(key, value);
  else if (key == "pool_size") pool_size = parse_u64(key, value);
  else if (key == "q") q = parse_u64(key, value);
  else if (key == "s") s = parse_u64(key, value);
  else if (key == "sprime") sprime = parse_u64(key, value);
  else if (key == "t") t = parse_u64(key, value);
  else if (key == "prime") prime = parse_u64(key, value);
  else if (key == "width") width = parse_double(key, value);
  else if (key == "height") height = parse_double(key, value);
  else if (key == "radius") radius = parse_double(key, value);
  else if (key == "complete") complete = parse_bool(key, value);
  else if (key == "d") d = value.empty() ? std::nullopt : std::optional(parse_double(key, value));
  else if (key == "cells") cells = parse_list(key, value);
  else if (key == "c") c = parse_u64(key, value);
  else if (key == "h_max") h_max = static_cast<std::uint32_t>(parse_u64(key, value));
  else if (key == "trials") trials = parse_u64(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "count_mode") {
    if (value == "bidirectional") count_mode = CountMode::bidirectional;
    else if (value == "one_direction") count_mode = CountMode::one_direction;
    else bad_value(key, value, "expected bidirectional or one_direction");
  } else if (key == "captures") captures = parse_list(key, value);
  else if (key == "plant_poly") {
    plant_poly = value.empty() ? std::nullopt : std::optional(parse_u64(key, value));
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  auto fail = [&](std::string field, std::string why) { errors.push_back(field + ": " + why); };

  if (n == 0) fail("n", "must be positive");
  if (m == 0) fail("m", "must be positive");
  if (!(width > 0)) fail("width", "must be positive");
  if (!(height > 0)) fail("height", "must be positive");
  if (!(radius > 0)) fail("radius", "must be positive");
  if (d && !(*d > 0)) fail("d", "must be positive");
  if (d && complete) fail("d", "cannot be combined with complete = true");
  if (trials == 0) fail("trials", "must be positive");
  if (h_max == 1 || h_max > 16) fail("h_max", "must be 0 (no path phase) or in [2, 16]");

  switch (scheme) {
    case SchemeKind::ibprf:
      if (m >= n) fail("m", "must be smaller than n");
      break;
    case SchemeKind::ibprf_cells: {
      const auto sizes = resolved_cells();
      if (sizes.empty()) {
        fail("cells", "ibprf-cells needs cells = n_1,...,n_c or c = count");
        break;
      }
      if (cells.empty() && c > 0 && n % c != 0) fail("c", "must divide n for equal cells");
      const auto total = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
      if (total != n) fail("cells", "sizes sum to " + std::to_string(total) + ", need n");
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] <= m) {
          fail("cells", "cell " + std::to_string(i) + " has " + std::to_string(sizes[i]) +
                            " nodes, needs more than m");
        }
      }
      break;
    }
    case SchemeKind::eg:
    case SchemeKind::qcomposite:
      if (pool_size == 0) fail("pool_size", "must be positive");
      if (m > pool_size) fail("m", "must not exceed pool_size");
      if (scheme == SchemeKind::qcomposite && (q == 0 || q > m)) fail("q", "must be in [1, m]");
      break;
    case SchemeKind::polypool:
      if (s == 0) fail("s", "must be positive");
      if (sprime == 0 || sprime > s) fail("sprime", "must be in [1, s]");
      if (t == 0) fail("t", "must be at least 1");
      if (prime >= (1ULL << 32) || !is_prime(prime)) fail("prime", "must be a prime below 2^32");
      else if (n > prime) fail("n", "node ids 0..n-1 must be below prime");
      if (plant_poly && *plant_poly >= s) fail("plant_poly", "must be a polynomial id below s");
      break;
  }
  if (plant_poly && scheme != SchemeKind::polypool) {
    fail("plant_poly", "only applies to the polypool scheme");
  }

  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::to_key_values() const {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("scheme", std::string(to_string(scheme)));
  kv.emplace_back("n", std::to_string(n));
  kv.emplace_back("m", std::to_string(m));
  kv.emplace_back("pool_size", std::to_string(pool_size));
  kv.emplace_back("q", std::to_string(q));
  kv.emplace_back("s", std::to_string(s));
  kv.emplace_back("sprime", std::to_string(sprime));
  kv.emplace_back("t", std::to_string(t));
  kv.emplace_back("prime", std::to_string(prime));
  kv.emplace_back("width", format_double(width));
  kv.emplace_back("height", format_double(height));
  kv.emplace_back("radius", format_double(radius));
  kv.emplace_back("complete", complete ? "true" : "false");
  kv.emplace_back("d", d ? format_double(*d) : "");
  kv.emplace_back("cells", join(cells));
  kv.emplace_back("c", std::to_string(c));
  kv.emplace_back("h_max", std::to_string(h_max));
  kv.emplace_back("trials", std::to_string(trials));
  kv.emplace_back("seed", std::to_string(seed));
  kv.emplace_back("count_mode",
                  count_mode == CountMode::bidirectional ? "bidirectional" : "one_direction");
  kv.emplace_back("captures", join(captures));
  kv.emplace_back("plant_poly", plant_poly ? std::to_string(*plant_poly) : "");
  return kv;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.starts_with("manifest.")) continue;
    base.set(key, line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

}  // namespace ibprf
