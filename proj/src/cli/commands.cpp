#include "ibprf/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ibprf/analysis/figures.hpp"
#include "ibprf/analysis/formulas.hpp"
#include "ibprf/errors.hpp"
#include "ibprf/io/csv.hpp"
#include "ibprf/sim/config.hpp"
#include "ibprf/sim/simulation.hpp"
#include "ibprf/sim/snapshot.hpp"

namespace ibprf {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// small helpers

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::uint64_t> u64_list(const std::string& flag, const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const std::string& item : split_list(text)) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError("--" + flag + ": '" + item + "' is not a non-negative integer");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--" + flag + " is required for this formula");
  return out;
}

std::vector<double> double_list(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size() || !std::isfinite(v)) {
      throw ConfigError("--" + flag + ": '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--" + flag + " is required for this formula");
  return out;
}

std::string join(const std::vector<std::uint64_t>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

struct MeanStderr {
  std::uint64_t count = 0;
  std::optional<double> mean;
  std::optional<double> stderr_;
};

MeanStderr summarize(const std::vector<double>& xs) {
  MeanStderr r;
  r.count = xs.size();
  if (xs.empty()) return r;
  double sum = 0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  r.mean = mean;
  if (xs.size() >= 2) {
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    r.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return r;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Results keep index order;
/// the lowest-index failure is rethrown.
template <typename R>
std::vector<R> fan_out(std::uint64_t count, unsigned jobs,
                       const std::function<R(std::uint64_t)>& body) {
  std::vector<std::optional<R>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t i = next++; i < count; i = next++) {
      try {
        results[i] = body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, jobs), count));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

fs::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("--out: cannot create directory '" + dir + "'");
  }
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << content;
  f.close();
  if (!f) throw ConfigError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string eq;
  std::string n, m, p, d, pool, q, s, sprime, t, cells;
};

CsvTable analyze(const AnalyzeArgs& a) {
  auto exact_row = [](std::vector<std::string> inputs, const ExactProbability& p) {
    inputs.push_back(p.fraction());
    inputs.push_back(p.decimal());
    return inputs;
  };

  if (a.eq == "1" || a.eq == "1b") {
    const bool both = a.eq == "1b";
    CsvTable t{both ? "analyze-eq1b/v1" : "analyze-eq1/v1", {"n", "m", "exact_fraction", "decimal"}, {}};
    for (auto n : u64_list("n", a.n))
      for (auto m : u64_list("m", a.m))
        t.add_row(exact_row({std::to_string(n), std::to_string(m)},
                            both ? p_direct_bidirectional(n, m) : p_direct_ibprf(n, m)));
    return t;
  }
  if (a.eq == "2") {
    CsvTable t{"analyze-eq2/v1", {"p", "d", "p_s"}, {}};
    for (double p : double_list("p", a.p))
      for (auto d : u64_list("d", a.d))
        t.add_row({format_double(p), std::to_string(d), format_double(p_onehop(p, d))});
    return t;
  }
  if (a.eq == "3") {
    CsvTable t{"analyze-eq3/v1", {"n_i", "m", "exact_fraction", "decimal"}, {}};
    for (auto ni : u64_list("cells", a.cells))
      for (auto m : u64_list("m", a.m))
        t.add_row(exact_row({std::to_string(ni), std::to_string(m)}, p_cell(ni, m)));
    return t;
  }
  if (a.eq == "4") {
    CsvTable t{"analyze-eq4/v1", {"cells", "m", "exact_fraction", "decimal"}, {}};
    const auto sizes = u64_list("cells", a.cells);
    for (auto m : u64_list("m", a.m)) {
      std::vector<ExactProbability> per_cell;
      for (auto ni : sizes) per_cell.push_back(p_cell(ni, m));
      t.add_row(exact_row({join(sizes, ';'), std::to_string(m)}, p_avg_cells(per_cell)));
    }
    return t;
  }
  if (a.eq == "5") {
    CsvTable t{"analyze-eq5/v1", {"M", "m", "exact_fraction", "decimal"}, {}};
    for (auto pool : u64_list("M", a.pool))
      for (auto m : u64_list("m", a.m))
        t.add_row(exact_row({std::to_string(pool), std::to_string(m)}, p_eg(pool, m)));
    return t;
  }
  if (a.eq == "6") {
    CsvTable t{"analyze-eq6/v1", {"M", "m", "q", "exact_fraction", "decimal"}, {}};
    for (auto pool : u64_list("M", a.pool))
      for (auto m : u64_list("m", a.m))
        for (auto q : u64_list("q", a.q))
          t.add_row(exact_row({std::to_string(pool), std::to_string(m), std::to_string(q)},
                              p_qcomposite(pool, m, q)));
    return t;
  }
  if (a.eq == "7") {
    CsvTable t{"analyze-eq7/v1", {"s", "sprime", "exact_fraction", "decimal"}, {}};
    for (auto s : u64_list("s", a.s))
      for (auto sp : u64_list("sprime", a.sprime))
        t.add_row(exact_row({std::to_string(s), std::to_string(sp)}, p_polypool(s, sp)));
    return t;
  }
  if (a.eq == "polybound") {
    CsvTable t{"analyze-polybound/v1", {"t", "s", "sprime", "max_n"}, {}};
    for (auto tt : u64_list("t", a.t))
      for (auto s : u64_list("s", a.s))
        for (auto sp : u64_list("sprime", a.sprime))
          t.add_row({std::to_string(tt), std::to_string(s), std::to_string(sp),
                     std::to_string(polypool_max_n(tt, s, sp))});
    return t;
  }
  throw ConfigError("--eq: expected one of 1, 1b, 2, 3, 4, 5, 6, 7, polybound (got '" + a.eq +
                    "')");
}

// ---------------------------------------------------------------------------
// simulate / capture

struct RunArgs {
  std::string config_path;
  std::string out_dir;
  unsigned jobs = 0;
  // flag name -> config key, applied in this order after the config file
  std::vector<std::pair<std::string, std::string>> flag_keys;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool complete = false;
  CLI::Option* complete_opt = nullptr;
};

void add_config_flags(CLI::App* cmd, RunArgs& args, bool capture) {
  cmd->add_option("--config", args.config_path, "key = value config file (or a run manifest)");
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--jobs", args.jobs, "worker threads (default: hardware concurrency)");
  std::vector<std::pair<std::string, std::string>> flags = {
      {"scheme", "scheme"}, {"n", "n"},           {"m", "m"},          {"pool-size", "pool_size"},
      {"q", "q"},           {"s", "s"},           {"sprime", "sprime"}, {"t", "t"},
      {"prime", "prime"},   {"width", "width"},   {"height", "height"}, {"radius", "radius"},
      {"d", "d"},           {"cells", "cells"},   {"c", "c"},           {"h-max", "h_max"},
      {"trials", "trials"}, {"seed", "seed"},     {"count-mode", "count_mode"}};
  if (capture) {
    flags.emplace_back("captures", "captures");
    flags.emplace_back("plant-poly", "plant_poly");
  }
  args.flag_keys = flags;
  for (const auto& [flag, key] : flags) {
    args.options[flag] = cmd->add_option("--" + flag, args.values[flag], "config key " + key);
  }
  args.complete_opt = cmd->add_flag("--complete", args.complete, "complete physical graph");
}

ExperimentConfig resolve_config(const RunArgs& args) {
  ExperimentConfig config;
  if (!args.config_path.empty()) {
    if (!fs::exists(args.config_path)) {
      throw ConfigError("--config: no such file '" + args.config_path + "'");
    }
    config = load_config(args.config_path);
  }
  for (const auto& [flag, key] : args.flag_keys) {
    if (args.options.at(flag)->count() > 0) config.set(key, args.values.at(flag));
  }
  if (args.complete_opt->count() > 0) config.complete = args.complete;
  config.validate();
  return config;
}

std::vector<std::uint64_t> seeds_for(const ExperimentConfig& config) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < config.trials; ++i) seeds.push_back(trial_seed(config.seed, i));
  return seeds;
}

std::string manifest_text(const std::string& command, const ExperimentConfig& config,
                          const std::vector<std::uint64_t>& seeds, const std::string& output) {
  std::ostringstream m;
  m << "# ibprf_sim run manifest; rerun with: ibprf_sim " << command
    << " --config manifest.txt --out DIR\n";
  m << "manifest.tool_version = " << kToolVersion << "\n";
  m << "manifest.command = " << command << "\n";
  m << "manifest.master_seed = " << config.seed << "\n";
  m << "manifest.trial_seeds = " << join(seeds, ',') << "\n";
  m << "manifest.output = " << output << "\n";
  for (const auto& [k, v] : config.to_key_values()) m << k << " = " << v << "\n";
  return m.str();
}

unsigned job_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

struct TrialResult {
  std::uint64_t seed = 0;
  ConnectivityReport connectivity;
  Metrics metrics;
};

CsvTable simulate_table(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                        unsigned jobs) {
  const auto results = fan_out<TrialResult>(seeds.size(), jobs, [&](std::uint64_t i) {
    auto run = run_bootstrap(config, seeds[i]);
    return TrialResult{seeds[i], run.connectivity, run.metrics};
  });

  CsvTable table{"simulate/v1",
                 {"trial", "seed", "direct_fraction", "after_path_fraction", "giant_component",
                  "messages", "bytes", "prf_ops", "direct_keys", "path_keys", "storage_max",
                  "ids_sent"},
                 {}};
  std::vector<std::vector<double>> columns(10);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto& m = r.metrics;
    table.add_row({std::to_string(i), std::to_string(r.seed),
                   opt_double(r.connectivity.direct_fraction),
                   opt_double(r.connectivity.after_path_fraction),
                   format_double(r.connectivity.giant_component_share),
                   std::to_string(m.messages_sent), std::to_string(m.bytes_sent),
                   std::to_string(m.prf_ops), std::to_string(m.direct_keys),
                   std::to_string(m.path_keys), std::to_string(m.storage_max),
                   std::to_string(m.ids_sent)});
    if (r.connectivity.direct_fraction) columns[0].push_back(*r.connectivity.direct_fraction);
    if (r.connectivity.after_path_fraction) {
      columns[1].push_back(*r.connectivity.after_path_fraction);
    }
    columns[2].push_back(r.connectivity.giant_component_share);
    const std::uint64_t counters[] = {m.messages_sent, m.bytes_sent,  m.prf_ops,    m.direct_keys,
                                      m.path_keys,     m.storage_max, m.ids_sent};
    for (std::size_t c = 0; c < 7; ++c) columns[3 + c].push_back(static_cast<double>(counters[c]));
  }
  std::vector<std::string> mean_row{"mean", ""};
  std::vector<std::string> err_row{"stderr", ""};
  for (const auto& col : columns) {
    const auto s = summarize(col);
    mean_row.push_back(opt_double(s.mean));
    err_row.push_back(opt_double(s.stderr_));
  }
  table.add_row(mean_row);
  table.add_row(err_row);
  return table;
}

struct CapturePoint {
  std::optional<double> fraction;
  std::optional<double> planted_fraction;
};

std::vector<NodeId> capture_set(Simulation& sim, std::uint64_t x) {
  const ExperimentConfig& config = sim.config();
  if (!config.plant_poly) return sim.random_capture_set(x);

  const auto& poly = dynamic_cast<const PolyPoolScheme&>(sim.scheme());
  const auto holders = poly.holders(static_cast<std::uint32_t>(*config.plant_poly));
  const auto planted = std::min<std::uint64_t>(holders.size(), std::min(x, config.t + 1));
  return sim.random_capture_set(
      x, std::span<const NodeId>(holders.data(), static_cast<std::size_t>(planted)));
}

std::optional<double> planted_fraction(const Simulation& sim, std::span<const NodeId> captured) {
  const auto& poly = dynamic_cast<const PolyPoolScheme&>(sim.scheme());
  const auto target = static_cast<std::uint32_t>(*sim.config().plant_poly);
  std::uint64_t total = 0;
  std::uint64_t hit = 0;
  for (const auto& [pair, compromised] : sim.compromised_links(captured)) {
    const EstablishedKey* link = sim.links().find(pair.lo, pair.hi);
    if (link == nullptr || link->provenance != Provenance::direct) continue;
    if (common_poly(poly.shares(pair.lo), poly.shares(pair.hi)) != target) continue;
    ++total;
    if (compromised) ++hit;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(hit) / static_cast<double>(total);
}

CsvTable capture_table(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                       unsigned jobs) {
  if (config.captures.empty()) throw ConfigError("captures: list at least one capture count");
  for (auto x : config.captures) {
    if (x == 0 || x >= config.n) {
      throw ConfigError("captures: " + std::to_string(x) + " must be in [1, n)");
    }
  }
  const auto results =
      fan_out<std::vector<CapturePoint>>(seeds.size(), jobs, [&](std::uint64_t i) {
        Simulation sim(config, seeds[i]);
        sim.bootstrap();
        std::vector<CapturePoint> points;
        for (auto x : config.captures) {
          const auto captured = capture_set(sim, x);
          CapturePoint p;
          if (config.plant_poly) p.planted_fraction = planted_fraction(sim, captured);
          p.fraction = sim.measure_resilience(captured);
          points.push_back(p);
        }
        return points;
      });

  CsvTable table{"capture/v1",
                 {"scheme", "x", "samples", "mean_fraction", "stderr", "planted_poly",
                  "planted_mean_fraction"},
                 {}};
  for (std::size_t k = 0; k < config.captures.size(); ++k) {
    std::vector<double> fractions;
    std::vector<double> planted;
    for (const auto& trial : results) {
      if (trial[k].fraction) fractions.push_back(*trial[k].fraction);
      if (trial[k].planted_fraction) planted.push_back(*trial[k].planted_fraction);
    }
    const auto s = summarize(fractions);
    table.add_row({std::string(to_string(config.scheme)), std::to_string(config.captures[k]),
                   std::to_string(s.count), opt_double(s.mean), opt_double(s.stderr_),
                   config.plant_poly ? std::to_string(*config.plant_poly) : "",
                   opt_double(summarize(planted).mean)});
  }
  return table;
}

int run_experiment(const std::string& command, const RunArgs& args, std::ostream& out) {
  const ExperimentConfig config = resolve_config(args);
  const fs::path dir = prepare_output_dir(args.out_dir);
  const std::string csv_name = command + ".csv";
  const auto seeds = seeds_for(config);
  write_file(dir / "manifest.txt", manifest_text(command, config, seeds, csv_name));

  const unsigned jobs = job_count(args.jobs);
  const CsvTable table = command == "simulate" ? simulate_table(config, seeds, jobs)
                                               : capture_table(config, seeds, jobs);
  write_file(dir / csv_name, table.str());
  out << "wrote " << (dir / "manifest.txt").string() << "\n";
  out << "wrote " << (dir / csv_name).string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// figures / snapshot

int run_figures(const std::string& which, const std::string& out_dir, std::ostream& out) {
  std::vector<std::string> wanted = which == "all" ? std::vector<std::string>{"1", "2", "3"}
                                                   : split_list(which);
  for (const auto& w : wanted) {
    if (w != "1" && w != "2" && w != "3") {
      throw ConfigError("--which: expected 1, 2, 3 or all (got '" + w + "')");
    }
  }
  const fs::path dir = prepare_output_dir(out_dir);
  for (const auto& w : wanted) {
    const CsvTable table = w == "1" ? figure1() : w == "2" ? figure2() : figure3();
    const fs::path path = dir / ("figure" + w + ".csv");
    write_file(path, table.str());
    out << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

int run_snapshot(const RunArgs& args, const std::string& file, std::ostream& out) {
  const ExperimentConfig config = resolve_config(args);
  Simulation sim(config, config.seed);
  sim.bootstrap();
  const fs::path dir = prepare_output_dir(args.out_dir);
  std::ostringstream buf;
  write_snapshot(buf, take_snapshot(sim));
  write_file(dir / file, buf.str());
  out << "wrote " << (dir / file).string() << " (" << sim.links().size() << " links)\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"IBPRF key pre-distribution simulator and closed-form evaluator", "ibprf_sim"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "evaluate a closed form over a grid");
  analyze_cmd->add_option("--eq", analyze_args.eq, "1, 1b, 2, 3, 4, 5, 6, 7 or polybound")
      ->required();
  analyze_cmd->add_option("--n", analyze_args.n, "network sizes");
  analyze_cmd->add_option("--m", analyze_args.m, "ring sizes");
  analyze_cmd->add_option("--p", analyze_args.p, "direct probabilities");
  analyze_cmd->add_option("--d", analyze_args.d, "mean neighbor counts");
  analyze_cmd->add_option("--M,--pool-size", analyze_args.pool, "key pool sizes");
  analyze_cmd->add_option("--q", analyze_args.q, "overlap thresholds");
  analyze_cmd->add_option("--s", analyze_args.s, "polynomial pool sizes");
  analyze_cmd->add_option("--sprime", analyze_args.sprime, "shares per node");
  analyze_cmd->add_option("--t", analyze_args.t, "polynomial degrees");
  analyze_cmd->add_option("--cells", analyze_args.cells, "cell sizes");

  RunArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "bootstrap trials, one CSV row per trial");
  add_config_flags(simulate_cmd, sim_args, false);

  RunArgs cap_args;
  auto* capture_cmd = app.add_subcommand("capture", "node-capture resilience per capture count");
  add_config_flags(capture_cmd, cap_args, true);

  std::string which = "all";
  std::string fig_out;
  auto* figures_cmd = app.add_subcommand("figures", "write figure1.csv .. figure3.csv");
  figures_cmd->add_option("--which", which, "1, 2, 3 (comma list) or all");
  figures_cmd->add_option("--out", fig_out, "output directory")->required();

  RunArgs snap_args;
  std::string snap_file = "bootstrap.snap";
  auto* snapshot_cmd = app.add_subcommand("snapshot", "write a binary snapshot after bootstrap");
  add_config_flags(snapshot_cmd, snap_args, false);
  snapshot_cmd->add_option("--file", snap_file, "snapshot file name inside --out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze_cmd) {
      analyze(analyze_args).write(out);
      return kExitOk;
    }
    if (*simulate_cmd) return run_experiment("simulate", sim_args, out);
    if (*capture_cmd) return run_experiment("capture", cap_args, out);
    if (*figures_cmd) return run_figures(which, fig_out, out);
    if (*snapshot_cmd) return run_snapshot(snap_args, snap_file, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IntegrityError& e) {
    err << "integrity violation: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace ibprf
