#include "ibprf/sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "ibprf/errors.hpp"
#include "ibprf/scheme/ibprf.hpp"

namespace ibprf {

namespace {

Topology deploy_validated(const ExperimentConfig& config, Rng& rng) {
  config.validate();
  return deploy_uniform(config, rng);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }
  std::size_t largest() const {
    std::size_t best = 0;
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      if (parent_[i] == i) best = std::max(best, size_[i]);
    }
    return best;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

Simulation::Simulation(ExperimentConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      seed_(seed),
      rng_(seed),
      topology_(deploy_validated(config_, rng_)),
      scheme_(make_scheme(config_)) {}

void Simulation::observe_storage() {
  for (std::uint64_t u = 0; u < topology_.size(); ++u) {
    metrics_.observe_storage(scheme_->stored_keys(NodeId{u}));
  }
}

void Simulation::bootstrap() {
  if (bootstrapped_) throw IntegrityError("bootstrap already ran");
  scheme_->predistribute(config_.n, rng_);
  observe_storage();

  const auto pairs = topology_.physical_pairs();
  scheme_->establish_direct(pairs, links_, metrics_);

  if (config_.h_max >= 2) {
    const SecureLinkGraph direct_graph = links_;
    for (const NodePair& p : pairs) {
      if (links_.has(p.lo, p.hi)) continue;
      if (auto key = path_establish(p.lo, p.hi, direct_graph, config_.h_max, rng_, nonces_,
                                    metrics_)) {
        links_.add(std::move(*key));
        ++metrics_.path_keys;
      }
    }
  }
  if (metrics_.direct_keys + metrics_.path_keys != links_.size()) {
    throw IntegrityError("key counters do not match the link graph");
  }
  bootstrapped_ = true;
}

std::optional<std::uint32_t> Simulation::home_cell(NodeId u) const {
  if (const auto* ibprf = dynamic_cast<const IbprfScheme*>(scheme_.get())) {
    if (ibprf->cell_plan()) return ibprf->cell_plan()->cell_of(u);
  }
  return std::nullopt;
}

std::vector<EstablishedKey> Simulation::move_node(NodeId u, Position to) {
  if (!bootstrapped_) throw IntegrityError("move before bootstrap");
  if (u.value >= topology_.size()) throw MoveRejected("unknown node " + std::to_string(u.value));
  if (!topology_.region().contains(to)) throw MoveRejected("target outside the deployment region");
  if (auto cell = home_cell(u)) {
    const auto* ibprf = dynamic_cast<const IbprfScheme*>(scheme_.get());
    const Region strip = cell_strip(topology_.region(), *cell, ibprf->cell_plan()->cells.size());
    if (!strip.contains(to)) {
      throw MoveRejected("node " + std::to_string(u.value) + " may not leave cell " +
                         std::to_string(*cell));
    }
  }
  const auto gained = topology_.move(u, to);
  auto keys = scheme_->rekey(u, gained, links_, rng_, nonces_, metrics_);
  observe_storage();
  return keys;
}

NodeId Simulation::add_node(Position at) {
  if (!bootstrapped_) throw IntegrityError("add_node before bootstrap");
  const Region& region = topology_.region();
  if (!region.contains(at)) throw MoveRejected("new node outside the deployment region");
  std::optional<std::uint32_t> cell;
  if (const auto* ibprf = dynamic_cast<const IbprfScheme*>(scheme_.get());
      ibprf != nullptr && ibprf->cell_plan()) {
    const auto count = ibprf->cell_plan()->cells.size();
    const double rel = (at.x - region.x0) / region.width * static_cast<double>(count);
    cell = static_cast<std::uint32_t>(
        std::clamp(rel, 0.0, static_cast<double>(count - 1)));
  }
  const NodeId u = topology_.add(at);
  scheme_->add_node(u, cell, rng_);
  observe_storage();
  std::vector<NodePair> pairs;
  for (NodeId v : topology_.neighbors(u)) pairs.push_back(NodePair::of(u, v));
  scheme_->establish_direct(pairs, links_, metrics_);
  return u;
}

std::vector<std::pair<NodePair, bool>> Simulation::compromised_links(
    std::span<const NodeId> captured) const {
  const auto adversary = scheme_->capture(captured);
  const std::unordered_set<NodeId> taken(captured.begin(), captured.end());
  std::unordered_map<NodePair, bool> memo;

  // Path keys are exposed if a relay was captured or any hop key is computable,
  // since the adversary records relay traffic.
  auto exposed = [&](auto&& self, const EstablishedKey& link) -> bool {
    if (auto it = memo.find(link.pair); it != memo.end()) return it->second;
    bool result = false;
    if (link.provenance == Provenance::direct) {
      result = adversary->derives(link);
    } else {
      for (std::size_t i = 0; i + 1 < link.route.size() && !result; ++i) {
        if (i > 0 && taken.contains(link.route[i])) {
          result = true;
          break;
        }
        const EstablishedKey* hop = links_.find(link.route[i], link.route[i + 1]);
        if (hop == nullptr) throw IntegrityError("path key over a missing hop");
        const bool hop_touches_capture =
            taken.contains(hop->pair.lo) || taken.contains(hop->pair.hi);
        result = hop_touches_capture || self(self, *hop);
      }
    }
    memo.emplace(link.pair, result);
    return result;
  };

  std::vector<std::pair<NodePair, bool>> out;
  for (const EstablishedKey* link : links_.edges()) {
    if (taken.contains(link->pair.lo) || taken.contains(link->pair.hi)) continue;
    out.emplace_back(link->pair, exposed(exposed, *link));
  }
  return out;
}

std::optional<double> Simulation::measure_resilience(std::span<const NodeId> captured) {
  for (NodeId c : captured) {
    if (c.value >= topology_.size()) {
      throw std::invalid_argument("captured node " + std::to_string(c.value) + " not deployed");
    }
  }
  const auto verdicts = compromised_links(captured);
  if (verdicts.empty()) return std::nullopt;
  const auto hit = std::count_if(verdicts.begin(), verdicts.end(),
                                 [](const auto& v) { return v.second; });
  const double fraction = static_cast<double>(hit) / static_cast<double>(verdicts.size());
  metrics_.resilience_samples.push_back(ResilienceSample{captured.size(), fraction});
  return fraction;
}

ConnectivityReport Simulation::measure_connectivity() const {
  ConnectivityReport report;
  report.physical_pairs = topology_.pair_count();
  const auto edges = links_.edges();
  if (report.physical_pairs > 0) {
    // Keys kept from before a move may join nodes that are no longer neighbors.
    std::uint64_t direct = 0;
    std::uint64_t any = 0;
    for (const EstablishedKey* e : edges) {
      if (!topology_.are_neighbors(e->pair.lo, e->pair.hi)) continue;
      ++any;
      if (e->provenance == Provenance::direct) ++direct;
    }
    const double total = static_cast<double>(report.physical_pairs);
    if (config_.count_mode == CountMode::one_direction) {
      auto count = scheme_->one_direction_count(topology_.physical_pairs());
      if (!count) throw ConfigError("count_mode: one_direction only applies to IBPRF schemes");
      report.direct_fraction = static_cast<double>(*count) / total;
    } else {
      report.direct_fraction = static_cast<double>(direct) / total;
    }
    report.after_path_fraction = static_cast<double>(any) / total;
  }
  if (topology_.size() > 0) {
    DisjointSets sets(topology_.size());
    for (const EstablishedKey* e : edges) sets.unite(e->pair.lo.value, e->pair.hi.value);
    report.giant_component_share =
        static_cast<double>(sets.largest()) / static_cast<double>(topology_.size());
  }
  return report;
}

std::vector<NodeId> Simulation::random_capture_set(std::uint64_t count,
                                                   std::span<const NodeId> forced) {
  const std::unordered_set<NodeId> fixed(forced.begin(), forced.end());
  if (fixed.size() > count || count > topology_.size()) {
    throw std::invalid_argument("capture set size out of range");
  }
  std::vector<NodeId> rest;
  for (std::uint64_t u = 0; u < topology_.size(); ++u) {
    if (!fixed.contains(NodeId{u})) rest.push_back(NodeId{u});
  }
  std::vector<NodeId> out(fixed.begin(), fixed.end());
  for (std::uint64_t i : sample_without_replacement(rng_, rest.size(), count - fixed.size())) {
    out.push_back(rest[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

BootstrapResult run_bootstrap(const ExperimentConfig& config, std::uint64_t seed) {
  Simulation sim(config, seed);
  sim.bootstrap();
  return BootstrapResult{sim.links(), sim.metrics(), sim.measure_connectivity()};
}

}  // namespace ibprf
