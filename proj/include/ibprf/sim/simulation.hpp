#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ibprf/core/link_graph.hpp"
#include "ibprf/core/metrics.hpp"
#include "ibprf/crypto/aead.hpp"
#include "ibprf/crypto/random.hpp"
#include "ibprf/sim/config.hpp"
#include "ibprf/sim/schemes.hpp"
#include "ibprf/sim/topology.hpp"

namespace ibprf {

struct ConnectivityReport {
  std::uint64_t physical_pairs = 0;
  /// Key-neighbor pairs with a direct key / physical pairs; unset without physical pairs.
  /// Under CountMode::one_direction this is the one-sided diagnostic count instead.
  std::optional<double> direct_fraction;
  /// Physical pairs holding any key after the path phase / physical pairs.
  std::optional<double> after_path_fraction;
  /// Largest connected component of the secure-link graph / node count.
  double giant_component_share = 0.0;
};

/// One deterministic run: (config, seed) fixes every counter, key byte and edge.
class Simulation {
 public:
  /// Validates the config, deploys the topology and instantiates the scheme.
  Simulation(ExperimentConfig config, std::uint64_t seed);

  /// Pre-distribution, direct establishment, then path establishment when h_max >= 2.
  void bootstrap();

  /// Teleports u and rekeys with its new neighbors. Throws MoveRejected outside the
  /// region or, with cells, outside u's home strip.
  std::vector<EstablishedKey> move_node(NodeId u, Position to);

  /// Deploys a fresh node at `at` (setup server issues its ring; no deployed node is
  /// contacted) and runs direct establishment with its neighbors.
  NodeId add_node(Position at);

  /// Fraction of links between uncaptured nodes whose keys the adversary can compute.
  /// Links touching a captured node are excluded. Unset when no such link exists.
  std::optional<double> measure_resilience(std::span<const NodeId> captured);

  /// Per-link verdicts of measure_resilience, for links between uncaptured nodes.
  std::vector<std::pair<NodePair, bool>> compromised_links(std::span<const NodeId> captured) const;

  ConnectivityReport measure_connectivity() const;

  /// `count` distinct nodes, ascending: all of `forced` plus uniformly chosen others.
  std::vector<NodeId> random_capture_set(std::uint64_t count, std::span<const NodeId> forced = {});

  const ExperimentConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const Topology& topology() const { return topology_; }
  const SecureLinkGraph& links() const { return links_; }
  const Metrics& metrics() const { return metrics_; }
  const KeyScheme& scheme() const { return *scheme_; }
  bool bootstrapped() const { return bootstrapped_; }

 private:
  void observe_storage();
  std::optional<std::uint32_t> home_cell(NodeId u) const;

  ExperimentConfig config_;
  std::uint64_t seed_;
  Rng rng_;
  Topology topology_;
  std::unique_ptr<KeyScheme> scheme_;
  SecureLinkGraph links_;
  Metrics metrics_;
  NonceSource nonces_;
  bool bootstrapped_ = false;
};

struct BootstrapResult {
  SecureLinkGraph links;
  Metrics metrics;
  ConnectivityReport connectivity;
};

BootstrapResult run_bootstrap(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace ibprf
