#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ibprf/crypto/random.hpp"
#include "ibprf/crypto/types.hpp"
#include "ibprf/sim/config.hpp"

namespace ibprf {

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct Region {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 0.0;
  double height = 0.0;

  bool contains(Position p) const {
    return p.x >= x0 && p.x <= x0 + width && p.y >= y0 && p.y <= y0 + height;
  }
  double diagonal() const;
};

/// Node placement plus the unit-disk physical-neighbor relation. Node ids are 0..size()-1.
class Topology {
 public:
  Topology(std::vector<Position> positions, double radius, Region region);

  std::size_t size() const { return positions_.size(); }
  Position position(NodeId u) const { return positions_.at(u.value); }
  double radius() const { return radius_; }
  const Region& region() const { return region_; }

  bool are_neighbors(NodeId u, NodeId v) const;
  /// Ascending ids.
  std::span<const NodeId> neighbors(NodeId u) const { return adjacency_.at(u.value); }
  /// Every physical-neighbor pair once, ordered.
  std::vector<NodePair> physical_pairs() const;
  std::uint64_t pair_count() const;
  double mean_degree() const;

  /// Teleports u to `to`; returns the physical neighbors it did not have before.
  std::vector<NodeId> move(NodeId u, Position to);
  /// Appends a node; its id is the previous size().
  NodeId add(Position at);

 private:
  bool within_range(Position a, Position b) const;
  void link(std::uint64_t a, std::uint64_t b);
  void unlink(std::uint64_t a, std::uint64_t b);

  std::vector<Position> positions_;
  double radius_;
  Region region_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Probability that two uniform points in a `side` x `side` square lie within `radius`.
double square_pair_within_probability(double side, double radius);

/// Square side at which the expected degree of n uniform nodes is `d`.
/// Throws ConfigError when d is unreachable (d must stay below ~0.975 (n - 1)).
double region_side_for_degree(std::uint64_t n, double radius, double d);

/// Deployment region implied by the config (scaled square when d is set).
Region deployment_region(const ExperimentConfig& config);

/// Sub-region of cell `index` when the region is split into `count` vertical strips.
Region cell_strip(const Region& region, std::size_t index, std::size_t count);

/// i.i.d. uniform placement. With cells, node ids of cell i (in pool order) are placed in
/// strip i. With `complete`, the radius is raised to the region diagonal.
Topology deploy_uniform(const ExperimentConfig& config, Rng& rng);

}  // namespace ibprf
