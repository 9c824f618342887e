#include "ibprf/sim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ibprf/errors.hpp"

namespace ibprf {

double Region::diagonal() const { return std::hypot(width, height); }

Topology::Topology(std::vector<Position> positions, double radius, Region region)
    : positions_(std::move(positions)), radius_(radius), region_(region) {
  adjacency_.resize(positions_.size());
  for (std::uint64_t a = 0; a < positions_.size(); ++a) {
    for (std::uint64_t b = a + 1; b < positions_.size(); ++b) {
      if (within_range(positions_[a], positions_[b])) {
        adjacency_[a].push_back(NodeId{b});
        adjacency_[b].push_back(NodeId{a});
      }
    }
  }
}

bool Topology::within_range(Position a, Position b) const {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= radius_ * radius_;
}

bool Topology::are_neighbors(NodeId u, NodeId v) const {
  if (u == v) return false;
  const auto& adj = adjacency_.at(u.value);
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<NodePair> Topology::physical_pairs() const {
  std::vector<NodePair> out;
  out.reserve(pair_count());
  for (std::uint64_t a = 0; a < adjacency_.size(); ++a) {
    for (NodeId b : adjacency_[a]) {
      if (b.value > a) out.push_back(NodePair{NodeId{a}, b});
    }
  }
  return out;
}

std::uint64_t Topology::pair_count() const {
  std::uint64_t degree_sum = 0;
  for (const auto& adj : adjacency_) degree_sum += adj.size();
  return degree_sum / 2;
}

double Topology::mean_degree() const {
  if (positions_.empty()) return 0.0;
  return 2.0 * static_cast<double>(pair_count()) / static_cast<double>(positions_.size());
}

void Topology::link(std::uint64_t a, std::uint64_t b) {
  auto insert = [](std::vector<NodeId>& adj, NodeId id) {
    adj.insert(std::lower_bound(adj.begin(), adj.end(), id), id);
  };
  insert(adjacency_[a], NodeId{b});
  insert(adjacency_[b], NodeId{a});
}

void Topology::unlink(std::uint64_t a, std::uint64_t b) {
  auto erase = [](std::vector<NodeId>& adj, NodeId id) {
    auto it = std::lower_bound(adj.begin(), adj.end(), id);
    if (it != adj.end() && *it == id) adj.erase(it);
  };
  erase(adjacency_[a], NodeId{b});
  erase(adjacency_[b], NodeId{a});
}

std::vector<NodeId> Topology::move(NodeId u, Position to) {
  const std::uint64_t a = u.value;
  const std::vector<NodeId> before = adjacency_.at(a);
  for (NodeId v : before) unlink(a, v.value);
  positions_[a] = to;
  std::vector<NodeId> gained;
  for (std::uint64_t b = 0; b < positions_.size(); ++b) {
    if (b == a || !within_range(positions_[a], positions_[b])) continue;
    link(a, b);
    if (!std::binary_search(before.begin(), before.end(), NodeId{b})) gained.push_back(NodeId{b});
  }
  return gained;
}

NodeId Topology::add(Position at) {
  const std::uint64_t id = positions_.size();
  positions_.push_back(at);
  adjacency_.emplace_back();
  for (std::uint64_t b = 0; b < id; ++b) {
    if (within_range(at, positions_[b])) link(id, b);
  }
  return NodeId{id};
}

double square_pair_within_probability(double side, double radius) {
  if (radius >= side * std::numbers::sqrt2) return 1.0;
  if (radius > side) {
    // Not needed for degree targeting; the bisection stays in radius <= side.
    throw std::domain_error("closed form only valid for radius <= side");
  }
  const double r = radius;
  const double l = side;
  return (std::numbers::pi * r * r * l * l - 8.0 / 3.0 * r * r * r * l + 0.5 * r * r * r * r) /
         (l * l * l * l);
}

double region_side_for_degree(std::uint64_t n, double radius, double d) {
  if (n < 2) throw ConfigError("d: needs at least two nodes");
  const double pairs = static_cast<double>(n - 1);
  const double max_degree = pairs * square_pair_within_probability(radius, radius);
  if (d >= max_degree) {
    throw ConfigError("d: target degree " + std::to_string(d) + " not reachable with n = " +
                      std::to_string(n));
  }
  double lo = radius;
  double hi = radius;
  while (pairs * square_pair_within_probability(hi, radius) > d) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pairs * square_pair_within_probability(mid, radius) > d) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Region deployment_region(const ExperimentConfig& config) {
  if (config.d) {
    const double side = region_side_for_degree(config.n, config.radius, *config.d);
    return Region{0.0, 0.0, side, side};
  }
  return Region{0.0, 0.0, config.width, config.height};
}

Region cell_strip(const Region& region, std::size_t index, std::size_t count) {
  const double w = region.width / static_cast<double>(count);
  return Region{region.x0 + w * static_cast<double>(index), region.y0, w, region.height};
}

Topology deploy_uniform(const ExperimentConfig& config, Rng& rng) {
  const Region region = deployment_region(config);
  const double radius = config.complete ? std::max(config.radius, region.diagonal())
                                        : config.radius;
  std::vector<std::uint64_t> cells;
  if (config.scheme == SchemeKind::ibprf_cells) cells = config.resolved_cells();
  if (cells.empty()) cells.push_back(config.n);

  std::vector<Position> positions;
  positions.reserve(config.n);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Region strip = cell_strip(region, i, cells.size());
    for (std::uint64_t k = 0; k < cells[i]; ++k) {
      const double x = strip.x0 + uniform_unit(rng) * strip.width;
      const double y = strip.y0 + uniform_unit(rng) * strip.height;
      positions.push_back(Position{x, y});
    }
  }
  return Topology(std::move(positions), radius, region);
}

}  // namespace ibprf
