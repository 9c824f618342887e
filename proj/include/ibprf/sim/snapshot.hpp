#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibprf/core/link_graph.hpp"
#include "ibprf/core/metrics.hpp"
#include "ibprf/sim/config.hpp"
#include "ibprf/sim/topology.hpp"

namespace ibprf {

class Simulation;

/// Malformed, truncated or wrong-version snapshot.
class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Debug dump of a run: config echo, placement, secure links and counters.
///
/// Layout (little-endian): "IBPRFSNP", u32 version, u64 seed, u32 config line count and
/// length-prefixed key/value strings, f64 radius, u64 node count and (x, y) pairs,
/// u64 edge count and edges, then the metrics block.
struct Snapshot {
  std::uint64_t seed = 0;
  ExperimentConfig config;
  double radius = 0.0;
  std::vector<Position> positions;
  std::vector<EstablishedKey> edges;
  Metrics metrics;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

Snapshot take_snapshot(const Simulation& sim);
void write_snapshot(std::ostream& out, const Snapshot& snap);
/// Throws SnapshotError.
Snapshot read_snapshot(std::istream& in);

}  // namespace ibprf
