#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ibprf/crypto/types.hpp"

namespace ibprf {

enum class Provenance : std::uint8_t { direct = 1, path = 2 };

/// A pairwise key both endpoints hold.
struct EstablishedKey {
  NodePair pair;
  PairwiseKey key;
  Provenance provenance = Provenance::direct;
  /// 1 for direct keys, h for keys relayed over h secure hops.
  std::uint32_t hops = 1;
  /// Node whose secret derived the key (IBPRF direct keys); unset otherwise.
  std::optional<NodeId> master_side;
  /// Relay route u = u0, u1, ..., uh = v for path keys; empty for direct keys.
  std::vector<NodeId> route;

  friend bool operator==(const EstablishedKey&, const EstablishedKey&) = default;
};

/// Secure links: at most one key per unordered pair, adjacency kept symmetric.
class SecureLinkGraph {
 public:
  /// Throws IntegrityError if the pair already has a key.
  void add(EstablishedKey key);

  bool has(NodeId a, NodeId b) const;
  const EstablishedKey* find(NodeId a, NodeId b) const;
  /// Secure neighbors of `u` in ascending id order.
  std::vector<NodeId> neighbors(NodeId u) const;
  std::size_t degree(NodeId u) const;

  std::size_t size() const { return edges_.size(); }
  void reserve(std::size_t edges) { edges_.reserve(edges); }
  /// All edges ordered by pair.
  std::vector<const EstablishedKey*> edges() const;

 private:
  std::unordered_map<NodePair, EstablishedKey> edges_;
  std::unordered_map<NodeId, std::vector<NodeId>> adjacency_;
};

}  // namespace ibprf
