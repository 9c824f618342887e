#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ibprf/core/link_graph.hpp"
#include "ibprf/core/metrics.hpp"
#include "ibprf/crypto/aead.hpp"
#include "ibprf/crypto/prf.hpp"
#include "ibprf/crypto/random.hpp"
#include "ibprf/scheme/messages.hpp"

namespace ibprf {

/// (peer id, key) pair in a node's ring. key = PRF_{MK_peer}(owner): the peer is the
/// owner's master node for this key.
struct KeyRingEntry {
  NodeId peer;
  PairwiseKey key;

  friend bool operator==(const KeyRingEntry&, const KeyRingEntry&) = default;
};

/// Pre-distributed material of one node: its master key plus at most `capacity` entries.
class KeyRing {
 public:
  KeyRing(NodeId owner, const MasterKey& master, std::size_t capacity);

  /// Throws IntegrityError on overflow, duplicate peer, or self entry.
  void add(KeyRingEntry entry);

  const KeyRingEntry* find(NodeId peer) const;
  bool contains(NodeId peer) const { return find(peer) != nullptr; }

  NodeId owner() const { return owner_; }
  const MasterKey& master() const { return master_; }
  /// Keyed PRF under this node's master key (responder side of a claim).
  const Prf& prf() const { return prf_; }
  std::size_t capacity() const { return capacity_; }
  /// Sorted by peer id.
  std::span<const KeyRingEntry> entries() const { return entries_; }
  /// Ring entries plus the master key.
  std::size_t stored_keys() const { return entries_.size() + 1; }

 private:
  NodeId owner_;
  MasterKey master_;
  Prf prf_;
  std::size_t capacity_;
  std::vector<KeyRingEntry> entries_;
};

/// Rings of a deployment, addressed by owner id.
class KeyRingSet {
 public:
  void insert(KeyRing ring);
  const KeyRing* find(NodeId owner) const;
  const KeyRing& at(NodeId owner) const;
  std::size_t size() const { return rings_.size(); }
  /// Owners in ascending order.
  std::vector<NodeId> owners() const;

 private:
  std::unordered_map<NodeId, KeyRing> rings_;
};

/// Key setup server: holds every node's master key and fills key rings.
class SetupServer {
 public:
  /// Generates one master key per pool id (in pool order) from `seed`.
  /// Throws ConfigError if ring_size >= pool size, SetupError on duplicate ids.
  SetupServer(std::vector<NodeId> pool, std::size_t ring_size, std::uint64_t seed);

  /// Ring of `u` with m peers drawn uniformly without replacement from pool \ {u}.
  KeyRing predistribute(NodeId u);
  /// Same, drawing peers from `candidates` \ {u} only (a cell's pool).
  KeyRing predistribute_within(NodeId u, std::span<const NodeId> candidates);

  /// Registers a new node after deployment. Its ring is drawn from the current pool
  /// (or from `candidates` when given); deployed nodes are not contacted.
  KeyRing add_node(NodeId u_new, std::optional<std::span<const NodeId>> candidates = {});

  bool contains(NodeId u) const { return registry_.contains(u); }
  const MasterKey& master_of(NodeId u) const;
  const Prf& prf_of(NodeId u) const;
  std::span<const NodeId> pool() const { return pool_; }
  std::size_t ring_size() const { return ring_size_; }

 private:
  struct Record {
    MasterKey master;
    Prf prf;
  };

  KeyRing make_ring(NodeId u, std::span<const NodeId> candidates);

  std::vector<NodeId> pool_;
  std::unordered_map<NodeId, Record> registry_;
  std::size_t ring_size_;
  Rng rng_;
};

/// Pre-distributes every node of the server's pool.
KeyRingSet predistribute_all(SetupServer& server);

/// One claim per physical-neighbor pair {u, v} with a ring entry in either direction.
/// When both directions hold, the smaller id claims, so the key is derived under the
/// larger id's master key. Output is ordered by pair.
std::vector<ClaimMessage> plan_direct_establishment(const KeyRingSet& rings,
                                                    std::span<const NodePair> physical_pairs);

/// Responder side: one PRF under the responder's own master key with the claimant's id.
/// Counts the claim message and the PRF evaluation.
EstablishedKey respond_to_claim(const KeyRing& responder, const ClaimMessage& claim,
                                Metrics& metrics);

/// Throws IntegrityError unless `claimant` holds an entry for the responder whose key
/// equals `established.key` byte for byte.
void verify_claim(const KeyRing& claimant, const EstablishedKey& established);

/// Plans, sends and answers all claims; adds the keys to `links`. Returns keys added.
std::size_t run_direct_establishment(const KeyRingSet& rings,
                                     std::span<const NodePair> physical_pairs,
                                     SecureLinkGraph& links, Metrics& metrics);

/// Shortest secure route from u to v of at most h_max hops, tie-broken by smallest
/// next-hop id at each step.
std::optional<std::vector<NodeId>> find_secure_path(const SecureLinkGraph& links, NodeId u,
                                                    NodeId v, std::uint32_t h_max);

/// Observer/adversary hook on relay messages in transit.
using RelayTap = std::function<void(PathRelayMessage&)>;

/// Path-key establishment between unkeyed physical neighbors u and v.
///
/// Finds a route over `links`, draws a fresh k' from `rng` and relays it hop by hop,
/// each hop sealed under that hop's link key. Counts one message per hop. Returns
/// std::nullopt when no route within h_max exists. Throws std::invalid_argument if
/// u == v or the pair is already keyed, ProtocolError if a relay fails to open.
std::optional<EstablishedKey> path_establish(NodeId u, NodeId v, const SecureLinkGraph& links,
                                             std::uint32_t h_max, Rng& rng,
                                             NonceSource& nonces, Metrics& metrics,
                                             const RelayTap& tap = {});

/// Rekeying after `u` moved. Direct claims for new neighbors related through either ring,
/// then at most 1-hop path establishment (h = 2) for the remaining ones. Routes are
/// searched on the graph as it stands after the direct step. Keys are added to `links`.
std::vector<EstablishedKey> mobility_rekey(NodeId u, std::span<const NodeId> new_neighbors,
                                           const KeyRingSet& rings, SecureLinkGraph& links,
                                           Rng& rng, NonceSource& nonces, Metrics& metrics);

/// A cell of the improved scheme and its member ids.
struct Cell {
  std::uint32_t index = 0;
  std::vector<NodeId> members;
};

struct CellPlan {
  std::vector<Cell> cells;

  /// Throws SetupError for ids outside the plan.
  std::uint32_t cell_of(NodeId u) const;
  void add_member(std::uint32_t cell, NodeId u);

 private:
  std::map<NodeId, std::uint32_t> index_;
  friend CellPlan partition_cells(std::span<const NodeId>, std::span<const std::size_t>,
                                  std::size_t);
};

/// Splits the pool into consecutive cells of the given sizes.
/// Throws ConfigError unless the sizes sum to the pool size and each exceeds m.
CellPlan partition_cells(std::span<const NodeId> pool, std::span<const std::size_t> sizes,
                         std::size_t ring_size);

/// Every node's ring drawn only from its own cell.
KeyRingSet predistribute_cellwise(SetupServer& server, const CellPlan& plan);

}  // namespace ibprf
