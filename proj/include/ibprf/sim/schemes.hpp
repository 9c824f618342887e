#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ibprf/core/link_graph.hpp"
#include "ibprf/core/metrics.hpp"
#include "ibprf/crypto/aead.hpp"
#include "ibprf/crypto/random.hpp"
#include "ibprf/scheme/baselines.hpp"
#include "ibprf/scheme/ibprf.hpp"
#include "ibprf/scheme/poly_pool.hpp"
#include "ibprf/sim/config.hpp"

namespace ibprf {

/// What an adversary can compute after capturing a set of nodes.
class Adversary {
 public:
  virtual ~Adversary() = default;
  /// True if the revealed material lets the adversary compute this direct link key.
  /// The adversary recomputes the key and compares bytes; nothing is assumed.
  virtual bool derives(const EstablishedKey& link) const = 0;
};

/// Harness-facing hooks shared by IBPRF and the baseline schemes.
class KeyScheme {
 public:
  virtual ~KeyScheme() = default;

  virtual SchemeKind kind() const = 0;
  /// Installs key material on nodes 0..n-1. Sends no messages.
  virtual void predistribute(std::uint64_t n, Rng& rng) = 0;
  /// Direct establishment over the given physical-neighbor pairs.
  virtual void establish_direct(std::span<const NodePair> pairs, SecureLinkGraph& links,
                                Metrics& metrics) = 0;
  /// Rekeying of `u` with newly adjacent nodes after a move.
  virtual std::vector<EstablishedKey> rekey(NodeId u, std::span<const NodeId> new_neighbors,
                                            SecureLinkGraph& links, Rng& rng,
                                            NonceSource& nonces, Metrics& metrics);
  /// Key material for a node added after deployment (`cell` for the improved scheme).
  virtual void add_node(NodeId u, std::optional<std::uint32_t> cell, Rng& rng) = 0;
  /// Pre-distributed key material held by `u`.
  virtual std::size_t stored_keys(NodeId u) const = 0;
  virtual std::unique_ptr<Adversary> capture(std::span<const NodeId> captured) const = 0;
  /// Diagnostic for IBPRF only: pairs where the larger id's ring holds the smaller id.
  virtual std::optional<std::uint64_t> one_direction_count(std::span<const NodePair>) const {
    return std::nullopt;
  }
};

class IbprfScheme final : public KeyScheme {
 public:
  /// `cells` empty for the basic scheme.
  IbprfScheme(std::uint64_t ring_size, std::vector<std::uint64_t> cells);

  SchemeKind kind() const override;
  void predistribute(std::uint64_t n, Rng& rng) override;
  void establish_direct(std::span<const NodePair> pairs, SecureLinkGraph& links,
                        Metrics& metrics) override;
  std::vector<EstablishedKey> rekey(NodeId u, std::span<const NodeId> new_neighbors,
                                    SecureLinkGraph& links, Rng& rng, NonceSource& nonces,
                                    Metrics& metrics) override;
  void add_node(NodeId u, std::optional<std::uint32_t> cell, Rng& rng) override;
  std::size_t stored_keys(NodeId u) const override;
  std::unique_ptr<Adversary> capture(std::span<const NodeId> captured) const override;
  std::optional<std::uint64_t> one_direction_count(std::span<const NodePair> pairs) const override;

  const KeyRingSet& rings() const { return rings_; }
  const SetupServer& server() const { return *server_; }
  const std::optional<CellPlan>& cell_plan() const { return plan_; }

 private:
  std::uint64_t ring_size_;
  std::vector<std::uint64_t> cell_sizes_;
  std::unique_ptr<SetupServer> server_;
  std::optional<CellPlan> plan_;
  KeyRingSet rings_;
};

/// EG (q = 1 semantics via eg_establish) and q-composite.
class KeyPoolScheme final : public KeyScheme {
 public:
  /// q == 0 selects plain EG.
  KeyPoolScheme(std::uint64_t pool_size, std::uint64_t ring_size, std::uint64_t q);

  SchemeKind kind() const override;
  void predistribute(std::uint64_t n, Rng& rng) override;
  void establish_direct(std::span<const NodePair> pairs, SecureLinkGraph& links,
                        Metrics& metrics) override;
  void add_node(NodeId u, std::optional<std::uint32_t> cell, Rng& rng) override;
  std::size_t stored_keys(NodeId u) const override;
  std::unique_ptr<Adversary> capture(std::span<const NodeId> captured) const override;

  const PoolRing& ring(NodeId u) const { return rings_.at(u.value); }
  std::optional<PairwiseKey> link_key(NodeId a, NodeId b) const;

 private:
  std::uint64_t pool_size_;
  std::uint64_t ring_size_;
  std::uint64_t q_;
  std::unique_ptr<GlobalKeyPool> pool_;
  std::vector<PoolRing> rings_;
};

class PolyPoolScheme final : public KeyScheme {
 public:
  PolyPoolScheme(std::uint64_t s, std::uint64_t sprime, std::uint32_t t, std::uint64_t prime);

  SchemeKind kind() const override { return SchemeKind::polypool; }
  void predistribute(std::uint64_t n, Rng& rng) override;
  void establish_direct(std::span<const NodePair> pairs, SecureLinkGraph& links,
                        Metrics& metrics) override;
  void add_node(NodeId u, std::optional<std::uint32_t> cell, Rng& rng) override;
  std::size_t stored_keys(NodeId u) const override;
  std::unique_ptr<Adversary> capture(std::span<const NodeId> captured) const override;

  const NodeShares& shares(NodeId u) const { return shares_.at(u.value); }
  const PolyPool& pool() const { return *pool_; }
  /// Nodes holding a share of `poly_id`, ascending.
  std::vector<NodeId> holders(std::uint32_t poly_id) const;

 private:
  std::uint64_t s_;
  std::uint64_t sprime_;
  std::uint32_t t_;
  std::uint64_t prime_;
  std::unique_ptr<PolyPool> pool_;
  std::vector<NodeShares> shares_;
};

std::unique_ptr<KeyScheme> make_scheme(const ExperimentConfig& config);

}  // namespace ibprf
