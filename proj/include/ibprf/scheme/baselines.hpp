#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ibprf/crypto/random.hpp"
#include "ibprf/crypto/types.hpp"

namespace ibprf {

using KeyId = std::uint32_t;

/// Fixed domain-separation masters used to map shared material onto link keys.
MasterKey qcomposite_domain_master();
MasterKey polypool_domain_master();

/// M random keys with ids 0..M-1.
class GlobalKeyPool {
 public:
  GlobalKeyPool(std::size_t size, Rng& rng);

  std::size_t size() const { return keys_.size(); }
  const PairwiseKey& key(KeyId id) const { return keys_.at(id); }

 private:
  std::vector<PairwiseKey> keys_;
};

struct PoolKey {
  KeyId id = 0;
  PairwiseKey key;
};

/// m pool keys drawn without replacement, sorted by key id.
struct PoolRing {
  NodeId owner;
  std::vector<PoolKey> entries;

  std::vector<KeyId> ids() const;
  const PoolKey* find(KeyId id) const;
};

/// Throws ConfigError if m > M.
PoolRing eg_predistribute(const GlobalKeyPool& pool, NodeId owner, std::size_t ring_size,
                          Rng& rng);

/// Key ids present in both rings, ascending.
std::vector<KeyId> shared_key_ids(const PoolRing& a, const PoolRing& b);

/// Link key = the shared pool key with the smallest id.
std::optional<PairwiseKey> eg_establish(const PoolRing& a, const PoolRing& b);

/// Needs at least q shared keys; link key = PRF over the shared keys in id order.
/// Throws ConfigError if q == 0.
std::optional<PairwiseKey> qcomposite_establish(const PoolRing& a, const PoolRing& b,
                                                std::size_t q);

/// Link key of the q-composite scheme from the shared keys, ordered by key id.
PairwiseKey qcomposite_link_key(std::span<const PairwiseKey> shared_keys);

}  // namespace ibprf
