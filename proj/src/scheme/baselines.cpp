#include "ibprf/scheme/baselines.hpp"

#include <algorithm>
#include <string>

#include "ibprf/crypto/prf.hpp"
#include "ibprf/errors.hpp"

namespace ibprf {

namespace {

MasterKey domain_master(std::string_view label) {
  MasterKey mk;
  std::copy_n(label.begin(), std::min(label.size(), kKeySize), mk.bytes.begin());
  return mk;
}

}  // namespace

MasterKey qcomposite_domain_master() { return domain_master("ibprf/qcomposite"); }
MasterKey polypool_domain_master() { return domain_master("ibprf/polypool"); }

GlobalKeyPool::GlobalKeyPool(std::size_t size, Rng& rng) {
  if (size == 0) throw ConfigError("key pool size M must be positive");
  keys_.reserve(size);
  for (std::size_t i = 0; i < size; ++i) keys_.push_back(random_key(rng));
}

std::vector<KeyId> PoolRing::ids() const {
  std::vector<KeyId> out;
  out.reserve(entries.size());
  for (const PoolKey& e : entries) out.push_back(e.id);
  return out;
}

const PoolKey* PoolRing::find(KeyId id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), id,
                             [](const PoolKey& e, KeyId k) { return e.id < k; });
  return it != entries.end() && it->id == id ? &*it : nullptr;
}

PoolRing eg_predistribute(const GlobalKeyPool& pool, NodeId owner, std::size_t ring_size,
                          Rng& rng) {
  if (ring_size > pool.size()) {
    throw ConfigError("ring size m = " + std::to_string(ring_size) +
                      " exceeds key pool size M = " + std::to_string(pool.size()));
  }
  PoolRing ring{owner, {}};
  ring.entries.reserve(ring_size);
  for (std::uint64_t id : sample_without_replacement(rng, pool.size(), ring_size)) {
    const auto kid = static_cast<KeyId>(id);
    ring.entries.push_back(PoolKey{kid, pool.key(kid)});
  }
  return ring;
}

std::vector<KeyId> shared_key_ids(const PoolRing& a, const PoolRing& b) {
  std::vector<KeyId> out;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->id < ib->id) {
      ++ia;
    } else if (ib->id < ia->id) {
      ++ib;
    } else {
      out.push_back(ia->id);
      ++ia;
      ++ib;
    }
  }
  return out;
}

std::optional<PairwiseKey> eg_establish(const PoolRing& a, const PoolRing& b) {
  const auto shared = shared_key_ids(a, b);
  if (shared.empty()) return std::nullopt;
  return a.find(shared.front())->key;
}

PairwiseKey qcomposite_link_key(std::span<const PairwiseKey> shared_keys) {
  std::vector<std::uint8_t> message;
  message.reserve(shared_keys.size() * kKeySize);
  for (const PairwiseKey& k : shared_keys) {
    message.insert(message.end(), k.bytes.begin(), k.bytes.end());
  }
  return Prf(qcomposite_domain_master()).derive(message);
}

std::optional<PairwiseKey> qcomposite_establish(const PoolRing& a, const PoolRing& b,
                                                std::size_t q) {
  if (q == 0) throw ConfigError("q must be at least 1");
  const auto shared = shared_key_ids(a, b);
  if (shared.size() < q) return std::nullopt;
  std::vector<PairwiseKey> keys;
  keys.reserve(shared.size());
  for (KeyId id : shared) keys.push_back(a.find(id)->key);
  return qcomposite_link_key(keys);
}

}  // namespace ibprf
