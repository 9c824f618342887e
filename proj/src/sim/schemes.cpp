#include "ibprf/sim/schemes.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "ibprf/errors.hpp"
#include "ibprf/scheme/messages.hpp"

namespace ibprf {

std::vector<EstablishedKey> KeyScheme::rekey(NodeId u, std::span<const NodeId> new_neighbors,
                                             SecureLinkGraph& links, Rng& rng,
                                             NonceSource& nonces, Metrics& metrics) {
  std::vector<NodeId> fresh(new_neighbors.begin(), new_neighbors.end());
  std::sort(fresh.begin(), fresh.end());
  std::erase_if(fresh, [&](NodeId v) { return v == u || links.has(u, v); });
  std::vector<NodePair> pairs;
  for (NodeId v : fresh) pairs.push_back(NodePair::of(u, v));
  establish_direct(pairs, links, metrics);

  std::vector<EstablishedKey> out;
  std::vector<EstablishedKey> relayed;
  for (NodeId v : fresh) {
    if (const EstablishedKey* k = links.find(u, v)) {
      out.push_back(*k);
    } else if (auto k = path_establish(u, v, links, 2, rng, nonces, metrics)) {
      relayed.push_back(std::move(*k));
    }
  }
  for (EstablishedKey& k : relayed) {
    links.add(k);
    ++metrics.path_keys;
    out.push_back(std::move(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// IBPRF

namespace {

class IbprfAdversary final : public Adversary {
 public:
  IbprfAdversary(const KeyRingSet& rings, std::span<const NodeId> captured) : rings_(rings) {
    for (NodeId c : captured) {
      const KeyRing& ring = rings.at(c);
      captured_.insert(c);
      for (const KeyRingEntry& e : ring.entries()) revealed_keys_.insert(e.key);
    }
  }

  bool derives(const EstablishedKey& link) const override {
    if (revealed_keys_.contains(link.key)) return true;
    if (link.master_side && captured_.contains(*link.master_side)) {
      const NodeId other = link.pair.lo == *link.master_side ? link.pair.hi : link.pair.lo;
      return rings_.at(*link.master_side).prf().derive(other) == link.key;
    }
    return false;
  }

 private:
  const KeyRingSet& rings_;
  std::unordered_set<NodeId> captured_;
  std::set<PairwiseKey> revealed_keys_;
};

}  // namespace

IbprfScheme::IbprfScheme(std::uint64_t ring_size, std::vector<std::uint64_t> cells)
    : ring_size_(ring_size), cell_sizes_(std::move(cells)) {}

SchemeKind IbprfScheme::kind() const {
  return cell_sizes_.empty() ? SchemeKind::ibprf : SchemeKind::ibprf_cells;
}

void IbprfScheme::predistribute(std::uint64_t n, Rng& rng) {
  std::vector<NodeId> pool;
  pool.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) pool.push_back(NodeId{i});
  server_ = std::make_unique<SetupServer>(pool, ring_size_, rng());
  if (cell_sizes_.empty()) {
    rings_ = predistribute_all(*server_);
  } else {
    std::vector<std::size_t> sizes(cell_sizes_.begin(), cell_sizes_.end());
    plan_ = partition_cells(pool, sizes, ring_size_);
    rings_ = predistribute_cellwise(*server_, *plan_);
  }
}

void IbprfScheme::establish_direct(std::span<const NodePair> pairs, SecureLinkGraph& links,
                                   Metrics& metrics) {
  const std::uint64_t before = metrics.direct_keys;
  run_direct_establishment(rings_, pairs, links, metrics);
  metrics.establish_attempts += metrics.direct_keys - before;
}

std::vector<EstablishedKey> IbprfScheme::rekey(NodeId u, std::span<const NodeId> new_neighbors,
                                               SecureLinkGraph& links, Rng& rng,
                                               NonceSource& nonces, Metrics& metrics) {
  const std::uint64_t before = metrics.direct_keys;
  auto out = mobility_rekey(u, new_neighbors, rings_, links, rng, nonces, metrics);
  metrics.establish_attempts += metrics.direct_keys - before;
  return out;
}

void IbprfScheme::add_node(NodeId u, std::optional<std::uint32_t> cell, Rng&) {
  if (!server_) throw IntegrityError("add_node before pre-distribution");
  if (plan_) {
    if (!cell) throw SetupError("improved scheme needs the new node's cell");
    const auto& members = plan_->cells.at(*cell).members;
    std::vector<NodeId> candidates(members.begin(), members.end());
    rings_.insert(server_->add_node(u, std::span<const NodeId>(candidates)));
    plan_->add_member(*cell, u);
  } else {
    rings_.insert(server_->add_node(u));
  }
}

std::size_t IbprfScheme::stored_keys(NodeId u) const { return rings_.at(u).stored_keys(); }

std::unique_ptr<Adversary> IbprfScheme::capture(std::span<const NodeId> captured) const {
  return std::make_unique<IbprfAdversary>(rings_, captured);
}

std::optional<std::uint64_t> IbprfScheme::one_direction_count(
    std::span<const NodePair> pairs) const {
  std::uint64_t count = 0;
  for (const NodePair& p : pairs) {
    if (rings_.at(p.hi).contains(p.lo)) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// EG / q-composite

namespace {

class KeyPoolAdversary final : public Adversary {
 public:
  KeyPoolAdversary(const KeyPoolScheme& scheme, std::uint64_t q,
                   std::span<const NodeId> captured)
      : scheme_(scheme), q_(q) {
    for (NodeId c : captured) {
      for (const PoolKey& k : scheme.ring(c).entries) revealed_.emplace(k.id, k.key);
    }
  }

  bool derives(const EstablishedKey& link) const override {
    // Shared ids travel in the clear during discovery, so the adversary knows them.
    const auto shared = shared_key_ids(scheme_.ring(link.pair.lo), scheme_.ring(link.pair.hi));
    if (shared.empty()) return false;
    if (q_ == 0) {
      auto it = revealed_.find(shared.front());
      return it != revealed_.end() && it->second == link.key;
    }
    std::vector<PairwiseKey> keys;
    for (KeyId id : shared) {
      auto it = revealed_.find(id);
      if (it == revealed_.end()) return false;
      keys.push_back(it->second);
    }
    return qcomposite_link_key(keys) == link.key;
  }

 private:
  const KeyPoolScheme& scheme_;
  std::uint64_t q_;
  std::map<KeyId, PairwiseKey> revealed_;
};

}  // namespace

KeyPoolScheme::KeyPoolScheme(std::uint64_t pool_size, std::uint64_t ring_size, std::uint64_t q)
    : pool_size_(pool_size), ring_size_(ring_size), q_(q) {}

SchemeKind KeyPoolScheme::kind() const {
  return q_ == 0 ? SchemeKind::eg : SchemeKind::qcomposite;
}

void KeyPoolScheme::predistribute(std::uint64_t n, Rng& rng) {
  pool_ = std::make_unique<GlobalKeyPool>(pool_size_, rng);
  rings_.clear();
  rings_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    rings_.push_back(eg_predistribute(*pool_, NodeId{i}, ring_size_, rng));
  }
}

std::optional<PairwiseKey> KeyPoolScheme::link_key(NodeId a, NodeId b) const {
  return q_ == 0 ? eg_establish(ring(a), ring(b)) : qcomposite_establish(ring(a), ring(b), q_);
}

void KeyPoolScheme::establish_direct(std::span<const NodePair> pairs, SecureLinkGraph& links,
                                     Metrics& metrics) {
  for (const NodePair& p : pairs) {
    if (links.has(p.lo, p.hi)) continue;
    ++metrics.establish_attempts;
    for (NodeId side : {p.lo, p.hi}) {
      const KeyIdListMessage msg{side, ring(side).ids()};
      metrics.record_message(encode(msg).size());
      metrics.ids_sent += msg.ids.size();
    }
    if (auto key = link_key(p.lo, p.hi)) {
      links.add(EstablishedKey{p, *key, Provenance::direct, 1, std::nullopt, {}});
      ++metrics.direct_keys;
    }
  }
}

void KeyPoolScheme::add_node(NodeId u, std::optional<std::uint32_t>, Rng& rng) {
  if (u.value != rings_.size()) throw SetupError("new node ids must be appended in order");
  rings_.push_back(eg_predistribute(*pool_, u, ring_size_, rng));
}

std::size_t KeyPoolScheme::stored_keys(NodeId u) const { return ring(u).entries.size(); }

std::unique_ptr<Adversary> KeyPoolScheme::capture(std::span<const NodeId> captured) const {
  return std::make_unique<KeyPoolAdversary>(*this, q_, captured);
}

// ---------------------------------------------------------------------------
// Polynomial pool

namespace {

class PolyPoolAdversary final : public Adversary {
 public:
  PolyPoolAdversary(const PolyPoolScheme& scheme, std::span<const NodeId> captured)
      : scheme_(scheme) {
    std::map<std::uint32_t, std::vector<PolyShare>> by_poly;
    for (NodeId c : captured) {
      for (const PolyShare& s : scheme.shares(c).shares) by_poly[s.poly_id].push_back(s);
    }
    for (auto& [pid, shares] : by_poly) {
      if (auto f = recover_polynomial(shares, scheme.pool().degree(), scheme.pool().field())) {
        recovered_.emplace(pid, std::move(*f));
      }
    }
  }

  bool derives(const EstablishedKey& link) const override {
    const auto pid = common_poly(scheme_.shares(link.pair.lo), scheme_.shares(link.pair.hi));
    if (!pid) return false;
    auto it = recovered_.find(*pid);
    if (it == recovered_.end()) return false;
    return poly_link_key(it->second.evaluate(link.pair.lo.value, link.pair.hi.value)) == link.key;
  }

 private:
  const PolyPoolScheme& scheme_;
  std::map<std::uint32_t, SymmetricBivariatePoly> recovered_;
};

}  // namespace

PolyPoolScheme::PolyPoolScheme(std::uint64_t s, std::uint64_t sprime, std::uint32_t t,
                               std::uint64_t prime)
    : s_(s), sprime_(sprime), t_(t), prime_(prime) {}

void PolyPoolScheme::predistribute(std::uint64_t n, Rng& rng) {
  pool_ = std::make_unique<PolyPool>(s_, t_, prime_, rng);
  shares_.clear();
  shares_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) shares_.push_back(pool_->assign(NodeId{i}, sprime_, rng));
}

void PolyPoolScheme::establish_direct(std::span<const NodePair> pairs, SecureLinkGraph& links,
                                      Metrics& metrics) {
  for (const NodePair& p : pairs) {
    if (links.has(p.lo, p.hi)) continue;
    ++metrics.establish_attempts;
    for (NodeId side : {p.lo, p.hi}) {
      const KeyIdListMessage msg{side, shares(side).poly_ids()};
      metrics.record_message(encode(msg).size());
      metrics.ids_sent += msg.ids.size();
    }
    if (auto key = poly_establish(shares(p.lo), shares(p.hi), pool_->field())) {
      links.add(EstablishedKey{p, *key, Provenance::direct, 1, std::nullopt, {}});
      ++metrics.direct_keys;
    }
  }
}

void PolyPoolScheme::add_node(NodeId u, std::optional<std::uint32_t>, Rng& rng) {
  if (u.value != shares_.size()) throw SetupError("new node ids must be appended in order");
  shares_.push_back(pool_->assign(u, sprime_, rng));
}

std::size_t PolyPoolScheme::stored_keys(NodeId u) const { return shares(u).stored_elements(); }

std::unique_ptr<Adversary> PolyPoolScheme::capture(std::span<const NodeId> captured) const {
  return std::make_unique<PolyPoolAdversary>(*this, captured);
}

std::vector<NodeId> PolyPoolScheme::holders(std::uint32_t poly_id) const {
  std::vector<NodeId> out;
  for (const NodeShares& ns : shares_) {
    if (ns.find(poly_id) != nullptr) out.push_back(ns.owner);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::unique_ptr<KeyScheme> make_scheme(const ExperimentConfig& config) {
  switch (config.scheme) {
    case SchemeKind::ibprf:
      return std::make_unique<IbprfScheme>(config.m, std::vector<std::uint64_t>{});
    case SchemeKind::ibprf_cells:
      return std::make_unique<IbprfScheme>(config.m, config.resolved_cells());
    case SchemeKind::eg:
      return std::make_unique<KeyPoolScheme>(config.pool_size, config.m, 0);
    case SchemeKind::qcomposite:
      return std::make_unique<KeyPoolScheme>(config.pool_size, config.m, config.q);
    case SchemeKind::polypool:
      return std::make_unique<PolyPoolScheme>(config.s, config.sprime,
                                              static_cast<std::uint32_t>(config.t), config.prime);
  }
  throw ConfigError("unknown scheme");
}

}  // namespace ibprf
