#include "ibprf/scheme/ibprf.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ibprf/errors.hpp"

namespace ibprf {

// ---------------------------------------------------------------------------
// KeyRing

KeyRing::KeyRing(NodeId owner, const MasterKey& master, std::size_t capacity)
    : owner_(owner), master_(master), prf_(master), capacity_(capacity) {
  entries_.reserve(capacity);
}

void KeyRing::add(KeyRingEntry entry) {
  if (entry.peer == owner_) throw IntegrityError("key ring entry for the owner itself");
  if (entries_.size() >= capacity_) throw IntegrityError("key ring capacity exceeded");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), entry.peer,
                             [](const KeyRingEntry& e, NodeId id) { return e.peer < id; });
  if (it != entries_.end() && it->peer == entry.peer) {
    throw IntegrityError("duplicate peer in key ring");
  }
  entries_.insert(it, entry);
}

const KeyRingEntry* KeyRing::find(NodeId peer) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), peer,
                             [](const KeyRingEntry& e, NodeId id) { return e.peer < id; });
  return it != entries_.end() && it->peer == peer ? &*it : nullptr;
}

// ---------------------------------------------------------------------------
// KeyRingSet

void KeyRingSet::insert(KeyRing ring) {
  const NodeId owner = ring.owner();
  auto [it, inserted] = rings_.emplace(owner, std::move(ring));
  if (!inserted) throw SetupError("key ring for node " + std::to_string(owner.value) +
                                  " already exists");
}

const KeyRing* KeyRingSet::find(NodeId owner) const {
  auto it = rings_.find(owner);
  return it == rings_.end() ? nullptr : &it->second;
}

const KeyRing& KeyRingSet::at(NodeId owner) const {
  if (const KeyRing* ring = find(owner)) return *ring;
  throw SetupError("no key ring for node " + std::to_string(owner.value));
}

std::vector<NodeId> KeyRingSet::owners() const {
  std::vector<NodeId> out;
  out.reserve(rings_.size());
  for (const auto& [id, ring] : rings_) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// SetupServer

SetupServer::SetupServer(std::vector<NodeId> pool, std::size_t ring_size, std::uint64_t seed)
    : pool_(std::move(pool)), ring_size_(ring_size), rng_(seed) {
  if (ring_size_ == 0) throw ConfigError("ring size m must be positive");
  if (ring_size_ >= pool_.size()) {
    throw ConfigError("ring size m = " + std::to_string(ring_size_) +
                      " must be smaller than pool size n = " + std::to_string(pool_.size()));
  }
  registry_.reserve(pool_.size());
  for (NodeId u : pool_) {
    MasterKey mk = random_master_key(rng_);
    auto [it, inserted] = registry_.emplace(u, Record{mk, Prf(mk)});
    if (!inserted) throw SetupError("duplicate node id " + std::to_string(u.value));
  }
}

const MasterKey& SetupServer::master_of(NodeId u) const {
  auto it = registry_.find(u);
  if (it == registry_.end()) throw SetupError("unknown node id " + std::to_string(u.value));
  return it->second.master;
}

const Prf& SetupServer::prf_of(NodeId u) const {
  auto it = registry_.find(u);
  if (it == registry_.end()) throw SetupError("unknown node id " + std::to_string(u.value));
  return it->second.prf;
}

KeyRing SetupServer::make_ring(NodeId u, std::span<const NodeId> candidates) {
  auto self = std::find(candidates.begin(), candidates.end(), u);
  const bool self_present = self != candidates.end();
  const std::size_t self_pos = static_cast<std::size_t>(self - candidates.begin());
  const std::size_t available = candidates.size() - (self_present ? 1 : 0);
  if (ring_size_ > available) {
    throw ConfigError("ring size m = " + std::to_string(ring_size_) + " exceeds the " +
                      std::to_string(available) + " candidate peers of node " +
                      std::to_string(u.value));
  }
  KeyRing ring(u, master_of(u), ring_size_);
  for (std::uint64_t idx : sample_without_replacement(rng_, available, ring_size_)) {
    std::size_t pos = static_cast<std::size_t>(idx);
    if (self_present && pos >= self_pos) ++pos;
    const NodeId peer = candidates[pos];
    ring.add(KeyRingEntry{peer, prf_of(peer).derive(u)});
  }
  return ring;
}

KeyRing SetupServer::predistribute(NodeId u) {
  if (!contains(u)) throw SetupError("unknown node id " + std::to_string(u.value));
  return make_ring(u, pool_);
}

KeyRing SetupServer::predistribute_within(NodeId u, std::span<const NodeId> candidates) {
  if (!contains(u)) throw SetupError("unknown node id " + std::to_string(u.value));
  return make_ring(u, candidates);
}

KeyRing SetupServer::add_node(NodeId u_new, std::optional<std::span<const NodeId>> candidates) {
  if (contains(u_new)) throw SetupError("node id " + std::to_string(u_new.value) +
                                        " is already registered");
  MasterKey mk = random_master_key(rng_);
  registry_.emplace(u_new, Record{mk, Prf(mk)});
  KeyRing ring = [&] {
    try {
      return make_ring(u_new, candidates ? *candidates : std::span<const NodeId>(pool_));
    } catch (...) {
      registry_.erase(u_new);
      throw;
    }
  }();
  pool_.push_back(u_new);
  return ring;
}

KeyRingSet predistribute_all(SetupServer& server) {
  KeyRingSet rings;
  const std::vector<NodeId> pool(server.pool().begin(), server.pool().end());
  for (NodeId u : pool) rings.insert(server.predistribute(u));
  return rings;
}

// ---------------------------------------------------------------------------
// Direct key establishment

std::vector<ClaimMessage> plan_direct_establishment(const KeyRingSet& rings,
                                                    std::span<const NodePair> physical_pairs) {
  std::vector<NodePair> sorted;
  std::span<const NodePair> pairs = physical_pairs;
  if (!std::is_sorted(pairs.begin(), pairs.end())) {
    sorted.assign(pairs.begin(), pairs.end());
    std::sort(sorted.begin(), sorted.end());
    pairs = sorted;
  }

  // Pairs sharing a smaller endpoint form one contiguous block, sorted by the larger one.
  struct Block {
    NodeId lo;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0 && pairs[i] == pairs[i - 1]) continue;
    if (blocks.empty() || blocks.back().lo != pairs[i].lo) blocks.push_back({pairs[i].lo, i, i});
    blocks.back().end = i + 1;
  }
  auto locate = [&](NodeId lo, NodeId hi) -> std::optional<std::size_t> {
    auto blk = std::lower_bound(blocks.begin(), blocks.end(), lo,
                                [](const Block& b, NodeId id) { return b.lo < id; });
    if (blk == blocks.end() || blk->lo != lo) return std::nullopt;
    auto first = pairs.begin() + static_cast<std::ptrdiff_t>(blk->begin);
    auto last = pairs.begin() + static_cast<std::ptrdiff_t>(blk->end);
    auto it = std::lower_bound(first, last, hi,
                               [](const NodePair& p, NodeId id) { return p.hi < id; });
    if (it == last || it->hi != hi) return std::nullopt;
    return static_cast<std::size_t>(it - pairs.begin());
  };

  // 1 = smaller id claims (its ring holds the larger), 2 = larger id claims.
  std::vector<std::uint8_t> claimant(pairs.size(), 0);
  for (const Block& blk : blocks) {
    const KeyRing* ring = rings.find(blk.lo);
    if (ring == nullptr) continue;
    const auto entries = ring->entries();
    auto e = entries.begin();
    for (std::size_t i = blk.begin; i < blk.end && e != entries.end(); ++i) {
      while (e != entries.end() && e->peer < pairs[i].hi) ++e;
      if (e != entries.end() && e->peer == pairs[i].hi) claimant[i] = 1;
    }
  }
  for (NodeId v : rings.owners()) {
    for (const KeyRingEntry& entry : rings.at(v).entries()) {
      if (!(entry.peer < v)) break;
      if (auto i = locate(entry.peer, v); i && claimant[*i] == 0) claimant[*i] = 2;
    }
  }

  std::vector<ClaimMessage> claims;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0 && pairs[i] == pairs[i - 1]) continue;
    if (claimant[i] == 1) claims.push_back(ClaimMessage{pairs[i].lo, pairs[i].hi});
    if (claimant[i] == 2) claims.push_back(ClaimMessage{pairs[i].hi, pairs[i].lo});
  }
  return claims;
}

EstablishedKey respond_to_claim(const KeyRing& responder, const ClaimMessage& claim,
                                Metrics& metrics) {
  if (claim.addressee != responder.owner()) {
    throw IntegrityError("claim delivered to the wrong node");
  }
  metrics.record_message(kClaimSize);
  ++metrics.prf_ops;
  EstablishedKey out;
  out.pair = NodePair::of(claim.sender, claim.addressee);
  out.key = responder.prf().derive(claim.sender);
  out.provenance = Provenance::direct;
  out.hops = 1;
  out.master_side = responder.owner();
  return out;
}

void verify_claim(const KeyRing& claimant, const EstablishedKey& established) {
  if (!established.master_side) throw IntegrityError("direct key without master side");
  const KeyRingEntry* entry = claimant.find(*established.master_side);
  if (entry == nullptr) {
    throw IntegrityError("node " + std::to_string(claimant.owner().value) +
                         " claimed a key it does not hold");
  }
  if (entry->key != established.key) {
    throw IntegrityError("endpoints disagree on a direct key");
  }
}

std::size_t run_direct_establishment(const KeyRingSet& rings,
                                     std::span<const NodePair> physical_pairs,
                                     SecureLinkGraph& links, Metrics& metrics) {
  std::size_t added = 0;
  const auto planned_claims = plan_direct_establishment(rings, physical_pairs);
  links.reserve(links.size() + planned_claims.size());
  for (const ClaimMessage& planned : planned_claims) {
    if (links.has(planned.sender, planned.addressee)) continue;
    const auto wire = encode(planned);
    const auto claim = decode_claim(wire);
    if (!claim) throw IntegrityError("claim failed to round-trip");
    EstablishedKey key = respond_to_claim(rings.at(claim->addressee), *claim, metrics);
    verify_claim(rings.at(claim->sender), key);
    links.add(std::move(key));
    ++metrics.direct_keys;
    ++added;
  }
  return added;
}

// ---------------------------------------------------------------------------
// Path key establishment

std::optional<std::vector<NodeId>> find_secure_path(const SecureLinkGraph& links, NodeId u,
                                                    NodeId v, std::uint32_t h_max) {
  if (u == v || h_max == 0) return std::nullopt;
  std::unordered_map<NodeId, NodeId> parent;
  std::unordered_map<NodeId, std::uint32_t> depth;
  std::deque<NodeId> queue{u};
  depth[u] = 0;
  while (!queue.empty()) {
    const NodeId x = queue.front();
    queue.pop_front();
    const std::uint32_t dx = depth[x];
    if (dx >= h_max) continue;
    for (NodeId y : links.neighbors(x)) {
      if (depth.contains(y)) continue;
      depth[y] = dx + 1;
      parent[y] = x;
      if (y == v) {
        std::vector<NodeId> route{v};
        for (NodeId at = v; at != u;) {
          at = parent.at(at);
          route.push_back(at);
        }
        std::reverse(route.begin(), route.end());
        return route;
      }
      queue.push_back(y);
    }
  }
  return std::nullopt;
}

std::optional<EstablishedKey> path_establish(NodeId u, NodeId v, const SecureLinkGraph& links,
                                             std::uint32_t h_max, Rng& rng,
                                             NonceSource& nonces, Metrics& metrics,
                                             const RelayTap& tap) {
  if (u == v) throw std::invalid_argument("path establishment needs two distinct nodes");
  if (links.has(u, v)) throw std::invalid_argument("pair already shares a key");
  auto route = find_secure_path(links, u, v, h_max);
  if (!route) return std::nullopt;

  const PairwiseKey fresh = random_key(rng);
  std::vector<std::uint8_t> carried(fresh.bytes.begin(), fresh.bytes.end());
  for (std::size_t i = 0; i + 1 < route->size(); ++i) {
    const NodeId from = (*route)[i];
    const NodeId to = (*route)[i + 1];
    const EstablishedKey* hop = links.find(from, to);
    if (hop == nullptr) throw IntegrityError("route uses a missing secure link");

    PathRelayMessage msg;
    msg.hop_sender = from;
    msg.hop_receiver = to;
    msg.destination = v;
    msg.nonce = nonces.next();
    const auto sealed = seal(hop->key, msg.nonce, carried);
    if (sealed.size() != kSealedKeySize) throw IntegrityError("unexpected sealed size");
    std::copy(sealed.begin(), sealed.end(), msg.sealed.begin());
    if (tap) tap(msg);

    const auto wire = encode(msg);
    metrics.record_message(kPathRelaySize);
    const auto delivered = decode_path_relay(wire);
    if (!delivered || delivered->hop_receiver != to) {
      throw ProtocolError("relay message misdelivered");
    }
    auto opened = open(hop->key, delivered->nonce, delivered->sealed);
    if (!opened) {
      throw ProtocolError("relay from node " + std::to_string(from.value) + " to node " +
                          std::to_string(to.value) + " failed authentication");
    }
    carried = std::move(*opened);
  }
  if (!std::equal(carried.begin(), carried.end(), fresh.bytes.begin(), fresh.bytes.end())) {
    throw ProtocolError("relayed key differs from the originator's");
  }

  EstablishedKey out;
  out.pair = NodePair::of(u, v);
  out.key = fresh;
  out.provenance = Provenance::path;
  out.hops = static_cast<std::uint32_t>(route->size() - 1);
  out.route = std::move(*route);
  return out;
}

std::vector<EstablishedKey> mobility_rekey(NodeId u, std::span<const NodeId> new_neighbors,
                                           const KeyRingSet& rings, SecureLinkGraph& links,
                                           Rng& rng, NonceSource& nonces, Metrics& metrics) {
  std::vector<NodeId> fresh(new_neighbors.begin(), new_neighbors.end());
  std::sort(fresh.begin(), fresh.end());
  fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
  std::erase_if(fresh, [&](NodeId v) { return v == u || links.has(u, v); });

  std::vector<NodePair> pairs;
  pairs.reserve(fresh.size());
  for (NodeId v : fresh) pairs.push_back(NodePair::of(u, v));

  std::vector<EstablishedKey> out;
  run_direct_establishment(rings, pairs, links, metrics);
  for (NodeId v : fresh) {
    if (const EstablishedKey* k = links.find(u, v)) out.push_back(*k);
  }

  std::vector<EstablishedKey> relayed;
  for (NodeId v : fresh) {
    if (links.has(u, v)) continue;
    if (auto k = path_establish(u, v, links, 2, rng, nonces, metrics)) {
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
// Cells

std::uint32_t CellPlan::cell_of(NodeId u) const {
  auto it = index_.find(u);
  if (it == index_.end()) throw SetupError("node " + std::to_string(u.value) + " is in no cell");
  return it->second;
}

void CellPlan::add_member(std::uint32_t cell, NodeId u) {
  if (cell >= cells.size()) throw SetupError("no such cell");
  if (!index_.emplace(u, cell).second) throw SetupError("node already assigned to a cell");
  cells[cell].members.push_back(u);
}

CellPlan partition_cells(std::span<const NodeId> pool, std::span<const std::size_t> sizes,
                         std::size_t ring_size) {
  if (sizes.empty()) throw ConfigError("cell count c must be positive");
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (total != pool.size()) {
    throw ConfigError("cell sizes sum to " + std::to_string(total) + " but n = " +
                      std::to_string(pool.size()));
  }
  CellPlan plan;
  std::size_t at = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] <= ring_size) {
      throw ConfigError("cell " + std::to_string(i) + " has n_i = " + std::to_string(sizes[i]) +
                        " nodes, needs more than m = " + std::to_string(ring_size));
    }
    Cell cell{static_cast<std::uint32_t>(i), {}};
    plan.cells.push_back(std::move(cell));
    for (std::size_t k = 0; k < sizes[i]; ++k) {
      plan.add_member(static_cast<std::uint32_t>(i), pool[at++]);
    }
  }
  return plan;
}

KeyRingSet predistribute_cellwise(SetupServer& server, const CellPlan& plan) {
  KeyRingSet rings;
  for (const Cell& cell : plan.cells) {
    for (NodeId u : cell.members) rings.insert(server.predistribute_within(u, cell.members));
  }
  return rings;
}

}  // namespace ibprf
