#include "ibprf/core/link_graph.hpp"

#include <algorithm>

#include "ibprf/errors.hpp"

namespace ibprf {

void SecureLinkGraph::add(EstablishedKey key) {
  if (key.pair.lo == key.pair.hi) throw IntegrityError("secure link to self");
  const NodePair pair = key.pair;
  auto [it, inserted] = edges_.emplace(pair, std::move(key));
  if (!inserted) throw IntegrityError("pair already holds a key");
  adjacency_[pair.lo].push_back(pair.hi);
  adjacency_[pair.hi].push_back(pair.lo);
}

bool SecureLinkGraph::has(NodeId a, NodeId b) const {
  return edges_.contains(NodePair::of(a, b));
}

const EstablishedKey* SecureLinkGraph::find(NodeId a, NodeId b) const {
  auto it = edges_.find(NodePair::of(a, b));
  return it == edges_.end() ? nullptr : &it->second;
}

std::vector<NodeId> SecureLinkGraph::neighbors(NodeId u) const {
  auto it = adjacency_.find(u);
  if (it == adjacency_.end()) return {};
  std::vector<NodeId> out = it->second;
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t SecureLinkGraph::degree(NodeId u) const {
  auto it = adjacency_.find(u);
  return it == adjacency_.end() ? 0 : it->second.size();
}

std::vector<const EstablishedKey*> SecureLinkGraph::edges() const {
  std::vector<const EstablishedKey*> out;
  out.reserve(edges_.size());
  for (const auto& [pair, key] : edges_) out.push_back(&key);
  std::sort(out.begin(), out.end(),
            [](const EstablishedKey* a, const EstablishedKey* b) { return a->pair < b->pair; });
  return out;
}

}  // namespace ibprf
