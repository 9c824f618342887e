#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ibprf {

/// Node identity. Serialized as 8 bytes big-endian wherever it enters a PRF or a message.
struct NodeId {
  std::uint64_t value = 0;

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

inline constexpr std::size_t kNodeIdSize = 8;
inline constexpr std::size_t kKeySize = 16;

std::array<std::uint8_t, kNodeIdSize> to_bytes(NodeId id);
NodeId node_id_from_bytes(std::span<const std::uint8_t, kNodeIdSize> bytes);

template <typename Tag>
struct Key128 {
  std::array<std::uint8_t, kKeySize> bytes{};

  friend bool operator==(const Key128&, const Key128&) = default;
  friend auto operator<=>(const Key128&, const Key128&) = default;
};

struct MasterKeyTag {};
struct PairwiseKeyTag {};

/// Secret shared only between one node and the setup server.
using MasterKey = Key128<MasterKeyTag>;
/// Link key held by the two endpoints of a secure link.
using PairwiseKey = Key128<PairwiseKeyTag>;

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Throws std::invalid_argument on odd length or non-hex characters.
std::vector<std::uint8_t> from_hex(std::string_view hex);

template <typename Tag>
std::string to_hex(const Key128<Tag>& key) {
  return to_hex(std::span<const std::uint8_t>(key.bytes));
}

template <typename KeyT>
KeyT key_from_hex(std::string_view hex) {
  auto raw = from_hex(hex);
  if (raw.size() != kKeySize) throw std::invalid_argument("key must be 16 bytes");
  KeyT key;
  std::copy(raw.begin(), raw.end(), key.bytes.begin());
  return key;
}

/// Unordered pair of node ids, stored with lo < hi.
struct NodePair {
  NodeId lo;
  NodeId hi;

  static NodePair of(NodeId a, NodeId b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }
  friend constexpr auto operator<=>(const NodePair&, const NodePair&) = default;
};

}  // namespace ibprf

template <>
struct std::hash<ibprf::NodeId> {
  std::size_t operator()(const ibprf::NodeId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};

template <>
struct std::hash<ibprf::NodePair> {
  std::size_t operator()(const ibprf::NodePair& p) const noexcept {
    std::uint64_t h = p.lo.value * 0x9e3779b97f4a7c15ULL;
    h ^= p.hi.value + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};
