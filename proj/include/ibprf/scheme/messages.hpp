#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ibprf/crypto/aead.hpp"
#include "ibprf/crypto/types.hpp"

namespace ibprf {

enum class MessageType : std::uint8_t { claim = 0x01, path_relay = 0x02, key_id_list = 0x03 };

// Claim = [type 0x01][sender 8][addressee 8]. Carries ids only, never key bytes.
inline constexpr std::size_t kClaimSize = 1 + 8 + 8;
// PathRelay = [type 0x02][hop sender 8][hop receiver 8][destination 8][nonce 12][sealed 32].
inline constexpr std::size_t kSealedKeySize = kKeySize + kTagSize;
inline constexpr std::size_t kPathRelaySize = 1 + 8 + 8 + 8 + kNonceSize + kSealedKeySize;

struct ClaimMessage {
  NodeId sender;
  NodeId addressee;

  friend bool operator==(const ClaimMessage&, const ClaimMessage&) = default;
};

struct PathRelayMessage {
  NodeId hop_sender;
  NodeId hop_receiver;
  NodeId destination;
  Nonce nonce{};
  std::array<std::uint8_t, kSealedKeySize> sealed{};

  friend bool operator==(const PathRelayMessage&, const PathRelayMessage&) = default;
};

/// Cleartext key-id (or polynomial-id) list a pool-based node sends during shared-key
/// discovery: [type 0x03][sender 8][count 4][ids 4*count].
struct KeyIdListMessage {
  NodeId sender;
  std::vector<std::uint32_t> ids;

  friend bool operator==(const KeyIdListMessage&, const KeyIdListMessage&) = default;
};

std::array<std::uint8_t, kClaimSize> encode(const ClaimMessage& msg);
std::array<std::uint8_t, kPathRelaySize> encode(const PathRelayMessage& msg);
std::vector<std::uint8_t> encode(const KeyIdListMessage& msg);

std::optional<ClaimMessage> decode_claim(std::span<const std::uint8_t> bytes);
std::optional<PathRelayMessage> decode_path_relay(std::span<const std::uint8_t> bytes);
std::optional<KeyIdListMessage> decode_key_id_list(std::span<const std::uint8_t> bytes);

std::size_t key_id_list_size(std::size_t count);

}  // namespace ibprf
