#include "ibprf/scheme/messages.hpp"

#include <algorithm>

namespace ibprf {

namespace {

template <typename Out>
std::size_t put_id(Out& out, std::size_t at, NodeId id) {
  auto bytes = to_bytes(id);
  std::copy(bytes.begin(), bytes.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
  return at + bytes.size();
}

NodeId get_id(std::span<const std::uint8_t> bytes, std::size_t at) {
  return node_id_from_bytes(bytes.subspan(at).first<kNodeIdSize>());
}

}  // namespace

std::array<std::uint8_t, kClaimSize> encode(const ClaimMessage& msg) {
  std::array<std::uint8_t, kClaimSize> out{};
  out[0] = static_cast<std::uint8_t>(MessageType::claim);
  std::size_t at = put_id(out, 1, msg.sender);
  put_id(out, at, msg.addressee);
  return out;
}

std::array<std::uint8_t, kPathRelaySize> encode(const PathRelayMessage& msg) {
  std::array<std::uint8_t, kPathRelaySize> out{};
  out[0] = static_cast<std::uint8_t>(MessageType::path_relay);
  std::size_t at = put_id(out, 1, msg.hop_sender);
  at = put_id(out, at, msg.hop_receiver);
  at = put_id(out, at, msg.destination);
  std::copy(msg.nonce.begin(), msg.nonce.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
  at += kNonceSize;
  std::copy(msg.sealed.begin(), msg.sealed.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
  return out;
}

std::size_t key_id_list_size(std::size_t count) { return 1 + 8 + 4 + 4 * count; }

std::vector<std::uint8_t> encode(const KeyIdListMessage& msg) {
  std::vector<std::uint8_t> out(key_id_list_size(msg.ids.size()));
  out[0] = static_cast<std::uint8_t>(MessageType::key_id_list);
  std::size_t at = put_id(out, 1, msg.sender);
  auto put32 = [&](std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out[at++] = static_cast<std::uint8_t>(v >> (8 * i));
  };
  put32(static_cast<std::uint32_t>(msg.ids.size()));
  for (std::uint32_t id : msg.ids) put32(id);
  return out;
}

std::optional<ClaimMessage> decode_claim(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kClaimSize || bytes[0] != static_cast<std::uint8_t>(MessageType::claim)) {
    return std::nullopt;
  }
  return ClaimMessage{get_id(bytes, 1), get_id(bytes, 9)};
}

std::optional<PathRelayMessage> decode_path_relay(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kPathRelaySize ||
      bytes[0] != static_cast<std::uint8_t>(MessageType::path_relay)) {
    return std::nullopt;
  }
  PathRelayMessage msg;
  msg.hop_sender = get_id(bytes, 1);
  msg.hop_receiver = get_id(bytes, 9);
  msg.destination = get_id(bytes, 17);
  std::copy_n(bytes.begin() + 25, kNonceSize, msg.nonce.begin());
  std::copy_n(bytes.begin() + 25 + kNonceSize, kSealedKeySize, msg.sealed.begin());
  return msg;
}

std::optional<KeyIdListMessage> decode_key_id_list(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < key_id_list_size(0) ||
      bytes[0] != static_cast<std::uint8_t>(MessageType::key_id_list)) {
    return std::nullopt;
  }
  std::size_t at = 9;
  auto get32 = [&] {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes[at++];
    return v;
  };
  const std::uint32_t count = get32();
  if (bytes.size() != key_id_list_size(count)) return std::nullopt;
  KeyIdListMessage msg{get_id(bytes, 1), {}};
  msg.ids.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) msg.ids.push_back(get32());
  return msg;
}

}  // namespace ibprf
