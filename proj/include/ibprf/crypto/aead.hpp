#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ibprf/crypto/types.hpp"

namespace ibprf {

inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;

using Nonce = std::array<std::uint8_t, kNonceSize>;

/// AES-128-GCM. Output is ciphertext || 16-byte tag.
std::vector<std::uint8_t> seal(const PairwiseKey& key, const Nonce& nonce,
                               std::span<const std::uint8_t> plaintext);

/// Returns std::nullopt when the tag does not verify.
std::optional<std::vector<std::uint8_t>> open(const PairwiseKey& key, const Nonce& nonce,
                                              std::span<const std::uint8_t> sealed);

/// Big-endian counter in the low 8 bytes of the nonce.
Nonce nonce_from_counter(std::uint64_t counter);

/// Per-run nonce counter. Throws IntegrityError if a nonce would repeat.
class NonceSource {
 public:
  Nonce next();
  std::uint64_t issued() const { return next_; }

 private:
  std::uint64_t next_ = 0;
};

}  // namespace ibprf
