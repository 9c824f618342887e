#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "ibprf/crypto/types.hpp"

typedef struct evp_md_ctx_st EVP_MD_CTX;

namespace ibprf {

/// Keyed PRF: HMAC-SHA-256 truncated to 128 bits.
///
/// The inner and outer padded-key states are hashed once at construction, so each
/// evaluation costs two SHA-256 compressions. Evaluation is const and thread-safe.
class Prf {
 public:
  explicit Prf(std::span<const std::uint8_t> key);
  explicit Prf(const MasterKey& key) : Prf(std::span<const std::uint8_t>(key.bytes)) {}

  Prf(const Prf& other);
  Prf& operator=(const Prf& other);
  Prf(Prf&&) noexcept = default;
  Prf& operator=(Prf&&) noexcept = default;
  ~Prf() = default;

  /// PRF over the 8-byte big-endian encoding of `id`.
  PairwiseKey derive(NodeId id) const;
  PairwiseKey derive(std::span<const std::uint8_t> message) const;

 private:
  struct CtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept;
  };
  using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

  CtxPtr inner_;
  CtxPtr outer_;
};

/// SK = PRF_master(id). Deterministic and total.
PairwiseKey prf_derive(const MasterKey& master, NodeId id);

}  // namespace ibprf
