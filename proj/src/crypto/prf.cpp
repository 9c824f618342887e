#include "ibprf/crypto/prf.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace ibprf {

namespace {

constexpr std::size_t kBlockSize = 64;
constexpr std::size_t kDigestSize = 32;

void check(int ok, const char* what) {
  if (ok != 1) throw std::runtime_error(what);
}

EVP_MD_CTX* scratch_ctx() {
  struct Holder {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    ~Holder() { EVP_MD_CTX_free(ctx); }
  };
  thread_local Holder holder;
  return holder.ctx;
}

}  // namespace

void Prf::CtxDeleter::operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }

Prf::Prf(std::span<const std::uint8_t> key)
    : inner_(EVP_MD_CTX_new()), outer_(EVP_MD_CTX_new()) {
  if (!inner_ || !outer_) throw std::bad_alloc();
  std::array<std::uint8_t, kBlockSize> block{};
  if (key.size() > kBlockSize) {
    unsigned len = 0;
    check(EVP_Digest(key.data(), key.size(), block.data(), &len, EVP_sha256(), nullptr),
          "sha256 key digest failed");
  } else {
    std::copy(key.begin(), key.end(), block.begin());
  }
  std::array<std::uint8_t, kBlockSize> ipad{};
  std::array<std::uint8_t, kBlockSize> opad{};
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    ipad[i] = block[i] ^ 0x36;
    opad[i] = block[i] ^ 0x5c;
  }
  check(EVP_DigestInit_ex(inner_.get(), EVP_sha256(), nullptr), "sha256 init failed");
  check(EVP_DigestUpdate(inner_.get(), ipad.data(), ipad.size()), "sha256 update failed");
  check(EVP_DigestInit_ex(outer_.get(), EVP_sha256(), nullptr), "sha256 init failed");
  check(EVP_DigestUpdate(outer_.get(), opad.data(), opad.size()), "sha256 update failed");
}

Prf::Prf(const Prf& other) : inner_(EVP_MD_CTX_new()), outer_(EVP_MD_CTX_new()) {
  if (!inner_ || !outer_) throw std::bad_alloc();
  check(EVP_MD_CTX_copy_ex(inner_.get(), other.inner_.get()), "ctx copy failed");
  check(EVP_MD_CTX_copy_ex(outer_.get(), other.outer_.get()), "ctx copy failed");
}

Prf& Prf::operator=(const Prf& other) {
  if (this != &other) {
    Prf copy(other);
    *this = std::move(copy);
  }
  return *this;
}

PairwiseKey Prf::derive(NodeId id) const {
  auto bytes = to_bytes(id);
  return derive(std::span<const std::uint8_t>(bytes));
}

PairwiseKey Prf::derive(std::span<const std::uint8_t> message) const {
  EVP_MD_CTX* ctx = scratch_ctx();
  std::array<std::uint8_t, kDigestSize> inner_digest{};
  std::array<std::uint8_t, kDigestSize> tag{};
  unsigned len = 0;
  check(EVP_MD_CTX_copy_ex(ctx, inner_.get()), "ctx copy failed");
  check(EVP_DigestUpdate(ctx, message.data(), message.size()), "sha256 update failed");
  check(EVP_DigestFinal_ex(ctx, inner_digest.data(), &len), "sha256 final failed");
  check(EVP_MD_CTX_copy_ex(ctx, outer_.get()), "ctx copy failed");
  check(EVP_DigestUpdate(ctx, inner_digest.data(), inner_digest.size()), "sha256 update failed");
  check(EVP_DigestFinal_ex(ctx, tag.data(), &len), "sha256 final failed");
  PairwiseKey out;
  std::copy_n(tag.begin(), kKeySize, out.bytes.begin());
  return out;
}

PairwiseKey prf_derive(const MasterKey& master, NodeId id) { return Prf(master).derive(id); }

}  // namespace ibprf
