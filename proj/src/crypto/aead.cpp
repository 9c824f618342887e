#include "ibprf/crypto/aead.hpp"

#include <openssl/evp.h>

#include <limits>
#include <memory>
#include <stdexcept>

#include "ibprf/errors.hpp"

namespace ibprf {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

CipherCtx make_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  return ctx;
}

void check(int ok, const char* what) {
  if (ok != 1) throw std::runtime_error(what);
}

}  // namespace

std::vector<std::uint8_t> seal(const PairwiseKey& key, const Nonce& nonce,
                               std::span<const std::uint8_t> plaintext) {
  auto ctx = make_ctx();
  check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr),
        "gcm init failed");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceSize, nullptr),
        "gcm ivlen failed");
  check(EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), nonce.data()),
        "gcm key failed");
  std::vector<std::uint8_t> out(plaintext.size() + kTagSize);
  int len = 0;
  if (!plaintext.empty()) {
    check(EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                            static_cast<int>(plaintext.size())),
          "gcm encrypt failed");
  }
  int tail = 0;
  check(EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &tail), "gcm final failed");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagSize,
                            out.data() + plaintext.size()),
        "gcm tag failed");
  return out;
}

std::optional<std::vector<std::uint8_t>> open(const PairwiseKey& key, const Nonce& nonce,
                                              std::span<const std::uint8_t> sealed) {
  if (sealed.size() < kTagSize) return std::nullopt;
  const std::size_t body = sealed.size() - kTagSize;
  auto ctx = make_ctx();
  check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr),
        "gcm init failed");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kNonceSize, nullptr),
        "gcm ivlen failed");
  check(EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), nonce.data()),
        "gcm key failed");
  std::vector<std::uint8_t> out(body);
  int len = 0;
  if (body > 0) {
    check(EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(body)),
          "gcm decrypt failed");
  }
  std::array<std::uint8_t, kTagSize> tag{};
  std::copy(sealed.begin() + static_cast<std::ptrdiff_t>(body), sealed.end(), tag.begin());
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()),
        "gcm set tag failed");
  int tail = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &tail) != 1) return std::nullopt;
  return out;
}

Nonce nonce_from_counter(std::uint64_t counter) {
  Nonce n{};
  for (std::size_t i = 0; i < 8; ++i) {
    n[kNonceSize - 1 - i] = static_cast<std::uint8_t>(counter >> (8 * i));
  }
  return n;
}

Nonce NonceSource::next() {
  if (next_ == std::numeric_limits<std::uint64_t>::max()) {
    throw IntegrityError("nonce counter exhausted");
  }
  return nonce_from_counter(next_++);
}

}  // namespace ibprf
