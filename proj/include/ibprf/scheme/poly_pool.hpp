#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ibprf/crypto/random.hpp"
#include "ibprf/crypto/types.hpp"

namespace ibprf {

/// 2^31 - 1. Node ids fit and products stay within 64 bits.
inline constexpr std::uint64_t kDefaultFieldPrime = 2147483647ULL;

/// Arithmetic modulo a prime below 2^32.
class PrimeField {
 public:
  /// Throws ConfigError unless `prime` is a prime in [2, 2^32).
  explicit PrimeField(std::uint64_t prime);

  std::uint64_t prime() const { return p_; }
  std::uint64_t reduce(std::uint64_t x) const { return x % p_; }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) % p_; }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a + p_ - b) % p_; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return (a * b) % p_; }
  std::uint64_t pow(std::uint64_t base, std::uint64_t exp) const;
  /// Throws std::domain_error for zero.
  std::uint64_t inverse(std::uint64_t a) const;

 private:
  std::uint64_t p_;
};

bool is_prime(std::uint64_t x);

/// f(x, y) = sum a_ij x^i y^j over GF(P) with a_ij = a_ji.
class SymmetricBivariatePoly {
 public:
  /// `coefficients` is row-major (degree+1)^2. Throws ConfigError if not symmetric or
  /// any coefficient is >= P.
  SymmetricBivariatePoly(std::uint32_t degree, const PrimeField& field,
                         std::vector<std::uint64_t> coefficients);

  static SymmetricBivariatePoly random(std::uint32_t degree, const PrimeField& field, Rng& rng);

  std::uint32_t degree() const { return degree_; }
  const PrimeField& field() const { return field_; }
  std::uint64_t coefficient(std::uint32_t i, std::uint32_t j) const {
    return coeffs_[i * (degree_ + 1) + j];
  }
  std::span<const std::uint64_t> coefficients() const { return coeffs_; }
  bool is_symmetric() const;

  std::uint64_t evaluate(std::uint64_t x, std::uint64_t y) const;
  /// Coefficients in y of f(x, y) for fixed x: the share handed to node x.
  std::vector<std::uint64_t> share_at(std::uint64_t x) const;

  friend bool operator==(const SymmetricBivariatePoly& a, const SymmetricBivariatePoly& b) {
    return a.degree_ == b.degree_ && a.field_.prime() == b.field_.prime() &&
           a.coeffs_ == b.coeffs_;
  }

 private:
  std::uint32_t degree_;
  PrimeField field_;
  std::vector<std::uint64_t> coeffs_;
};

/// Univariate share f(node, y) of polynomial `poly_id`.
struct PolyShare {
  std::uint32_t poly_id = 0;
  NodeId node;
  std::vector<std::uint64_t> coefficients;

  std::uint64_t evaluate(std::uint64_t y, const PrimeField& field) const;
};

/// A node's s' shares, sorted by polynomial id.
struct NodeShares {
  NodeId owner;
  std::vector<PolyShare> shares;

  std::vector<std::uint32_t> poly_ids() const;
  const PolyShare* find(std::uint32_t poly_id) const;
  /// Field elements stored: s' (t + 1).
  std::size_t stored_elements() const;
};

/// s random symmetric polynomials of degree t.
class PolyPool {
 public:
  PolyPool(std::size_t pool_size, std::uint32_t degree, std::uint64_t prime, Rng& rng);

  /// s' distinct polynomial shares for `node`. Throws ConfigError if s' > s or the
  /// node id is not below P.
  NodeShares assign(NodeId node, std::size_t shares_per_node, Rng& rng) const;

  std::size_t size() const { return polys_.size(); }
  std::uint32_t degree() const { return degree_; }
  const PrimeField& field() const { return field_; }
  const SymmetricBivariatePoly& poly(std::uint32_t id) const { return polys_.at(id); }

 private:
  std::uint32_t degree_;
  PrimeField field_;
  std::vector<SymmetricBivariatePoly> polys_;
};

/// Smallest common polynomial id, if any.
std::optional<std::uint32_t> common_poly(const NodeShares& u, const NodeShares& v);

/// Maps a shared field element onto a link key.
PairwiseKey poly_link_key(std::uint64_t element);

/// Both sides evaluate their share at the other's id; throws IntegrityError if the
/// values differ.
std::optional<PairwiseKey> poly_establish(const NodeShares& u, const NodeShares& v,
                                          const PrimeField& field);

/// Lagrange-interpolates f from degree+1 shares at distinct nodes. Returns std::nullopt
/// with fewer shares, or when the shares are not consistent with a symmetric polynomial.
std::optional<SymmetricBivariatePoly> recover_polynomial(std::span<const PolyShare> shares,
                                                         std::uint32_t degree,
                                                         const PrimeField& field);

}  // namespace ibprf
