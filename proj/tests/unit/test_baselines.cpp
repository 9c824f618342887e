#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ibprf/analysis/formulas.hpp"
#include "ibprf/errors.hpp"
#include "ibprf/scheme/baselines.hpp"
#include "ibprf/scheme/poly_pool.hpp"

using namespace ibprf;

namespace {

PoolRing ring_of(const GlobalKeyPool& pool, std::uint64_t owner, std::vector<KeyId> ids) {
  PoolRing r{NodeId{owner}, {}};
  std::sort(ids.begin(), ids.end());
  for (KeyId id : ids) r.entries.push_back(PoolKey{id, pool.key(id)});
  return r;
}

// All k-subsets of {0..n-1}.
std::vector<std::vector<KeyId>> subsets(std::uint32_t n, std::uint32_t k) {
  std::vector<std::vector<KeyId>> out;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + k, true);
  do {
    std::vector<KeyId> s;
    for (std::uint32_t i = 0; i < n; ++i)
      if (pick[i]) s.push_back(i);
    out.push_back(s);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Key-pool schemes

TEST(KeyPoolTest, RingsAreDistinctSortedPoolKeys) {
  Rng rng(1);
  GlobalKeyPool pool(100, rng);
  const PoolRing r = eg_predistribute(pool, NodeId{4}, 10, rng);
  ASSERT_EQ(r.entries.size(), 10u);
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    EXPECT_EQ(r.entries[i].key, pool.key(r.entries[i].id));
    if (i > 0) EXPECT_LT(r.entries[i - 1].id, r.entries[i].id);
  }
  EXPECT_THROW(eg_predistribute(pool, NodeId{4}, 101, rng), ConfigError);
}

TEST(KeyPoolTest, EgEnumerationSmallPool) {
  // M = 2, m = 1: rings {0} or {1}; share with probability 1/2.
  Rng rng(2);
  GlobalKeyPool pool(2, rng);
  int shared = 0, total = 0;
  for (const auto& a : subsets(2, 1))
    for (const auto& b : subsets(2, 1)) {
      ++total;
      if (eg_establish(ring_of(pool, 0, a), ring_of(pool, 1, b))) ++shared;
    }
  EXPECT_EQ(shared * 2, total);
  EXPECT_EQ(p_eg(2, 1).fraction(), "1/2");
}

TEST(KeyPoolTest, EgUsesSmallestSharedKeyAndBothSidesAgree) {
  Rng rng(3);
  GlobalKeyPool pool(10, rng);
  const PoolRing a = ring_of(pool, 0, {1, 4, 7});
  const PoolRing b = ring_of(pool, 1, {2, 4, 7});
  EXPECT_EQ(shared_key_ids(a, b), (std::vector<KeyId>{4, 7}));
  EXPECT_EQ(eg_establish(a, b), pool.key(4));
  EXPECT_EQ(eg_establish(b, a), pool.key(4));
}

TEST(KeyPoolTest, QCompositeEnumerationMatchesOneSixth) {
  // M = 4, m = 2, q = 2: C(4,2)^2 = 36 ring pairs, 6 identical pairs succeed.
  Rng rng(4);
  GlobalKeyPool pool(4, rng);
  int ok = 0, total = 0;
  for (const auto& a : subsets(4, 2))
    for (const auto& b : subsets(4, 2)) {
      ++total;
      if (qcomposite_establish(ring_of(pool, 0, a), ring_of(pool, 1, b), 2)) ++ok;
    }
  EXPECT_EQ(total, 36);
  EXPECT_EQ(ok, 6);
  EXPECT_EQ(p_qcomposite(4, 2, 2).fraction(), "1/6");
}

TEST(KeyPoolTest, QCompositeEnumerationMatchesClosedFormAcrossQ) {
  Rng rng(5);
  GlobalKeyPool pool(7, rng);
  const auto rings = subsets(7, 3);
  for (std::size_t q = 1; q <= 3; ++q) {
    std::uint64_t ok = 0;
    for (const auto& a : rings)
      for (const auto& b : rings)
        if (qcomposite_establish(ring_of(pool, 0, a), ring_of(pool, 1, b), q)) ++ok;
    const ExactProbability p = ExactProbability::ratio(ok, rings.size() * rings.size());
    EXPECT_EQ(p, p_qcomposite(7, 3, q)) << "q=" << q;
  }
  EXPECT_EQ(p_qcomposite(7, 3, 1), p_eg(7, 3));
}

TEST(KeyPoolTest, QCompositeKeyDependsOnAllSharedKeysInOrder) {
  Rng rng(6);
  GlobalKeyPool pool(10, rng);
  const PoolRing a = ring_of(pool, 0, {1, 2, 3});
  const PoolRing b = ring_of(pool, 1, {1, 2, 9});
  const PoolRing c = ring_of(pool, 2, {1, 3, 9});
  const auto ab = qcomposite_establish(a, b, 2);
  ASSERT_TRUE(ab.has_value());
  EXPECT_EQ(ab, qcomposite_establish(b, a, 2));
  const std::vector<PairwiseKey> ordered{pool.key(1), pool.key(2)};
  EXPECT_EQ(*ab, qcomposite_link_key(ordered));
  EXPECT_NE(*ab, *qcomposite_establish(a, c, 2));
  EXPECT_FALSE(qcomposite_establish(a, b, 3).has_value());
  EXPECT_THROW(qcomposite_establish(a, b, 0), ConfigError);
}

TEST(KeyPoolTest, EgResilienceBruteForce) {
  // M = 10, m = 2, one captured ring. For a link whose key is the smallest shared id k,
  // the link is compromised iff the captured ring holds k. Average over every
  // (ring_u, ring_v, ring_c) with u, v sharing at least one key: exactly 1/5 = m/M.
  Rng rng(7);
  GlobalKeyPool pool(10, rng);
  const auto rings = subsets(10, 2);
  std::uint64_t links = 0, compromised = 0;
  for (const auto& a : rings)
    for (const auto& b : rings) {
      const PoolRing ra = ring_of(pool, 0, a);
      const PoolRing rb = ring_of(pool, 1, b);
      const auto shared = shared_key_ids(ra, rb);
      if (shared.empty()) continue;
      for (const auto& c : rings) {
        ++links;
        if (std::find(c.begin(), c.end(), shared.front()) != c.end()) ++compromised;
      }
    }
  EXPECT_EQ(compromised * 5, links);
}

// ---------------------------------------------------------------------------
// Polynomial pool

TEST(PrimeFieldTest, ArithmeticAndValidation) {
  const PrimeField f(31);
  EXPECT_EQ(f.mul(30, 30), 1u);
  EXPECT_EQ(f.sub(3, 5), 29u);
  for (std::uint64_t a = 1; a < 31; ++a) EXPECT_EQ(f.mul(a, f.inverse(a)), 1u);
  EXPECT_THROW(f.inverse(0), std::domain_error);
  EXPECT_EQ(f.pow(3, 30), 1u);
  EXPECT_THROW(PrimeField(32), ConfigError);
  EXPECT_THROW(PrimeField(1), ConfigError);
  EXPECT_TRUE(is_prime(kDefaultFieldPrime));
  EXPECT_FALSE(is_prime(1));
  EXPECT_FALSE(is_prime(91));
}

TEST(PolyTest, SymmetryAndShares) {
  const PrimeField f(31);
  EXPECT_THROW(SymmetricBivariatePoly(1, f, {1, 2, 3, 4}), ConfigError);
  EXPECT_THROW(SymmetricBivariatePoly(1, f, {1, 2, 2, 31}), ConfigError);
  Rng rng(8);
  const auto poly = SymmetricBivariatePoly::random(3, f, rng);
  EXPECT_TRUE(poly.is_symmetric());
  for (std::uint64_t x = 0; x < 31; x += 3) {
    const auto share = poly.share_at(x);
    ASSERT_EQ(share.size(), 4u);
    const PolyShare ps{0, NodeId{x}, share};
    for (std::uint64_t y = 0; y < 31; y += 5) {
      EXPECT_EQ(poly.evaluate(x, y), poly.evaluate(y, x));
      EXPECT_EQ(ps.evaluate(y, f), poly.evaluate(x, y));
    }
  }
}

TEST(PolyTest, BruteForceThresholdOverGF31) {
  // t = 1: f(x, y) = a + b(x + y) + c x y, 31^3 candidates in total.
  const PrimeField f(31);
  const SymmetricBivariatePoly secret(1, f, {5, 17, 17, 9});
  const std::vector<PolyShare> captured{{0, NodeId{3}, secret.share_at(3)},
                                        {0, NodeId{11}, secret.share_at(11)}};
  auto consistent = [&](std::size_t shares) {
    std::vector<SymmetricBivariatePoly> out;
    for (std::uint64_t a = 0; a < 31; ++a)
      for (std::uint64_t b = 0; b < 31; ++b)
        for (std::uint64_t c = 0; c < 31; ++c) {
          const SymmetricBivariatePoly cand(1, f, {a, b, b, c});
          bool ok = true;
          for (std::size_t i = 0; i < shares && ok; ++i) {
            ok = cand.share_at(captured[i].node.value) == captured[i].coefficients;
          }
          if (ok) out.push_back(cand);
        }
    return out;
  };
  const auto with_two = consistent(2);
  ASSERT_EQ(with_two.size(), 1u);
  EXPECT_EQ(with_two[0], secret);
  const auto with_one = consistent(1);
  EXPECT_EQ(with_one.size(), 31u);
  // With one share, the key of a link between two other nodes takes every value.
  std::set<std::uint64_t> keys;
  for (const auto& cand : with_one) keys.insert(cand.evaluate(20, 25));
  EXPECT_EQ(keys.size(), 31u);

  EXPECT_EQ(recover_polynomial(captured, 1, f), secret);
  EXPECT_FALSE(recover_polynomial(std::span(captured).first(1), 1, f).has_value());
  // A repeated node does not count twice.
  const std::vector<PolyShare> repeated{captured[0], captured[0]};
  EXPECT_FALSE(recover_polynomial(repeated, 1, f).has_value());
}

TEST(PolyTest, RecoveryAtHigherDegree) {
  const PrimeField f(kDefaultFieldPrime);
  Rng rng(9);
  const auto secret = SymmetricBivariatePoly::random(4, f, rng);
  std::vector<PolyShare> shares;
  for (std::uint64_t x : {2u, 7u, 100u, 4000u, 99999u}) {
    shares.push_back({0, NodeId{x}, secret.share_at(x)});
  }
  EXPECT_EQ(recover_polynomial(shares, 4, f), secret);
  EXPECT_FALSE(recover_polynomial(std::span(shares).first(4), 4, f).has_value());
  // Inconsistent shares do not interpolate to a symmetric polynomial.
  shares[2].coefficients[1] = f.add(shares[2].coefficients[1], 1);
  EXPECT_FALSE(recover_polynomial(shares, 4, f).has_value());
}

TEST(PolyPoolTest, AssignmentEstablishmentAndEnumeration) {
  Rng rng(10);
  const PolyPool pool(10, 2, kDefaultFieldPrime, rng);
  EXPECT_THROW(pool.assign(NodeId{1}, 11, rng), ConfigError);
  EXPECT_THROW(pool.assign(NodeId{kDefaultFieldPrime}, 2, rng), ConfigError);
  const NodeShares u = pool.assign(NodeId{1}, 2, rng);
  EXPECT_EQ(u.stored_elements(), 2u * 3u);
  for (const PolyShare& ps : u.shares) {
    EXPECT_EQ(ps.coefficients, pool.poly(ps.poly_id).share_at(1));
  }

  // Enumeration of all s'-subsets for s = 10, s' = 2 against 17/45.
  const auto all = subsets(10, 2);
  std::uint64_t hit = 0;
  for (const auto& a : all)
    for (const auto& b : all) {
      NodeShares sa{NodeId{1}, {}}, sb{NodeId{2}, {}};
      for (KeyId id : a) sa.shares.push_back({id, NodeId{1}, pool.poly(id).share_at(1)});
      for (KeyId id : b) sb.shares.push_back({id, NodeId{2}, pool.poly(id).share_at(2)});
      const auto common = common_poly(sa, sb);
      const auto key = poly_establish(sa, sb, pool.field());
      EXPECT_EQ(common.has_value(), key.has_value());
      if (key) {
        ++hit;
        EXPECT_EQ(key, poly_establish(sb, sa, pool.field()));
        EXPECT_EQ(*key, poly_link_key(pool.poly(*common).evaluate(1, 2)));
      }
    }
  EXPECT_EQ(ExactProbability::ratio(hit, all.size() * all.size()), p_polypool(10, 2));
}
