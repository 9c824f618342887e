#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ibprf/analysis/formulas.hpp"
#include "ibprf/errors.hpp"
#include "ibprf/sim/simulation.hpp"
#include "ibprf/sim/snapshot.hpp"

using namespace ibprf;

namespace {

ExperimentConfig complete_config(SchemeKind scheme, std::uint64_t n) {
  ExperimentConfig c;
  c.scheme = scheme;
  c.n = n;
  c.complete = true;
  return c;
}

struct Counts {
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  double fraction() const { return static_cast<double>(hits) / static_cast<double>(trials); }
};

/// Direct keys over physical pairs, pooled across seeds.
Counts direct_rate(const ExperimentConfig& config, std::uint64_t seeds) {
  Counts c;
  for (std::uint64_t s = 1; s <= seeds; ++s) {
    const BootstrapResult r = run_bootstrap(config, s);
    c.hits += r.metrics.direct_keys;
    c.trials += r.connectivity.physical_pairs;
  }
  return c;
}

void expect_within_3_sigma(const Counts& c, double p) {
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(c.trials));
  EXPECT_NEAR(c.fraction(), p, 3 * sigma) << "pairs=" << c.trials;
}

const IbprfScheme& ibprf_of(const Simulation& sim) {
  return dynamic_cast<const IbprfScheme&>(sim.scheme());
}

}  // namespace

// ---------------------------------------------------------------------------
// Topology

TEST(TopologyTest, SingleNodeHasNoPairs) {
  const Topology t({{1, 1}}, 10, Region{0, 0, 5, 5});
  EXPECT_EQ(t.pair_count(), 0u);
  EXPECT_TRUE(t.physical_pairs().empty());
  EXPECT_EQ(t.mean_degree(), 0.0);
}

TEST(TopologyTest, RangeBoundarySymmetryAndMoves) {
  Topology t({{0, 0}, {3, 4}, {10, 0}}, 5, Region{0, 0, 20, 20});
  EXPECT_TRUE(t.are_neighbors(NodeId{0}, NodeId{1}));
  EXPECT_TRUE(t.are_neighbors(NodeId{1}, NodeId{0}));
  EXPECT_FALSE(t.are_neighbors(NodeId{0}, NodeId{2}));
  EXPECT_EQ(t.pair_count(), 1u);
  const auto gained = t.move(NodeId{0}, {10, 3});
  EXPECT_EQ(gained, (std::vector<NodeId>{NodeId{2}}));
  EXPECT_FALSE(t.are_neighbors(NodeId{0}, NodeId{1}));
  EXPECT_EQ(t.neighbors(NodeId{2}).size(), 1u);
  EXPECT_EQ(t.add({10, 5}), NodeId{3});
  const auto added = t.neighbors(NodeId{3});
  EXPECT_EQ(std::vector<NodeId>(added.begin(), added.end()),
            (std::vector<NodeId>{NodeId{0}, NodeId{2}}));
}

TEST(TopologyTest, SaturatedRadiusGivesCompleteGraph) {
  ExperimentConfig c = complete_config(SchemeKind::ibprf, 60);
  Rng rng(1);
  const Topology t = deploy_uniform(c, rng);
  EXPECT_EQ(t.pair_count(), 60u * 59 / 2);
  EXPECT_DOUBLE_EQ(t.mean_degree(), 59.0);
}

TEST(TopologyTest, ScaledRegionHitsTargetDegree) {
  ExperimentConfig c;
  c.n = 1000;
  c.d = 60;
  double total = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(trial_seed(7, s));
    total += deploy_uniform(c, rng).mean_degree();
  }
  EXPECT_NEAR(total / 50, 60.0, 3.0);
  EXPECT_THROW(region_side_for_degree(10, 30, 20), ConfigError);
}

TEST(TopologyTest, CellStripsPlaceMembers) {
  ExperimentConfig c;
  c.scheme = SchemeKind::ibprf_cells;
  c.n = 300;
  c.m = 20;
  c.cells = {100, 200};
  Rng rng(2);
  const Topology t = deploy_uniform(c, rng);
  const Region left = cell_strip(t.region(), 0, 2);
  const Region right = cell_strip(t.region(), 1, 2);
  for (std::uint64_t i = 0; i < 300; ++i) {
    EXPECT_TRUE((i < 100 ? left : right).contains(t.position(NodeId{i}))) << i;
  }
}

// ---------------------------------------------------------------------------
// Bootstrap

TEST(BootstrapTest, DeterministicAndConserving) {
  ExperimentConfig c;
  c.n = 300;
  c.m = 30;
  c.d = 25;
  c.h_max = 3;
  Simulation a(c, 42), b(c, 42), other(c, 43);
  a.bootstrap();
  b.bootstrap();
  other.bootstrap();
  EXPECT_THROW(a.bootstrap(), IntegrityError);
  EXPECT_EQ(take_snapshot(a), take_snapshot(b));
  EXPECT_NE(take_snapshot(a), take_snapshot(other));
  const Metrics& m = a.metrics();
  EXPECT_EQ(m.direct_keys + m.path_keys, a.links().size());
  EXPECT_GT(m.path_keys, 0u);
  EXPECT_LE(m.storage_max, c.m + 1);
  std::uint64_t hops = 0;
  for (const EstablishedKey* k : a.links().edges()) {
    EXPECT_TRUE(a.topology().are_neighbors(k->pair.lo, k->pair.hi));
    if (k->provenance == Provenance::path) {
      EXPECT_LE(k->hops, 3u);
      EXPECT_GE(k->hops, 2u);
      hops += k->hops;
    }
  }
  EXPECT_EQ(m.messages_sent, m.direct_keys + hops);
  EXPECT_EQ(m.bytes_sent, m.direct_keys * kClaimSize + hops * kPathRelaySize);
  EXPECT_EQ(m.prf_ops, m.direct_keys);
  const ConnectivityReport r = a.measure_connectivity();
  EXPECT_GE(*r.after_path_fraction, *r.direct_fraction);
  EXPECT_GT(r.giant_component_share, 0.0);
  EXPECT_LE(r.giant_component_share, 1.0);
}

TEST(BootstrapTest, DirectKeysMatchRingRelation) {
  ExperimentConfig c;
  c.n = 200;
  c.m = 15;
  c.d = 30;
  Simulation sim(c, 5);
  sim.bootstrap();
  const KeyRingSet& rings = ibprf_of(sim).rings();
  for (const NodePair& p : sim.topology().physical_pairs()) {
    const bool related = rings.at(p.lo).contains(p.hi) || rings.at(p.hi).contains(p.lo);
    EXPECT_EQ(sim.links().has(p.lo, p.hi), related);
  }
}

TEST(BootstrapTest, RejectsInvalidConfig) {
  ExperimentConfig c;
  c.m = c.n;
  EXPECT_THROW(Simulation(c, 1), ConfigError);
  c = ExperimentConfig{};
  c.h_max = 1;
  EXPECT_THROW(Simulation(c, 1), ConfigError);
}

// ---------------------------------------------------------------------------
// Mobility and additions

TEST(MobilityTest, CornerMoveGainsNothing) {
  ExperimentConfig c;
  c.n = 20;
  c.m = 5;
  c.width = c.height = 1000;
  c.radius = 10;
  Simulation sim(c, 3);
  EXPECT_THROW(sim.move_node(NodeId{0}, {1, 1}), IntegrityError);
  sim.bootstrap();
  // The seed leaves the corner empty.
  bool corner_free = true;
  for (std::uint64_t i = 1; i < 20; ++i) {
    const Position p = sim.topology().position(NodeId{i});
    corner_free = corner_free && std::hypot(p.x, p.y) > 12;
  }
  ASSERT_TRUE(corner_free);
  const Metrics before = sim.metrics();
  EXPECT_TRUE(sim.move_node(NodeId{0}, {0, 0}).empty());
  EXPECT_EQ(sim.metrics().messages_sent, before.messages_sent);
  EXPECT_THROW(sim.move_node(NodeId{0}, {-1, 0}), MoveRejected);
  EXPECT_THROW(sim.move_node(NodeId{99}, {1, 1}), MoveRejected);
}

TEST(MobilityTest, RandomMovesKeyRingRelatedNeighborsDirectly) {
  ExperimentConfig c;
  c.n = 500;
  c.m = 50;
  c.d = 30;
  Simulation sim(c, 11);
  sim.bootstrap();
  const KeyRingSet& rings = ibprf_of(sim).rings();
  Rng rng(12);
  const Region region = sim.topology().region();
  for (int step = 0; step < 100; ++step) {
    const NodeId u{uniform_below(rng, c.n)};
    const Position to{region.x0 + uniform_unit(rng) * region.width,
                      region.y0 + uniform_unit(rng) * region.height};
    const Metrics before = sim.metrics();
    const auto keys = sim.move_node(u, to);

    std::uint64_t direct = 0, relayed = 0;
    for (const EstablishedKey& k : keys) {
      ASSERT_TRUE(k.pair.lo == u || k.pair.hi == u);
      const NodeId v = k.pair.lo == u ? k.pair.hi : k.pair.lo;
      ASSERT_TRUE(sim.topology().are_neighbors(u, v));
      ASSERT_EQ(sim.links().find(u, v)->key, k.key);
      if (k.provenance == Provenance::direct) {
        ++direct;
        ASSERT_TRUE(rings.at(u).contains(v) || rings.at(v).contains(u));
      } else {
        ++relayed;
        ASSERT_EQ(k.hops, 2u);
      }
    }
    for (NodeId v : sim.topology().neighbors(u)) {
      if (rings.at(u).contains(v) || rings.at(v).contains(u)) {
        ASSERT_TRUE(sim.links().has(u, v));
      }
    }
    ASSERT_EQ(sim.metrics().messages_sent - before.messages_sent, direct + 2 * relayed);
    ASSERT_EQ(sim.metrics().prf_ops - before.prf_ops, direct);
    ASSERT_LE(sim.metrics().storage_max, c.m + 1);
  }
}

TEST(MobilityTest, CellNodesStayInTheirStrip) {
  ExperimentConfig c;
  c.scheme = SchemeKind::ibprf_cells;
  c.n = 200;
  c.m = 20;
  c.c = 2;
  Simulation sim(c, 4);
  sim.bootstrap();
  const Region r = sim.topology().region();
  EXPECT_THROW(sim.move_node(NodeId{0}, {r.x0 + 0.9 * r.width, r.y0 + 1}), MoveRejected);
  EXPECT_NO_THROW(sim.move_node(NodeId{0}, {r.x0 + 0.1 * r.width, r.y0 + 1}));
  EXPECT_NO_THROW(sim.move_node(NodeId{150}, {r.x0 + 0.9 * r.width, r.y0 + 1}));
}

TEST(AdditionTest, NewcomerDirectRateIsRingOverPool) {
  // Deployed rings never list newcomers, so an addition keys exactly the neighbors in its
  // own ring: expected direct fraction m / (nodes already deployed).
  ExperimentConfig c;
  c.n = 200;
  c.m = 20;
  c.d = 40;
  double expected = 0, variance = 0;
  std::uint64_t keyed = 0;
  for (std::uint64_t net = 0; net < 50; ++net) {
    Simulation sim(c, trial_seed(99, net));
    sim.bootstrap();
    const KeyRingSet before = ibprf_of(sim).rings();
    Rng rng(net);
    const Region r = sim.topology().region();
    for (int k = 0; k < 20; ++k) {
      const std::uint64_t deployed = sim.topology().size();
      const NodeId u = sim.add_node({r.x0 + uniform_unit(rng) * r.width,
                                     r.y0 + uniform_unit(rng) * r.height});
      ASSERT_EQ(u.value, deployed);
      const double p = static_cast<double>(c.m) / static_cast<double>(deployed);
      for (NodeId v : sim.topology().neighbors(u)) {
        expected += p;
        variance += p * (1 - p);
        if (sim.links().has(u, v)) {
          ++keyed;
          ASSERT_TRUE(ibprf_of(sim).rings().at(u).contains(v));
        }
      }
    }
    for (NodeId owner : before.owners()) {
      const auto a = before.at(owner).entries();
      const auto b = ibprf_of(sim).rings().at(owner).entries();
      ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
  }
  EXPECT_NEAR(static_cast<double>(keyed), expected, 3 * std::sqrt(variance));
}

TEST(AdditionTest, CompleteGraphNewcomerKeysExactlyItsRing) {
  ExperimentConfig c = complete_config(SchemeKind::ibprf, 100);
  c.m = 10;
  Simulation sim(c, 8);
  sim.bootstrap();
  const std::uint64_t links_before = sim.links().size();
  const Metrics before = sim.metrics();
  const Region r = sim.topology().region();
  sim.add_node({r.x0 + r.width / 2, r.y0 + r.height / 2});
  EXPECT_EQ(sim.links().size() - links_before, 10u);
  EXPECT_EQ(sim.metrics().messages_sent - before.messages_sent, 10u);
}

// ---------------------------------------------------------------------------
// Resilience

TEST(ResilienceTest, IbprfLosesNothingOutsideTheCapturedSet) {
  for (SchemeKind kind : {SchemeKind::ibprf, SchemeKind::ibprf_cells}) {
    ExperimentConfig c;
    c.scheme = kind;
    c.n = 200;
    c.m = 20;
    c.c = kind == SchemeKind::ibprf_cells ? 4 : 0;
    c.d = 30;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      Simulation sim(c, seed);
      sim.bootstrap();
      for (std::uint64_t x : {1u, 20u, 100u}) {
        const auto captured = sim.random_capture_set(x);
        const auto verdicts = sim.compromised_links(captured);
        std::set<NodeId> cap(captured.begin(), captured.end());
        for (const auto& [pair, lost] : verdicts) {
          EXPECT_FALSE(cap.contains(pair.lo) || cap.contains(pair.hi));
          EXPECT_FALSE(lost);
        }
        EXPECT_EQ(sim.measure_resilience(captured), 0.0);
      }
    }
  }
}

TEST(ResilienceTest, PathKeysFallWithTheirRelays) {
  ExperimentConfig c;
  c.n = 200;
  c.m = 10;
  c.d = 30;
  c.h_max = 3;
  Simulation sim(c, 2);
  sim.bootstrap();
  const EstablishedKey* relayed = nullptr;
  for (const EstablishedKey* k : sim.links().edges()) {
    if (k->provenance == Provenance::path) {
      relayed = k;
      break;
    }
  }
  ASSERT_NE(relayed, nullptr);
  const std::vector<NodeId> captured{relayed->route[1]};
  bool found = false;
  for (const auto& [pair, lost] : sim.compromised_links(captured)) {
    if (pair == relayed->pair) {
      found = true;
      EXPECT_TRUE(lost);
    } else if (const EstablishedKey* k = sim.links().find(pair.lo, pair.hi);
               k->provenance == Provenance::direct) {
      EXPECT_FALSE(lost);
    }
  }
  EXPECT_TRUE(found);
}

TEST(ResilienceTest, EgMatchesIndependentCaptureOracle) {
  // Link key = smallest shared id; each captured ring holds it with probability m / M.
  ExperimentConfig c = complete_config(SchemeKind::eg, 40);
  c.pool_size = 100;
  c.m = 10;
  double sum = 0;
  int runs = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Simulation sim(c, seed);
    sim.bootstrap();
    if (auto f = sim.measure_resilience(sim.random_capture_set(5))) {
      sum += *f;
      ++runs;
    }
  }
  EXPECT_NEAR(sum / runs, 1 - std::pow(0.9, 5), 0.03);
}

TEST(ResilienceTest, EgFractionGrowsWithCaptures) {
  ExperimentConfig c = complete_config(SchemeKind::eg, 60);
  c.pool_size = 100;
  c.m = 10;
  std::vector<double> means;
  for (std::uint64_t x : {1u, 5u, 20u}) {
    double sum = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
      Simulation sim(c, seed);
      sim.bootstrap();
      sum += sim.measure_resilience(sim.random_capture_set(x)).value();
    }
    means.push_back(sum / 30);
  }
  EXPECT_LT(means[0], means[1]);
  EXPECT_LT(means[1], means[2]);
}

TEST(ResilienceTest, PolyPoolPlantedThresholdJump) {
  ExperimentConfig c = complete_config(SchemeKind::polypool, 120);
  c.s = 5;
  c.sprime = 2;
  c.t = 2;
  Simulation sim(c, 6);
  sim.bootstrap();
  const auto& scheme = dynamic_cast<const PolyPoolScheme&>(sim.scheme());
  const auto holders = scheme.holders(0);
  ASSERT_GE(holders.size(), 4u);
  auto planted_fraction = [&](std::size_t shares) {
    const std::vector<NodeId> forced(holders.begin(), holders.begin() + shares);
    const auto captured = sim.random_capture_set(shares, forced);
    std::uint64_t planted = 0, lost = 0;
    for (const auto& [pair, compromised] : sim.compromised_links(captured)) {
      if (common_poly(scheme.shares(pair.lo), scheme.shares(pair.hi)) != 0u) continue;
      ++planted;
      lost += compromised ? 1 : 0;
    }
    EXPECT_GT(planted, 0u);
    return static_cast<double>(lost) / static_cast<double>(planted);
  };
  EXPECT_EQ(planted_fraction(2), 0.0);
  EXPECT_EQ(planted_fraction(3), 1.0);
}

TEST(ResilienceTest, CaptureSetValidation) {
  ExperimentConfig c = complete_config(SchemeKind::ibprf, 20);
  c.m = 5;
  Simulation sim(c, 1);
  sim.bootstrap();
  EXPECT_THROW(sim.random_capture_set(21), std::invalid_argument);
  const std::vector<NodeId> forced{NodeId{3}, NodeId{7}};
  const auto set = sim.random_capture_set(5, forced);
  EXPECT_EQ(set.size(), 5u);
  EXPECT_TRUE(std::is_sorted(set.begin(), set.end()));
  EXPECT_TRUE(std::binary_search(set.begin(), set.end(), NodeId{7}));
  const std::vector<NodeId> bogus{NodeId{55}};
  EXPECT_THROW(sim.measure_resilience(bogus), std::invalid_argument);
  std::vector<NodeId> everyone;
  for (std::uint64_t i = 0; i < 20; ++i) everyone.push_back(NodeId{i});
  EXPECT_FALSE(sim.measure_resilience(everyone).has_value());
}

// ---------------------------------------------------------------------------
// Monte Carlo bridges to the closed forms

TEST(BridgeTest, IbprfBidirectional) {
  ExperimentConfig c = complete_config(SchemeKind::ibprf, 300);
  c.m = 30;
  expect_within_3_sigma(direct_rate(c, 3), p_direct_bidirectional(300, 30).to_double());
}

TEST(BridgeTest, IbprfOneDirectionDiagnostic) {
  ExperimentConfig c = complete_config(SchemeKind::ibprf, 300);
  c.m = 30;
  c.count_mode = CountMode::one_direction;
  Counts counts;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const BootstrapResult r = run_bootstrap(c, s);
    counts.hits += static_cast<std::uint64_t>(std::llround(*r.connectivity.direct_fraction *
                                                           r.connectivity.physical_pairs));
    counts.trials += r.connectivity.physical_pairs;
  }
  expect_within_3_sigma(counts, 30.0 / 299.0);
  EXPECT_NEAR(counts.fraction(), p_direct_ibprf(300, 30).to_double(), 0.01);
}

TEST(BridgeTest, EschenauerGligor) {
  ExperimentConfig c = complete_config(SchemeKind::eg, 150);
  c.pool_size = 100;
  c.m = 10;
  expect_within_3_sigma(direct_rate(c, 9), p_eg(100, 10).to_double());
}

TEST(BridgeTest, QComposite) {
  ExperimentConfig c = complete_config(SchemeKind::qcomposite, 150);
  c.pool_size = 100;
  c.m = 10;
  c.q = 2;
  expect_within_3_sigma(direct_rate(c, 9), p_qcomposite(100, 10, 2).to_double());
}

TEST(BridgeTest, PolyPool) {
  ExperimentConfig c = complete_config(SchemeKind::polypool, 150);
  c.s = 10;
  c.sprime = 2;
  c.t = 2;
  expect_within_3_sigma(direct_rate(c, 9), p_polypool(10, 2).to_double());
}

TEST(BridgeTest, OneHopPathPhaseMatchesClosedForm) {
  // Complete graph: every other node is a common neighbor of a pair, so d = n - 2.
  ExperimentConfig c = complete_config(SchemeKind::ibprf, 100);
  c.m = 5;
  c.h_max = 2;
  double measured = 0, predicted = 0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const BootstrapResult r = run_bootstrap(c, s);
    measured += *r.connectivity.after_path_fraction;
    predicted += p_onehop(*r.connectivity.direct_fraction, c.n - 2);
  }
  EXPECT_NEAR(measured / 5, predicted / 5, 0.03);
}

TEST(BridgeTest, QOneReducesToEgSeedForSeed) {
  ExperimentConfig eg = complete_config(SchemeKind::eg, 80);
  eg.pool_size = 100;
  eg.m = 10;
  ExperimentConfig q1 = eg;
  q1.scheme = SchemeKind::qcomposite;
  q1.q = 1;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const BootstrapResult a = run_bootstrap(eg, s);
    const BootstrapResult b = run_bootstrap(q1, s);
    EXPECT_EQ(a.connectivity.direct_fraction, b.connectivity.direct_fraction);
    const auto ea = a.links.edges(), eb = b.links.edges();
    ASSERT_EQ(ea.size(), eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) EXPECT_EQ(ea[i]->pair, eb[i]->pair);
  }
}

TEST(BridgeTest, PoolSchemesSendIdListsIbprfSendsClaims) {
  ExperimentConfig base = complete_config(SchemeKind::eg, 50);
  base.pool_size = 100;
  base.m = 10;
  const BootstrapResult eg = run_bootstrap(base, 3);
  EXPECT_EQ(eg.metrics.ids_sent, 2 * base.m * eg.metrics.establish_attempts);
  EXPECT_EQ(eg.metrics.messages_sent, 2 * eg.metrics.establish_attempts);
  base.scheme = SchemeKind::ibprf;
  const BootstrapResult ib = run_bootstrap(base, 3);
  EXPECT_EQ(ib.metrics.ids_sent, 0u);
  EXPECT_EQ(ib.metrics.messages_sent, ib.metrics.direct_keys);
}

// ---------------------------------------------------------------------------
// Snapshots

TEST(SnapshotTest, RoundTripAndRejects) {
  ExperimentConfig c;
  c.n = 120;
  c.m = 12;
  c.d = 20;
  c.h_max = 2;
  Simulation sim(c, 21);
  sim.bootstrap();
  sim.measure_resilience(sim.random_capture_set(4));
  const Snapshot snap = take_snapshot(sim);
  std::stringstream buf;
  write_snapshot(buf, snap);
  const std::string bytes = buf.str();
  std::istringstream in(bytes);
  EXPECT_EQ(read_snapshot(in), snap);
  EXPECT_EQ(snap.edges.size(), sim.links().size());

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream m1(bad_magic);
  EXPECT_THROW(read_snapshot(m1), SnapshotError);

  std::string bad_version = bytes;
  bad_version[8] = 2;
  std::istringstream m2(bad_version);
  EXPECT_THROW(read_snapshot(m2), SnapshotError);

  for (std::size_t len : {std::size_t{0}, std::size_t{7}, std::size_t{30}, bytes.size() / 2,
                          bytes.size() - 1}) {
    std::istringstream cut(bytes.substr(0, len));
    EXPECT_THROW(read_snapshot(cut), SnapshotError) << len;
  }
}
