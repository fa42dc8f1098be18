#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "chargegrid/lemmas.hpp"
#include "chargegrid/policy.hpp"

using namespace chargegrid;
using namespace chargegrid::policy;

namespace {

RoadRealization trip(Orientation o, bool src, bool dst, std::vector<Road> h, std::vector<Road> v,
                     double dh = 1000, double dv = 1000) {
  RoadRealization r;
  r.geometry = {o, dh, dv};
  r.source_charging = src;
  r.dest_charging = dst;
  r.h_roads = std::move(h);
  r.v_roads = std::move(v);
  return r;
}

TripOutcome walk(const RoadRealization& r) { return walk_tree(classify_event(r), r); }

constexpr auto kPar = Orientation::Parallel;
constexpr auto kPerp = Orientation::Perpendicular;
constexpr bool C = true;
constexpr bool N = false;

// Far-side roads that keep every axis summary complete.
const std::vector<Road> kVOutside{{-10, N}, {1200, C}, {1300, N}};

void expect_leaf(const TripOutcome& o, int ev, int idx, std::optional<double> dn) {
  EXPECT_EQ(o.leaf, (LeafId{ev, idx})) << to_string(o.leaf);
  EXPECT_EQ(o.event, event_from_index(ev));
  EXPECT_EQ(o.d_n.has_value(), dn.has_value()) << to_string(o.leaf);
  if (dn && o.d_n) EXPECT_DOUBLE_EQ(*o.d_n, *dn) << to_string(o.leaf);
  EXPECT_EQ(o.passes_charging, dn.has_value());
}

}  // namespace

TEST(TreeWalk, SourceChargingMeansZeroDistance) {
  expect_leaf(walk(trip(kPar, C, C, {{-50, N}, {1200, C}, {1300, N}}, kVOutside)), 1, 1, 0.0);
  expect_leaf(walk(trip(kPar, C, C, {{-50, N}, {300, C}, {1200, N}}, kVOutside)), 1, 2, 0.0);
  expect_leaf(walk(trip(kPar, C, C, {{-50, N}, {300, N}, {1200, C}}, kVOutside)), 1, 3, 0.0);
  expect_leaf(walk(trip(kPerp, C, C, {{-50, N}, {300, N}, {1200, C}}, kVOutside)), 5, 1, 0.0);
}

TEST(TreeWalk, E2SplitsOnFurthestRoad) {
  const std::vector<Road> no_vc{{-10, N}, {500, N}, {1200, C}};
  expect_leaf(walk(trip(kPar, C, N, {{-5, N}, {200, N}, {500, C}, {1200, N}}, no_vc)), 2, 4, 0.0);
  expect_leaf(walk(trip(kPar, C, N, {{-5, N}, {200, C}, {500, N}, {1200, N}}, no_vc)), 2, 3, 0.0);
  const std::vector<Road> with_vc{{-10, N}, {500, C}, {1200, N}};
  expect_leaf(walk(trip(kPar, C, N, {{-5, N}, {200, N}, {500, C}, {1200, N}}, with_vc)), 2, 6, 0.0);
  expect_leaf(walk(trip(kPar, C, N, {{-5, N}, {200, N}, {1200, C}}, with_vc)), 2, 2, 0.0);
}

TEST(TreeWalk, E3Detour) {
  // Road past the destination is nearer and charging.
  expect_leaf(walk(trip(kPar, N, C, {{-300, N}, {1100, C}}, kVOutside)), 3, 1, 1100.0);
  // Same road non-charging: drive to it, then across to the destination road.
  expect_leaf(walk(trip(kPar, N, C, {{-300, C}, {1100, N}}, kVOutside)), 3, 1, 2100.0);
  // Road behind the source is nearer.
  expect_leaf(walk(trip(kPar, N, C, {{-50, C}, {1400, N}}, kVOutside)), 3, 1, 50.0);
}

TEST(TreeWalk, E3NonchargingCrossings) {
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {400, N}, {1200, C}}, kVOutside)), 3, 2, 1400.0);
  const std::vector<Road> no_vc{{-10, N}, {500, N}, {1200, C}};
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {300, N}, {600, N}, {1200, C}}, no_vc)), 3, 3, 1300.0);
  const std::vector<Road> vc{{-10, N}, {700, C}, {1200, N}};
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {300, N}, {600, N}, {1200, C}}, vc)), 3, 4, 1000.0);
}

TEST(TreeWalk, E3ChargingCrossings) {
  const std::vector<Road> no_vc{{-10, N}, {500, N}, {1200, C}};
  const std::vector<Road> vc300{{-10, N}, {300, C}, {1200, N}};
  const std::vector<Road> vc500{{-10, N}, {500, C}, {1200, N}};
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {200, C}, {500, N}, {1200, N}}, no_vc)), 3, 7, 200.0);
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {100, N}, {400, C}, {1200, N}}, no_vc)), 3, 5, 400.0);
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {100, N}, {500, C}, {1200, N}}, no_vc, 200, 1000)), 3,
              6, 300.0);
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {100, N}, {700, C}, {1200, N}}, vc300)), 3, 8, 400.0);
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {100, N}, {300, C}, {1200, N}}, vc500)), 3, 9, 300.0);
  expect_leaf(walk(trip(kPar, N, C, {{-5, N}, {200, C}, {500, N}, {1200, N}}, vc300)), 3, 10, 200.0);
}

TEST(TreeWalk, E4Cases) {
  // Non-charging detour road: the trip never reaches a charging road.
  expect_leaf(walk(trip(kPar, N, N, {{-300, N}, {1100, N}}, kVOutside)), 4, 1, std::nullopt);
  expect_leaf(walk(trip(kPar, N, N, {{-300, N}, {1100, C}}, kVOutside)), 4, 1, 1100.0);
  expect_leaf(walk(trip(kPar, N, N, {{-5, N}, {400, N}, {1200, C}}, kVOutside)), 4, 2, std::nullopt);
  expect_leaf(walk(trip(kPar, N, N, {{-5, N}, {400, C}, {1200, N}}, kVOutside)), 4, 3, 400.0);
  const std::vector<Road> no_vc{{-10, N}, {500, N}, {1200, C}};
  const std::vector<Road> vc{{-10, N}, {700, C}, {1200, N}};
  expect_leaf(walk(trip(kPar, N, N, {{-5, N}, {300, N}, {600, N}, {1200, C}}, no_vc)), 4, 4,
              std::nullopt);
  expect_leaf(walk(trip(kPar, N, N, {{-5, N}, {300, N}, {600, N}, {1200, C}}, vc)), 4, 5, 1000.0);
  expect_leaf(walk(trip(kPar, N, N, {{-5, N}, {300, N}, {600, C}, {1200, N}}, no_vc)), 4, 6, 600.0);
  expect_leaf(walk(trip(kPar, N, N, {{-5, N}, {300, C}, {600, C}, {1200, N}}, no_vc)), 4, 10, 300.0);
}

TEST(TreeWalk, PerpendicularCases) {
  const std::vector<Road> h_none{{-50, N}, {1200, C}, {1300, N}};
  expect_leaf(walk(trip(kPerp, N, C, h_none, kVOutside)), 7, 1, 1000.0);
  expect_leaf(walk(trip(kPerp, N, N, h_none, kVOutside)), 8, 1, std::nullopt);
  const std::vector<Road> h_nc{{-50, N}, {400, N}, {1200, C}};
  const std::vector<Road> v_c{{-10, N}, {600, C}, {1200, N}};
  expect_leaf(walk(trip(kPerp, N, C, h_nc, kVOutside)), 7, 2, 1000.0);
  expect_leaf(walk(trip(kPerp, N, C, h_nc, v_c)), 7, 3, 600.0);
  expect_leaf(walk(trip(kPerp, N, N, h_nc, v_c)), 8, 3, 600.0);

  const std::vector<Road> h_c{{-50, N}, {300, C}, {1200, N}};
  const std::vector<Road> v_nc200{{-10, N}, {200, N}, {1200, C}};
  const std::vector<Road> v_nc900{{-10, N}, {900, N}, {1200, C}};
  expect_leaf(walk(trip(kPerp, N, C, h_c, v_nc200)), 7, 5, 500.0);
  expect_leaf(walk(trip(kPerp, N, C, h_c, v_nc900)), 7, 6, 1000.0);
  expect_leaf(walk(trip(kPerp, N, N, h_c, v_nc900)), 8, 5, 1200.0);

  const std::vector<Road> v_c_first{{-10, N}, {400, C}, {800, N}, {1200, N}};
  expect_leaf(walk(trip(kPerp, N, C, h_c, v_c_first)), 7, 9, 400.0);
  expect_leaf(walk(trip(kPerp, N, N, h_c, v_c_first)), 8, 8, 400.0);
  // Non-charging vertical road at 100 then charging at 700: 600 > 300 so turn onto the
  // horizontal charging road.
  const std::vector<Road> v_race{{-10, N}, {100, N}, {700, C}, {1200, N}};
  expect_leaf(walk(trip(kPerp, N, C, h_c, v_race)), 7, 7, 400.0);
  expect_leaf(walk(trip(kPerp, N, N, h_c, v_race)), 8, 6, 400.0);
}

TEST(TreeWalk, MismatchedContextThrows) {
  const auto r = trip(kPar, N, C, {{-5, N}, {400, N}, {1200, C}}, kVOutside);
  EventContext ctx = classify_event(r);
  ctx.d_nhnc = 401.0;
  EXPECT_THROW(walk_tree(ctx, r), InvariantViolation);
  ctx = classify_event(r);
  ctx.event = Event::E4;
  EXPECT_THROW(walk_tree(ctx, r), InvariantViolation);
}

TEST(Estimates, BernoulliStandardError) {
  const auto e = bernoulli_estimate(30, 100, 9);
  EXPECT_DOUBLE_EQ(e.value, 0.3);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(0.21 / 100));
  EXPECT_EQ(e.seed, 9u);
}

TEST(Estimates, DegenerateFractions) {
  RunOptions opts;
  const auto all = estimate_cdf_dn({0.016, 1.0}, 2000, 3000, {1.0, 500.0}, 5000, opts);
  for (const auto& e : all) {
    EXPECT_EQ(e.value, 1.0);
    EXPECT_EQ(e.std_error, 0.0);
  }
  EXPECT_EQ(estimate_prob_tc({0.016, 0.0}, 2000, 3000, 5000, opts).value, 0.0);
  EXPECT_EQ(estimate_prob_tc({0.016, 1.0}, 2000, 3000, 5000, opts).value, 1.0);
}

TEST(Estimates, WorkerCountDoesNotChangeTallies) {
  RunOptions one, four;
  one.seed = four.seed = 99;
  four.workers = 4;
  const std::vector<double> xs{100, 1000, 3000};
  const auto a = simulate_trips({0.016, 0.2}, 2000, 3000, xs, 20000, one);
  const auto b = simulate_trips({0.016, 0.2}, 2000, 3000, xs, 20000, four);
  EXPECT_EQ(a.below, b.below);
  EXPECT_EQ(a.passes, b.passes);
  EXPECT_EQ(a.event_counts, b.event_counts);
  EXPECT_EQ(a.leaf_counts, b.leaf_counts);
  EXPECT_EQ(a.event_below, b.event_below);
}

TEST(Estimates, NoInconsistentTrials) {
  RunOptions opts;
  opts.seed = 4;
  const auto s = simulate_trips({0.016, 0.2}, 2000, 3000, {500}, 50000, opts);
  EXPECT_EQ(s.inconsistencies, 0u);
  EXPECT_EQ(s.n, 50000u);
}

// Leaf frequencies follow the exact leaf probabilities. Small spans keep several roads in play so
// every branch of every tree sees traffic.
TEST(Estimates, LeafFrequenciesMatchExactProbabilities) {
  const ModelParams m{0.003, 0.4};
  const double dh = 500, dv = 500;
  const std::uint64_t n = 200000;
  RunOptions opts;
  opts.seed = 17;
  const auto s = simulate_trips(m, dh, dv, {}, n, opts);
  EXPECT_EQ(s.inconsistencies, 0u);
  for (Event e : kAllEvents) {
    for (LeafId id : leaves_of(e)) {
      const double want = analytic::exact_leaf_probability(id, m, dh, dv) * event_probability(e, m.p);
      const double got = static_cast<double>(s.leaf_counts[leaf_flat_index(id)]) / n;
      const double sigma = std::sqrt(want * (1 - want) / n);
      EXPECT_NEAR(got, want, 4 * sigma + 1e-9) << to_string(id);
    }
  }
}

TEST(Estimates, NoPassMassConverges) {
  const ModelParams m{0.006, 0.2};
  const std::uint64_t n = 100000;
  RunOptions opts;
  opts.seed = 23;
  const auto s = simulate_trips(m, 1500, 2000, {}, n, opts);
  for (Event e : {Event::E4, Event::E8}) {
    const int k = event_index(e) - 1;
    const double got = static_cast<double>(s.event_counts[k] - s.event_passes[k]) / n;
    const double want = analytic::no_pass_mass(e, m, 1500, 2000);
    EXPECT_NEAR(got, want, 3 * std::sqrt(want * (1 - want) / n)) << to_string(e);
  }
}

TEST(Conditional, SourceChargingEventsAreCertain) {
  RunOptions opts;
  for (Event e : {Event::E1, Event::E5}) {
    const auto est = estimate_conditional(e, {0.016, 0.2}, 2000, 3000, {1e-6, 10.0}, 2000, opts);
    for (const auto& r : est) EXPECT_EQ(r.value, 1.0);
  }
}

TEST(Conditional, E8MatchesLemma) {
  const ModelParams m{0.01, 0.3};
  const double dh = 1000, dv = 1000;
  const std::vector<double> xs{300, 800, 1500};
  RunOptions opts;
  opts.seed = 31;
  const auto est = estimate_conditional(Event::E8, m, dh, dv, xs, 20000, opts);
  const double pe = event_probability(Event::E8, m.p);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double want = analytic::lemma_term(Event::E8, {m, dh, dv, xs[k]}) / pe;
    EXPECT_NEAR(est[k].value, want, 3 * est[k].std_error + 1e-8) << xs[k];
  }
}

TEST(Conditional, AcceptedTripsAllBelongToTheEvent) {
  RunOptions opts;
  const auto s = sample_conditional(Event::E3, {0.016, 0.2}, 2000, 3000, 500, opts);
  ASSERT_EQ(s.outcomes.size(), 500u);
  for (const auto& o : s.outcomes) EXPECT_EQ(o.event, Event::E3);
  EXPECT_GE(s.attempts, 500u);
}

TEST(Conditional, StarvationIsReported) {
  RunOptions opts;
  EXPECT_THROW(sample_conditional(Event::E1, {0.016, 0.0}, 2000, 3000, 10, opts),
               AcceptanceStarvation);
}

TEST(Rejection, GapSamplesStayInsideSpan) {
  RunOptions opts;
  const auto ecdf = rejection_sample_x2({0.016, 0.2}, 3000, 5000, opts);
  ASSERT_EQ(ecdf.size(), 5000u);
  for (double g : ecdf.sorted) {
    EXPECT_GT(g, 0.0);
    EXPECT_LT(g, 3000.0);
  }
  EXPECT_EQ(ecdf.cdf(3000.0), 1.0);
  EXPECT_EQ(ecdf.cdf(0.0), 0.0);
  EXPECT_GT(ecdf.attempts, ecdf.size());
}

TEST(Rejection, MatchesGapLaw) {
  const ModelParams m{0.01, 0.5};
  RunOptions opts;
  opts.seed = 3;
  const std::uint64_t n = 100000;
  const auto ecdf = rejection_sample_x1(m, 1000, n, opts);
  const double want = analytic::cdf_x1(m, 1000, 200);
  const double got = ecdf.cdf(200);
  EXPECT_NEAR(got, want, 3 * std::sqrt(want * (1 - want) / n));
}

TEST(Parallel, ChunksCoverRangeOnce) {
  std::vector<std::atomic<int>> hits(37);
  parallel_chunks(37, 4, [&](std::uint64_t b, std::uint64_t e, int) {
    for (auto i = b; i < e; ++i) hits[i]++;
  });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}
