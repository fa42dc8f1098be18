#include <gtest/gtest.h>

#include <json.hpp>

#include "chargegrid/oracle.hpp"

using namespace chargegrid;
using namespace chargegrid::oracle;

namespace {

RoadRealization sample(const ModelParams& m, double dh, double dv, std::uint64_t seed,
                       std::uint64_t trial) {
  return policy::sample_trip_realization(m, dh, dv, {}, seed, trial);
}

int count_axis(const GridGraph& g, Axis a) {
  int n = 0;
  for (const GridRoad& r : g.roads) n += r.axis == a;
  return n;
}

RoadRealization three_by_three() {
  RoadRealization r;
  r.geometry = {Orientation::Parallel, 100, 100};
  r.h_roads = {{-10, false}, {50, true}, {150, false}};
  r.v_roads = {{-10, false}, {150, false}};
  return r;
}

}  // namespace

TEST(Grid, NodeCountIsProductPlusEndpoints) {
  for (int t = 0; t < 200; ++t) {
    const auto r = sample({0.01, 0.3}, 500, 700, 8, t);
    const auto g = build_grid(r, 1);
    const int hz = count_axis(g, Axis::Horizontal), vt = count_axis(g, Axis::Vertical);
    EXPECT_EQ(static_cast<int>(g.nodes.size()), hz * vt + 2);
    // Every road crossing the trip span is present.
    auto present = [&](Axis a, double c) {
      for (const GridRoad& gr : g.roads)
        if (gr.axis == a && gr.coordinate == c) return true;
      return false;
    };
    for (const Road& h : r.h_roads)
      if (h.offset > 0 && h.offset < 700) EXPECT_TRUE(present(Axis::Horizontal, h.offset));
    for (const Road& v : r.v_roads)
      if (v.offset > 0 && v.offset < 500) EXPECT_TRUE(present(Axis::Vertical, v.offset));
    // Perpendicular trips start on a horizontal road.
    EXPECT_EQ(present(Axis::Horizontal, 0.0), r.geometry.orientation == Orientation::Perpendicular);
  }
}

TEST(Grid, DegreesAreGridLike) {
  for (int t = 0; t < 100; ++t) {
    const auto g = build_grid(sample({0.01, 0.5}, 400, 400, 2, t), 2);
    for (int n = 0; n < static_cast<int>(g.nodes.size()); ++n) {
      EXPECT_GE(g.degree(n), 2);
      EXPECT_LE(g.degree(n), 4);
    }
  }
}

TEST(Grid, MarginMustBePositive) {
  EXPECT_THROW(build_grid(three_by_three(), 0), ParameterError);
}

TEST(Route, HandBuiltGridUsesTheChargingRoad) {
  const auto g = build_grid(three_by_three(), 1);
  const auto best = best_route(g);
  EXPECT_NEAR(best.length, 200.0, kLengthEps);
  EXPECT_NEAR(best.charging_length, 100.0, kLengthEps);
  ASSERT_TRUE(best.d_n.has_value());
  EXPECT_NEAR(*best.d_n, 50.0, kLengthEps);
  EXPECT_TRUE(best.passes_charging);
  EXPECT_EQ(best.polyline.front(), g.source);
  EXPECT_EQ(best.polyline.back(), g.destination);
}

TEST(Route, AllOrNothingCharging) {
  for (double p : {0.0, 1.0}) {
    for (int t = 0; t < 50; ++t) {
      const auto r = sample({0.01, p}, 500, 500, 6, t);
      const auto best = best_route(build_grid(r, 1));
      EXPECT_EQ(best.passes_charging, p == 1.0);
      if (p == 1.0) {
        EXPECT_NEAR(best.charging_length, best.length, kLengthEps);
        EXPECT_NEAR(*best.d_n, 0.0, kLengthEps);
      }
    }
  }
}

TEST(Route, NeverShorterThanManhattan) {
  for (int t = 0; t < 300; ++t) {
    const auto r = sample({0.005, 0.3}, 600, 900, 12, t);
    const auto best = best_route(build_grid(r, 1));
    EXPECT_GE(best.length, 1500.0 - kLengthEps);
  }
}

TEST(Route, DistanceIsPrefixBeforeFirstChargingEdge) {
  for (int t = 0; t < 300; ++t) {
    const auto g = build_grid(sample({0.01, 0.3}, 500, 500, 13, t), 1);
    const auto best = best_route(g);
    double prefix = 0.0;
    std::optional<double> first;
    for (std::size_t k = 1; k < best.polyline.size() && !first; ++k) {
      const int a = best.polyline[k - 1], b = best.polyline[k];
      for (int e : g.adjacency[a]) {
        if (g.other_end(e, a) != b) continue;
        if (g.edges[e].charging) first = prefix;
        prefix += g.edges[e].length;
        break;
      }
    }
    EXPECT_EQ(first.has_value(), best.d_n.has_value());
    if (first && best.d_n) EXPECT_NEAR(*first, *best.d_n, kLengthEps);
  }
}

TEST(Route, MatchesExhaustiveEnumeration) {
  int checked = 0;
  for (int t = 0; checked < 100; ++t) {
    ASSERT_LT(t, 5000);
    const auto r = sample({0.004, 0.4}, 500, 500, 41, t);
    const auto g = build_grid(r, 1);
    if (g.roads.size() > 12) continue;
    ++checked;
    const auto fast = best_route(g);
    const auto slow = exhaustive_best(g, g.source, g.destination);
    EXPECT_NEAR(fast.length, slow.length, kLengthEps) << t;
    EXPECT_NEAR(fast.charging_length, slow.charging_length, kLengthEps) << t;
  }
}

TEST(Route, EvaluatePathRejectsMissingEdges) {
  const auto g = build_grid(three_by_three(), 1);
  EXPECT_THROW(evaluate_path(g, {g.source, g.destination}), InvariantViolation);
}

TEST(CrossCheck, DegenerateFractionsAgreeExactly) {
  for (double p : {0.0, 1.0}) {
    CrossCheckOptions opts;
    opts.seed = 5;
    const auto rep = cross_check({0.01, p}, 500, 500, 400, opts);
    EXPECT_EQ(rep.trials, 400u);
    EXPECT_EQ(rep.passes_agreement(), 1.0);
    EXPECT_EQ(rep.inconsistencies, 0u);
    EXPECT_TRUE(rep.discrepancies.empty());
  }
}

TEST(CrossCheck, WorkersDoNotChangeTheReport) {
  CrossCheckOptions a, b;
  a.seed = b.seed = 77;
  b.workers = 3;
  const auto ra = cross_check({0.01, 0.3}, 500, 500, 300, a);
  const auto rb = cross_check({0.01, 0.3}, 500, 500, 300, b);
  EXPECT_EQ(ra.passes_agree, rb.passes_agree);
  EXPECT_EQ(ra.d_n_agree, rb.d_n_agree);
  ASSERT_EQ(ra.discrepancies.size(), rb.discrepancies.size());
  for (std::size_t k = 0; k < ra.discrepancies.size(); ++k)
    EXPECT_EQ(to_json_line(ra.discrepancies[k]), to_json_line(rb.discrepancies[k]));
}

TEST(CrossCheck, JsonLineCarriesRoadLists) {
  Discrepancy d;
  d.trial = 12;
  d.realization = three_by_three();
  d.route = best_route(build_grid(d.realization, 1));
  d.route_points = {{0, 0}, {0, 50}, {100, 50}, {100, 100}};
  const auto j = nlohmann::json::parse(to_json_line(d));
  EXPECT_EQ(j["trial"], 12);
  EXPECT_EQ(j["h_roads"].size(), 3u);
  EXPECT_EQ(j["v_roads"].size(), 2u);
  EXPECT_TRUE(j["tree"].is_null());
  EXPECT_EQ(j["route"]["polyline"].size(), 4u);
  EXPECT_EQ(to_json_line(d).find('\n'), std::string::npos);
}
