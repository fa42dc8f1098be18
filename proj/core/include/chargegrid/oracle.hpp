#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chargegrid/policy.hpp"

namespace chargegrid::oracle {

enum class Axis { Horizontal, Vertical };

struct Point {
  double x = 0.0;
  double y = 0.0;
  auto operator<=>(const Point&) const = default;
};

struct Edge {
  int from = 0;
  int to = 0;
  double length = 0.0;
  bool charging = false;
  Axis axis = Axis::Horizontal;
  int road = 0;  // index into GridGraph::roads
};

struct GridRoad {
  Axis axis = Axis::Horizontal;
  double coordinate = 0.0;  // y for horizontal roads, x for vertical ones
  bool charging = false;
};

struct GridGraph {
  std::vector<Point> nodes;
  std::vector<Edge> edges;
  std::vector<GridRoad> roads;
  std::vector<std::vector<int>> adjacency;  // edge indices per node
  int source = 0;
  int destination = 0;

  int degree(int node) const { return static_cast<int>(adjacency[node].size()); }
  int other_end(int edge, int node) const;
};

// Includes every road inside the trip span plus `margin` roads beyond it on each side of each
// axis, with the source and destination roads always present.
GridGraph build_grid(const RoadRealization& realization, int margin);

struct RouteResult {
  double length = 0.0;
  double charging_length = 0.0;
  std::optional<double> d_n;
  bool passes_charging = false;
  std::vector<int> polyline;  // node indices, source first
};

// Lengths within this many meters count as equal.
inline constexpr double kLengthEps = 1e-6;

// Label-setting search on (length ascending, charging length descending); remaining ties go to
// the lexicographically smallest node-coordinate sequence.
RouteResult best_route(const GridGraph& graph, int source, int destination);
RouteResult best_route(const GridGraph& graph);

// Depth-first enumeration of simple paths, pruned with the Manhattan lower bound. Only meant for
// small graphs; returns the best (length, charging length) pair found.
RouteResult exhaustive_best(const GridGraph& graph, int source, int destination);

// Fills d_n, passes_charging, length and charging_length from a node sequence.
RouteResult evaluate_path(const GridGraph& graph, const std::vector<int>& path);

struct Discrepancy {
  std::uint64_t trial = 0;
  RoadRealization realization;
  std::optional<policy::TripOutcome> tree;  // empty when the tree walk aborted
  RouteResult route;
  std::vector<Point> route_points;
};

struct CrossCheckReport {
  std::uint64_t trials = 0;
  std::uint64_t passes_agree = 0;
  std::uint64_t d_n_agree = 0;  // passes agree and, when passing, d_n within kLengthEps
  std::uint64_t inconsistencies = 0;
  std::vector<Discrepancy> discrepancies;  // trials where passes_charging or d_n disagree

  double passes_agreement() const;
  double d_n_agreement() const;
};

struct CrossCheckOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  int margin = 1;
};

CrossCheckReport cross_check(const ModelParams& params, double d_h, double d_v, std::uint64_t n,
                             const CrossCheckOptions& opts);

// One JSON object per line with the full road lists.
std::string to_json_line(const Discrepancy& d);

}  // namespace chargegrid::oracle
