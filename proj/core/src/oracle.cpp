#include "chargegrid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>

#include <json.hpp>

namespace chargegrid::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Road> select_roads(const std::vector<Road>& roads, double span, int margin) {
  std::vector<Road> below, inside, beyond;
  for (const Road& r : roads) {
    if (r.offset < 0.0)
      below.push_back(r);
    else if (r.offset < span)
      inside.push_back(r);
    else
      beyond.push_back(r);
  }
  const auto m = static_cast<std::size_t>(margin);
  std::vector<Road> out;
  out.insert(out.end(), below.end() - static_cast<long>(std::min(m, below.size())), below.end());
  out.insert(out.end(), inside.begin(), inside.end());
  out.insert(out.end(), beyond.begin(), beyond.begin() + static_cast<long>(std::min(m, beyond.size())));
  return out;
}

// Path comparison by node coordinates, used for the last tie-break.
bool lex_less(const GridGraph& g, const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [&](int i, int j) { return g.nodes[i] < g.nodes[j]; });
}

std::vector<int> trace(const std::vector<int>& pred, int node) {
  std::vector<int> path;
  for (int v = node; v != -1; v = pred[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

// -1: a better than b, 1: worse, 0: tied on the pair objective.
int compare_pair(double len_a, double chg_a, double len_b, double chg_b) {
  if (len_a < len_b - kLengthEps) return -1;
  if (len_a > len_b + kLengthEps) return 1;
  if (chg_a > chg_b + kLengthEps) return -1;
  if (chg_a < chg_b - kLengthEps) return 1;
  return 0;
}

double manhattan(const Point& a, const Point& b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

void require_node(const GridGraph& g, int node) {
  if (node < 0 || node >= static_cast<int>(g.nodes.size()))
    throw InvariantViolation("route endpoint outside the graph");
}

}  // namespace

int GridGraph::other_end(int edge, int node) const {
  const Edge& e = edges[static_cast<std::size_t>(edge)];
  return e.from == node ? e.to : e.from;
}

GridGraph build_grid(const RoadRealization& r, int margin) {
  if (margin < 1) throw ParameterError("margin must be >= 1");
  r.geometry.validate();
  const double dh = r.geometry.d_h, dv = r.geometry.d_v;
  const bool parallel = r.geometry.orientation == Orientation::Parallel;

  GridGraph g;
  int source_road = 0, dest_road = 0;
  if (parallel) {
    source_road = static_cast<int>(g.roads.size());
    g.roads.push_back({Axis::Vertical, 0.0, r.source_charging});
  } else {
    source_road = static_cast<int>(g.roads.size());
    g.roads.push_back({Axis::Horizontal, 0.0, r.source_charging});
  }
  dest_road = static_cast<int>(g.roads.size());
  g.roads.push_back({Axis::Vertical, dh, r.dest_charging});
  for (const Road& h : select_roads(r.h_roads, dv, margin))
    g.roads.push_back({Axis::Horizontal, h.offset, h.charging});
  for (const Road& v : select_roads(r.v_roads, dh, margin))
    g.roads.push_back({Axis::Vertical, v.offset, v.charging});

  const int road_count = static_cast<int>(g.roads.size());
  std::vector<std::vector<int>> on_road(static_cast<std::size_t>(road_count));
  std::map<Point, int> index;
  auto add_node = [&](Point pt) {
    auto [it, fresh] = index.emplace(pt, static_cast<int>(g.nodes.size()));
    if (fresh) g.nodes.push_back(pt);
    return it->second;
  };
  for (int i = 0; i < road_count; ++i) {
    if (g.roads[i].axis != Axis::Horizontal) continue;
    for (int j = 0; j < road_count; ++j) {
      if (g.roads[j].axis != Axis::Vertical) continue;
      const int node = add_node({g.roads[j].coordinate, g.roads[i].coordinate});
      on_road[i].push_back(node);
      on_road[j].push_back(node);
    }
  }
  g.source = add_node({0.0, 0.0});
  g.destination = add_node({dh, dv});
  on_road[source_road].push_back(g.source);
  on_road[dest_road].push_back(g.destination);

  g.adjacency.assign(g.nodes.size(), {});
  for (int i = 0; i < road_count; ++i) {
    auto& list = on_road[i];
    const bool horizontal = g.roads[i].axis == Axis::Horizontal;
    auto along = [&](int n) { return horizontal ? g.nodes[n].x : g.nodes[n].y; };
    std::sort(list.begin(), list.end(), [&](int a, int b) { return along(a) < along(b); });
    list.erase(std::unique(list.begin(), list.end()), list.end());
    for (std::size_t k = 1; k < list.size(); ++k) {
      const int e = static_cast<int>(g.edges.size());
      g.edges.push_back({list[k - 1], list[k], along(list[k]) - along(list[k - 1]),
                         g.roads[i].charging, g.roads[i].axis, i});
      g.adjacency[list[k - 1]].push_back(e);
      g.adjacency[list[k]].push_back(e);
    }
  }
  return g;
}

RouteResult evaluate_path(const GridGraph& g, const std::vector<int>& path) {
  RouteResult out;
  out.polyline = path;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Edge* hop = nullptr;
    for (int e : g.adjacency[path[k - 1]])
      if (g.other_end(e, path[k - 1]) == path[k]) hop = &g.edges[e];
    if (!hop) throw InvariantViolation("path uses a missing edge");
    if (hop->charging && !out.d_n) out.d_n = out.length;
    out.length += hop->length;
    if (hop->charging) out.charging_length += hop->length;
  }
  out.passes_charging = out.charging_length > 0.0;
  return out;
}

RouteResult best_route(const GridGraph& g, int source, int destination) {
  require_node(g, source);
  require_node(g, destination);
  const std::size_t n = g.nodes.size();
  std::vector<double> len(n, kInf), chg(n, 0.0);
  std::vector<int> pred(n, -1);
  std::vector<bool> settled(n, false);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  len[source] = 0.0;
  open.push({0.0, source});
  while (!open.empty()) {
    const auto [l, u] = open.top();
    open.pop();
    if (settled[u] || l > len[u]) continue;
    settled[u] = true;
    if (u == destination) break;
    for (int e : g.adjacency[u]) {
      const int w = g.other_end(e, u);
      if (settled[w]) continue;
      const Edge& edge = g.edges[e];
      const double cand_len = len[u] + edge.length;
      const double cand_chg = chg[u] + (edge.charging ? edge.length : 0.0);
      int cmp = std::isinf(len[w]) ? -1 : compare_pair(cand_len, cand_chg, len[w], chg[w]);
      if (cmp == 0 && lex_less(g, trace(pred, u), trace(pred, pred[w]))) cmp = -1;
      if (cmp < 0) {
        len[w] = cand_len;
        chg[w] = cand_chg;
        pred[w] = u;
        open.push({cand_len, w});
      }
    }
  }
  if (!settled[destination]) throw InvariantViolation("destination unreachable in grid graph");
  return evaluate_path(g, trace(pred, destination));
}

RouteResult best_route(const GridGraph& g) { return best_route(g, g.source, g.destination); }

RouteResult exhaustive_best(const GridGraph& g, int source, int destination) {
  require_node(g, source);
  require_node(g, destination);
  const Point target = g.nodes[destination];
  double best_len = kInf, best_chg = 0.0;
  std::vector<int> best_path, path{source};
  std::vector<bool> on_path(g.nodes.size(), false);
  on_path[source] = true;
  std::function<void(int, double, double)> dfs = [&](int u, double l, double c) {
    if (l + manhattan(g.nodes[u], target) > best_len + kLengthEps) return;
    if (u == destination) {
      int cmp = best_path.empty() ? -1 : compare_pair(l, c, best_len, best_chg);
      if (cmp == 0 && lex_less(g, path, best_path)) cmp = -1;
      if (cmp < 0) {
        best_len = l;
        best_chg = c;
        best_path = path;
      }
      return;
    }
    for (int e : g.adjacency[u]) {
      const int w = g.other_end(e, u);
      if (on_path[w]) continue;
      const Edge& edge = g.edges[e];
      on_path[w] = true;
      path.push_back(w);
      dfs(w, l + edge.length, c + (edge.charging ? edge.length : 0.0));
      path.pop_back();
      on_path[w] = false;
    }
  };
  dfs(source, 0.0, 0.0);
  if (best_path.empty()) throw InvariantViolation("destination unreachable in grid graph");
  return evaluate_path(g, best_path);
}

double CrossCheckReport::passes_agreement() const {
  return trials == 0 ? 0.0 : static_cast<double>(passes_agree) / static_cast<double>(trials);
}

double CrossCheckReport::d_n_agreement() const {
  return trials == 0 ? 0.0 : static_cast<double>(d_n_agree) / static_cast<double>(trials);
}

CrossCheckReport cross_check(const ModelParams& params, double d_h, double d_v, std::uint64_t n,
                             const CrossCheckOptions& opts) {
  params.validate();
  TripGeometry{Orientation::Parallel, d_h, d_v}.validate();
  if (opts.margin < 1) throw ParameterError("margin must be >= 1");
  const SpanPolicy span{opts.margin, true};
  const int w = std::max(1, opts.workers);
  std::vector<CrossCheckReport> parts(static_cast<std::size_t>(w));
  policy::parallel_chunks(n, w, [&](std::uint64_t b, std::uint64_t e, int k) {
    CrossCheckReport& rep = parts[static_cast<std::size_t>(k)];
    for (std::uint64_t t = b; t < e; ++t) {
      const RoadRealization real =
          policy::sample_trip_realization(params, d_h, d_v, span, opts.seed, t);
      ++rep.trials;
      std::optional<policy::TripOutcome> tree;
      try {
        tree = policy::walk_tree(classify_event(real), real);
      } catch (const InvariantViolation&) {
        ++rep.inconsistencies;
      }
      const GridGraph graph = build_grid(real, opts.margin);
      const RouteResult route = best_route(graph);
      bool passes_ok = tree && tree->passes_charging == route.passes_charging;
      bool dn_ok = passes_ok && (!route.d_n || std::abs(*tree->d_n - *route.d_n) <= kLengthEps);
      if (passes_ok) ++rep.passes_agree;
      if (dn_ok) ++rep.d_n_agree;
      if (!dn_ok) {
        std::vector<Point> pts;
        for (int node : route.polyline) pts.push_back(graph.nodes[node]);
        rep.discrepancies.push_back({t, real, tree, route, std::move(pts)});
      }
    }
  });
  CrossCheckReport total;
  for (auto& p : parts) {
    total.trials += p.trials;
    total.passes_agree += p.passes_agree;
    total.d_n_agree += p.d_n_agree;
    total.inconsistencies += p.inconsistencies;
    for (auto& d : p.discrepancies) total.discrepancies.push_back(std::move(d));
  }
  return total;
}

std::string to_json_line(const Discrepancy& d) {
  using nlohmann::json;
  auto roads = [](const std::vector<Road>& rs) {
    json arr = json::array();
    for (const Road& r : rs) arr.push_back({{"offset", r.offset}, {"charging", r.charging}});
    return arr;
  };
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  const RoadRealization& r = d.realization;
  json j;
  j["trial"] = d.trial;
  j["orientation"] = to_string(r.geometry.orientation);
  j["d_h"] = r.geometry.d_h;
  j["d_v"] = r.geometry.d_v;
  j["source_charging"] = r.source_charging;
  j["dest_charging"] = r.dest_charging;
  j["h_roads"] = roads(r.h_roads);
  j["v_roads"] = roads(r.v_roads);
  if (d.tree) {
    j["tree"] = {{"event", to_string(d.tree->event)},
                 {"leaf", to_string(d.tree->leaf)},
                 {"d_n", opt(d.tree->d_n)},
                 {"passes_charging", d.tree->passes_charging}};
  } else {
    j["tree"] = nullptr;
  }
  json poly = json::array();
  for (const Point& pt : d.route_points) poly.push_back({pt.x, pt.y});
  j["route"] = {{"length", d.route.length},
                {"charging_length", d.route.charging_length},
                {"d_n", opt(d.route.d_n)},
                {"passes_charging", d.route.passes_charging},
                {"polyline", poly}};
  return j.dump();
}

}  // namespace chargegrid::oracle
