#include "chargegrid/policy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace chargegrid::policy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kTripStream = 0;
constexpr std::uint64_t kGapStream = 1;
constexpr std::uint64_t kDistanceStream = 2;
constexpr std::uint64_t kBlock = 1u << 16;
constexpr std::uint64_t kStarvationWindow = 100000;
constexpr double kMinAcceptance = 1e-6;

double or_inf(const std::optional<double>& v) { return v ? *v : kInf; }

// Offset of the furthest road strictly inside (0, span), if any.
std::optional<Road> furthest_in_span(const std::vector<Road>& roads, double span) {
  std::optional<Road> out;
  for (const Road& r : roads)
    if (r.offset > 0.0 && r.offset < span) out = r;
  return out;
}

void check_context(const EventContext& ctx, const RoadRealization& r) {
  const EventContext fresh = classify_event(r);
  if (fresh.event != ctx.event || fresh.d_nhc != ctx.d_nhc || fresh.d_nvc != ctx.d_nvc ||
      fresh.d_nhnc != ctx.d_nhnc || fresh.d_nvnc != ctx.d_nvnc || fresh.d_l != ctx.d_l)
    throw InvariantViolation("event context does not describe the realization");
}

struct Walker {
  const RoadRealization& r;
  double dh, dv;
  AxisSummary h, v;

  Walker(const RoadRealization& real)
      : r(real), dh(real.geometry.d_h), dv(real.geometry.d_v),
        h(summarize_axis(real.h_roads, real.geometry.d_v)),
        v(summarize_axis(real.v_roads, real.geometry.d_h)) {}

  TripOutcome at(int ev, int idx, std::optional<double> dn) const {
    TripOutcome o;
    o.event = event_from_index(ev);
    o.leaf = {ev, idx};
    o.d_n = dn;
    o.passes_charging = dn.has_value();
    return o;
  }

  // Nearest road in span on an axis; the count guarantees it exists.
  static double in_span(const std::optional<double>& nearest) {
    if (!nearest) throw InvariantViolation("counted road missing from the nearest-road scan");
    return *nearest;
  }

  // Shortest detour when no horizontal road crosses the span: the nearer of the first road past
  // the destination and the first road behind the source.
  std::pair<double, bool> detour() const {
    if (!h.first_beyond || !h.first_negative)
      throw InvariantViolation("detour road outside the sampled extent");
    const double up = h.first_beyond->offset;
    const double down = -h.first_negative->offset;
    if (up - dv < down) return {up, h.first_beyond->charging};
    return {down, h.first_negative->charging};
  }

  bool furthest_is_charging() const {
    auto top = furthest_in_span(r.h_roads, dv);
    if (!top) throw InvariantViolation("no horizontal road in span");
    return top->charging;
  }

  TripOutcome e1() const {
    if (h.in_span() == 0) return at(1, 1, 0.0);
    if (h.charging_in_span > 0) return at(1, 2, 0.0);
    return at(1, 3, 0.0);
  }

  TripOutcome e2() const {
    if (h.in_span() == 0) return at(2, 1, 0.0);
    if (h.charging_in_span == 0) return at(2, 2, 0.0);
    const int base = v.charging_in_span == 0 ? 3 : 5;
    return at(2, base + (furthest_is_charging() ? 1 : 0), 0.0);
  }

  TripOutcome e3() const {
    if (h.in_span() == 0) {
      auto [dist, charging] = detour();
      return at(3, 1, charging ? dist : dist + dh);
    }
    if (h.charging_in_span == 0) {
      const double nc = in_span(h.nearest_nc);
      if (h.noncharging_in_span == 1) return at(3, 2, nc + dh);
      if (v.charging_in_span == 0) return at(3, 3, nc + dh);
      return at(3, 4, nc + in_span(v.nearest_c));
    }
    const double hc = in_span(h.nearest_c);
    const double hnc = or_inf(h.nearest_nc);
    const bool vc_exists = v.charging_in_span > 0;
    if (hc < hnc) return at(3, vc_exists ? 10 : 7, hc);
    if (!vc_exists) return hc - hnc < dh ? at(3, 5, hc) : at(3, 6, hnc + dh);
    const double vc = in_span(v.nearest_c);
    return hc - hnc > vc ? at(3, 8, hnc + vc) : at(3, 9, hc);
  }

  // Shared tail of the E4 charging-road cases once the vertical charging road exists.
  TripOutcome e4_race(int first_leaf) const {
    const double hc = in_span(h.nearest_c);
    const double hnc = or_inf(h.nearest_nc);
    if (hc < hnc) return at(4, first_leaf + 2, hc);
    const double vc = in_span(v.nearest_c);
    return hc - hnc > vc ? at(4, first_leaf, hnc + vc) : at(4, first_leaf + 1, hc);
  }

  TripOutcome e4() const {
    const int nc = h.noncharging_in_span, c = h.charging_in_span;
    const bool vc_exists = v.charging_in_span > 0;
    if (nc + c == 0) {
      auto [dist, charging] = detour();
      return charging ? at(4, 1, dist) : at(4, 1, std::nullopt);
    }
    if (c == 0) {
      if (nc == 1) return at(4, 2, std::nullopt);
      if (!vc_exists) return at(4, 4, std::nullopt);
      return at(4, 5, in_span(h.nearest_nc) + in_span(v.nearest_c));
    }
    if (c == 1 && nc == 0) return at(4, 3, in_span(h.nearest_c));
    if (c == 1) return vc_exists ? e4_race(7) : at(4, 6, in_span(h.nearest_c));
    return vc_exists ? e4_race(11) : at(4, 10, in_span(h.nearest_c));
  }

  // Perpendicular trips with a charging horizontal road in span. `ev` selects E7 or E8 numbering.
  TripOutcome perpendicular_hc(int ev) const {
    const double hc = in_span(h.nearest_c);
    const int off = ev == 7 ? 0 : -1;
    if (v.in_span() == 0) return at(ev, 4, ev == 7 ? std::optional<double>(dh) : std::nullopt);
    if (v.charging_in_span == 0) {
      const double vnc = in_span(v.nearest_nc);
      if (ev == 8) return at(8, 5, vnc + hc);
      return hc < dh - vnc ? at(7, 5, vnc + hc) : at(7, 6, dh);
    }
    const double vc = in_span(v.nearest_c);
    const double vnc = or_inf(v.nearest_nc);
    if (vnc >= vc) return at(ev, 9 + off, vc);
    return vc - vnc > hc ? at(ev, 7 + off, vnc + hc) : at(ev, 8 + off, vc);
  }

  TripOutcome e7() const {
    if (h.in_span() == 0) return at(7, 1, dh);
    if (h.charging_in_span == 0)
      return v.charging_in_span == 0 ? at(7, 2, dh) : at(7, 3, in_span(v.nearest_c));
    return perpendicular_hc(7);
  }

  TripOutcome e8() const {
    if (h.in_span() == 0) return at(8, 1, std::nullopt);
    if (h.charging_in_span == 0)
      return v.charging_in_span == 0 ? at(8, 2, std::nullopt) : at(8, 3, in_span(v.nearest_c));
    return perpendicular_hc(8);
  }

  TripOutcome e6() const {
    if (h.in_span() == 0) return at(6, 1, 0.0);
    if (h.charging_in_span == 0) return at(6, v.charging_in_span == 0 ? 2 : 3, 0.0);
    if (v.charging_in_span == 0) return at(6, 4, 0.0);
    return at(6, furthest_is_charging() ? 6 : 5, 0.0);
  }
};

// Orientation coin and charging flags; the same leading draws in every trip stream.
struct TripHead {
  TripGeometry geometry;
  ChargingFlags flags;
  Event event;
};

TripHead draw_head(const ModelParams& params, double d_h, double d_v, SubstreamRng& rng) {
  TripHead head;
  head.geometry.orientation = rng.bernoulli(0.5) ? Orientation::Parallel : Orientation::Perpendicular;
  head.geometry.d_h = d_h;
  head.geometry.d_v = d_v;
  head.flags = draw_charging_flags(params, rng);
  head.event = event_for(head.geometry.orientation, head.flags.source, head.flags.dest);
  return head;
}

TripOutcome run_trip(const ModelParams& params, const TripHead& head, const SpanPolicy& span,
                     SubstreamRng& rng) {
  RoadRealization real = generate_roads(params, head.geometry, span, head.flags, rng);
  return walk_tree(classify_event(real), real);
}

SimulationSummary empty_summary(const std::vector<double>& xs, std::uint64_t seed) {
  SimulationSummary s;
  s.seed = seed;
  s.xs = xs;
  s.below.assign(xs.size(), 0);
  for (auto& v : s.event_below) v.assign(xs.size(), 0);
  s.leaf_counts.assign(static_cast<std::size_t>(total_leaf_count()), 0);
  return s;
}

// Scans attempts in fixed-size blocks and keeps the first `wanted` accepted results in attempt
// order. Blocks are evaluated in parallel; the kept set does not depend on the worker count.
template <class T, class Attempt>
std::vector<T> block_rejection(std::uint64_t wanted, int workers, std::uint64_t& attempts,
                               const Attempt& attempt) {
  std::vector<T> kept;
  kept.reserve(static_cast<std::size_t>(wanted));
  attempts = 0;
  std::vector<std::optional<T>> block(kBlock);
  while (kept.size() < wanted) {
    const std::uint64_t start = attempts;
    parallel_chunks(kBlock, workers, [&](std::uint64_t b, std::uint64_t e, int) {
      for (std::uint64_t i = b; i < e; ++i) block[i] = attempt(start + i);
    });
    for (std::uint64_t i = 0; i < kBlock && kept.size() < wanted; ++i) {
      ++attempts;
      if (block[i]) kept.push_back(std::move(*block[i]));
      if (attempts == kStarvationWindow &&
          static_cast<double>(kept.size()) / static_cast<double>(attempts) < kMinAcceptance)
        throw AcceptanceStarvation("acceptance rate below 1e-6 after " +
                                   std::to_string(kStarvationWindow) + " attempts");
    }
  }
  return kept;
}

void require_xs(const std::vector<double>& xs) {
  if (!std::is_sorted(xs.begin(), xs.end())) throw ParameterError("xs must be sorted");
  for (double x : xs) require_nonnegative(x, "x");
}

}  // namespace

TripOutcome walk_tree(const EventContext& ctx, const RoadRealization& realization) {
  check_context(ctx, realization);
  Walker w(realization);
  switch (ctx.event) {
    case Event::E1: return w.e1();
    case Event::E2: return w.e2();
    case Event::E3: return w.e3();
    case Event::E4: return w.e4();
    case Event::E5: return w.at(5, 1, 0.0);
    case Event::E6: return w.e6();
    case Event::E7: return w.e7();
    case Event::E8: return w.e8();
  }
  throw InvariantViolation("unknown event");
}

RoadRealization sample_trip_realization(const ModelParams& params, double d_h, double d_v,
                                        const SpanPolicy& span, std::uint64_t seed,
                                        std::uint64_t trial) {
  SubstreamRng rng(seed, trial, kTripStream);
  const TripHead head = draw_head(params, d_h, d_v, rng);
  return generate_roads(params, head.geometry, span, head.flags, rng);
}

EstimateResult bernoulli_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed) {
  EstimateResult r;
  r.n = n;
  r.seed = seed;
  if (n == 0) return r;
  r.value = static_cast<double>(hits) / static_cast<double>(n);
  r.std_error = std::sqrt(r.value * (1.0 - r.value) / static_cast<double>(n));
  return r;
}

void parallel_chunks(std::uint64_t n, int workers,
                     const std::function<void(std::uint64_t, std::uint64_t, int)>& body) {
  const int w = static_cast<int>(std::max<std::uint64_t>(
      1, std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), n)));
  if (w == 1) {
    body(0, n, 0);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex failure_lock;
  for (int k = 0; k < w; ++k) {
    const std::uint64_t b = n * static_cast<std::uint64_t>(k) / static_cast<std::uint64_t>(w);
    const std::uint64_t e = n * static_cast<std::uint64_t>(k + 1) / static_cast<std::uint64_t>(w);
    threads.emplace_back([&, b, e, k] {
      try {
        body(b, e, k);
      } catch (...) {
        std::lock_guard<std::mutex> g(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

void SimulationSummary::merge(const SimulationSummary& o) {
  if (o.xs != xs || o.leaf_counts.size() != leaf_counts.size())
    throw InvariantViolation("merging summaries over different grids");
  n += o.n;
  passes += o.passes;
  inconsistencies += o.inconsistencies;
  for (std::size_t k = 0; k < below.size(); ++k) below[k] += o.below[k];
  for (int e = 0; e < 8; ++e) {
    event_counts[e] += o.event_counts[e];
    event_passes[e] += o.event_passes[e];
    for (std::size_t k = 0; k < below.size(); ++k) event_below[e][k] += o.event_below[e][k];
  }
  for (std::size_t i = 0; i < leaf_counts.size(); ++i) leaf_counts[i] += o.leaf_counts[i];
}

SimulationSummary simulate_trips(const ModelParams& params, double d_h, double d_v,
                                 const std::vector<double>& xs, std::uint64_t n,
                                 const RunOptions& opts) {
  params.validate();
  TripGeometry{Orientation::Parallel, d_h, d_v}.validate();
  require_xs(xs);
  const int w = std::max(1, opts.workers);
  std::vector<SimulationSummary> parts(static_cast<std::size_t>(w), empty_summary(xs, opts.seed));
  parallel_chunks(n, w, [&](std::uint64_t b, std::uint64_t e, int k) {
    SimulationSummary& s = parts[static_cast<std::size_t>(k)];
    for (std::uint64_t t = b; t < e; ++t) {
      SubstreamRng rng(opts.seed, t, kTripStream);
      const TripHead head = draw_head(params, d_h, d_v, rng);
      TripOutcome out;
      try {
        out = run_trip(params, head, opts.span, rng);
      } catch (const InvariantViolation&) {
        ++s.inconsistencies;
        continue;
      }
      const int ei = event_index(out.event) - 1;
      ++s.n;
      ++s.event_counts[ei];
      ++s.leaf_counts[static_cast<std::size_t>(leaf_flat_index(out.leaf))];
      if (!out.passes_charging) continue;
      ++s.passes;
      ++s.event_passes[ei];
      const double dn = *out.d_n;
      // xs sorted: every x above dn counts
      auto first = std::upper_bound(xs.begin(), xs.end(), dn);
      for (auto it = first; it != xs.end(); ++it) {
        const auto k2 = static_cast<std::size_t>(it - xs.begin());
        ++s.below[k2];
        ++s.event_below[ei][k2];
      }
    }
  });
  SimulationSummary total = empty_summary(xs, opts.seed);
  for (const auto& p : parts) total.merge(p);
  return total;
}

std::vector<EstimateResult> estimate_cdf_dn(const ModelParams& params, double d_h, double d_v,
                                            const std::vector<double>& xs, std::uint64_t n,
                                            const RunOptions& opts) {
  if (n == 0) throw ParameterError("n must be >= 1");
  const SimulationSummary s = simulate_trips(params, d_h, d_v, xs, n, opts);
  std::vector<EstimateResult> out;
  for (std::size_t k = 0; k < xs.size(); ++k)
    out.push_back(bernoulli_estimate(s.below[k], s.n, opts.seed));
  return out;
}

EstimateResult estimate_prob_tc(const ModelParams& params, double d_h, double d_v,
                                std::uint64_t n, const RunOptions& opts) {
  if (n == 0) throw ParameterError("n must be >= 1");
  const SimulationSummary s = simulate_trips(params, d_h, d_v, {}, n, opts);
  return bernoulli_estimate(s.passes, s.n, opts.seed);
}

ConditionalSample sample_conditional(Event event, const ModelParams& params, double d_h,
                                     double d_v, std::uint64_t n_accepted,
                                     const RunOptions& opts) {
  params.validate();
  TripGeometry{Orientation::Parallel, d_h, d_v}.validate();
  if (n_accepted == 0) throw ParameterError("n_accepted must be >= 1");
  struct Attempted {
    std::optional<TripOutcome> outcome;  // empty when the tree walk failed
  };
  ConditionalSample out;
  auto attempt = [&](std::uint64_t t) -> std::optional<Attempted> {
    SubstreamRng rng(opts.seed, t, kTripStream);
    const TripHead head = draw_head(params, d_h, d_v, rng);
    if (head.event != event) return std::nullopt;
    try {
      return Attempted{run_trip(params, head, opts.span, rng)};
    } catch (const InvariantViolation&) {
      return Attempted{std::nullopt};
    }
  };
  auto kept = block_rejection<Attempted>(n_accepted, opts.workers, out.attempts, attempt);
  for (auto& a : kept) {
    if (a.outcome)
      out.outcomes.push_back(*a.outcome);
    else
      ++out.inconsistencies;
  }
  return out;
}

std::vector<EstimateResult> estimate_conditional(Event event, const ModelParams& params,
                                                 double d_h, double d_v,
                                                 const std::vector<double>& xs,
                                                 std::uint64_t n_accepted, const RunOptions& opts) {
  require_xs(xs);
  const ConditionalSample s = sample_conditional(event, params, d_h, d_v, n_accepted, opts);
  std::vector<EstimateResult> out;
  for (double x : xs) {
    std::uint64_t hits = 0;
    for (const auto& o : s.outcomes)
      if (o.d_n && *o.d_n < x) ++hits;
    out.push_back(bernoulli_estimate(hits, s.outcomes.size(), opts.seed));
  }
  return out;
}

double EmpiricalCdf::cdf(double x) const {
  if (sorted.empty()) throw UndefinedConditionalError("empty sample");
  const auto below = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
  return static_cast<double>(below) / static_cast<double>(sorted.size());
}

EmpiricalCdf rejection_sample_gap(const ModelParams& params, double span, std::uint64_t n,
                                  const RunOptions& opts) {
  params.validate();
  require_nonnegative(span, "span");
  if (!(params.p > 0.0 && params.p < 1.0))
    throw UndefinedConditionalError("gap law needs both road types (0 < p < 1)");
  const double a = params.noncharging_rate(), b = params.charging_rate();
  EmpiricalCdf out;
  auto attempt = [&](std::uint64_t t) -> std::optional<double> {
    SubstreamRng rng(opts.seed, t, kGapStream);
    const double hnc = sample_exponential_gap(a, rng);
    const double hc = sample_exponential_gap(b, rng);
    if (hnc < hc && hc < span) return hc - hnc;
    return std::nullopt;
  };
  out.sorted = block_rejection<double>(n, opts.workers, out.attempts, attempt);
  std::sort(out.sorted.begin(), out.sorted.end());
  return out;
}

EmpiricalCdf rejection_sample_x1(const ModelParams& params, double d_h, std::uint64_t n,
                                 const RunOptions& opts) {
  return rejection_sample_gap(params, d_h, n, opts);
}

EmpiricalCdf rejection_sample_x2(const ModelParams& params, double d_v, std::uint64_t n,
                                 const RunOptions& opts) {
  return rejection_sample_gap(params, d_v, n, opts);
}

DistanceSamples collect_distance_samples(const ModelParams& params, const TripGeometry& geometry,
                                         std::uint64_t n, const RunOptions& opts) {
  const int w = std::max(1, opts.workers);
  std::vector<DistanceSamples> parts(static_cast<std::size_t>(w));
  parallel_chunks(n, w, [&](std::uint64_t b, std::uint64_t e, int k) {
    DistanceSamples& s = parts[static_cast<std::size_t>(k)];
    for (std::uint64_t t = b; t < e; ++t) {
      SubstreamRng rng(opts.seed, t, kDistanceStream);
      const RoadRealization r = generate_realization(params, geometry, opts.span, rng);
      const EventContext ctx = classify_event(r);
      if (ctx.d_nhc) s.hc.push_back(*ctx.d_nhc);
      if (ctx.d_nvc) s.vc.push_back(*ctx.d_nvc);
      if (ctx.d_nhnc) s.hnc.push_back(*ctx.d_nhnc);
      if (ctx.d_nvnc) s.vnc.push_back(*ctx.d_nvnc);
      if (ctx.d_l) s.dl.push_back(*ctx.d_l);
    }
  });
  DistanceSamples all;
  for (auto& p : parts) {
    all.hc.insert(all.hc.end(), p.hc.begin(), p.hc.end());
    all.vc.insert(all.vc.end(), p.vc.begin(), p.vc.end());
    all.hnc.insert(all.hnc.end(), p.hnc.begin(), p.hnc.end());
    all.vnc.insert(all.vnc.end(), p.vnc.begin(), p.vnc.end());
    all.dl.insert(all.dl.end(), p.dl.begin(), p.dl.end());
  }
  return all;
}

}  // namespace chargegrid::policy
