#include "chargegrid/realization.hpp"

#include <algorithm>
#include <cmath>

namespace chargegrid {

double exponential_from_uniform(double rate, double u) {
  if (!(rate > 0.0)) throw ParameterError("exponential rate must be positive");
  if (!(u > 0.0 && u <= 1.0)) throw ParameterError("uniform draw must lie in (0,1]");
  return -std::log(u) / rate;
}

double sample_exponential_gap(double rate, SubstreamRng& rng) {
  if (!(rate > 0.0)) throw ParameterError("exponential rate must be positive");
  return exponential_from_uniform(rate, rng.uniform_open0());
}

ChargingFlags draw_charging_flags(const ModelParams& params, SubstreamRng& rng) {
  ChargingFlags f;
  f.source = rng.bernoulli(params.p);
  f.dest = rng.bernoulli(params.p);
  return f;
}

namespace {

// Positive side of one axis. `span` is the destination coordinate on this axis; roads landing
// exactly on 0 or on the span are redrawn.
void sample_positive(const ModelParams& params, double span, const SpanPolicy& policy,
                     SubstreamRng& rng, std::vector<Road>& out) {
  const bool need_c = policy.complete_nearest && params.p > 0.0;
  const bool need_nc = policy.complete_nearest && params.p < 1.0;
  bool have_c = false, have_nc = false;
  int beyond = 0;
  double pos = 0.0;
  while (true) {
    double next = pos + sample_exponential_gap(params.lambda, rng);
    if (next == span || next == 0.0) continue;
    bool charging = rng.bernoulli(params.p);
    pos = next;
    out.push_back({pos, charging});
    (charging ? have_c : have_nc) = true;
    if (pos > span) ++beyond;
    if (pos > span && beyond >= policy.margin_roads && (!need_c || have_c) && (!need_nc || have_nc))
      break;
  }
}

void sample_negative(const ModelParams& params, const SpanPolicy& policy, SubstreamRng& rng,
                     std::vector<Road>& out) {
  const int count = std::max(1, policy.margin_roads);
  std::vector<Road> neg;
  double pos = 0.0;
  while (static_cast<int>(neg.size()) < count) {
    double next = pos - sample_exponential_gap(params.lambda, rng);
    if (next == 0.0) continue;
    pos = next;
    neg.push_back({pos, rng.bernoulli(params.p)});
  }
  std::reverse(neg.begin(), neg.end());
  out.insert(out.begin(), neg.begin(), neg.end());
}

}  // namespace

RoadRealization generate_roads(const ModelParams& params, const TripGeometry& geometry,
                               const SpanPolicy& policy, ChargingFlags flags, SubstreamRng& rng) {
  params.validate();
  geometry.validate();
  if (policy.margin_roads < 0) throw ParameterError("margin_roads must be >= 0");
  RoadRealization r;
  r.geometry = geometry;
  r.source_charging = flags.source;
  r.dest_charging = flags.dest;
  std::vector<Road> hpos, vpos;
  sample_positive(params, geometry.d_v, policy, rng, hpos);
  sample_negative(params, policy, rng, r.h_roads);
  r.h_roads.insert(r.h_roads.end(), hpos.begin(), hpos.end());
  sample_positive(params, geometry.d_h, policy, rng, vpos);
  sample_negative(params, policy, rng, r.v_roads);
  r.v_roads.insert(r.v_roads.end(), vpos.begin(), vpos.end());
  return r;
}

RoadRealization generate_realization(const ModelParams& params, const TripGeometry& geometry,
                                     const SpanPolicy& policy, SubstreamRng& rng) {
  params.validate();
  ChargingFlags flags = draw_charging_flags(params, rng);
  return generate_roads(params, geometry, policy, flags, rng);
}

}  // namespace chargegrid
