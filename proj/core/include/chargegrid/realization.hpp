#pragma once

#include <optional>
#include <vector>

#include "chargegrid/model.hpp"
#include "chargegrid/random.hpp"

namespace chargegrid {

struct Road {
  double offset = 0.0;  // signed meters from the source along the perpendicular axis
  bool charging = false;
  bool operator==(const Road&) const = default;
};

// Source road and destination road are not stored in the road lists.
// Parallel trips: both are vertical (x = 0 and x = d_h); horizontal roads cross the d_v span.
// Perpendicular trips: the source road is horizontal (y = 0), the destination road vertical (x = d_h).
struct RoadRealization {
  std::vector<Road> h_roads;  // horizontal roads, offsets along the vertical axis, ascending
  std::vector<Road> v_roads;  // vertical roads, offsets along the horizontal axis, ascending
  bool source_charging = false;
  bool dest_charging = false;
  TripGeometry geometry;

  bool operator==(const RoadRealization&) const = default;
};

// How far outward the lazy sampler keeps drawing gaps.
struct SpanPolicy {
  // Extra roads kept beyond the span on the positive side and below the source on the negative
  // side. At least one negative road is always drawn.
  int margin_roads = 1;
  // Keep extending the positive side until the first charging and first non-charging road exist.
  bool complete_nearest = true;
};

double exponential_from_uniform(double rate, double u);
double sample_exponential_gap(double rate, SubstreamRng& rng);

struct ChargingFlags {
  bool source = false;
  bool dest = false;
};

ChargingFlags draw_charging_flags(const ModelParams& params, SubstreamRng& rng);

// Roads only, flags already drawn. Consumes the rng in a fixed order: h positive, h negative,
// v positive, v negative.
RoadRealization generate_roads(const ModelParams& params, const TripGeometry& geometry,
                               const SpanPolicy& policy, ChargingFlags flags, SubstreamRng& rng);

RoadRealization generate_realization(const ModelParams& params, const TripGeometry& geometry,
                                     const SpanPolicy& policy, SubstreamRng& rng);

}  // namespace chargegrid
