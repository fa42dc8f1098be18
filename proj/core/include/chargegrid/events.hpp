#pragma once

#include <optional>

#include "chargegrid/realization.hpp"

namespace chargegrid {

struct EventContext {
  Event event = Event::E1;
  // Nearest road of each kind on the destination side of the source (unbounded search).
  std::optional<double> d_nhc, d_nvc, d_nhnc, d_nvnc;
  // Nearest horizontal road on the far side of the source.
  std::optional<double> d_l;
  // Gap between nearest non-charging and nearest charging road, present only when
  // nearest non-charging < nearest charging < span on that axis (x1: vertical, x2: horizontal).
  std::optional<double> x1, x2;
};

// Per-axis counts and nearest roads that the routing trees read.
struct AxisSummary {
  int charging_in_span = 0;
  int noncharging_in_span = 0;
  std::optional<double> nearest_c, nearest_nc;  // positive side, unbounded
  std::optional<Road> first_beyond;              // first road with offset > span
  std::optional<Road> first_negative;            // road with largest negative offset

  int in_span() const { return charging_in_span + noncharging_in_span; }
};

AxisSummary summarize_axis(const std::vector<Road>& roads, double span);

EventContext classify_event(const RoadRealization& realization);

}  // namespace chargegrid
