#include "chargegrid/model.hpp"

namespace chargegrid {

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) throw ParameterError(std::string(what) + " must be >= 0, got " + std::to_string(x));
}

void require_fraction(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ParameterError(std::string(what) + " must lie in [0,1], got " + std::to_string(p));
}

void ModelParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParameterError("lambda must be positive and finite, got " + std::to_string(lambda));
  require_fraction(p, "p");
}

void TripGeometry::validate() const {
  if (!(d_h > 0.0) || !std::isfinite(d_h)) throw ParameterError("d_h must be positive and finite");
  if (!(d_v > 0.0) || !std::isfinite(d_v)) throw ParameterError("d_v must be positive and finite");
}

Event event_from_index(int i) {
  if (i < 1 || i > 8) throw ParameterError("event index must be 1..8, got " + std::to_string(i));
  return static_cast<Event>(i);
}

std::string to_string(Event e) { return "E" + std::to_string(event_index(e)); }

std::string to_string(Orientation o) {
  return o == Orientation::Parallel ? "parallel" : "perpendicular";
}

Event event_for(Orientation o, bool source_charging, bool dest_charging) {
  int base = o == Orientation::Parallel ? 1 : 5;
  if (source_charging && dest_charging) return event_from_index(base);
  if (source_charging) return event_from_index(base + 1);
  if (dest_charging) return event_from_index(base + 2);
  return event_from_index(base + 3);
}

Orientation orientation_of(Event e) {
  return event_index(e) <= 4 ? Orientation::Parallel : Orientation::Perpendicular;
}

bool source_charging_in(Event e) {
  int k = (event_index(e) - 1) % 4;
  return k == 0 || k == 1;
}

bool dest_charging_in(Event e) {
  int k = (event_index(e) - 1) % 4;
  return k == 0 || k == 2;
}

double event_probability(Event e, double p) {
  double s = source_charging_in(e) ? p : 1.0 - p;
  double d = dest_charging_in(e) ? p : 1.0 - p;
  return 0.5 * s * d;
}

}  // namespace chargegrid
