#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chargegrid {

// Invalid user-supplied parameter (negative distance, p outside [0,1], ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A conditional law was requested whose conditioning event has probability zero.
class UndefinedConditionalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Internal bookkeeping broke (realization/context mismatch, unreachable node, ...).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ModelParams {
  double lambda = 0.016;  // roads per meter along each axis
  double p = 0.2;         // charging fraction

  void validate() const;
  double charging_rate() const { return lambda * p; }
  double noncharging_rate() const { return lambda * (1.0 - p); }
  bool operator==(const ModelParams&) const = default;
};

enum class Orientation { Parallel, Perpendicular };

struct TripGeometry {
  Orientation orientation = Orientation::Parallel;
  double d_h = 2000.0;
  double d_v = 3000.0;

  void validate() const;
  double manhattan() const { return d_h + d_v; }
  bool operator==(const TripGeometry&) const = default;
};

// E1..E4 are the parallel-road events, E5..E8 the perpendicular ones.
enum class Event { E1 = 1, E2, E3, E4, E5, E6, E7, E8 };

inline constexpr std::array<Event, 8> kAllEvents{Event::E1, Event::E2, Event::E3, Event::E4,
                                                 Event::E5, Event::E6, Event::E7, Event::E8};

inline int event_index(Event e) { return static_cast<int>(e); }
Event event_from_index(int i);
std::string to_string(Event e);
std::string to_string(Orientation o);

Event event_for(Orientation o, bool source_charging, bool dest_charging);
Orientation orientation_of(Event e);
bool source_charging_in(Event e);
bool dest_charging_in(Event e);

// Orientation is a fair coin; the two charging flags are independent Bernoulli(p).
double event_probability(Event e, double p);

void require_nonnegative(double x, const char* what);
void require_fraction(double p, const char* what);

}  // namespace chargegrid
