#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "chargegrid/events.hpp"
#include "chargegrid/leaves.hpp"

namespace chargegrid::policy {

struct TripOutcome {
  Event event = Event::E1;
  LeafId leaf;
  std::optional<double> d_n;  // absent when the route never drives along a charging road
  bool passes_charging = true;
};

// Resolves the event's routing tree by reading the realization; no extra randomness.
// Throws InvariantViolation if the context does not describe the realization.
TripOutcome walk_tree(const EventContext& ctx, const RoadRealization& realization);

struct EstimateResult {
  double value = 0.0;
  double std_error = 0.0;  // binomial sqrt(v (1 - v) / n)
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

EstimateResult bernoulli_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed);

struct RunOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  SpanPolicy span;
};

// Integer tallies from n independent trips; merging is exact, so results do not depend on how
// trials were split across workers.
struct SimulationSummary {
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<double> xs;
  std::vector<std::uint64_t> below;                  // trips with D_n < xs[k]
  std::uint64_t passes = 0;
  std::array<std::uint64_t, 8> event_counts{};
  std::array<std::uint64_t, 8> event_passes{};
  std::array<std::vector<std::uint64_t>, 8> event_below;  // per event, per x
  std::vector<std::uint64_t> leaf_counts;             // by leaf_flat_index
  std::uint64_t inconsistencies = 0;

  void merge(const SimulationSummary& other);
};

// The realization of trip `trial`: orientation coin, charging flags, then roads. Every estimator
// over whole trips reads this same stream.
RoadRealization sample_trip_realization(const ModelParams& params, double d_h, double d_v,
                                        const SpanPolicy& span, std::uint64_t seed,
                                        std::uint64_t trial);

// Trip orientation is a fair coin per trial; d_h, d_v fixed.
SimulationSummary simulate_trips(const ModelParams& params, double d_h, double d_v,
                                 const std::vector<double>& xs, std::uint64_t n,
                                 const RunOptions& opts);

std::vector<EstimateResult> estimate_cdf_dn(const ModelParams& params, double d_h, double d_v,
                                            const std::vector<double>& xs, std::uint64_t n,
                                            const RunOptions& opts);

EstimateResult estimate_prob_tc(const ModelParams& params, double d_h, double d_v,
                                std::uint64_t n, const RunOptions& opts);

class AcceptanceStarvation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConditionalSample {
  std::vector<TripOutcome> outcomes;  // first n_accepted accepted trips in attempt order
  std::uint64_t attempts = 0;
  std::uint64_t inconsistencies = 0;
};

// Rejection sampling of whole trips until n_accepted land in `event`.
ConditionalSample sample_conditional(Event event, const ModelParams& params, double d_h,
                                     double d_v, std::uint64_t n_accepted,
                                     const RunOptions& opts);

// Empirical P(D_n < x | event) at each x.
std::vector<EstimateResult> estimate_conditional(Event event, const ModelParams& params,
                                                 double d_h, double d_v,
                                                 const std::vector<double>& xs,
                                                 std::uint64_t n_accepted, const RunOptions& opts);

struct EmpiricalCdf {
  std::vector<double> sorted;
  std::uint64_t attempts = 0;

  double cdf(double x) const;  // fraction of samples strictly below x
  std::size_t size() const { return sorted.size(); }
};

// Draws (nearest non-charging, nearest charging) pairs and keeps the gap when
// non-charging < charging < span. X1 uses span d_h, X2 uses span d_v.
EmpiricalCdf rejection_sample_gap(const ModelParams& params, double span, std::uint64_t n,
                                  const RunOptions& opts);
EmpiricalCdf rejection_sample_x1(const ModelParams& params, double d_h, std::uint64_t n,
                                 const RunOptions& opts);
EmpiricalCdf rejection_sample_x2(const ModelParams& params, double d_v, std::uint64_t n,
                                 const RunOptions& opts);

// Nearest-road distances read off sampled realizations, one entry per realization where the
// road exists.
struct DistanceSamples {
  std::vector<double> hc, vc, hnc, vnc, dl;
};

DistanceSamples collect_distance_samples(const ModelParams& params, const TripGeometry& geometry,
                                         std::uint64_t n, const RunOptions& opts);

// Runs body(begin, end, worker) over [0, n) split into contiguous chunks, one per worker.
void parallel_chunks(std::uint64_t n, int workers,
                     const std::function<void(std::uint64_t, std::uint64_t, int)>& body);

}  // namespace chargegrid::policy
