#pragma once

#include <string>
#include <vector>

#include "chargegrid/model.hpp"
#include "chargegrid/quadrature.hpp"

namespace chargegrid {

// Terminal case of an event's routing tree, numbered as in the tree enumeration (L_{event,index}).
struct LeafId {
  int event = 1;
  int index = 1;
  auto operator<=>(const LeafId&) const = default;
};

std::string to_string(LeafId id);
int leaf_count(Event e);
std::vector<LeafId> leaves_of(Event e);
// Flat index over all leaves of all events, handy for histograms.
int leaf_flat_index(LeafId id);
int total_leaf_count();

// Leaves on which the chosen route never drives along a charging road. L4,1 is excluded: it
// passes or not depending on the detour road's flag.
bool leaf_never_passes(LeafId id);

}  // namespace chargegrid

namespace chargegrid::analytic {

struct AnalyticQuery {
  ModelParams params;
  double d_h = 2000.0;
  double d_v = 3000.0;
  double x = 0.0;

  void validate() const;
};

// P(leaf | event) from the exact laws of counts, nearest roads and comparisons.
double exact_leaf_probability(LeafId id, const ModelParams& params, double d_h, double d_v,
                              const QuadratureConfig& cfg = {});
// P(leaf, D_n < x | event).
double exact_leaf_cdf_mass(LeafId id, const AnalyticQuery& q, const QuadratureConfig& cfg = {});

// P(leaf | event) as the product of the branch probabilities printed along the tree.
double published_leaf_probability(LeafId id, const ModelParams& params, double d_h, double d_v,
                                  const QuadratureConfig& cfg = {});

}  // namespace chargegrid::analytic
