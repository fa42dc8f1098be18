#pragma once

#include <array>
#include <vector>

#include "chargegrid/distributions.hpp"
#include "chargegrid/leaves.hpp"
#include "chargegrid/table_functions.hpp"

namespace chargegrid::analytic {

// Which closed form backs the composite events E3, E4, E7, E8.
enum class Formulation {
  // Sum over tree leaves of exact P(leaf) * P(D_n < x | leaf).
  LeafExact,
  // The published C_i sums, term by term, with the published X1/X2 laws.
  Published,
};

const char* to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

struct LemmaBreakdown {
  std::array<double, 8> terms{};  // P(D_n < x | E_i) P(E_i), indexed by event - 1
  double total = 0.0;

  double term(Event e) const { return terms[event_index(e) - 1]; }
};

// The published C_i terms of the composite events, in order. Empty for E1, E2, E5, E6.
std::vector<double> published_components(Event e, const AnalyticQuery& q,
                                         const QuadratureConfig& cfg = {});

// P(D_n < x | E_i) P(E_i).
double lemma_term(Event e, const AnalyticQuery& q, const QuadratureConfig& cfg = {},
                  Formulation form = Formulation::LeafExact);

LemmaBreakdown cdf_dn(const AnalyticQuery& q, const QuadratureConfig& cfg = {},
                      Formulation form = Formulation::LeafExact);

// P(route never drives along a charging road | E) P(E), from the exact leaf probabilities.
double no_pass_mass(Event e, const ModelParams& params, double d_h, double d_v,
                    const QuadratureConfig& cfg = {});

enum class TcScaling {
  // Each bracket weighted by P(E4) = P(E8) = (1-p)^2 / 2.
  EventProbability,
  // Each bracket weighted by (1-p)^2 as printed; goes negative as p -> 0.
  AsPrinted,
};

double prob_tc(const ModelParams& params, double d_h, double d_v,
               TcScaling scaling = TcScaling::EventProbability);
// The bracketed P(no charging | E4) and P(no charging | E8).
double no_pass_bracket_e4(const ModelParams& params, double d_h, double d_v);
double no_pass_bracket_e8(const ModelParams& params, double d_h, double d_v);

enum class TripBound { NonchargingLower, ChargingUpper };

// query.x is read as a fraction f of the trip length d_h + d_v.
double trip_fraction_transform(const AnalyticQuery& q, TripBound bound,
                               const QuadratureConfig& cfg = {},
                               Formulation form = Formulation::LeafExact);

}  // namespace chargegrid::analytic
