#include "chargegrid/lemmas.hpp"

#include <cmath>
#include <numeric>

namespace chargegrid::analytic {

const char* to_string(Formulation f) {
  return f == Formulation::LeafExact ? "leaf-exact" : "published";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "leaf-exact") return Formulation::LeafExact;
  if (s == "published") return Formulation::Published;
  throw ParameterError("unknown formulation '" + s + "' (expected leaf-exact or published)");
}

namespace {
bool composite(Event e) {
  return e == Event::E3 || e == Event::E4 || e == Event::E7 || e == Event::E8;
}
}  // namespace

double lemma_term(Event e, const AnalyticQuery& q, const QuadratureConfig& cfg, Formulation form) {
  q.validate();
  cfg.validate();
  const double pe = event_probability(e, q.params.p);
  if (pe <= 0.0 || !(q.x > 0.0)) return 0.0;
  // Source road charging: D_n = 0 < x.
  if (!composite(e)) return pe;
  // With p in {0, 1} every composite sub-branch able to reach a charging road has probability 0.
  if (q.params.p <= 0.0 || q.params.p >= 1.0) return 0.0;
  if (form == Formulation::Published) {
    auto c = published_components(e, q, cfg);
    return std::accumulate(c.begin(), c.end(), 0.0);
  }
  // Up to 13 leaf integrals are summed; tighten each so the sum still meets cfg.
  const auto leaves = leaves_of(e);
  QuadratureConfig per_leaf = cfg;
  per_leaf.abs_tol = cfg.abs_tol / static_cast<double>(leaves.size());
  per_leaf.rel_tol = cfg.rel_tol / 10.0;
  double sum = 0.0;
  for (LeafId id : leaves) sum += exact_leaf_cdf_mass(id, q, per_leaf);
  return sum * pe;
}

LemmaBreakdown cdf_dn(const AnalyticQuery& q, const QuadratureConfig& cfg, Formulation form) {
  LemmaBreakdown out;
  for (Event e : kAllEvents) {
    out.terms[event_index(e) - 1] = lemma_term(e, q, cfg, form);
    out.total += out.terms[event_index(e) - 1];
  }
  return out;
}

double no_pass_mass(Event e, const ModelParams& params, double d_h, double d_v,
                    const QuadratureConfig& cfg) {
  const double pe = event_probability(e, params.p);
  if (pe <= 0.0) return 0.0;
  double sum = 0.0;
  for (LeafId id : leaves_of(e)) {
    if (leaf_never_passes(id)) sum += exact_leaf_probability(id, params, d_h, d_v, cfg);
    // L4,1 fails exactly when the detour road is non-charging.
    if (id.event == 4 && id.index == 1)
      sum += (1.0 - params.p) * exact_leaf_probability(id, params, d_h, d_v, cfg);
  }
  return sum * pe;
}

double no_pass_bracket_e4(const ModelParams& params, double d_h, double d_v) {
  params.validate();
  const double lam = params.lambda, p = params.p;
  const double a = params.noncharging_rate(), b = params.charging_rate();
  const double e_adv = std::exp(-a * d_v), e_bdv = std::exp(-b * d_v);
  return std::exp(-lam * d_v) * (1 - p) + a * d_v * e_adv * e_bdv +
         e_bdv * (1 - e_adv - a * d_v * e_adv) * std::exp(-b * d_h);
}

double no_pass_bracket_e8(const ModelParams& params, double d_h, double d_v) {
  params.validate();
  const double lam = params.lambda;
  const double a = params.noncharging_rate(), b = params.charging_rate();
  const double e_bdv = std::exp(-b * d_v);
  return std::exp(-lam * d_v) + e_bdv * (1 - std::exp(-a * d_v)) * std::exp(-b * d_h) +
         (1 - e_bdv) * std::exp(-lam * d_h);
}

double prob_tc(const ModelParams& params, double d_h, double d_v, TcScaling scaling) {
  params.validate();
  TripGeometry{Orientation::Parallel, d_h, d_v}.validate();
  // No charging roads at all.
  if (params.p <= 0.0 && scaling == TcScaling::EventProbability) return 0.0;
  const double q = 1.0 - params.p;
  const double weight = scaling == TcScaling::EventProbability ? q * q / 2.0 : q * q;
  if (weight == 0.0) return 1.0;
  return 1.0 - weight * (no_pass_bracket_e4(params, d_h, d_v) + no_pass_bracket_e8(params, d_h, d_v));
}

double trip_fraction_transform(const AnalyticQuery& q, TripBound bound,
                               const QuadratureConfig& cfg, Formulation form) {
  const double f = q.x;
  if (!(f >= 0.0 && f <= 1.0)) throw ParameterError("trip fraction must lie in [0,1]");
  const double trip = q.d_h + q.d_v;
  AnalyticQuery at = q;
  if (bound == TripBound::NonchargingLower) {
    at.x = f * trip;
    return cdf_dn(at, cfg, form).total;
  }
  at.x = (1.0 - f) * trip;
  return 1.0 - cdf_dn(at, cfg, form).total;
}

}  // namespace chargegrid::analytic
