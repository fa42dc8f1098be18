// Exact per-leaf laws. Conditioning on the counts in a span makes the positions of each road
// type iid uniform there, which yields the nearest-road laws below:
//   at least one road  -> truncated exponential on [0, L]
//   exactly one road   -> uniform on [0, L]
//   at least two roads -> CDF 1 - e^{-rs} P(N(L-s) >= 2) / P(N(L) >= 2)
#include <cmath>
#include <functional>

#include "chargegrid/distributions.hpp"
#include "chargegrid/leaves.hpp"

namespace chargegrid::analytic {

void AnalyticQuery::validate() const {
  params.validate();
  TripGeometry{Orientation::Parallel, d_h, d_v}.validate();
  require_nonnegative(x, "x");
}

namespace {

double at_least_one(double r, double len) { return -std::expm1(-r * len); }
double exactly_one(double r, double len) { return r * len * std::exp(-r * len); }
double at_least_two(double r, double len) {
  return std::max(0.0, at_least_one(r, len) - exactly_one(r, len));
}

// Nearest of Poisson points on [0, len] given at least one of them.
double nearest_ge1_cdf(double r, double len, double s) {
  if (s <= 0.0) return 0.0;
  if (s >= len) return 1.0;
  return -std::expm1(-r * s) / at_least_one(r, len);
}
double nearest_ge1_pdf(double r, double len, double s) {
  if (s < 0.0 || s > len) return 0.0;
  return r * std::exp(-r * s) / at_least_one(r, len);
}

double uniform_cdf(double len, double s) { return std::clamp(s / len, 0.0, 1.0); }

// Nearest of Poisson points on [0, len] given at least two of them.
double nearest_ge2_cdf(double r, double len, double s) {
  if (s <= 0.0) return 0.0;
  if (s >= len) return 1.0;
  const double tail = std::exp(-r * s) - std::exp(-r * len) - r * (len - s) * std::exp(-r * len);
  return std::clamp(1.0 - tail / at_least_two(r, len), 0.0, 1.0);
}
double nearest_ge2_pdf(double r, double len, double s) {
  if (s < 0.0 || s > len) return 0.0;
  return r * (std::exp(-r * s) - std::exp(-r * len)) / at_least_two(r, len);
}

double step_above(double x, double d) { return x > d ? 1.0 : 0.0; }

using Density = std::function<double(double)>;
using Cdf = std::function<double(double)>;

class LeafMath {
 public:
  LeafMath(const ModelParams& pr, double dh, double dv, const QuadratureConfig& cfg)
      : pr_(pr), dh_(dh), dv_(dv), cfg_(cfg), a_(pr.noncharging_rate()), b_(pr.charging_rate()),
        lam_(pr.lambda) {}

  // Probability of the count-level branch holding the leaf, given its event.
  double branch(LeafId id) const;
  // P(sub-leaf comparisons hold, D_n < x | branch). x = +inf gives the sub-leaf share.
  double share(LeafId id, double x) const;

 private:
  template <class F>
  double integ(const F& f, double lo, double hi, std::vector<double> breaks = {}) const {
    if (!(hi > lo)) return 0.0;
    return integrate(f, lo, hi, cfg_, breaks);
  }

  double detour_min_cdf(double s) const { return exp_cdf(2.0 * lam_, s); }

  // Charging-road comparison on the horizontal family, used by E3 and E4.
  // hc has density `hc` on [0, d_v]; `nc` is the CDF of the nearest non-charging horizontal road;
  // the alternative vertical leg has length v, fixed at d_h (`vc_random` false) or distributed as
  // the nearest vertical charging road given at least one in the span.
  double take_nc(const Density& hc, const Cdf& nc, bool vc_random, double x) const;
  double take_hc(const Density& hc, const Cdf& nc, bool vc_random, double x) const;
  double hc_first(const Density& hc, const Cdf& nc, double x) const;

  // Nearest non-charging (given >= 2 in span) plus a vertical leg drawn from the nearest vertical
  // charging road given >= 1 in span.
  double nc_then_vc(double x) const;

  // Perpendicular comparisons (E7, E8).
  double vnc_then_hc(double x, bool capped_by_dest) const;
  double vnc_hc_beats_dest(double x) const;
  double vc_race_take_hc(double x) const;
  double vc_race_take_vc(double x) const;
  double vc_first(double x) const;

  double vc_density(double v) const { return nearest_ge1_pdf(b_, dh_, v); }

  ModelParams pr_;
  double dh_, dv_;
  QuadratureConfig cfg_;
  double a_, b_, lam_;
};

double LeafMath::take_nc(const Density& hc, const Cdf& nc, bool vc_random, double x) const {
  auto given_v = [&](double v) {
    auto inner = [&](double t) { return hc(t) * nc(std::max(0.0, std::min(t, x) - v)); };
    return integ(inner, v, dv_, {x});
  };
  if (!vc_random) return given_v(dh_);
  return integ([&](double v) { return vc_density(v) * given_v(v); }, 0.0, dh_, {x, dv_});
}

double LeafMath::take_hc(const Density& hc, const Cdf& nc, bool vc_random, double x) const {
  const double top = std::min(dv_, x);
  auto given_v = [&](double v) {
    auto inner = [&](double t) { return hc(t) * (nc(t) - nc(std::max(t - v, 0.0))); };
    return integ(inner, 0.0, top, {v});
  };
  if (!vc_random) return given_v(dh_);
  return integ([&](double v) { return vc_density(v) * given_v(v); }, 0.0, dh_, {top});
}

double LeafMath::hc_first(const Density& hc, const Cdf& nc, double x) const {
  return integ([&](double t) { return hc(t) * (1.0 - nc(t)); }, 0.0, std::min(dv_, x));
}

double LeafMath::nc_then_vc(double x) const {
  auto f = [&](double v) { return vc_density(v) * nearest_ge2_cdf(a_, dv_, x - v); };
  return integ(f, 0.0, dh_, {x, x - dv_});
}

// Nearest vertical non-charging road (given >= 1 in span, no vertical charging road) followed by
// the nearest horizontal charging road (given >= 1 in span).
double LeafMath::vnc_then_hc(double x, bool capped_by_dest) const {
  auto f = [&](double w) {
    const double room = capped_by_dest ? std::min(dh_ - w, x - w) : x - w;
    return nearest_ge1_pdf(a_, dh_, w) * nearest_ge1_cdf(b_, dv_, room);
  };
  return integ(f, 0.0, dh_, {x, x - dv_, dh_ - dv_});
}

double LeafMath::vnc_hc_beats_dest(double x) const {
  if (!(x > dh_)) return 0.0;
  auto f = [&](double w) {
    return nearest_ge1_pdf(a_, dh_, w) * (1.0 - nearest_ge1_cdf(b_, dv_, dh_ - w));
  };
  return integ(f, 0.0, dh_, {dh_ - dv_});
}

// vnc < vc with vc - vnc > hc: the route turns onto the horizontal charging road.
double LeafMath::vc_race_take_hc(double x) const {
  auto outer = [&](double v) {
    const double reach = std::min(v, x);
    auto inner = [&](double w) { return exp_pdf(a_, w) * nearest_ge1_cdf(b_, dv_, reach - w); };
    return vc_density(v) * integ(inner, 0.0, v, {reach - dv_, reach});
  };
  return integ(outer, 0.0, dh_, {x, dv_});
}

double LeafMath::vc_race_take_vc(double x) const {
  auto outer = [&](double v) {
    auto inner = [&](double w) {
      return exp_pdf(a_, w) * (1.0 - nearest_ge1_cdf(b_, dv_, v - w));
    };
    return vc_density(v) * integ(inner, 0.0, v, {v - dv_});
  };
  return integ(outer, 0.0, std::min(dh_, x), {dv_});
}

double LeafMath::vc_first(double x) const {
  return integ([&](double v) { return vc_density(v) * std::exp(-a_ * v); }, 0.0,
               std::min(dh_, x));
}

double LeafMath::branch(LeafId id) const {
  const double no_h = std::exp(-lam_ * dv_);
  const double no_hc = std::exp(-b_ * dv_), some_hc = at_least_one(b_, dv_);
  const double no_vc = std::exp(-b_ * dh_), some_vc = at_least_one(b_, dh_);
  switch (id.event) {
    case 1: {
      const double v[] = {no_h, some_hc, no_hc * at_least_one(a_, dv_)};
      return v[id.index - 1];
    }
    case 2: {
      const double q_far = some_hc > 0.0 ? pr_.p * -std::expm1(-lam_ * dv_) / some_hc : 0.0;
      const double v[] = {no_h,
                          no_hc * at_least_one(a_, dv_),
                          some_hc * no_vc * (1.0 - q_far),
                          some_hc * no_vc * q_far,
                          some_hc * some_vc * (1.0 - q_far),
                          some_hc * some_vc * q_far};
      return v[id.index - 1];
    }
    case 3: {
      const double nc2 = no_hc * at_least_two(a_, dv_);
      const double v[] = {no_h,
                          no_hc * exactly_one(a_, dv_),
                          nc2 * no_vc,
                          nc2 * some_vc,
                          some_hc * no_vc,
                          some_hc * no_vc,
                          some_hc * no_vc,
                          some_hc * some_vc,
                          some_hc * some_vc,
                          some_hc * some_vc};
      return v[id.index - 1];
    }
    case 4: {
      const double nc2 = no_hc * at_least_two(a_, dv_);
      const double one_c_some_nc = exactly_one(b_, dv_) * at_least_one(a_, dv_);
      const double c2 = at_least_two(b_, dv_);
      const double v[] = {no_h,
                          no_hc * exactly_one(a_, dv_),
                          exactly_one(b_, dv_) * std::exp(-a_ * dv_),
                          nc2 * no_vc,
                          nc2 * some_vc,
                          one_c_some_nc * no_vc,
                          one_c_some_nc * some_vc,
                          one_c_some_nc * some_vc,
                          one_c_some_nc * some_vc,
                          c2 * no_vc,
                          c2 * some_vc,
                          c2 * some_vc,
                          c2 * some_vc};
      return v[id.index - 1];
    }
    case 5:
      return 1.0;
    case 6: {
      const double q_far = some_hc > 0.0 ? pr_.p * -std::expm1(-lam_ * dv_) / some_hc : 0.0;
      const double only_nc = no_hc * at_least_one(a_, dv_);
      const double v[] = {no_h,
                          only_nc * no_vc,
                          only_nc * some_vc,
                          some_hc * no_vc,
                          some_hc * some_vc * (1.0 - q_far),
                          some_hc * some_vc * q_far};
      return v[id.index - 1];
    }
    case 7:
    case 8: {
      const double only_nc = no_hc * at_least_one(a_, dv_);
      const double no_v = std::exp(-lam_ * dh_);
      const double only_vnc = no_vc * at_least_one(a_, dh_);
      if (id.event == 7) {
        const double v[] = {no_h,
                            only_nc * no_vc,
                            only_nc * some_vc,
                            some_hc * no_v,
                            some_hc * only_vnc,
                            some_hc * only_vnc,
                            some_hc * some_vc,
                            some_hc * some_vc,
                            some_hc * some_vc};
        return v[id.index - 1];
      }
      const double v[] = {no_h,
                          only_nc * no_vc,
                          only_nc * some_vc,
                          some_hc * no_v,
                          some_hc * only_vnc,
                          some_hc * some_vc,
                          some_hc * some_vc,
                          some_hc * some_vc};
      return v[id.index - 1];
    }
  }
  throw ParameterError("unknown leaf " + to_string(id));
}

double LeafMath::share(LeafId id, double x) const {
  if (id.event == 1 || id.event == 2 || id.event == 5 || id.event == 6) return x > 0.0 ? 1.0 : 0.0;

  Cdf nc_unbounded = [this](double s) { return exp_cdf(a_, s); };
  Density hc_ge1 = [this](double t) { return nearest_ge1_pdf(b_, dv_, t); };

  if (id.event == 3) {
    switch (id.index) {
      case 1: {
        const double p = pr_.p;
        return 0.5 * (p * detour_min_cdf(x - dv_) + (1 - p) * detour_min_cdf(x - dv_ - dh_) +
                      p * detour_min_cdf(x) + (1 - p) * detour_min_cdf(x - dh_));
      }
      case 2:
        return uniform_cdf(dv_, x - dh_);
      case 3:
        return nearest_ge2_cdf(a_, dv_, x - dh_);
      case 4:
        return nc_then_vc(x);
      case 5:
        return take_hc(hc_ge1, nc_unbounded, false, x);
      case 6:
        return take_nc(hc_ge1, nc_unbounded, false, x);
      case 7:
      case 10:
        return hc_first(hc_ge1, nc_unbounded, x);
      case 8:
        return take_nc(hc_ge1, nc_unbounded, true, x);
      case 9:
        return take_hc(hc_ge1, nc_unbounded, true, x);
    }
  }
  if (id.event == 4) {
    Density hc_one = [this](double t) { return t >= 0.0 && t <= dv_ ? 1.0 / dv_ : 0.0; };
    Cdf nc_ge1 = [this](double s) { return nearest_ge1_cdf(a_, dv_, s); };
    Density hc_ge2 = [this](double t) { return nearest_ge2_pdf(b_, dv_, t); };
    switch (id.index) {
      case 1:
        return 0.5 * pr_.p * (detour_min_cdf(x - dv_) + detour_min_cdf(x));
      case 2:
      case 4:
        return 0.0;
      case 3:
      case 6:
        return uniform_cdf(dv_, x);
      case 5:
        return nc_then_vc(x);
      case 7:
        return take_nc(hc_one, nc_ge1, true, x);
      case 8:
        return take_hc(hc_one, nc_ge1, true, x);
      case 9:
        return hc_first(hc_one, nc_ge1, x);
      case 10:
        return nearest_ge2_cdf(b_, dv_, x);
      case 11:
        return take_nc(hc_ge2, nc_unbounded, true, x);
      case 12:
        return take_hc(hc_ge2, nc_unbounded, true, x);
      case 13:
        return hc_first(hc_ge2, nc_unbounded, x);
    }
  }
  if (id.event == 7) {
    switch (id.index) {
      case 1:
      case 2:
      case 4:
        return step_above(x, dh_);
      case 3:
        return nearest_ge1_cdf(b_, dh_, x);
      case 5:
        return vnc_then_hc(x, true);
      case 6:
        return vnc_hc_beats_dest(x);
      case 7:
        return vc_race_take_hc(x);
      case 8:
        return vc_race_take_vc(x);
      case 9:
        return vc_first(x);
    }
  }
  if (id.event == 8) {
    switch (id.index) {
      case 1:
      case 2:
      case 4:
        return 0.0;
      case 3:
        return nearest_ge1_cdf(b_, dh_, x);
      case 5:
        return vnc_then_hc(x, false);
      case 6:
        return vc_race_take_hc(x);
      case 7:
        return vc_race_take_vc(x);
      case 8:
        return vc_first(x);
    }
  }
  throw ParameterError("unknown leaf " + to_string(id));
}

}  // namespace

double exact_leaf_probability(LeafId id, const ModelParams& params, double d_h, double d_v,
                              const QuadratureConfig& cfg) {
  leaf_flat_index(id);
  LeafMath m(params, d_h, d_v, cfg);
  const double br = m.branch(id);
  if (br <= 0.0) return 0.0;
  // Leaves that never pass, and L4,1, are whole count-level branches.
  if (leaf_never_passes(id) || (id.event == 4 && id.index == 1)) return br;
  return br * m.share(id, kInfinity);
}

double exact_leaf_cdf_mass(LeafId id, const AnalyticQuery& q, const QuadratureConfig& cfg) {
  leaf_flat_index(id);
  q.validate();
  LeafMath m(q.params, q.d_h, q.d_v, cfg);
  const double br = m.branch(id);
  if (br <= 0.0 || !(q.x > 0.0)) return 0.0;
  return br * m.share(id, q.x);
}

}  // namespace chargegrid::analytic
