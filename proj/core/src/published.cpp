// Composite-event CDF terms and leaf probabilities transcribed from the published closed forms.
// Indicators follow the left-limit convention: 1{x < d} is x <= d and 1{x > d} is x > d.
#include <cmath>

#include "chargegrid/lemmas.hpp"

namespace chargegrid::analytic {

namespace {

bool below(double x, double d) { return x <= d; }
bool above(double x, double d) { return x > d; }

class Published {
 public:
  Published(const AnalyticQuery& q, const QuadratureConfig& cfg)
      : pr_(q.params), dh_(q.d_h), dv_(q.d_v), x_(q.x), cfg_(cfg), a_(pr_.noncharging_rate()),
        b_(pr_.charging_rate()), lam_(pr_.lambda), p_(pr_.p) {
    ctx_ = QueryContext{pr_, dh_, dv_, x_, cfg_};
  }

  std::vector<double> e3() const;
  std::vector<double> e4() const;
  std::vector<double> e7() const;
  std::vector<double> e8() const;

  // Printed branch quantities.
  double q_v() const { return (p_ - p_ * std::exp(-lam_ * dv_)) / -std::expm1(-b_ * dv_); }
  double q_h() const { return (p_ - p_ * std::exp(-lam_ * dh_)) / -std::expm1(-b_ * dh_); }
  // Printed E7,3,4 probability, with d_v in the denominator.
  double q_h_e7_tree() const {
    return (p_ - p_ * std::exp(-lam_ * dh_)) / -std::expm1(-b_ * dv_);
  }
  double fx2_at_dh() const { return gap_cdf(pr_, dv_, dh_, cfg_, GapLawForm::Published); }
  double i2() const;
  double i1() const;
  double w_e7() const;

 private:
  double fa(double s) const { return exp_cdf(a_, s); }
  double fb(double s) const { return exp_cdf(b_, s); }
  double f(int i, std::initializer_list<SlotArg> args) const { return eval_f(i, args, ctx_); }
  double g(int i) const { return eval_g(i, ctx_); }

  // Shared brackets.
  double vc_after_nc_bracket() const;
  double race_take_vc_bracket_h() const;   // E3 C7 / E4 C4
  double race_take_hc_bracket_h() const;   // E3 C8 / E4 C5
  double hc_first_bracket_h() const;       // E3 C6 / E4 C6
  double race_take_hc_bracket_v() const;   // E7 C7 / E8 C3
  double race_take_vc_bracket_v() const;   // E7 C8 / E8 C4
  double vc_first_bracket_v() const;       // E7 C9 / E8 C5

  ModelParams pr_;
  double dh_, dv_, x_;
  QuadratureConfig cfg_;
  QueryContext ctx_;
  double a_, b_, lam_, p_;
};

double Published::i2() const {
  auto f = [&](double s) {
    return gap_cdf(pr_, dv_, s, cfg_, GapLawForm::Published) * exp_pdf(b_, s);
  };
  return integrate(f, 0.0, dh_, cfg_, {dv_});
}

double Published::i1() const {
  auto f = [&](double s) {
    return gap_cdf(pr_, dh_, s, cfg_, GapLawForm::Published) * exp_pdf(b_, s);
  };
  return integrate(f, 0.0, dv_, cfg_, {dh_});
}

double Published::w_e7() const {
  const double norm = -std::expm1(-b_ * dv_);
  auto f = [&](double w) {
    return -std::expm1(-b_ * (dh_ - w)) / norm * a_ * std::exp(-a_ * w) / norm;
  };
  return integrate(f, 0.0, dh_, cfg_);
}

// E3 C3 / E4 C3: nearest non-charging road then the nearest vertical charging road.
double Published::vc_after_nc_bracket() const {
  const double x = x_;
  if (above(x, dh_ + dv_)) return 1.0;
  auto f = [&](double y) { return fa(x - y) * exp_pdf(b_, y); };
  const double lo = std::max(x - dv_, 0.0), hi = std::min(dh_, x);
  const double part = integrate(f, lo, hi, cfg_, {x - dv_}) / (fa(dv_) * fb(dh_));
  const double rest = above(x, dv_) ? fb(std::min(dh_, x - dv_)) / fb(dh_) : 0.0;
  return part + rest;
}

double Published::race_take_vc_bracket_h() const {
  const double x = x_, dv = dv_;
  if (!below(x, dv)) return 1.0;
  const double num = f(8, {0.0, x, x, dv, [=](double t, double) { return x - t; }}) +
                     f(8, {0.0, x, [](double t, double) { return t; }, x,
                           [](double t, double y) { return y - t; }});
  const double den = f(9, {0.0, dv, 0.0, [=](double t, double) { return dv - t; }, dv,
                           [](double t, double y) { return t + y; }});
  return num / den;
}

double Published::race_take_hc_bracket_h() const {
  const double x = x_, dv = dv_;
  if (!below(x, dv)) return 1.0;
  const double inf = kInfinity;
  auto plus = [](double t, double y) { return y + t; };
  auto ident = [](double, double y) { return y; };
  const double num =
      f(9, {0.0, x, 0.0, [=](double t, double) { return std::max(x - t, 0.0); }, plus, ident}) +
      f(9, {0.0, inf, [=](double t, double) { return std::max(x - t, 0.0); }, x, x, ident});
  const double den =
      f(9, {0.0, inf, 0.0, [=](double t, double) { return std::max(dv - t, 0.0); }, plus, ident}) +
      f(9, {0.0, inf, [=](double t, double) { return std::max(dv - t, 0.0); }, dv, x, ident});
  return num / den;
}

double Published::hc_first_bracket_h() const {
  const double x = x_, dv = dv_;
  if (!below(x, dv)) return 1.0;
  const double inf = kInfinity;
  auto ident = [](double, double y) { return y; };
  const double num = f(7, {x, inf, x}) + f(7, {0.0, x, ident});
  const double den = f(7, {dv, inf, dv}) + f(7, {0.0, dv, ident});
  return num / den;
}

double Published::race_take_hc_bracket_v() const {
  const double x = x_, dh = dh_;
  if (!below(x, dh)) return 1.0;
  const double num = f(12, {0.0, x, x, dh, [=](double t, double) { return x - t; }}) +
                     f(12, {0.0, x, 0.0, x, [](double t, double y) { return y - t; }});
  const double den = f(13, {0.0, dh, 0.0, [=](double t, double) { return dh - t; }, dh,
                            [](double t, double y) { return t + y; }});
  return num / den;
}

double Published::race_take_vc_bracket_v() const {
  const double x = x_, dh = dh_;
  if (!below(x, dh)) return 1.0;
  const double inf = kInfinity;
  auto plus = [](double t, double y) { return y + t; };
  auto ident = [](double, double y) { return y; };
  const double num =
      f(13, {0.0, inf, 0.0, [=](double t, double) { return std::max(x - t, 0.0); }, plus, ident}) -
      f(13, {0.0, inf, [=](double t, double) { return std::max(x - t, 0.0); }, x, x, ident});
  const double den =
      f(13, {0.0, inf, 0.0, [=](double t, double) { return std::max(dh - t, 0.0); }, plus, ident}) -
      f(13, {0.0, inf, [=](double t, double) { return std::max(dh - t, 0.0); }, dh, x, ident});
  return num / den;
}

double Published::vc_first_bracket_v() const {
  const double x = x_, dh = dh_;
  if (!below(x, dh)) return 1.0;
  const double inf = kInfinity;
  auto ident = [](double, double y) { return y; };
  const double num = f(11, {0.0, x, ident}) + f(11, {x, inf, x});
  const double den = f(11, {0.0, dh, ident}) + f(11, {dh, inf, dh});
  return num / den;
}

std::vector<double> Published::e3() const {
  const double x = x_, dh = dh_, dv = dv_, p = p_, a = a_, b = b_;
  const double pref = p * (1 - p) / 2;
  std::vector<double> c(8, 0.0);
  if (pref <= 0.0) return c;
  const double inf = kInfinity;
  auto ident = [](double, double y) { return y; };
  auto t_plus_dv = [=](double t, double) { return t + dv; };
  auto y_plus_dv = [=](double, double y) { return y + dv; };
  auto t_minus_dv = [=](double t, double) { return t - dv; };
  auto tt = [](double t, double) { return t; };

  // C1
  if (const double lead = std::exp(-lam_ * dv) * pref; lead > 0.0) {
    double s = 0.0;
    if (above(x, dv)) {
      const double den = f(1, {0.0, inf, dv, t_plus_dv, ident, dv}) +
                         f(1, {0.0, inf, t_plus_dv, inf, t_plus_dv, dv});
      s += p * (g(1) + g(2) + g(3)) / den;
    }
    if (above(x - dh - dv, 0.0)) {
      const double den = f(3, {0.0, inf, dv, t_plus_dv, ident, dv}) +
                         f(3, {0.0, inf, t_plus_dv, inf, t_plus_dv, dv});
      s += (1 - p) * (g(4) + g(5) + g(6)) / den;
    }
    const double f2_den = f(2, {dv, inf, 0.0, t_minus_dv, tt, y_plus_dv});
    s += p * f(2, {dv, inf, 0.0, [=](double t, double) { return std::min(x, t - dv); }, tt,
                   y_plus_dv}) /
         f2_den;
    s += p *
         f(4, {dv, inf, 0.0, [=](double t, double) { return std::min(x, t - dv); }, tt,
               y_plus_dv}) /
         f(4, {dv, inf, 0.0, t_minus_dv, tt, y_plus_dv});
    if (above(x - dh, 0.0)) {
      s += (1 - p) *
           f(2, {dv, inf, 0.0, [=](double t, double) { return std::min(x - dh, t - dv); }, tt,
                 y_plus_dv}) /
           f2_den;
      const double num = f(5, {0.0, x - dh, t_plus_dv, inf, ident}) +
                         f(5, {0.0, x - dh, dv, t_plus_dv, t_plus_dv});
      const double den =
          f(5, {0.0, inf, t_plus_dv, inf, ident}) + f(5, {0.0, inf, dv, t_plus_dv, t_plus_dv});
      s += (1 - p) * num / den;
    }
    c[0] = s * lead;
  }
  // C2
  {
    double br = 0.0;
    if (above(x, dh) && below(x, dh + dv)) br = fa(x - dh) / fa(dv);
    if (above(x, dh + dv)) br = 1.0;
    c[1] = br * std::exp(-b * dv) *
           (a * dv * std::exp(-a * dv) +
            std::exp(-b * dh) * (1 - std::exp(-a * dv) - a * dv * std::exp(-a * dv))) *
           pref;
  }
  // C3
  c[2] = vc_after_nc_bracket() * fb(dh) * std::exp(-b * dv) *
         (1 - std::exp(-a * dv) - a * dv * std::exp(-a * dv)) * pref;

  const double qv = q_v();
  const double some_hc = fb(dv), some_vc = fb(dh), no_vc = std::exp(-b * dh);
  const double fx2 = fx2_at_dh();
  // C4
  {
    double br = 1.0;
    if (below(x, dv)) {
      const double lo = std::max(x - dh, 0.0), lo_d = std::max(dv - dh, 0.0);
      auto dh_plus_y = [=](double, double y) { return dh + y; };
      const double num = f(6, {0.0, lo, dh_plus_y, ident}) + f(6, {lo, x, x, ident});
      const double den = f(6, {0.0, lo_d, dh_plus_y, ident}) + f(6, {lo_d, dv, dv, ident});
      br = num / den;
    }
    c[3] = br * fx2 * (1 - qv) * no_vc * some_hc * pref;
  }
  // C5
  {
    double br = 0.0;
    if (above(x, dh) && below(x, dv)) {
      const double num = f(10, {x, dv, x - dh}) +
                         f(10, {dh, std::min(x, dv), [=](double, double y) { return y - dh; }});
      const double den = f(6, {0.0, dv - dh, dv, [=](double, double y) { return dh + y; }});
      br = num / den;
    }
    if (above(x, dv)) br = 1.0;
    c[4] = br * (1 - fx2) * (1 - qv) * no_vc * some_hc * pref;
  }
  // C6
  c[5] = hc_first_bracket_h() * qv * some_hc * pref;
  // C7, C8
  const double i2v = i2();
  c[6] = race_take_vc_bracket_h() * (1 - i2v) * (1 - qv) * some_vc * some_hc * pref;
  c[7] = race_take_hc_bracket_h() * i2v * (1 - qv) * some_vc * some_hc * pref;
  return c;
}

std::vector<double> Published::e4() const {
  const double x = x_, dh = dh_, dv = dv_, p = p_, a = a_, b = b_;
  const double pref = (1 - p) * (1 - p) / 2;
  std::vector<double> c(6, 0.0);
  if (pref <= 0.0 || p <= 0.0) return c;
  const double inf = kInfinity;
  auto ident = [](double, double y) { return y; };
  auto t_plus_dv = [=](double t, double) { return t + dv; };
  auto y_plus_dv = [=](double, double y) { return y + dv; };
  auto t_minus_dv = [=](double t, double) { return t - dv; };
  auto tt = [](double t, double) { return t; };
  auto min_x = [=](double t, double) { return std::min(x, t - dv); };

  // C1
  if (const double lead = std::exp(-lam_ * dv) * pref; lead > 0.0) {
    double s = 0.0;
    if (above(x, dv)) {
      const double den = f(1, {0.0, inf, dv, t_plus_dv, ident, dv}) +
                         f(1, {0.0, inf, t_plus_dv, inf, t_plus_dv, dv});
      s += p * (g(1) + g(2) + g(3)) / den;
    }
    s += p * f(2, {dv, inf, 0.0, min_x, tt, y_plus_dv}) /
         f(2, {dv, inf, 0.0, t_minus_dv, tt, y_plus_dv});
    s += p * f(4, {dv, inf, 0.0, min_x, tt, y_plus_dv}) /
         f(4, {dv, inf, 0.0, t_minus_dv, tt, y_plus_dv});
    c[0] = s * lead;
  }
  const double e_bdv = std::exp(-b * dv), e_adv = std::exp(-a * dv), e_bdh = std::exp(-b * dh);
  // C2
  {
    const double br = below(x, dv) ? fb(x) / fb(dv) : 1.0;
    c[1] = br *
           (b * dv * e_bdv * e_adv + e_bdh * b * dv * e_bdv * (1 - e_adv) +
            e_bdh * (1 - e_bdv - b * dv * e_bdv)) *
           pref;
  }
  // C3
  c[2] = vc_after_nc_bracket() * fb(dh) * e_bdv * (1 - e_adv - a * dv * e_adv) * pref;
  const double qv = q_v();
  const double i2v = i2();
  const double mix = b * dv * e_bdv * (1 - e_adv) + (1 - e_bdv - b * dv * e_bdv);
  c[3] = race_take_vc_bracket_h() * (1 - i2v) * (1 - qv) * fb(dh) * mix * pref;
  c[4] = race_take_hc_bracket_h() * i2v * (1 - qv) * fb(dh) * mix * pref;
  c[5] = hc_first_bracket_h() * qv * fb(dh) * mix * pref;
  return c;
}

std::vector<double> Published::e7() const {
  const double x = x_, dh = dh_, dv = dv_, p = p_, a = a_, b = b_;
  const double pref = p * (1 - p) / 2;
  std::vector<double> c(9, 0.0);
  if (pref <= 0.0) return c;
  const double e_bdv = std::exp(-b * dv), e_adv = std::exp(-a * dv), e_bdh = std::exp(-b * dh);
  const double past_dh = above(x, dh) ? 1.0 : 0.0;
  c[0] = std::exp(-lam_ * dv) * past_dh * pref;
  c[1] = e_bdv * (1 - e_adv) * e_bdh * past_dh * pref;
  {
    const double br = below(x, dh) ? fb(x) / fb(dh) : 1.0;
    c[2] = br * fb(dh) * e_bdv * (1 - e_adv) * pref;
  }
  c[3] = fb(dv) * past_dh * pref;
  const double w = w_e7();
  const double vnc_only = e_bdh * fa(dh) * fb(dv);
  {
    double br = 1.0;
    if (below(x, dh)) {
      const double num =
          f(11, {std::max(x - dv, 0.0), x, [=](double, double y) { return x - y; }}) +
          (above(x, dv) ? f(11, {0.0, x - dv, dv}) : 0.0);
      const double den =
          f(11, {std::max(dh - dv, 0.0), dh, [=](double, double y) { return dh - y; }}) +
          (above(dh, dv) ? f(11, {0.0, dh - dv, dv}) : 0.0);
      br = num / den;
    }
    c[4] = br * w * vnc_only * pref;
  }
  c[5] = past_dh * (1 - w) * vnc_only * pref;
  const double qh = q_h();
  const double i1v = i1();
  c[6] = race_take_hc_bracket_v() * (1 - i1v) * (1 - qh) * fb(dh) * fb(dv) * pref;
  c[7] = race_take_vc_bracket_v() * i1v * (1 - qh) * fb(dh) * fb(dv) * pref;
  c[8] = vc_first_bracket_v() * qh * fb(dh) * fb(dv) * pref;
  return c;
}

std::vector<double> Published::e8() const {
  const double x = x_, dh = dh_, dv = dv_, p = p_, a = a_, b = b_;
  const double pref = (1 - p) * (1 - p) / 2;
  std::vector<double> c(5, 0.0);
  if (pref <= 0.0 || p <= 0.0) return c;
  const double e_bdv = std::exp(-b * dv), e_adv = std::exp(-a * dv), e_bdh = std::exp(-b * dh);
  {
    const double br = below(x, dh) ? fb(x) / fb(dh) : 1.0;
    c[0] = br * fb(dh) * e_bdv * (1 - e_adv) * pref;
  }
  {
    double br = 1.0;
    if (below(x, dh + dv)) {
      const double num =
          f(11, {std::max(x - dv, 0.0), std::min(x, dh), [=](double, double o) { return x - o; }}) +
          (above(x, dv) ? f(11, {0.0, std::min(x - dv, dh), dv}) : 0.0);
      br = num / (fb(dv) * fa(dh));
    }
    c[1] = br * e_bdh * fa(dh) * fb(dv) * pref;
  }
  const double qh = q_h();
  const double i1v = i1();
  c[2] = race_take_hc_bracket_v() * (1 - i1v) * (1 - qh) * fb(dh) * fb(dv) * pref;
  c[3] = race_take_vc_bracket_v() * i1v * (1 - qh) * fb(dh) * fb(dv) * pref;
  c[4] = vc_first_bracket_v() * qh * fb(dh) * fb(dv) * pref;
  return c;
}

}  // namespace

std::vector<double> published_components(Event e, const AnalyticQuery& q,
                                         const QuadratureConfig& cfg) {
  q.validate();
  cfg.validate();
  Published pub(q, cfg);
  if (!(q.x > 0.0)) {
    switch (e) {
      case Event::E3: return std::vector<double>(8, 0.0);
      case Event::E4: return std::vector<double>(6, 0.0);
      case Event::E7: return std::vector<double>(9, 0.0);
      case Event::E8: return std::vector<double>(5, 0.0);
      default: return {};
    }
  }
  switch (e) {
    case Event::E3: return pub.e3();
    case Event::E4: return pub.e4();
    case Event::E7: return pub.e7();
    case Event::E8: return pub.e8();
    default: return {};
  }
}

double published_leaf_probability(LeafId id, const ModelParams& params, double d_h, double d_v,
                                  const QuadratureConfig& cfg) {
  leaf_flat_index(id);
  params.validate();
  const double p = params.p, lam = params.lambda;
  const double a = params.noncharging_rate(), b = params.charging_rate();
  const double dh = d_h, dv = d_v;
  const double no_h = std::exp(-lam * dv);
  const double no_hc = std::exp(-b * dv), some_hc = -std::expm1(-b * dv);
  const double no_vc = std::exp(-b * dh), some_vc = -std::expm1(-b * dh);
  const double nc_ge1 = -std::expm1(-a * dv);
  const double nc_one = a * dv * std::exp(-a * dv);
  const double nc_ge2 = nc_ge1 - nc_one;
  const double c_one = b * dv * std::exp(-b * dv);
  const double c_ge2 = some_hc - c_one;
  AnalyticQuery q{params, d_h, d_v, 0.0};
  Published pub(q, cfg);
  auto needs_both = [&] {
    if (p <= 0.0 || p >= 1.0) throw UndefinedConditionalError("published branch needs 0 < p < 1");
  };

  switch (id.event) {
    case 1: {
      const double v[] = {no_h, some_hc, no_hc * nc_ge1};
      return v[id.index - 1];
    }
    case 2:
    case 6: {
      if (id.index == 1) return no_h;
      if (id.event == 2 && id.index == 2) return no_hc * nc_ge1;
      if (id.event == 6 && id.index == 2) return no_hc * nc_ge1 * no_vc;
      if (id.event == 6 && id.index == 3) return no_hc * nc_ge1 * some_vc;
      if (id.event == 6 && id.index == 4) return some_hc * no_vc;
      needs_both();
      const double qv = pub.q_v();
      if (id.event == 2) {
        const double v[] = {some_hc * no_vc * (1 - qv), some_hc * no_vc * qv,
                            some_hc * some_vc * (1 - qv), some_hc * some_vc * qv};
        return v[id.index - 3];
      }
      return some_hc * some_vc * (id.index == 5 ? 1 - qv : qv);
    }
    case 3: {
      if (id.index == 1) return no_h;
      if (id.index == 2) return no_hc * nc_one;
      if (id.index == 3) return no_hc * nc_ge2 * no_vc;
      if (id.index == 4) return no_hc * nc_ge2 * some_vc;
      needs_both();
      const double qv = pub.q_v();
      switch (id.index) {
        case 5: return some_hc * no_vc * (1 - qv) * pub.fx2_at_dh();
        case 6: return some_hc * no_vc * (1 - qv) * (1 - pub.fx2_at_dh());
        case 7: return some_hc * no_vc * qv;
        case 8: return some_hc * some_vc * (1 - qv) * (1 - pub.i2());
        case 9: return some_hc * some_vc * (1 - qv) * pub.i2();
        default: return some_hc * some_vc * qv;
      }
    }
    case 4: {
      const double e_adv = std::exp(-a * dv);
      switch (id.index) {
        case 1: return no_h;
        case 2: return nc_one * no_hc;
        case 3: return c_one * e_adv;
        case 4: return no_hc * nc_ge2 * no_vc;
        case 5: return no_hc * nc_ge2 * some_vc;
        case 6: return c_one * nc_ge1 * no_vc;
        case 10: return c_ge2 * no_vc;
        default: break;
      }
      needs_both();
      const double qv = pub.q_v(), i2v = pub.i2();
      const double base = id.index <= 9 ? c_one * nc_ge1 * some_vc : c_ge2 * some_vc;
      const int k = id.index <= 9 ? id.index - 7 : id.index - 11;
      const double v[] = {(1 - qv) * (1 - i2v), (1 - qv) * i2v, qv};
      return base * v[k];
    }
    case 5:
      return 1.0;
    case 7:
    case 8: {
      const double only_nc = no_hc * nc_ge1;
      if (id.index == 1) return no_h;
      if (id.index == 2) return only_nc * no_vc;
      if (id.index == 3) return only_nc * some_vc;
      if (id.index == 4) return some_hc * std::exp(-lam * dh);
      const double only_vnc = no_vc * -std::expm1(-a * dh);
      if (id.event == 8 && id.index == 5) return some_hc * only_vnc;
      needs_both();
      if (id.event == 7 && id.index == 5) return some_hc * only_vnc * pub.w_e7();
      if (id.event == 7 && id.index == 6) return some_hc * only_vnc * (1 - pub.w_e7());
      const int k = id.event == 7 ? id.index - 7 : id.index - 6;
      const double qh = pub.q_h(), i1v = pub.i1();
      if (k == 0) return some_hc * some_vc * (1 - qh) * (1 - i1v);
      if (k == 1) return some_hc * some_vc * (1 - qh) * i1v;
      return some_hc * some_vc * (id.event == 7 ? pub.q_h_e7_tree() : qh);
    }
  }
  throw ParameterError("unknown leaf " + to_string(id));
}

}  // namespace chargegrid::analytic
