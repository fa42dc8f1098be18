#include "chargegrid/table_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "chargegrid/distributions.hpp"

namespace chargegrid::analytic {

double SlotArg::constant() const {
  if (!is_constant_) throw ParameterError("slot argument is a function, not a constant");
  return constant_;
}

namespace {

enum class Law { HC, HNC, VC, VNC, DL };
enum class Shape { Diff, Plain, Complement };

struct TableEntry {
  int arity;
  bool dual;    // double integral
  Law cdf_law;  // law of the bracketed CDF
  Shape shape;
  Law inner;    // density of y
  Law outer;    // density of t (double integrals only)
};

constexpr std::array<TableEntry, 13> kTable{{
    {6, true, Law::HC, Shape::Diff, Law::HNC, Law::DL},         // 1
    {6, true, Law::HC, Shape::Diff, Law::DL, Law::HNC},         // 2
    {6, true, Law::HNC, Shape::Diff, Law::HC, Law::DL},         // 3
    {6, true, Law::HNC, Shape::Diff, Law::DL, Law::HC},         // 4
    {5, true, Law::HC, Shape::Complement, Law::HNC, Law::DL},   // 5
    {4, false, Law::HC, Shape::Diff, Law::HNC, Law::HNC},       // 6
    {3, false, Law::HC, Shape::Plain, Law::HNC, Law::HNC},      // 7
    {5, true, Law::VC, Shape::Plain, Law::HC, Law::HNC},        // 8
    {6, true, Law::HC, Shape::Diff, Law::HNC, Law::VC},         // 9
    {3, false, Law::HNC, Shape::Plain, Law::HC, Law::HC},       // 10
    {3, false, Law::HC, Shape::Plain, Law::VNC, Law::VNC},      // 11
    {5, true, Law::HC, Shape::Plain, Law::VC, Law::VNC},        // 12
    {6, true, Law::VC, Shape::Diff, Law::VNC, Law::HC},         // 13
}};

double rate_of(Law law, const ModelParams& pr) {
  switch (law) {
    case Law::HC:
    case Law::VC:
      return pr.charging_rate();
    case Law::HNC:
    case Law::VNC:
      return pr.noncharging_rate();
    case Law::DL:
      return pr.lambda;
  }
  return 0.0;
}

// Candidate kink locations for an integrand in y given t.
std::vector<double> inner_breaks(const QueryContext& q, double t) {
  const double x = q.x, dh = q.d_h, dv = q.d_v;
  return {0.0,       x,          dv,         dh,         x - dv,     x - dh,    x - dh - dv,
          dv - dh,   t,          x - t,      dv - t,     dh - t,     t + dv,    t + dh,
          t - dv,    t - dh,     x - t - dv, x - t - dh, x + t,      dv + dh - t};
}

std::vector<double> outer_breaks(const QueryContext& q) {
  const double x = q.x, dh = q.d_h, dv = q.d_v;
  return {0.0,    x,      dv,     dh,          x - dv,      x - dh,      x - dh - dv, dv - dh,
          dh - dv, x - 2 * dv, x - 2 * dh, 0.5 * x, 0.5 * (x - dv), 0.5 * (x - dh), dv + dh};
}

// Integral of g(s) * density(s) over [lo, hi] where the density lives on [0, inf).
template <class G>
double integrate_on_support(const G& g, double lo, double hi, const QueryContext& q,
                            const std::vector<double>& breaks) {
  if (lo == hi) return 0.0;
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  if (std::isinf(hi)) hi = tail_limit(lo, q.params, q.cfg);
  lo = std::max(lo, 0.0);
  if (!(hi > lo)) return 0.0;
  return sign * integrate(g, lo, hi, q.cfg, breaks);
}

double bracket(const TableEntry& e, const ModelParams& pr, std::span<const SlotArg> args,
               std::size_t first, double t, double y) {
  // Differences of CDFs are taken on the survival side so far-tail brackets keep their digits.
  const double r = rate_of(e.cdf_law, pr);
  auto survival = [r](double s) { return s <= 0.0 || r <= 0.0 ? 1.0 : std::exp(-r * s); };
  const double v5 = args[first](t, y);
  switch (e.shape) {
    case Shape::Diff:
      return survival(args[first + 1](t, y)) - survival(v5);
    case Shape::Plain:
      return exp_cdf(r, v5);
    case Shape::Complement:
      return survival(v5);
  }
  return 0.0;
}

}  // namespace

int table_arity(int index) {
  if (index < 1 || index > 13) throw ParameterError("table function index must be 1..13");
  return kTable[index - 1].arity;
}

double eval_f(int index, std::span<const SlotArg> args, const QueryContext& q) {
  const int arity = table_arity(index);
  if (static_cast<int>(args.size()) != arity)
    throw ParameterError("f" + std::to_string(index) + " takes " + std::to_string(arity) +
                         " arguments, got " + std::to_string(args.size()));
  q.params.validate();
  q.cfg.validate();
  const TableEntry& e = kTable[index - 1];
  const ModelParams& pr = q.params;
  const double a1 = args[0].constant(), a2 = args[1].constant();
  const double r_in = rate_of(e.inner, pr);
  // Zero-rate density: the whole integral vanishes (degenerate p).
  if (r_in <= 0.0) return 0.0;

  if (!e.dual) {
    auto integrand = [&](double y) {
      return bracket(e, pr, args, 2, y, y) * exp_pdf(r_in, y);
    };
    return integrate_on_support(integrand, a1, a2, q, inner_breaks(q, 0.0));
  }

  const double r_out = rate_of(e.outer, pr);
  if (r_out <= 0.0) return 0.0;
  auto outer = [&](double t) {
    auto inner = [&](double y) { return bracket(e, pr, args, 4, t, y) * exp_pdf(r_in, y); };
    const double lo = args[2](t, t), hi = args[3](t, t);
    return integrate_on_support(inner, lo, hi, q, inner_breaks(q, t)) * exp_pdf(r_out, t);
  };
  return integrate_on_support(outer, a1, a2, q, outer_breaks(q));
}

double eval_f(int index, std::initializer_list<SlotArg> args, const QueryContext& q) {
  return eval_f(index, std::span<const SlotArg>(args.begin(), args.size()), q);
}

double eval_g(int index, const QueryContext& q) {
  const double x = q.x, dh = q.d_h, dv = q.d_v;
  const double inf = kInfinity;
  switch (index) {
    case 1:
      return eval_f(1, {x - dv, inf, x, inf, x, dv}, q);
    case 2:
      return eval_f(1,
                    {x - dv, inf, dv, [=](double t, double) { return std::min(x, t + dv); },
                     [](double, double y) { return y; }, dv},
                    q);
    case 3:
      return eval_f(1,
                    {0.0, x - dv, [=](double t, double) { return t + dv; }, inf,
                     [=](double t, double) { return t + dv; }, dv},
                    q);
    case 4:
      return eval_f(3, {x - dh - dv, inf, x - dh, inf, x - dh, dv}, q);
    case 5:
      return eval_f(3,
                    {0.0, inf, dv, [=](double t, double) { return std::min(x - dh, t + dv); },
                     [](double, double y) { return y; }, dv},
                    q);
    case 6:
      return eval_f(3,
                    {0.0, x - dh - dv, [=](double t, double) { return t + dv; }, inf,
                     [=](double t, double) { return t + dv; }, dv},
                    q);
    default:
      throw ParameterError("g index must be 1..6");
  }
}

}  // namespace chargegrid::analytic
