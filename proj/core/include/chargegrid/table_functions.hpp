#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "chargegrid/model.hpp"
#include "chargegrid/quadrature.hpp"

namespace chargegrid::analytic {

// Everything a tabulated integral needs besides its slot arguments.
struct QueryContext {
  ModelParams params;
  double d_h = 0.0;
  double d_v = 0.0;
  double x = 0.0;
  QuadratureConfig cfg;
};

// One argument slot of a tabulated integral: a constant or a function of the outer integration
// variable t and the inner variable y. Single integrals call it with t == y.
class SlotArg {
 public:
  SlotArg(double c) : constant_(c), is_constant_(true) {}  // NOLINT(implicit)
  template <class F>
    requires std::is_invocable_r_v<double, const F&, double, double>
  SlotArg(F f) : fn_(std::move(f)) {}  // NOLINT(implicit)

  double operator()(double t, double y) const { return is_constant_ ? constant_ : fn_(t, y); }
  bool is_constant() const { return is_constant_; }
  double constant() const;

 private:
  std::function<double(double, double)> fn_;
  double constant_ = 0.0;
  bool is_constant_ = false;
};

// Number of slot arguments taken by f_index (3, 4, 5 or 6).
int table_arity(int index);

// Evaluates f_index. The first two slots (integration limits of the outer or only variable) must
// be constants; kInfinity is allowed as an upper limit and is truncated per cfg.
double eval_f(int index, std::span<const SlotArg> args, const QueryContext& q);
double eval_f(int index, std::initializer_list<SlotArg> args, const QueryContext& q);

// g1..g6 bound to the query's x, d_h, d_v.
double eval_g(int index, const QueryContext& q);

}  // namespace chargegrid::analytic
