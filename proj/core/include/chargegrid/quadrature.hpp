#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "chargegrid/model.hpp"

namespace chargegrid::analytic {

struct QuadratureConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  int max_depth = 30;
  // Infinite upper limits are cut at L + tail_exponent / (lambda * min(p, 1-p, 0.5)), leaving
  // an exponential tail of mass below e^{-tail_exponent}.
  double tail_exponent = 50.0;

  void validate() const;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : std::runtime_error(what + " (error estimate " + std::to_string(error_estimate) + ")"),
        error_estimate_(error_estimate) {}
  double error_estimate() const { return error_estimate_; }

 private:
  double error_estimate_;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // accumulated from panels that hit max_depth
  bool converged = true;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Finite stand-in for an infinite upper limit starting at `lower`.
double tail_limit(double lower, const ModelParams& params, const QuadratureConfig& cfg);

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double eps, int depth, const QuadratureConfig& cfg, double& residual) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * eps || !(m > a && b > m)) return left + right + delta / 15.0;
  if (depth >= cfg.max_depth) {
    residual += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1, cfg, residual) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1, cfg, residual);
}

}  // namespace detail

// Adaptive Simpson on [a, b] with the interval pre-split at every breakpoint inside it.
// Reversed bounds give the negated integral.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b, const QuadratureConfig& cfg,
                                    const std::vector<double>& breakpoints = {}) {
  QuadratureResult out;
  if (a == b) return out;
  if (b < a) {
    out = integrate_adaptive(f, b, a, cfg, breakpoints);
    out.value = -out.value;
    return out;
  }
  if (!std::isfinite(a) || !std::isfinite(b))
    throw QuadratureError("integration limits must be finite after tail truncation", kInfinity);

  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b && std::isfinite(c)) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  constexpr int kPanelsPerPiece = 4;
  struct Panel {
    double a, b, fa, fm, fb, whole;
  };
  std::vector<Panel> panels;
  double estimate = 0.0;
  double f_prev = f(cuts[0]);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double w = (hi - lo) / kPanelsPerPiece;
    for (int k = 0; k < kPanelsPerPiece; ++k) {
      const double pa = lo + k * w;
      const double pb = k + 1 == kPanelsPerPiece ? hi : lo + (k + 1) * w;
      const double fm = f(0.5 * (pa + pb));
      const double fb = f(pb);
      const double whole = (pb - pa) / 6.0 * (f_prev + 4.0 * fm + fb);
      panels.push_back({pa, pb, f_prev, fm, fb, whole});
      estimate += whole;
      f_prev = fb;
    }
  }
  const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(estimate));
  const double total_len = b - a;
  double residual = 0.0;
  for (const Panel& p : panels) {
    const double eps = tol * (p.b - p.a) / total_len;
    out.value += detail::simpson_step(f, p.a, p.b, p.fa, p.fm, p.fb, p.whole, eps, 1, cfg, residual);
  }
  out.error_estimate = residual;
  out.converged = residual <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(out.value));
  return out;
}

// Like integrate_adaptive but throws QuadratureError when max_depth was not enough.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureConfig& cfg,
                 const std::vector<double>& breakpoints = {}) {
  QuadratureResult r = integrate_adaptive(f, a, b, cfg, breakpoints);
  if (!r.converged) throw QuadratureError("adaptive Simpson did not converge", r.error_estimate);
  return r.value;
}

}  // namespace chargegrid::analytic
