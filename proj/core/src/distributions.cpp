#include "chargegrid/distributions.hpp"

#include <cmath>

namespace chargegrid::analytic {

double exp_cdf(double rate, double x) {
  if (!(x > 0.0) || rate <= 0.0) return 0.0;
  return -std::expm1(-rate * x);
}

double exp_pdf(double rate, double x) {
  if (x < 0.0 || rate <= 0.0) return 0.0;
  return rate * std::exp(-rate * x);
}

double nearest_rate(NearestKind kind, const ModelParams& params) {
  switch (kind) {
    case NearestKind::HC:
    case NearestKind::VC:
      return params.charging_rate();
    case NearestKind::HNC:
    case NearestKind::VNC:
      return params.noncharging_rate();
  }
  throw ParameterError("unknown nearest-road kind");
}

double cdf_nearest(NearestKind kind, const ModelParams& params, double x) {
  params.validate();
  require_nonnegative(x, "x");
  return exp_cdf(nearest_rate(kind, params), x);
}

double pdf_nearest(NearestKind kind, const ModelParams& params, double x) {
  params.validate();
  require_nonnegative(x, "x");
  return exp_pdf(nearest_rate(kind, params), x);
}

double cdf_dl(const ModelParams& params, double x) {
  params.validate();
  require_nonnegative(x, "x");
  return exp_cdf(params.lambda, x);
}

double pdf_dl(const ModelParams& params, double x) {
  params.validate();
  require_nonnegative(x, "x");
  return exp_pdf(params.lambda, x);
}

namespace {

void require_gap_law_defined(const ModelParams& params, double span) {
  params.validate();
  if (!(span > 0.0)) throw ParameterError("span must be positive");
  if (params.p <= 0.0 || params.p >= 1.0)
    throw UndefinedConditionalError(
        "gap law needs both charging and non-charging roads (0 < p < 1)");
}

// P(X > x, nearest nc < nearest c < span) for the conditional form, unnormalized.
double tail_mass(double a, double b, double span, double x, const QuadratureConfig& cfg) {
  auto integrand = [&](double t) { return b * std::exp(-b * t) * -std::expm1(-a * (t - x)); };
  return integrate(integrand, x, span, cfg);
}

}  // namespace

double gap_cdf(const ModelParams& params, double span, double x, const QuadratureConfig& cfg,
               GapLawForm form) {
  require_gap_law_defined(params, span);
  if (x <= 0.0) return 0.0;
  if (x >= span) return 1.0;
  const double a = params.noncharging_rate(), b = params.charging_rate();
  double value;
  if (form == GapLawForm::Conditional) {
    value = 1.0 - tail_mass(a, b, span, x, cfg) / tail_mass(a, b, span, 0.0, cfg);
  } else {
    const double norm = -std::expm1(-b * span);
    auto integrand = [&](double t) {
      return -std::expm1(-a * (t - x)) / -std::expm1(-a * t) * b * std::exp(-b * t) / norm;
    };
    value = 1.0 - integrate(integrand, x, span, cfg);
  }
  return std::clamp(value, 0.0, 1.0);
}

double gap_pdf(const ModelParams& params, double span, double x, const QuadratureConfig& cfg,
               GapLawForm form) {
  require_gap_law_defined(params, span);
  if (x < 0.0 || x > span) return 0.0;
  const double a = params.noncharging_rate(), b = params.charging_rate();
  if (form == GapLawForm::Conditional) {
    auto integrand = [&](double t) { return a * b * std::exp(-b * t - a * (t - x)); };
    return std::max(0.0, integrate(integrand, x, span, cfg) / tail_mass(a, b, span, 0.0, cfg));
  }
  const double norm = -std::expm1(-b * span);
  auto integrand = [&](double t) {
    return a * b * std::exp(-b * t - a * (t - x)) / (norm * -std::expm1(-a * t));
  };
  // The published integrand is singular like 1/t at t = 0 when x = 0.
  if (x <= 0.0) return kInfinity;
  return std::max(0.0, integrate(integrand, x, span, cfg));
}

double cdf_x1(const ModelParams& params, double d_h, double x, const QuadratureConfig& cfg,
              GapLawForm form) {
  require_nonnegative(x, "x");
  if (x > d_h) throw ParameterError("x must not exceed d_h");
  return gap_cdf(params, d_h, x, cfg, form);
}

double pdf_x1(const ModelParams& params, double d_h, double x, const QuadratureConfig& cfg,
              GapLawForm form) {
  require_nonnegative(x, "x");
  if (x > d_h) throw ParameterError("x must not exceed d_h");
  return gap_pdf(params, d_h, x, cfg, form);
}

double cdf_x2(const ModelParams& params, double d_v, double x, const QuadratureConfig& cfg,
              GapLawForm form) {
  require_nonnegative(x, "x");
  if (x > d_v) throw ParameterError("x must not exceed d_v");
  return gap_cdf(params, d_v, x, cfg, form);
}

double pdf_x2(const ModelParams& params, double d_v, double x, const QuadratureConfig& cfg,
              GapLawForm form) {
  require_nonnegative(x, "x");
  if (x > d_v) throw ParameterError("x must not exceed d_v");
  return gap_pdf(params, d_v, x, cfg, form);
}

}  // namespace chargegrid::analytic
