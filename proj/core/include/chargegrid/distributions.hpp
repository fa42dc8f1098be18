#pragma once

#include "chargegrid/model.hpp"
#include "chargegrid/quadrature.hpp"

namespace chargegrid::analytic {

enum class NearestKind { HC, VC, HNC, VNC };

double nearest_rate(NearestKind kind, const ModelParams& params);

// Distance to the nearest road of the given kind toward the destination: Exp(lambda p) for
// charging kinds, Exp(lambda (1-p)) for non-charging kinds. Negative x is a ParameterError.
double cdf_nearest(NearestKind kind, const ModelParams& params, double x);
double pdf_nearest(NearestKind kind, const ModelParams& params, double x);

// Distance to the nearest horizontal road behind the source: Exp(lambda).
double cdf_dl(const ModelParams& params, double x);
double pdf_dl(const ModelParams& params, double x);

// Integrand-safe variants: 0 for negative arguments, rate 0 gives CDF 0 and density 0.
double exp_cdf(double rate, double x);
double exp_pdf(double rate, double x);

// X1 (vertical family, span d_h) and X2 (horizontal family, span d_v): gap between the nearest
// non-charging road and the nearest charging road, given nearest non-charging < nearest
// charging < span.
enum class GapLawForm {
  // Exact conditional law: normalized by P(nearest non-charging < nearest charging < span).
  Conditional,
  // Closed form as published, normalizing the inner CDF pointwise by P(nearest non-charging < t).
  Published,
};

double cdf_x1(const ModelParams& params, double d_h, double x, const QuadratureConfig& cfg = {},
              GapLawForm form = GapLawForm::Conditional);
double pdf_x1(const ModelParams& params, double d_h, double x, const QuadratureConfig& cfg = {},
              GapLawForm form = GapLawForm::Conditional);
double cdf_x2(const ModelParams& params, double d_v, double x, const QuadratureConfig& cfg = {},
              GapLawForm form = GapLawForm::Conditional);
double pdf_x2(const ModelParams& params, double d_v, double x, const QuadratureConfig& cfg = {},
              GapLawForm form = GapLawForm::Conditional);

// Shared implementation; `span` is d_h for X1 and d_v for X2. x outside [0, span] is clamped,
// which lets it sit inside integrands.
double gap_cdf(const ModelParams& params, double span, double x, const QuadratureConfig& cfg,
               GapLawForm form);
double gap_pdf(const ModelParams& params, double span, double x, const QuadratureConfig& cfg,
               GapLawForm form);

}  // namespace chargegrid::analytic
