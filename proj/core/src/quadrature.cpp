#include "chargegrid/quadrature.hpp"

namespace chargegrid::analytic {

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0)) throw ParameterError("abs_tol must be positive");
  if (!(rel_tol > 0.0)) throw ParameterError("rel_tol must be positive");
  if (max_depth < 10) throw ParameterError("max_depth must be >= 10");
  if (!(tail_exponent > 0.0)) throw ParameterError("tail_exponent must be positive");
}

double tail_limit(double lower, const ModelParams& params, const QuadratureConfig& cfg) {
  const double slowest = std::min({params.p, 1.0 - params.p, 0.5});
  const double rate = params.lambda * (slowest > 0.0 ? slowest : 0.5);
  return std::max(lower, 0.0) + cfg.tail_exponent / rate;
}

}  // namespace chargegrid::analytic
