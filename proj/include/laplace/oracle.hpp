#pragma once

#include <span>
#include <vector>

#include "laplace/critpoint.hpp"

namespace laplace {

struct QuadratureConfig {
  int base_order = 32;         // Gauss-Legendre nodes per axis per panel
  int refinement_levels = 6;   // minimum geometric panel levels toward the center
  double rel_tol = 1e-10;
  long long max_total_nodes = 10'000'000;
};

struct QuadratureRule {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule on [a, b]; exact for degree <= 2m - 1.
QuadratureRule gauss_legendre_rule(int m, double a, double b);

struct ReferenceValue {
  double log_scale = 0.0;   // n h_n(center)
  double mantissa = 0.0;    // integral of exp(n (h_n - h_n(center))) g
  double est_error = 0.0;   // last successive difference
  bool converged = false;
  long long nodes = 0;      // nodes in the final round
  int order = 0;            // Gauss-Legendre order of the final round
};

/// Tensor-product Gauss-Legendre on panels refined geometrically (factor 2)
/// toward `center`, with the innermost panel no wider than 10 / sqrt(n).
/// Cells whose probed integrand exponent is below -80 are skipped. The order
/// doubles until successive values agree to rel_tol or the node budget runs
/// out (then converged = false).
ReferenceValue reference_integral(const ProblemSpec& prob, long n, std::span<const double> center,
                                  const QuadratureConfig& cfg = {});

/// Same nodes and weights for several amplitudes in place of prob.g. A value
/// counts as converged when its successive difference is within rel_tol of
/// the integral of |integrand|; rounds continue until all have converged.
std::vector<ReferenceValue> reference_integrals(const ProblemSpec& prob, long n, std::span<const double> center,
                                                std::span<const ScalarField> amplitudes,
                                                const QuadratureConfig& cfg = {});

}  // namespace laplace
