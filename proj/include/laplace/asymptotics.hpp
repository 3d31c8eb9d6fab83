#pragma once

#include <span>
#include <vector>

#include "laplace/critpoint.hpp"
#include "laplace/fields.hpp"
#include "laplace/symmat.hpp"

namespace laplace {

// m!! for even m >= 0, with 0!! = 1.
long long double_factorial(int m);

// Gamma((m + 1) / 2) from Gamma(1/2) = sqrt(pi), Gamma(1) = 1 and the
// recurrence Gamma(z + 1) = z Gamma(z).
double half_integer_gamma(int m);

/// Integral over R^d of exp(y^T diag(lambda) y / 2) y^beta for lambda_i < 0:
/// prod_i (|lambda_i|/2)^(-(beta_i+1)/2) Gamma((beta_i+1)/2), zero when any
/// beta_i is odd.
double gaussian_moment_diag(std::span<const double> lambda, const MultiIndex& beta);

/// Same integral for a general negative-definite A, by Isserlis/Wick:
/// (2 pi)^(d/2) / sqrt(det(-A)) times the sum over perfect pairings of the
/// label multiset of prod Sigma_ab, Sigma = (-A)^-1. Requires |beta| <= 10.
double gaussian_moment_wick(const SymMatrix& a, const MultiIndex& beta);

/// Error exponent q(p, d, k); p = +inf for an unperturbed phase. Throws for
/// p <= 1.
double exponent_q(double p, int d, int k);

enum class LeadingStatus { kOk, kDegenerate };

struct LeadingTerm {
  double coefficient = 0.0;  // K
  LeadingStatus status = LeadingStatus::kOk;
};

/// K = sqrt((2 pi)^d / |det|) sum_{|beta| = k, beta even} d^beta g(c)
///     prod_i |lambda_i|^(-beta_i/2) / beta_i!!
/// with det and the ascending eigenvalues taken from `eig`. K = 0 is flagged
/// as kDegenerate.
LeadingTerm leading_coefficient(const ProblemSpec& prob, std::span<const double> c,
                                const EigenDecomposition& eig);

enum class Variant { kLimit, kPerturbed };

// v = exp(log_scale) * mantissa.
struct ScaledValue {
  double log_scale = 0.0;
  double mantissa = 0.0;
};

/// Leading-order approximation of I_n. kLimit expands around h(c) with the
/// spectrum of D^2 h(c); kPerturbed around h_n(c_n) with the spectrum of
/// D^2 h_n(c_n) (g derivatives stay at c). n missing from the report is
/// tracked from c on demand.
ScaledValue approx_I(const ProblemSpec& prob, const CriticalReport& report, long n, Variant variant);

struct ExpansionRow {
  long n = 0;
  double log_scale = 0.0;
  double mantissa = 0.0;
};

struct ExpansionResult {
  LeadingTerm leading;
  double exponent = 0.0;  // d/2 + k/2
  double q = 0.0;
  Variant variant = Variant::kLimit;
  std::vector<ExpansionRow> rows;
};

ExpansionResult expand(const ProblemSpec& prob, const CriticalReport& report,
                       std::span<const long> n_list, Variant variant);

}  // namespace laplace
