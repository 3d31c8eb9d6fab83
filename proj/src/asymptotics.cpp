#include "laplace/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "laplace/error.hpp"

namespace laplace {

long long double_factorial(int m) {
  if (m < 0 || m % 2 != 0) {
    fail(ErrorCode::kInvalidArgument, "double factorial needs an even m >= 0, got " + std::to_string(m));
  }
  long long out = 1;
  for (int v = m; v > 1; v -= 2) out *= v;
  return out;
}

double half_integer_gamma(int m) {
  if (m < 0) fail(ErrorCode::kInvalidArgument, "half_integer_gamma needs m >= 0");
  // z = (m + 1) / 2, walk down by one to 1/2 or 1.
  double value = (m % 2 == 0) ? std::sqrt(std::numbers::pi) : 1.0;
  for (int twice_z = (m % 2 == 0) ? 1 : 2; twice_z < m + 1; twice_z += 2) {
    value *= 0.5 * twice_z;
  }
  return value;
}

double gaussian_moment_diag(std::span<const double> lambda, const MultiIndex& beta) {
  if (static_cast<int>(lambda.size()) != beta.dim()) {
    fail(ErrorCode::kDimensionMismatch, "eigenvalue count differs from multi-index dimension");
  }
  for (double l : lambda) {
    if (!(l < 0.0)) fail(ErrorCode::kInvalidArgument, "Gaussian moment needs negative eigenvalues");
  }
  if (!beta.is_even()) return 0.0;
  double out = 1.0;
  for (int i = 0; i < beta.dim(); ++i) {
    const double half_abs = 0.5 * std::abs(lambda[static_cast<size_t>(i)]);
    out *= std::pow(half_abs, -0.5 * (beta[i] + 1)) * half_integer_gamma(beta[i]);
  }
  return out;
}

namespace {

// Sum over perfect pairings of labels[0..size) of prod sigma(a, b).
double pairing_sum(std::vector<int>& labels, size_t size, const SymMatrix& sigma) {
  if (size == 0) return 1.0;
  const int first = labels[0];
  double total = 0.0;
  for (size_t j = 1; j < size; ++j) {
    const double w = sigma(first, labels[j]);
    // Remove labels 0 and j, recurse, restore.
    std::vector<int> rest;
    rest.reserve(size - 2);
    for (size_t t = 1; t < size; ++t) {
      if (t != j) rest.push_back(labels[t]);
    }
    if (w != 0.0) total += w * pairing_sum(rest, rest.size(), sigma);
  }
  return total;
}

}  // namespace

double gaussian_moment_wick(const SymMatrix& a, const MultiIndex& beta) {
  const int d = a.dim();
  if (beta.dim() != d) fail(ErrorCode::kDimensionMismatch, "matrix and multi-index dimensions differ");
  if (beta.order() > 10) fail(ErrorCode::kInvalidArgument, "Wick oracle supports |beta| <= 10");
  const SymMatrix neg = a * -1.0;
  const EigenDecomposition eig = jacobi_eigen(neg);
  if (!(eig.eigenvalues.front() > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "Wick oracle needs a negative-definite matrix");
  }
  if (beta.order() % 2 != 0) return 0.0;
  double det = 1.0;
  for (double v : eig.eigenvalues) det *= v;
  const SymMatrix sigma = inverse(neg);
  std::vector<int> labels;
  for (int i = 0; i < d; ++i) labels.insert(labels.end(), static_cast<size_t>(beta[i]), i);
  const double pairings = pairing_sum(labels, labels.size(), sigma);
  return std::pow(2.0 * std::numbers::pi, 0.5 * d) / std::sqrt(det) * pairings;
}

double exponent_q(double p, int d, int k) {
  if (std::isnan(p) || !(p > 1.0)) {
    fail(ErrorCode::kInvalidArgument, "error exponent needs p > 1, got " + std::to_string(p));
  }
  if (d < 1) fail(ErrorCode::kInvalidArgument, "dimension must be at least 1");
  if (k < 0 || k % 2 != 0) fail(ErrorCode::kInvalidArgument, "k must be an even integer >= 0");
  const double base = 0.5 * d + 0.5 * k;
  return p < 1.5 ? base + (p - 1.0) : base + 0.5;
}

LeadingTerm leading_coefficient(const ProblemSpec& prob, std::span<const double> c,
                                const EigenDecomposition& eig) {
  const int d = prob.dim();
  if (eig.dim() != d) fail(ErrorCode::kDimensionMismatch, "eigenvalue count differs from dimension");
  double det = 1.0;
  for (double v : eig.eigenvalues) det *= v;
  if (det == 0.0) fail(ErrorCode::kDegenerate, "Hessian determinant is zero");
  for (double v : eig.eigenvalues) {
    if (!(v < 0.0)) fail(ErrorCode::kAssumptionViolated, "Hessian is not negative definite");
  }
  double sum = 0.0;
  for (const auto& beta : enumerate_multi_indices(d, prob.k, true)) {
    const double dg = prob.g.partial(beta, c);
    if (dg == 0.0) continue;
    double prod = 1.0;
    for (int i = 0; i < d; ++i) {
      prod *= std::pow(std::abs(eig.eigenvalues[static_cast<size_t>(i)]), -0.5 * beta[i]) /
              static_cast<double>(double_factorial(beta[i]));
    }
    sum += dg * prod;
  }
  LeadingTerm out;
  out.coefficient = std::sqrt(std::pow(2.0 * std::numbers::pi, d) / std::abs(det)) * sum;
  out.status = out.coefficient == 0.0 ? LeadingStatus::kDegenerate : LeadingStatus::kOk;
  return out;
}

namespace {

EigenDecomposition spectrum_of(const std::vector<double>& ascending) {
  EigenDecomposition e;
  e.eigenvalues = ascending;
  return e;
}

}  // namespace

ScaledValue approx_I(const ProblemSpec& prob, const CriticalReport& report, long n, Variant variant) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "n must be at least 1");
  if (report.c.empty() || report.eigenvalues.empty()) {
    fail(ErrorCode::kAssumptionViolated, "critical report has no interior maximizer");
  }
  const double power = std::pow(static_cast<double>(n), -0.5 * (prob.dim() + prob.k));
  ScaledValue out;
  if (variant == Variant::kLimit) {
    const LeadingTerm lt = leading_coefficient(prob, report.c, spectrum_of(report.eigenvalues));
    out.log_scale = static_cast<double>(n) * report.value;
    out.mantissa = power * lt.coefficient;
    return out;
  }
  PerturbedRecord local;
  const PerturbedRecord* rec = report.find(n);
  if (rec == nullptr) {
    const Point c_n = track_c_n(prob, n, report.c);
    local.c_n = c_n;
    local.value = prob.phase(c_n, n);
    local.eigenvalues = jacobi_eigen(prob.phase_hessian(c_n, n)).eigenvalues;
    rec = &local;
  }
  const LeadingTerm lt = leading_coefficient(prob, report.c, spectrum_of(rec->eigenvalues));
  out.log_scale = static_cast<double>(n) * rec->value;
  out.mantissa = power * lt.coefficient;
  return out;
}

ExpansionResult expand(const ProblemSpec& prob, const CriticalReport& report,
                       std::span<const long> n_list, Variant variant) {
  ExpansionResult out;
  out.variant = variant;
  out.leading = leading_coefficient(prob, report.c, spectrum_of(report.eigenvalues));
  out.exponent = 0.5 * (prob.dim() + prob.k);
  out.q = exponent_q(prob.effective_p(), prob.dim(), prob.k);
  for (long n : n_list) {
    const ScaledValue v = approx_I(prob, report, n, variant);
    out.rows.push_back(ExpansionRow{n, v.log_scale, v.mantissa});
  }
  return out;
}

}  // namespace laplace
