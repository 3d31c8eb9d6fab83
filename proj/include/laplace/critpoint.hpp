#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laplace/fields.hpp"
#include "laplace/rates.hpp"
#include "laplace/symmat.hpp"

namespace laplace {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

using Box = std::vector<Interval>;

// Laplace-type integral data: integrate exp(n (h + eps_n sigma)) g over an
// axis-aligned box, with eps_n = s n^-p. s = 0 means sigma is absent and p is
// treated as +infinity.
struct ProblemSpec {
  std::string name;
  Box box;
  ScalarField h;
  ScalarField sigma;
  ScalarField g;
  double p = 2.0;
  double s = 0.0;
  int k = 0;

  int dim() const { return static_cast<int>(box.size()); }
  bool perturbed() const { return s > 0.0 && !sigma.is_zero(); }
  // p as used by the error exponent: +inf when unperturbed.
  double effective_p() const;
  double epsilon(long n) const;

  double phase(std::span<const double> x, long n) const;
  // h_n(x) - h_n(y)
  double phase_difference(std::span<const double> x, std::span<const double> y, long n) const;
  std::vector<double> phase_gradient(std::span<const double> x, long n) const;
  SymMatrix phase_hessian(std::span<const double> x, long n) const;

  bool contains(std::span<const double> x) const;
  double distance_to_boundary(std::span<const double> x) const;
  double min_half_width() const;

  // Throws kInvalidArgument / kDimensionMismatch on malformed data.
  void validate() const;
};

enum class CheckStatus { kPass, kWarn, kFail, kNotRequired };

const char* to_string(CheckStatus status);

struct AssumptionFlag {
  std::string tag;  // "A(ii)" ... "A(vi)", "B"
  CheckStatus status = CheckStatus::kPass;
  bool hard = true;
  std::string detail;
};

struct PerturbedRecord {
  long n = 0;
  double epsilon = 0.0;
  Point c_n;
  double value = 0.0;  // h_n(c_n)
  double grad_norm = 0.0;
  SymMatrix hessian;
  std::vector<double> eigenvalues;  // ascending
  double det = 0.0;
};

struct CriticalReport {
  Point c;
  double value = 0.0;  // h(c)
  double grad_norm = 0.0;
  SymMatrix hessian;
  std::vector<double> eigenvalues;  // ascending
  double det = 0.0;
  std::vector<PerturbedRecord> records;  // ascending n
  double delta = 0.0;
  double tail_gap = 0.0;     // min of h(c) - h(x) over the box minus B_delta(c)
  double eigen_floor = 0.0;  // min over records of sum_i lambda_{i,n}^2
  double min_abs_det_phase = 0.0;
  double max_abs_second = 0.0;
  double max_abs_third = 0.0;
  int grid_per_axis = 0;
  long grid_points = 0;
  std::vector<AssumptionFlag> flags;

  bool hard_ok() const;
  const PerturbedRecord* find(long n) const;
};

struct VerifyOptions {
  int grid_per_axis = 41;
  long max_grid_points = 1'000'000;
  // Boundary margin for the maximizer search, as a fraction of the smallest
  // box half-width.
  double margin_fraction = 0.01;
  // Tail-gap radius as a fraction of the smallest box half-width.
  double delta_fraction = 0.25;
  double newton_tol = 1e-12;
};

/// Grid multistart followed by damped Newton on the gradient. Throws
/// kBoundaryMaximum when the best grid point lies within margin of the
/// boundary and kNoConvergence after 50 Newton iterations.
Point find_max_interior(const ScalarField& f, const Box& box, int grid_per_axis, double margin,
                        double newton_tol = 1e-12);

/// Damped Newton on grad h_n starting from start. Throws kNoConvergence, or
/// kAssumptionViolated when the Hessian at the result is not negative definite.
Point track_c_n(const ProblemSpec& prob, long n, std::span<const double> start,
                double newton_tol = 1e-12);

CriticalReport verify_assumptions(const ProblemSpec& prob, std::span<const long> n_list,
                                  const VerifyOptions& options = {});

// Fitted drift or an "exact" marker when every residual is below the floor.
struct DriftFit {
  std::vector<double> values;
  bool exact = false;
  std::optional<RateFit> fit;
};

struct DriftRates {
  std::vector<long> n;
  DriftFit cn;
  DriftFit det;
  std::vector<DriftFit> eigen;  // ascending eigenvalue pairing
};

/// Drift of c_n, det D^2 h_n(c_n) and the sorted eigenvalues against their
/// unperturbed values, each fitted on log n. Requires s > 0 and at least four
/// distinct n spanning two decades.
DriftRates drift_rates(const ProblemSpec& prob, std::span<const long> n_list,
                       const VerifyOptions& options = {});
DriftRates drift_rates(const ProblemSpec& prob, const CriticalReport& report);

}  // namespace laplace
