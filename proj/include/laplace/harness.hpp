#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laplace/asymptotics.hpp"
#include "laplace/critpoint.hpp"
#include "laplace/oracle.hpp"
#include "laplace/rates.hpp"

namespace laplace {

enum class Verdict { kSaturated, kBoundRespected, kViolated, kExact };

const char* to_string(Verdict v);

inline constexpr double kVerdictTolerance = 0.15;
inline constexpr long kBurnInBelow = 64;  // n < 2^6 is excluded from fits

/// saturated if |slope + predicted| <= 0.15, bound-respected if
/// slope <= -predicted + 0.15, violated otherwise.
Verdict classify_slope(double slope, double predicted);

struct TheoremRow {
  long n = 0;
  double oracle_mantissa = 0.0;     // rescaled to exp(n h(c))
  double oracle_error = 0.0;        // quadrature estimate, same scale
  double approx_mantissa = 0.0;     // n^(-d/2-k/2) K
  double perturbed_mantissa = 0.0;  // perturbed variant, same scale
  double residual = 0.0;
  double log_scale = 0.0;           // n h(c)
};

struct TheoremExperiment {
  ProblemSpec prob;
  std::vector<long> n_list;
  CriticalReport report;
  LeadingTerm leading;
  std::vector<TheoremRow> rows;
  double predicted_q = 0.0;
  std::optional<RateFit> fit;  // absent when exact
  Verdict verdict = Verdict::kExact;
};

/// Compares the quadrature oracle against the limit expansion on the common
/// scale exp(n h(c)) and fits the residual rate. Requires passing hard
/// assumption flags and an n list with at least 6 points over two decades.
TheoremExperiment run_theorem_experiment(const ProblemSpec& prob, std::span<const long> n_list,
                                         const QuadratureConfig& cfg = {},
                                         const VerifyOptions& options = {});

struct LemmaSuite {
  DriftRates drift;
  std::optional<Verdict> cn;  // absent when exact
  std::optional<Verdict> det;
  std::vector<std::optional<Verdict>> eigen;
  CriticalReport report;
};

/// Drift rates of c_n, det and eigenvalues, each classified against -p.
LemmaSuite run_lemma_suite(const ProblemSpec& prob, std::span<const long> n_list,
                           const VerifyOptions& options = {});

/// Integer n values in [n_min, n_max]: geometric or linear spacing, duplicates
/// removed.
std::vector<long> make_n_list(long n_min, long n_max, int points, bool geometric);

// 2^6, 2^7, ..., 2^16
std::vector<long> default_n_list();

/// The built-in problem suite.
std::vector<ProblemSpec> builtin_problems();
ProblemSpec builtin_problem(const std::string& name);

struct SuiteEntry {
  std::string name;
  bool passed = false;
  std::string detail;
  std::optional<TheoremExperiment> theorem;
  std::optional<LemmaSuite> lemmas;
};

std::vector<SuiteEntry> run_builtin_suite(const QuadratureConfig& cfg = {});

}  // namespace laplace
