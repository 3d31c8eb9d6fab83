#include "laplace/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "laplace/error.hpp"

namespace laplace {

namespace {

ScalarField poly(int dim, std::vector<std::pair<double, std::vector<int>>> terms) {
  std::vector<PolyTerm> out;
  for (auto& [coeff, exps] : terms) out.push_back(PolyTerm{MultiIndex(std::move(exps)), coeff});
  return ScalarField::polynomial(dim, std::move(out));
}

ProblemSpec make(std::string name, Box box, ScalarField h, ScalarField sigma, ScalarField g, double p,
                 double s, int k) {
  ProblemSpec prob;
  prob.name = std::move(name);
  prob.box = std::move(box);
  prob.h = std::move(h);
  prob.sigma = std::move(sigma);
  prob.g = std::move(g);
  prob.p = p;
  prob.s = s;
  prob.k = k;
  prob.validate();
  return prob;
}

void check_experiment_n_list(std::span<const long> n_list) {
  if (n_list.size() < 6) fail(ErrorCode::kInvalidArgument, "theorem experiment needs at least 6 values of n");
  if (static_cast<double>(n_list.back()) < 100.0 * static_cast<double>(n_list.front())) {
    fail(ErrorCode::kInvalidArgument, "theorem experiment needs n spanning at least two decades");
  }
}

void require_hard_ok(const CriticalReport& report) {
  if (report.hard_ok()) return;
  std::string msg = "assumption check failed:";
  for (const auto& f : report.flags) {
    if (f.hard && f.status == CheckStatus::kFail) msg += " [" + f.tag + "] " + f.detail;
  }
  fail(ErrorCode::kAssumptionViolated, msg);
}

int burn_in_count(std::span<const long> n_list) {
  return static_cast<int>(std::count_if(n_list.begin(), n_list.end(), [](long n) { return n < kBurnInBelow; }));
}

std::optional<Verdict> classify_drift(const DriftFit& fit, double p) {
  if (fit.exact) return std::nullopt;
  return classify_slope(fit.fit->slope, p);
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kSaturated: return "saturated";
    case Verdict::kBoundRespected: return "bound-respected";
    case Verdict::kViolated: return "violated";
    case Verdict::kExact: return "exact";
  }
  return "?";
}

Verdict classify_slope(double slope, double predicted) {
  // Slack so that a slope exactly on a band edge is not decided by rounding.
  const double tol = kVerdictTolerance + 1e-12;
  if (std::abs(slope + predicted) <= tol) return Verdict::kSaturated;
  if (slope <= -predicted + tol) return Verdict::kBoundRespected;
  return Verdict::kViolated;
}

TheoremExperiment run_theorem_experiment(const ProblemSpec& prob, std::span<const long> n_list,
                                         const QuadratureConfig& cfg, const VerifyOptions& options) {
  prob.validate();
  check_experiment_n_list(n_list);
  TheoremExperiment ex;
  ex.prob = prob;
  ex.n_list.assign(n_list.begin(), n_list.end());
  ex.report = verify_assumptions(prob, n_list, options);
  require_hard_ok(ex.report);

  const int d = prob.dim();
  EigenDecomposition spectrum;
  spectrum.eigenvalues = ex.report.eigenvalues;
  ex.leading = leading_coefficient(prob, ex.report.c, spectrum);
  ex.predicted_q = exponent_q(prob.effective_p(), d, prob.k);

  std::vector<std::pair<long, double>> points;
  for (long n : n_list) {
    const PerturbedRecord* rec = ex.report.find(n);
    const ReferenceValue ref = reference_integral(prob, n, rec->c_n, cfg);
    if (!ref.converged) {
      fail(ErrorCode::kNoConvergence,
           "oracle did not converge at n = " + std::to_string(n) + " (est. error " +
               std::to_string(ref.est_error) + ")");
    }
    const double nd = static_cast<double>(n);
    // n (h_n(c_n) - h(c)), so that every column lives on the exp(n h(c)) scale.
    const double sigma_term = rec->epsilon == 0.0 ? 0.0 : rec->epsilon * prob.sigma(rec->c_n);
    const double shift = nd * (prob.h.difference(rec->c_n, ex.report.c) + sigma_term);
    const double factor = std::exp(shift);
    TheoremRow row;
    row.n = n;
    row.log_scale = nd * ex.report.value;
    row.oracle_mantissa = ref.mantissa * factor;
    row.oracle_error = ref.est_error * factor;
    row.approx_mantissa = approx_I(prob, ex.report, n, Variant::kLimit).mantissa;
    row.perturbed_mantissa = approx_I(prob, ex.report, n, Variant::kPerturbed).mantissa * factor;
    row.residual = std::abs(row.oracle_mantissa - row.approx_mantissa);
    ex.rows.push_back(row);
    points.emplace_back(n, row.residual);
  }

  ex.fit = fit_rate_or_exact(points, burn_in_count(n_list), kResidualFloor);
  ex.verdict = ex.fit ? classify_slope(ex.fit->slope, ex.predicted_q) : Verdict::kExact;
  return ex;
}

LemmaSuite run_lemma_suite(const ProblemSpec& prob, std::span<const long> n_list,
                           const VerifyOptions& options) {
  prob.validate();
  LemmaSuite out;
  out.report = verify_assumptions(prob, n_list, options);
  require_hard_ok(out.report);
  out.drift = drift_rates(prob, out.report);
  out.cn = classify_drift(out.drift.cn, prob.p);
  out.det = classify_drift(out.drift.det, prob.p);
  for (const auto& e : out.drift.eigen) out.eigen.push_back(classify_drift(e, prob.p));
  return out;
}

std::vector<long> make_n_list(long n_min, long n_max, int points, bool geometric) {
  if (n_min < 1 || n_max < n_min) fail(ErrorCode::kInvalidArgument, "need 1 <= n_min <= n_max");
  if (points < 1) fail(ErrorCode::kInvalidArgument, "need at least one point");
  std::vector<long> out;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    const double v = geometric ? static_cast<double>(n_min) * std::pow(static_cast<double>(n_max) / n_min, t)
                               : static_cast<double>(n_min) + t * static_cast<double>(n_max - n_min);
    out.push_back(std::clamp(std::lround(v), n_min, n_max));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<long> default_n_list() {
  std::vector<long> out;
  for (int e = 6; e <= 16; ++e) out.push_back(1L << e);
  return out;
}

std::vector<ProblemSpec> builtin_problems() {
  const double inf = std::numeric_limits<double>::infinity();
  const Box unit1{{-1.0, 1.0}};
  const Box unit2{{-1.0, 1.0}, {-1.0, 1.0}};
  const auto half_square = poly(1, {{-0.5, {2}}});
  std::vector<ProblemSpec> out;
  out.push_back(make("classical", unit1, poly(1, {{-1.0, {2}}}), ScalarField::zero(1),
                     ScalarField::constant(1, 1.0), inf, 0.0, 0));
  out.push_back(make("degenerate_k2", unit1, half_square, ScalarField::zero(1), poly(1, {{1.0, {2}}}), inf,
                     0.0, 2));
  out.push_back(make("degenerate_k4", unit1, half_square, poly(1, {{1.0, {1}}}), poly(1, {{1.0, {4}}}), 1.5,
                     1.0, 4));
  out.push_back(make("d2_diagonal", unit2, poly(2, {{-0.5, {2, 0}}, {-1.0, {0, 2}}}), ScalarField::zero(2),
                     ScalarField::constant(2, 1.0), inf, 0.0, 0));
  out.push_back(make("d2_isotropic", unit2, poly(2, {{-0.5, {2, 0}}, {-0.5, {0, 2}}}),
                     poly(2, {{1.0, {0, 0}}, {1.0, {1, 0}}, {1.0, {0, 1}}}), ScalarField::constant(2, 1.0),
                     1.1, 1.0, 0));
  out.push_back(make("cubic_p15", unit1, poly(1, {{-0.5, {2}}, {0.1, {3}}}), poly(1, {{1.0, {0}}, {1.0, {1}}}),
                     poly(1, {{1.0, {0}}, {1.0, {1}}}), 1.5, 1.0, 0));
  out.push_back(make("perturbed_p2", unit1, half_square, ScalarField::constant(1, 1.0),
                     ScalarField::constant(1, 1.0), 2.0, 1.0, 0));
  out.push_back(make("perturbed_p125", unit1, half_square, ScalarField::constant(1, 1.0),
                     ScalarField::constant(1, 1.0), 1.25, 1.0, 0));
  return out;
}

ProblemSpec builtin_problem(const std::string& name) {
  for (auto& prob : builtin_problems()) {
    if (prob.name == name) return prob;
  }
  fail(ErrorCode::kInvalidArgument, "unknown built-in problem '" + name + "'");
}

std::vector<SuiteEntry> run_builtin_suite(const QuadratureConfig& cfg) {
  const std::vector<long> n_list = default_n_list();
  std::vector<SuiteEntry> out;
  for (const auto& prob : builtin_problems()) {
    SuiteEntry entry;
    entry.name = prob.name;
    std::ostringstream detail;
    try {
      entry.theorem = run_theorem_experiment(prob, n_list, cfg);
      const auto& ex = *entry.theorem;
      bool ok = ex.verdict != Verdict::kViolated;
      detail << "q = " << ex.predicted_q;
      if (ex.fit) detail << ", slope = " << ex.fit->slope << ", r2 = " << ex.fit->r_squared;
      detail << ", verdict " << to_string(ex.verdict);
      if (prob.perturbed()) {
        entry.lemmas = run_lemma_suite(prob, n_list);
        auto bad = [](const std::optional<Verdict>& v) { return v && *v == Verdict::kViolated; };
        const auto& lm = *entry.lemmas;
        const bool lemmas_ok = !bad(lm.cn) && !bad(lm.det) && std::none_of(lm.eigen.begin(), lm.eigen.end(), bad);
        detail << "; lemma drifts " << (lemmas_ok ? "within" : "VIOLATE") << " n^-p";
        ok = ok && lemmas_ok;
      }
      entry.passed = ok;
    } catch (const Error& e) {
      entry.passed = false;
      detail << "error: " << e.what();
    }
    entry.detail = detail.str();
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace laplace
