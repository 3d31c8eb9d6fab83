#include "laplace/laplace_asym.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "laplace/asymptotics.hpp"
#include "laplace/error.hpp"
#include "laplace/harness.hpp"
#include "laplace/oracle.hpp"
#include "laplace/problem_io.hpp"
#include "laplace/report_json.hpp"

struct lasym_problem {
  laplace::ProblemSpec spec;
};

struct lasym_report {
  laplace::CriticalReport report;
};

namespace {

thread_local std::string g_last_error;

lasym_status to_status(laplace::ErrorCode code) {
  using laplace::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return LASYM_ERR_INVALID_ARGUMENT;
    case ErrorCode::kParse: return LASYM_ERR_PARSE;
    case ErrorCode::kDimensionMismatch: return LASYM_ERR_DIMENSION;
    case ErrorCode::kDerivativeOrder: return LASYM_ERR_DERIVATIVE_ORDER;
    case ErrorCode::kBoundaryMaximum: return LASYM_ERR_BOUNDARY_MAXIMUM;
    case ErrorCode::kNoConvergence: return LASYM_ERR_NO_CONVERGENCE;
    case ErrorCode::kAssumptionViolated: return LASYM_ERR_ASSUMPTION;
    case ErrorCode::kDegenerate: return LASYM_ERR_DEGENERATE;
    case ErrorCode::kInsufficientData: return LASYM_ERR_INSUFFICIENT_DATA;
  }
  return LASYM_ERR_INTERNAL;
}

template <class Fn>
lasym_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LASYM_OK;
  } catch (const laplace::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return LASYM_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) laplace::fail(laplace::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

laplace::QuadratureConfig to_config(const lasym_quadrature_config* cfg) {
  laplace::QuadratureConfig out;
  if (cfg != nullptr) {
    out.base_order = cfg->base_order;
    out.refinement_levels = cfg->refinement_levels;
    out.rel_tol = cfg->rel_tol;
    out.max_total_nodes = cfg->max_total_nodes;
  }
  return out;
}

std::span<const long> as_span(const long* n, size_t count) {
  require(n != nullptr || count == 0, "n list pointer is null");
  return {n, count};
}

}  // namespace

extern "C" {

const char* lasym_version(void) { return "1.0.0"; }

const char* lasym_last_error(void) { return g_last_error.c_str(); }

const char* lasym_status_name(lasym_status status) {
  switch (status) {
    case LASYM_OK: return "ok";
    case LASYM_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case LASYM_ERR_PARSE: return "parse-error";
    case LASYM_ERR_DIMENSION: return "dimension-mismatch";
    case LASYM_ERR_DERIVATIVE_ORDER: return "derivative-order";
    case LASYM_ERR_BOUNDARY_MAXIMUM: return "boundary-maximum";
    case LASYM_ERR_NO_CONVERGENCE: return "no-convergence";
    case LASYM_ERR_ASSUMPTION: return "assumption-violated";
    case LASYM_ERR_DEGENERATE: return "degenerate";
    case LASYM_ERR_INSUFFICIENT_DATA: return "insufficient-data";
    case LASYM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void lasym_string_free(char* s) { std::free(s); }

void lasym_quadrature_defaults(lasym_quadrature_config* cfg) {
  if (cfg == nullptr) return;
  const laplace::QuadratureConfig d;
  cfg->base_order = d.base_order;
  cfg->refinement_levels = d.refinement_levels;
  cfg->rel_tol = d.rel_tol;
  cfg->max_total_nodes = d.max_total_nodes;
}

lasym_status lasym_problem_from_file(const char* path, lasym_problem** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new lasym_problem{laplace::load_problem(path)};
  });
}

lasym_status lasym_problem_from_text(const char* text, lasym_problem** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new lasym_problem{laplace::parse_problem(text)};
  });
}

lasym_status lasym_problem_builtin(const char* name, lasym_problem** out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    *out = new lasym_problem{laplace::builtin_problem(name)};
  });
}

size_t lasym_builtin_count(void) {
  static const size_t count = laplace::builtin_problems().size();
  return count;
}

const char* lasym_builtin_name(size_t index) {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : laplace::builtin_problems()) out.push_back(p.name);
    return out;
  }();
  return index < names.size() ? names[index].c_str() : nullptr;
}

void lasym_problem_free(lasym_problem* problem) { delete problem; }

int lasym_problem_dim(const lasym_problem* problem) { return problem ? problem->spec.dim() : 0; }

int lasym_problem_perturbed(const lasym_problem* problem) {
  return problem && problem->spec.perturbed() ? 1 : 0;
}

lasym_status lasym_problem_format(const lasym_problem* problem, char** text) {
  return guarded([&] {
    require(problem != nullptr && text != nullptr, "null argument");
    *text = dup_string(laplace::format_problem(problem->spec));
  });
}

lasym_status lasym_verify(const lasym_problem* problem, const long* n, size_t count, lasym_report** out) {
  return guarded([&] {
    require(problem != nullptr && out != nullptr, "null argument");
    *out = new lasym_report{laplace::verify_assumptions(problem->spec, as_span(n, count))};
  });
}

int lasym_report_hard_ok(const lasym_report* report) { return report && report->report.hard_ok() ? 1 : 0; }

lasym_status lasym_report_maximizer(const lasym_report* report, double* c, size_t capacity) {
  return guarded([&] {
    require(report != nullptr && c != nullptr, "null argument");
    const auto& pt = report->report.c;
    if (pt.empty()) laplace::fail(laplace::ErrorCode::kAssumptionViolated, "report has no interior maximizer");
    require(capacity >= pt.size(), "buffer too small");
    std::copy(pt.begin(), pt.end(), c);
  });
}

lasym_status lasym_report_json(const lasym_report* report, char** json) {
  return guarded([&] {
    require(report != nullptr && json != nullptr, "null argument");
    *json = dup_string(laplace::to_json(report->report).dump(2));
  });
}

void lasym_report_free(lasym_report* report) { delete report; }

lasym_status lasym_approx(const lasym_problem* problem, const lasym_report* report, long n,
                          lasym_variant variant, double* log_scale, double* mantissa) {
  return guarded([&] {
    require(problem != nullptr, "null problem");
    require(report != nullptr, "missing critical report");
    require(log_scale != nullptr && mantissa != nullptr, "null output");
    require(variant == LASYM_VARIANT_LIMIT || variant == LASYM_VARIANT_PERTURBED, "unknown variant");
    const auto v = laplace::approx_I(problem->spec, report->report, n,
                                     variant == LASYM_VARIANT_LIMIT ? laplace::Variant::kLimit
                                                                    : laplace::Variant::kPerturbed);
    *log_scale = v.log_scale;
    *mantissa = v.mantissa;
  });
}

lasym_status lasym_oracle(const lasym_problem* problem, const lasym_report* report, long n,
                          const lasym_quadrature_config* cfg, double* log_scale, double* mantissa,
                          double* est_error, int* converged) {
  return guarded([&] {
    require(problem != nullptr, "null problem");
    require(report != nullptr, "missing critical report");
    require(log_scale && mantissa && est_error && converged, "null output");
    const auto& rep = report->report;
    if (rep.c.empty()) laplace::fail(laplace::ErrorCode::kAssumptionViolated, "report has no interior maximizer");
    const laplace::PerturbedRecord* rec = rep.find(n);
    const laplace::Point center = rec ? rec->c_n : laplace::track_c_n(problem->spec, n, rep.c);
    const auto v = laplace::reference_integral(problem->spec, n, center, to_config(cfg));
    *log_scale = v.log_scale;
    *mantissa = v.mantissa;
    *est_error = v.est_error;
    *converged = v.converged ? 1 : 0;
  });
}

lasym_status lasym_rates_json(const lasym_problem* problem, const long* n, size_t count,
                              const lasym_quadrature_config* cfg, char** json) {
  return guarded([&] {
    require(problem != nullptr && json != nullptr, "null argument");
    const auto ex = laplace::run_theorem_experiment(problem->spec, as_span(n, count), to_config(cfg));
    *json = dup_string(laplace::to_json(ex).dump(2));
  });
}

lasym_status lasym_lemmas_json(const lasym_problem* problem, const long* n, size_t count, char** json) {
  return guarded([&] {
    require(problem != nullptr && json != nullptr, "null argument");
    const auto suite = laplace::run_lemma_suite(problem->spec, as_span(n, count));
    auto doc = laplace::to_json(suite);
    doc["p"] = problem->spec.p;
    *json = dup_string(doc.dump(2));
  });
}

lasym_status lasym_suite_json(const lasym_quadrature_config* cfg, char** json, int* all_passed) {
  return guarded([&] {
    require(json != nullptr, "null argument");
    const auto suite = laplace::run_builtin_suite(to_config(cfg));
    const auto doc = laplace::to_json(suite);
    if (all_passed != nullptr) *all_passed = doc["all_passed"].get<bool>() ? 1 : 0;
    *json = dup_string(doc.dump(2));
  });
}

lasym_status lasym_moment_diag(int dim, const double* eigenvalues, const int* beta, double* out) {
  return guarded([&] {
    require(dim >= 1 && eigenvalues && beta && out, "invalid argument");
    const auto d = static_cast<size_t>(dim);
    *out = laplace::gaussian_moment_diag(std::span(eigenvalues, d),
                                         laplace::MultiIndex(std::vector<int>(beta, beta + d)));
  });
}

lasym_status lasym_moment_wick(int dim, const double* matrix, const int* beta, double* out) {
  return guarded([&] {
    require(dim >= 1 && matrix && beta && out, "invalid argument");
    const auto d = static_cast<size_t>(dim);
    const laplace::SymMatrix a(dim, std::vector<double>(matrix, matrix + d * d));
    *out = laplace::gaussian_moment_wick(a, laplace::MultiIndex(std::vector<int>(beta, beta + d)));
  });
}

lasym_status lasym_symmetric_eigenvalues(int dim, const double* matrix, double* ascending) {
  return guarded([&] {
    require(dim >= 1 && matrix && ascending, "invalid argument");
    const auto d = static_cast<size_t>(dim);
    const auto eig = laplace::jacobi_eigen(laplace::SymMatrix(dim, std::vector<double>(matrix, matrix + d * d)));
    std::copy(eig.eigenvalues.begin(), eig.eigenvalues.end(), ascending);
  });
}

lasym_status lasym_exponent_q(double p, int dim, int k, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = laplace::exponent_q(p, dim, k);
  });
}

lasym_status lasym_make_n_list(long n_min, long n_max, int points, int geometric, long* out,
                               size_t capacity, size_t* count) {
  return guarded([&] {
    require(count != nullptr, "null count");
    const auto list = laplace::make_n_list(n_min, n_max, points, geometric != 0);
    *count = list.size();
    require(out == nullptr || capacity >= list.size(), "buffer too small");
    if (out != nullptr) std::copy(list.begin(), list.end(), out);
  });
}

}  // extern "C"
