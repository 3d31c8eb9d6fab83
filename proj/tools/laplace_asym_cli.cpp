// laplace-asym: command-line front end over the C API.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "laplace/laplace_asym.h"

using nlohmann::json;

namespace {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitError = 2 };

struct ApiError : std::runtime_error {
  lasym_status status;
  ApiError(lasym_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(lasym_status s) {
  if (s != LASYM_OK) throw ApiError(s, std::string(lasym_status_name(s)) + ": " + lasym_last_error());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  lasym_string_free(s);
  return out;
}

// RAII owners for the opaque handles.
struct Problem {
  lasym_problem* p = nullptr;
  explicit Problem(const std::string& path) { check(lasym_problem_from_file(path.c_str(), &p)); }
  ~Problem() { lasym_problem_free(p); }
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;
};

struct Report {
  lasym_report* r = nullptr;
  Report(const Problem& prob, const std::vector<long>& n) { check(lasym_verify(prob.p, n.data(), n.size(), &r)); }
  ~Report() { lasym_report_free(r); }
  Report(const Report&) = delete;
  Report& operator=(const Report&) = delete;
};

std::vector<long> n_list(long n_min, long n_max, int points, bool geometric) {
  size_t count = 0;
  lasym_make_n_list(n_min, n_max, points, geometric ? 1 : 0, nullptr, 0, &count);
  std::vector<long> out(count);
  check(lasym_make_n_list(n_min, n_max, points, geometric ? 1 : 0, out.data(), out.size(), &count));
  return out;
}

std::string num(const json& v) {
  if (v.is_null()) return "nan";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
  return buf;
}

std::string num(double v) { return num(std::isfinite(v) ? json(v) : json(nullptr)); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> read_matrix(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file " + path);
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw std::runtime_error("matrix file contains a non-number");
  if (out.size() != static_cast<size_t>(dim) * static_cast<size_t>(dim)) {
    throw std::runtime_error("matrix file must hold " + std::to_string(dim * dim) + " numbers");
  }
  return out;
}

int cmd_verify(const std::string& path, const std::vector<long>& n, bool as_json) {
  Problem prob(path);
  Report rep(prob, n);
  const json doc = json::parse(take([&] {
    char* s = nullptr;
    check(lasym_report_json(rep.r, &s));
    return s;
  }()));
  if (as_json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "tag,status,hard,detail\n";
    for (const auto& f : doc["flags"]) {
      std::cout << f["tag"].get<std::string>() << "," << f["status"].get<std::string>() << ","
                << (f["hard"].get<bool>() ? "hard" : "soft") << ",\"" << f["detail"].get<std::string>() << "\"\n";
    }
    if (!doc["c"].empty()) {
      std::cout << "# c =";
      for (const auto& v : doc["c"]) std::cout << " " << num(v);
      std::cout << ", h(c) = " << num(doc["h_c"]) << ", tail_gap = " << num(doc["tail_gap"]) << "\n";
    }
    std::cout << "# hard_ok = " << (doc["hard_ok"].get<bool>() ? "true" : "false") << "\n";
  }
  return doc["hard_ok"].get<bool>() ? kExitOk : kExitFailure;
}

int cmd_approx(const std::string& path, long n, const std::string& variant, bool as_json) {
  Problem prob(path);
  Report rep(prob, {n});
  if (!lasym_report_hard_ok(rep.r)) {
    std::cerr << "hard assumption check failed; run 'verify' for details\n";
    return kExitFailure;
  }
  double log_scale = 0.0;
  double mantissa = 0.0;
  check(lasym_approx(prob.p, rep.r, n, variant == "perturbed" ? LASYM_VARIANT_PERTURBED : LASYM_VARIANT_LIMIT,
                     &log_scale, &mantissa));
  if (as_json) {
    std::cout << json{{"n", n}, {"variant", variant}, {"log_scale", log_scale}, {"mantissa", mantissa}}.dump(2)
              << "\n";
  } else {
    std::cout << "n,variant,log_scale,mantissa\n" << n << "," << variant << "," << num(log_scale) << ","
              << num(mantissa) << "\n";
  }
  return kExitOk;
}

int cmd_oracle(const std::string& path, long n, double rel_tol, bool as_json) {
  Problem prob(path);
  Report rep(prob, {n});
  if (!lasym_report_hard_ok(rep.r)) {
    std::cerr << "hard assumption check failed; run 'verify' for details\n";
    return kExitFailure;
  }
  lasym_quadrature_config cfg;
  lasym_quadrature_defaults(&cfg);
  cfg.rel_tol = rel_tol;
  double log_scale = 0.0;
  double mantissa = 0.0;
  double err = 0.0;
  int converged = 0;
  check(lasym_oracle(prob.p, rep.r, n, &cfg, &log_scale, &mantissa, &err, &converged));
  if (as_json) {
    std::cout << json{{"n", n},
                      {"log_scale", log_scale},
                      {"mantissa", mantissa},
                      {"est_error", err},
                      {"converged", converged != 0}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "n,log_scale,mantissa,est_error,converged\n"
              << n << "," << num(log_scale) << "," << num(mantissa) << "," << num(err) << ","
              << (converged ? "true" : "false") << "\n";
  }
  return converged ? kExitOk : kExitFailure;
}

int cmd_rates(const std::string& path, const std::vector<long>& n, bool as_json) {
  Problem prob(path);
  char* s = nullptr;
  check(lasym_rates_json(prob.p, n.data(), n.size(), nullptr, &s));
  const json doc = json::parse(take(s));
  const std::string verdict = doc["verdict"].get<std::string>();
  if (as_json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "n,oracle_mantissa,approx_mantissa,residual,log_scale\n";
    for (const auto& r : doc["rows"]) {
      std::cout << num(r["n"]) << "," << num(r["oracle_mantissa"]) << "," << num(r["approx_mantissa"]) << ","
                << num(r["residual"]) << "," << num(r["log_scale"]) << "\n";
    }
    const json& fit = doc["fit"];
    std::cout << "# slope = " << (fit.is_null() ? "exact" : num(fit["slope"]))
              << ", r_squared = " << (fit.is_null() ? "nan" : num(fit["r_squared"]))
              << ", predicted_q = " << num(doc["predicted_q"]) << ", verdict = " << verdict << "\n";
  }
  return verdict == "violated" ? kExitFailure : kExitOk;
}

int cmd_lemmas(const std::string& path, const std::vector<long>& n, bool as_json) {
  Problem prob(path);
  char* s = nullptr;
  check(lasym_lemmas_json(prob.p, n.data(), n.size(), &s));
  const json doc = json::parse(take(s));
  const json& drift = doc["drift"];
  bool violated = doc["cn_verdict"] == "violated" || doc["det_verdict"] == "violated";
  for (const auto& v : doc["eigen_verdicts"]) violated = violated || v == "violated";
  if (as_json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "n,cn_drift,det_drift";
    for (size_t i = 0; i < drift["eigen"].size(); ++i) std::cout << ",eigen" << i + 1 << "_drift";
    std::cout << "\n";
    for (size_t row = 0; row < drift["n"].size(); ++row) {
      std::cout << num(drift["n"][row]) << "," << num(drift["cn"]["values"][row]) << ","
                << num(drift["det"]["values"][row]);
      for (const auto& e : drift["eigen"]) std::cout << "," << num(e["values"][row]);
      std::cout << "\n";
    }
    auto slope = [](const json& d) { return d["fit"].is_null() ? std::string("exact") : num(d["fit"]["slope"]); };
    std::cout << "# predicted = -" << num(doc["p"]) << ", cn slope = " << slope(drift["cn"]) << " ("
              << doc["cn_verdict"].get<std::string>() << "), det slope = " << slope(drift["det"]) << " ("
              << doc["det_verdict"].get<std::string>() << ")";
    for (size_t i = 0; i < drift["eigen"].size(); ++i) {
      std::cout << ", eigen" << i + 1 << " slope = " << slope(drift["eigen"][i]) << " ("
                << doc["eigen_verdicts"][i].get<std::string>() << ")";
    }
    std::cout << "\n";
  }
  return violated ? kExitFailure : kExitOk;
}

int cmd_moments(int dim, const std::string& beta_text, const std::string& eigs_text, const std::string& matrix_path,
                bool as_json) {
  std::vector<int> beta;
  for (double b : parse_list(beta_text)) {
    if (b < 0 || b != std::floor(b)) throw std::invalid_argument("beta entries must be non-negative integers");
    beta.push_back(static_cast<int>(b));
  }
  if (beta.size() != static_cast<size_t>(dim)) throw std::invalid_argument("--beta needs --dim entries");
  std::vector<double> matrix;
  std::vector<double> eigs;
  if (!matrix_path.empty()) {
    matrix = read_matrix(matrix_path, dim);
    eigs.resize(static_cast<size_t>(dim));
    check(lasym_symmetric_eigenvalues(dim, matrix.data(), eigs.data()));
  }
  if (!eigs_text.empty()) eigs = parse_list(eigs_text);
  if (eigs.size() != static_cast<size_t>(dim)) throw std::invalid_argument("--eigs needs --dim entries");
  if (matrix.empty()) {
    matrix.assign(static_cast<size_t>(dim * dim), 0.0);
    for (int i = 0; i < dim; ++i) matrix[static_cast<size_t>(i * dim + i)] = eigs[static_cast<size_t>(i)];
  }
  double diag = 0.0;
  double wick = 0.0;
  check(lasym_moment_diag(dim, eigs.data(), beta.data(), &diag));
  check(lasym_moment_wick(dim, matrix.data(), beta.data(), &wick));
  const double rel = wick != 0.0 ? std::abs(diag - wick) / std::abs(wick) : std::abs(diag - wick);
  if (as_json) {
    std::cout << json{{"dim", dim}, {"beta", beta}, {"eigenvalues", eigs}, {"diag_formula", diag},
                      {"wick", wick}, {"relative_difference", rel}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "diag_formula,wick,relative_difference\n" << num(diag) << "," << num(wick) << "," << num(rel)
              << "\n";
  }
  return kExitOk;
}

int cmd_suite(bool as_json) {
  char* s = nullptr;
  int all = 0;
  check(lasym_suite_json(nullptr, &s, &all));
  const json doc = json::parse(take(s));
  if (as_json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "name,passed,detail\n";
    for (const auto& e : doc["entries"]) {
      std::cout << e["name"].get<std::string>() << "," << (e["passed"].get<bool>() ? "true" : "false") << ",\""
                << e["detail"].get<std::string>() << "\"\n";
    }
    std::cout << "# all_passed = " << (all ? "true" : "false") << "\n";
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leading-order Laplace asymptotics with quadrature oracles"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", lasym_version());
  std::string out = "csv";
  app.add_option("--out", out, "Output format")->check(CLI::IsMember({"csv", "json"}));

  std::string problem;
  long n = 0;
  long n_min = 64;
  long n_max = 65536;
  int points = 11;
  bool geom = false;

  auto* verify = app.add_subcommand("verify", "Check the assumptions and print the maximizer report");
  verify->add_option("--problem", problem, "Problem file")->required()->check(CLI::ExistingFile);

  std::string variant = "limit";
  auto* approx = app.add_subcommand("approx", "Leading-order approximation of I_n");
  approx->add_option("--problem", problem, "Problem file")->required()->check(CLI::ExistingFile);
  approx->add_option("--n", n, "n")->required()->check(CLI::PositiveNumber);
  approx->add_option("--variant", variant, "Expansion variant")->check(CLI::IsMember({"limit", "perturbed"}));

  double rel_tol = 1e-10;
  auto* oracle = app.add_subcommand("oracle", "Quadrature reference value of I_n");
  oracle->add_option("--problem", problem, "Problem file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--n", n, "n")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--rel-tol", rel_tol, "Relative tolerance")->check(CLI::PositiveNumber);

  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--problem", problem, "Problem file")->required()->check(CLI::ExistingFile);
    sub->add_option("--n-min", n_min, "Smallest n")->required()->check(CLI::PositiveNumber);
    sub->add_option("--n-max", n_max, "Largest n")->required()->check(CLI::PositiveNumber);
    sub->add_option("--points", points, "Number of n values")->required()->check(CLI::PositiveNumber);
  };
  auto* rates = app.add_subcommand("rates", "Residual rate of the expansion against the oracle");
  add_range(rates);
  rates->add_flag("--geom", geom, "Geometric spacing of n");

  auto* lemmas = app.add_subcommand("lemmas", "Drift rates of c_n, the determinant and the eigenvalues");
  add_range(lemmas);

  int dim = 1;
  std::string beta;
  std::string eigs;
  std::string matrix;
  auto* moments = app.add_subcommand("moments", "Gaussian moment: product formula and pairing sum");
  moments->add_option("--dim", dim, "Dimension")->required()->check(CLI::Range(1, 6));
  moments->add_option("--beta", beta, "Comma separated exponents")->required();
  auto* eigs_opt = moments->add_option("--eigs", eigs, "Comma separated negative eigenvalues");
  auto* matrix_opt = moments->add_option("--matrix", matrix, "Row-major matrix file")->check(CLI::ExistingFile);
  moments->callback([&] {
    if (eigs_opt->count() == 0 && matrix_opt->count() == 0) throw CLI::RequiredError("--eigs or --matrix");
  });

  auto* suite = app.add_subcommand("suite", "Run the built-in problem suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }
  const bool as_json = out == "json";
  try {
    if (*verify) {
      std::vector<long> ns;
      for (long v = 64; v <= 65536; v *= 2) ns.push_back(v);
      return cmd_verify(problem, ns, as_json);
    }
    if (*approx) return cmd_approx(problem, n, variant, as_json);
    if (*oracle) return cmd_oracle(problem, n, rel_tol, as_json);
    if (*rates) return cmd_rates(problem, n_list(n_min, n_max, points, geom), as_json);
    if (*lemmas) return cmd_lemmas(problem, n_list(n_min, n_max, points, true), as_json);
    if (*moments) return cmd_moments(dim, beta, eigs, matrix, as_json);
    if (*suite) return cmd_suite(as_json);
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.status == LASYM_ERR_BOUNDARY_MAXIMUM || e.status == LASYM_ERR_ASSUMPTION ? kExitFailure : kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
