#include "laplace/report_json.hpp"

#include <cmath>

namespace laplace {

namespace {

using nlohmann::json;

// JSON has no infinities; they are written as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix(const SymMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json drift(const DriftFit& f) {
  json out;
  out["values"] = f.values;
  out["exact"] = f.exact;
  out["fit"] = f.fit ? to_json(*f.fit) : json(nullptr);
  return out;
}

json verdict(const std::optional<Verdict>& v) { return v ? json(to_string(*v)) : json("exact"); }

}  // namespace

json to_json(const RateFit& fit) {
  return json{{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"r_squared", fit.r_squared},
              {"n_used", fit.n_used},
              {"dropped", fit.dropped}};
}

json to_json(const CriticalReport& r) {
  json out;
  out["c"] = r.c;
  out["h_c"] = r.value;
  out["grad_norm"] = r.grad_norm;
  out["hessian"] = matrix(r.hessian);
  out["eigenvalues"] = r.eigenvalues;
  out["det"] = r.det;
  out["delta"] = r.delta;
  out["tail_gap"] = num(r.tail_gap);
  out["eigen_floor"] = num(r.eigen_floor);
  out["min_abs_det_phase"] = num(r.min_abs_det_phase);
  out["max_abs_second"] = num(r.max_abs_second);
  out["max_abs_third"] = num(r.max_abs_third);
  out["grid_per_axis"] = r.grid_per_axis;
  out["grid_points"] = r.grid_points;
  json records = json::array();
  for (const auto& rec : r.records) {
    records.push_back(json{{"n", rec.n},
                           {"epsilon", rec.epsilon},
                           {"c_n", rec.c_n},
                           {"h_n_c_n", rec.value},
                           {"grad_norm", rec.grad_norm},
                           {"hessian", matrix(rec.hessian)},
                           {"eigenvalues", rec.eigenvalues},
                           {"det", rec.det}});
  }
  out["records"] = records;
  json flags = json::array();
  for (const auto& f : r.flags) {
    flags.push_back(json{{"tag", f.tag}, {"status", to_string(f.status)}, {"hard", f.hard}, {"detail", f.detail}});
  }
  out["flags"] = flags;
  out["hard_ok"] = r.hard_ok();
  return out;
}

json to_json(const DriftRates& d) {
  json out;
  out["n"] = d.n;
  out["cn"] = drift(d.cn);
  out["det"] = drift(d.det);
  json eig = json::array();
  for (const auto& e : d.eigen) eig.push_back(drift(e));
  out["eigen"] = eig;
  return out;
}

json to_json(const TheoremExperiment& ex) {
  json out;
  out["problem"] = ex.prob.name;
  out["n"] = ex.n_list;
  out["K"] = ex.leading.coefficient;
  out["leading_status"] = ex.leading.status == LeadingStatus::kOk ? "ok" : "degenerate";
  out["exponent"] = 0.5 * (ex.prob.dim() + ex.prob.k);
  out["predicted_q"] = ex.predicted_q;
  json rows = json::array();
  for (const auto& r : ex.rows) {
    rows.push_back(json{{"n", r.n},
                        {"oracle_mantissa", r.oracle_mantissa},
                        {"oracle_error", r.oracle_error},
                        {"approx_mantissa", r.approx_mantissa},
                        {"perturbed_mantissa", r.perturbed_mantissa},
                        {"residual", r.residual},
                        {"log_scale", r.log_scale}});
  }
  out["rows"] = rows;
  out["fit"] = ex.fit ? to_json(*ex.fit) : json(nullptr);
  out["verdict"] = to_string(ex.verdict);
  return out;
}

json to_json(const LemmaSuite& s) {
  json out;
  out["drift"] = to_json(s.drift);
  out["cn_verdict"] = verdict(s.cn);
  out["det_verdict"] = verdict(s.det);
  json eig = json::array();
  for (const auto& v : s.eigen) eig.push_back(verdict(v));
  out["eigen_verdicts"] = eig;
  out["report"] = to_json(s.report);
  return out;
}

json to_json(const std::vector<SuiteEntry>& suite) {
  json entries = json::array();
  bool all = true;
  for (const auto& e : suite) {
    json j{{"name", e.name}, {"passed", e.passed}, {"detail", e.detail}};
    if (e.theorem) j["theorem"] = to_json(*e.theorem);
    if (e.lemmas) {
      j["lemmas"] = json{{"drift", to_json(e.lemmas->drift)},
                         {"cn_verdict", verdict(e.lemmas->cn)},
                         {"det_verdict", verdict(e.lemmas->det)}};
    }
    all = all && e.passed;
    entries.push_back(std::move(j));
  }
  return json{{"entries", entries}, {"all_passed", all}};
}

}  // namespace laplace
