#include <cmath>
#include <numbers>

#include "doctest.h"
#include "laplace/error.hpp"
#include "laplace/harness.hpp"
#include "laplace/rates.hpp"
#include "laplace/report_json.hpp"

using namespace laplace;
using std::numbers::pi;

TEST_SUITE("harness") {

TEST_CASE("fit_rate examples") {
  const std::vector<std::pair<long, double>> pow1{{10, 1e-1}, {100, 1e-2}, {1000, 1e-3}};
  const auto f = fit_rate(pow1);
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.n_used == std::vector<long>{10, 100, 1000});

  const std::vector<std::pair<long, double>> flat{{10, 5.0}, {100, 5.0}, {1000, 5.0}};
  CHECK(std::abs(fit_rate(flat).slope) < 1e-15);

  std::vector<std::pair<long, double>> synth;
  for (long n : default_n_list()) synth.push_back({n, 3.0 * std::pow(n, -0.75) * (1.0 + 0.1 / n)});
  CHECK(std::abs(fit_rate(synth).slope + 0.75) <= 0.01);
}

TEST_CASE("fit_rate errors and dropping") {
  const std::vector<std::pair<long, double>> two{{10, 1.0}, {100, 0.1}};
  CHECK_THROWS_AS(fit_rate(two), Error);
  const std::vector<std::pair<long, double>> neg{{10, 1.0}, {100, -0.1}, {1000, 0.01}};
  CHECK_THROWS_AS(fit_rate(neg), Error);
  const std::vector<std::pair<long, double>> tiny{{10, 1.0}, {100, 0.1}, {1000, 0.01}, {10000, 1e-20}};
  const auto f = fit_rate(tiny, 0);
  CHECK(f.dropped == 1);
  CHECK(f.n_used.size() == 3);
  const auto g = fit_rate(tiny, 1, 1e-30);
  CHECK(g.dropped == 1);
  CHECK(g.n_used.front() == 100);

  const std::vector<std::pair<long, double>> zeros{{10, 0.0}, {100, 0.0}, {1000, 1e-17}};
  CHECK_FALSE(fit_rate_or_exact(zeros).has_value());
}

TEST_CASE("property: exact power laws are recovered") {
  for (double e : {-3.0, -1.5, -0.75, -0.1, 0.0, 0.5}) {
    std::vector<std::pair<long, double>> pts;
    for (long n : default_n_list()) pts.push_back({n, 2.5 * std::pow(static_cast<double>(n), e)});
    const auto f = fit_rate(pts);
    CHECK(std::abs(f.slope - e) < 1e-9);
    CHECK(f.r_squared >= 1.0 - 1e-12);
    CHECK(f.r_squared <= 1.0);
  }
}

TEST_CASE("classify_slope") {
  CHECK(classify_slope(-0.8, 0.75) == Verdict::kSaturated);
  CHECK(classify_slope(-1.5, 1.0) == Verdict::kBoundRespected);
  CHECK(classify_slope(-0.5, 1.0) == Verdict::kViolated);
  CHECK(classify_slope(-0.85, 1.0) == Verdict::kSaturated);
}

TEST_CASE("make_n_list") {
  CHECK(default_n_list().size() == 11);
  CHECK(default_n_list().front() == 64);
  CHECK(default_n_list().back() == 65536);
  const auto geo = make_n_list(10, 100000, 5, true);
  CHECK(geo == std::vector<long>{10, 100, 1000, 10000, 100000});
  const auto lin = make_n_list(10, 50, 5, false);
  CHECK(lin == std::vector<long>{10, 20, 30, 40, 50});
  CHECK(make_n_list(1, 3, 10, false) == std::vector<long>{1, 2, 3});
  CHECK_THROWS_AS(make_n_list(0, 10, 3, true), Error);
  CHECK_THROWS_AS(make_n_list(10, 5, 3, true), Error);
}

TEST_CASE("theorem experiment: first branch saturates") {
  const auto ex = run_theorem_experiment(builtin_problem("perturbed_p125"), default_n_list());
  CHECK(ex.predicted_q == doctest::Approx(0.75));
  REQUIRE(ex.fit.has_value());
  CHECK(ex.verdict == Verdict::kSaturated);
  // residual ~ sqrt(2 pi / n) (exp(n^{-1/4}) - 1), derived from the closed form
  for (const auto& row : ex.rows) {
    const double n = static_cast<double>(row.n);
    const double closed = std::sqrt(2 * pi / n) * std::expm1(std::pow(n, -0.25));
    CHECK(std::abs(row.residual - closed) <= 1e-8 * closed);
    CHECK(row.residual >= 0.0);
  }
}

TEST_CASE("theorem experiment: degenerate k = 2 is exact within oracle precision") {
  const auto ex = run_theorem_experiment(builtin_problem("degenerate_k2"), default_n_list());
  CHECK(ex.verdict == Verdict::kExact);
  CHECK_FALSE(ex.fit.has_value());
}

TEST_CASE("theorem experiment preconditions") {
  const std::vector<long> short_list{64, 128, 256, 512, 1024, 2048};
  CHECK_THROWS_AS(run_theorem_experiment(builtin_problem("classical"), short_list), Error);
  ProblemSpec bad = builtin_problem("degenerate_k2");
  bad.k = 0;
  CHECK_THROWS_AS(run_theorem_experiment(bad, default_n_list()), Error);
}

TEST_CASE("property: mantissa arithmetic matches the naive residual") {
  // h(c) != 0 so the e^{n h} scale is exercised; n stays small enough to exponentiate.
  ProblemSpec prob = builtin_problem("cubic_p15");
  std::vector<PolyTerm> terms(prob.h.terms().begin(), prob.h.terms().end());
  terms.push_back({MultiIndex::zero(1), 0.7});
  prob.h = ScalarField::polynomial(1, terms);
  const auto ns = make_n_list(8, 800, 6, true);
  const auto ex = run_theorem_experiment(prob, ns);
  for (const auto& row : ex.rows) {
    const double n = static_cast<double>(row.n);
    const auto* rec = ex.report.find(row.n);
    REQUIRE(rec != nullptr);
    const auto ref = reference_integral(prob, row.n, rec->c_n);
    const double naive_oracle = std::exp(ref.log_scale) * ref.mantissa;
    const double naive_approx = std::exp(n * 0.7) * row.approx_mantissa;
    const double naive = std::abs(naive_oracle - naive_approx) / std::exp(n * 0.7);
    CHECK(row.log_scale == doctest::Approx(n * 0.7));
    CHECK(std::abs(row.residual - naive) <= 1e-10 * std::max(naive, row.approx_mantissa));
  }
}

TEST_CASE("lemma suite examples") {
  const auto ns = default_n_list();
  {
    ProblemSpec prob = builtin_problem("perturbed_p2");
    prob.sigma = ScalarField::polynomial(1, {{MultiIndex({1}), 1.0}});
    const auto lm = run_lemma_suite(prob, ns);
    REQUIRE(lm.cn.has_value());
    CHECK(*lm.cn == Verdict::kSaturated);
    CHECK_FALSE(lm.det.has_value());
    CHECK_FALSE(lm.eigen[0].has_value());
  }
  {
    ProblemSpec prob = builtin_problem("perturbed_p125");
    prob.sigma = ScalarField::polynomial(1, {{MultiIndex({2}), 0.5}});
    const auto lm = run_lemma_suite(prob, ns);
    CHECK_FALSE(lm.cn.has_value());
    REQUIRE(lm.eigen[0].has_value());
    CHECK(*lm.eigen[0] == Verdict::kSaturated);
  }
  {
    ProblemSpec prob = builtin_problem("cubic_p15");
    prob.p = 1.25;
    const auto lm = run_lemma_suite(prob, ns);
    for (const auto& v : {lm.cn, lm.det, lm.eigen[0]}) {
      REQUIRE(v.has_value());
      CHECK(*v != Verdict::kViolated);
    }
  }
}

TEST_CASE("built-in suite") {
  const auto problems = builtin_problems();
  CHECK(problems.size() == 8);
  CHECK_THROWS_AS(builtin_problem("nope"), Error);
  const auto suite = run_builtin_suite();
  REQUIRE(suite.size() == problems.size());
  for (const auto& e : suite) {
    INFO(e.name << ": " << e.detail);
    CHECK(e.passed);
    REQUIRE(e.theorem.has_value());
    CHECK(e.theorem->verdict != Verdict::kViolated);
  }
  const auto js = to_json(suite);
  CHECK(js["all_passed"].get<bool>());
  CHECK(js["entries"].size() == problems.size());
}

}  // TEST_SUITE
