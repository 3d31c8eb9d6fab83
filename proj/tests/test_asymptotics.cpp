#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "laplace/asymptotics.hpp"
#include "laplace/error.hpp"
#include "laplace/harness.hpp"

using namespace laplace;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<MultiIndex> all_indices_up_to(int d, int max_order) {
  std::vector<MultiIndex> out;
  for (int t = 0; t <= max_order; ++t)
    for (auto& a : enumerate_multi_indices(d, t, false)) out.push_back(a);
  return out;
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("double_factorial") {
  CHECK(double_factorial(0) == 1);
  CHECK(double_factorial(2) == 2);
  CHECK(double_factorial(4) == 8);
  CHECK(double_factorial(6) == 48);
  CHECK(double_factorial(16) == 10321920);
  CHECK_THROWS_AS(double_factorial(3), Error);
  CHECK_THROWS_AS(double_factorial(-2), Error);
}

TEST_CASE("half_integer_gamma") {
  const double sp = std::sqrt(pi);
  CHECK(half_integer_gamma(0) == doctest::Approx(sp).epsilon(1e-15));
  CHECK(half_integer_gamma(1) == 1.0);
  CHECK(half_integer_gamma(2) == doctest::Approx(sp / 2).epsilon(1e-15));
  CHECK(half_integer_gamma(4) == doctest::Approx(3 * sp / 4).epsilon(1e-15));
  for (int m = 0; m <= 30; ++m) CHECK(rel(half_integer_gamma(m), std::tgamma((m + 1) / 2.0)) < 1e-13);
}

TEST_CASE("gaussian_moment_diag examples") {
  const std::vector<double> one{-1.0};
  CHECK(rel(gaussian_moment_diag(one, MultiIndex({0})), std::sqrt(2 * pi)) < 1e-15);
  CHECK(rel(gaussian_moment_diag(one, MultiIndex({2})), std::sqrt(2 * pi)) < 1e-15);
  const std::vector<double> two{-2.0, -1.0};
  CHECK(gaussian_moment_diag(two, MultiIndex({1, 0})) == 0.0);
  const std::vector<double> bad{-1.0, 0.0};
  CHECK_THROWS_AS(gaussian_moment_diag(bad, MultiIndex({0, 0})), Error);
}

TEST_CASE("gaussian_moment_wick examples") {
  for (int d = 1; d <= 4; ++d) {
    const SymMatrix a = SymMatrix::identity(d) * -1.0;
    CHECK(rel(gaussian_moment_wick(a, MultiIndex::zero(d)), std::pow(2 * pi, d / 2.0)) < 1e-14);
  }
  const SymMatrix a(2, {-2.0, 1.0, 1.0, -2.0});
  CHECK(rel(gaussian_moment_wick(a, MultiIndex({1, 1})), 2 * pi / (3 * std::sqrt(3.0))) < 1e-14);
  // True value of the (2,0) moment: 2 pi Sigma_11 / sqrt(det(-A)) with Sigma_11 = 2/3.
  CHECK(rel(gaussian_moment_wick(a, MultiIndex({2, 0})), 2 * pi * (2.0 / 3.0) / std::sqrt(3.0)) < 1e-14);
  CHECK_THROWS_AS(gaussian_moment_wick(SymMatrix::identity(2), MultiIndex({0, 0})), Error);
  CHECK_THROWS_AS(gaussian_moment_wick(a, MultiIndex({6, 6})), Error);
}

TEST_CASE("property: diagonal formula equals the Wick oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int d = 1; d <= 3; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> lam(static_cast<size_t>(d));
      for (double& v : lam) v = -u(rng);
      const SymMatrix a = SymMatrix::diagonal(lam);
      for (const auto& beta : all_indices_up_to(d, 6)) {
        const double diag = gaussian_moment_diag(lam, beta);
        const double wick = gaussian_moment_wick(a, beta);
        INFO("d=" << d << " beta=" << beta.to_string());
        if (beta.is_even()) {
          CHECK(rel(diag, wick) <= 1e-12);
        } else {
          CHECK(diag == 0.0);
          CHECK(std::abs(wick) < 1e-12 * std::abs(gaussian_moment_wick(a, MultiIndex::zero(d))));
        }
      }
    }
  }
}

TEST_CASE("property: odd total order annihilates the Wick sum") {
  const SymMatrix a(3, {-2.0, 0.5, 0.3, 0.5, -1.5, 0.2, 0.3, 0.2, -1.0});
  for (int t = 1; t <= 9; t += 2)
    for (const auto& beta : enumerate_multi_indices(3, t, false)) CHECK(gaussian_moment_wick(a, beta) == 0.0);
}

TEST_CASE("property: scaling law") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 3;
    std::vector<double> lam(static_cast<size_t>(d));
    for (double& v : lam) v = -u(rng);
    const double t = u(rng);
    std::vector<double> scaled = lam;
    for (double& v : scaled) v *= t;
    for (const auto& beta : all_indices_up_to(d, 6)) {
      if (!beta.is_even()) continue;
      const double lhs = gaussian_moment_diag(scaled, beta);
      const double rhs = std::pow(t, -(beta.order() + d) / 2.0) * gaussian_moment_diag(lam, beta);
      CHECK(rel(lhs, rhs) < 1e-12);
    }
  }
}

TEST_CASE("exponent_q") {
  CHECK(exponent_q(1.25, 1, 0) == doctest::Approx(0.75));
  CHECK(exponent_q(2.0, 1, 0) == doctest::Approx(1.0));
  CHECK(exponent_q(INFINITY, 2, 2) == doctest::Approx(2.5));
  CHECK_THROWS_AS(exponent_q(1.0, 1, 0), Error);
  CHECK_THROWS_AS(exponent_q(0.5, 1, 0), Error);
}

TEST_CASE("property: exponent_q is continuous at p = 3/2 and exceeds the leading exponent") {
  for (int d = 1; d <= 6; ++d) {
    for (int k = 0; k <= 8; k += 2) {
      const double at = exponent_q(1.5, d, k);
      const double below = exponent_q(std::nextafter(1.5, 0.0), d, k);
      CHECK(at == doctest::Approx(d / 2.0 + k / 2.0 + 0.5));
      CHECK(std::abs(at - below) < 1e-12);
      for (double p : {1.01, 1.1, 1.25, 1.49, 1.5, 2.0, 10.0, static_cast<double>(INFINITY)})
        CHECK(exponent_q(p, d, k) > d / 2.0 + k / 2.0);
    }
  }
}

TEST_CASE("leading_coefficient examples") {
  const std::vector<long> ns{64};
  {
    const auto prob = builtin_problem("classical");
    const auto r = verify_assumptions(prob, ns);
    const auto lead = leading_coefficient(prob, r.c, jacobi_eigen(r.hessian));
    CHECK(rel(lead.coefficient, std::sqrt(pi)) < 1e-14);
    CHECK(lead.status == LeadingStatus::kOk);
  }
  {
    const auto prob = builtin_problem("degenerate_k2");
    const auto r = verify_assumptions(prob, ns);
    CHECK(rel(leading_coefficient(prob, r.c, jacobi_eigen(r.hessian)).coefficient, std::sqrt(2 * pi)) < 1e-14);
  }
  {
    const auto prob = builtin_problem("d2_diagonal");
    const auto r = verify_assumptions(prob, ns);
    CHECK(rel(leading_coefficient(prob, r.c, jacobi_eigen(r.hessian)).coefficient, 2 * pi / std::sqrt(2.0)) <
          1e-14);
  }
  {
    // k = 4 against the exact moment: int x^4 e^{-n x^2/2} = 3 sqrt(2 pi) n^{-5/2}, and K = g''''(0)/4!! * sqrt(2 pi).
    const auto prob = builtin_problem("degenerate_k4");
    const auto r = verify_assumptions(prob, ns);
    CHECK(rel(leading_coefficient(prob, r.c, jacobi_eigen(r.hessian)).coefficient, 3 * std::sqrt(2 * pi)) < 1e-14);
  }
}

TEST_CASE("leading_coefficient flags a vanishing even sum") {
  // g = xy has k = 2 with no all-even second derivative.
  ProblemSpec prob = builtin_problem("d2_diagonal");
  prob.g = ScalarField::polynomial(2, {{MultiIndex({1, 1}), 1.0}});
  prob.k = 2;
  const std::vector<long> ns{64};
  const auto r = verify_assumptions(prob, ns);
  const auto lead = leading_coefficient(prob, r.c, jacobi_eigen(r.hessian));
  CHECK(lead.status == LeadingStatus::kDegenerate);
  CHECK(lead.coefficient == 0.0);
}

TEST_CASE("property: k = 0 reduces to the classical formula") {
  const std::vector<long> ns{64};
  for (const auto& prob : builtin_problems()) {
    if (prob.k != 0) continue;
    const auto r = verify_assumptions(prob, ns);
    const auto eig = jacobi_eigen(r.hessian);
    const double classical = prob.g(r.c) * std::sqrt(std::pow(2 * pi, prob.dim()) / std::abs(determinant(r.hessian)));
    CHECK(rel(leading_coefficient(prob, r.c, eig).coefficient, classical) < 1e-14);
  }
}

TEST_CASE("approx_I examples") {
  {
    const auto prob = builtin_problem("classical");
    const std::vector<long> ns{10000};
    const auto r = verify_assumptions(prob, ns);
    const auto v = approx_I(prob, r, 10000, Variant::kLimit);
    CHECK(v.log_scale == 0.0);
    CHECK(rel(v.mantissa, std::sqrt(pi / 1e4)) < 1e-14);
    const auto w = approx_I(prob, r, 10000, Variant::kPerturbed);
    CHECK(w.log_scale == v.log_scale);
    CHECK(w.mantissa == v.mantissa);
  }
  {
    const auto prob = builtin_problem("perturbed_p2");
    const std::vector<long> ns{100};
    const auto r = verify_assumptions(prob, ns);
    const auto v = approx_I(prob, r, 100, Variant::kPerturbed);
    CHECK(rel(v.log_scale, 0.01) < 1e-14);
    CHECK(rel(v.mantissa, std::sqrt(2 * pi / 100)) < 1e-14);
    // n not in the report is tracked on demand
    const auto u = approx_I(prob, r, 400, Variant::kPerturbed);
    CHECK(rel(u.log_scale, 400 * prob.epsilon(400)) < 1e-14);
  }
}

TEST_CASE("expand") {
  const auto prob = builtin_problem("perturbed_p125");
  const auto ns = default_n_list();
  const auto r = verify_assumptions(prob, ns);
  const auto ex = expand(prob, r, ns, Variant::kLimit);
  CHECK(ex.exponent == 0.5);
  CHECK(ex.q == doctest::Approx(0.75));
  CHECK(ex.q > ex.exponent);
  REQUIRE(ex.rows.size() == ns.size());
  for (const auto& row : ex.rows) CHECK(std::isfinite(row.mantissa));
}

}  // TEST_SUITE
