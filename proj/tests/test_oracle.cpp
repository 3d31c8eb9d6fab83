#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "laplace/asymptotics.hpp"
#include "laplace/error.hpp"
#include "laplace/harness.hpp"
#include "laplace/oracle.hpp"

using namespace laplace;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ProblemSpec gaussian_problem(double a, ScalarField g, int k) {
  ProblemSpec prob;
  prob.name = "gauss";
  prob.box = {{-1.0, 1.0}};
  prob.h = ScalarField::polynomial(1, {{MultiIndex({2}), -a}});
  prob.sigma = ScalarField::zero(1);
  prob.g = std::move(g);
  prob.p = INFINITY;
  prob.s = 0.0;
  prob.k = k;
  return prob;
}

// int_{-1}^{1} x^{2j} e^{-b x^2} dx, integrating by parts:
// M_j = ((2j-1) M_{j-1} - 2 e^{-b}) / (2b).
double truncated_even_moment(int j, double an) {
  double m = std::sqrt(pi / an) * std::erf(std::sqrt(an));
  for (int i = 1; i <= j; ++i) m = ((2 * i - 1) * m - 2.0 * std::exp(-an)) / (2.0 * an);
  return m;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("gauss_legendre_rule examples") {
  const auto r1 = gauss_legendre_rule(1, -1.0, 1.0);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == 2.0);
  const auto r2 = gauss_legendre_rule(2, -1.0, 1.0);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
  const auto r3 = gauss_legendre_rule(3, -1.0, 1.0);
  double s = 0.0;
  for (size_t i = 0; i < 3; ++i) s += r3.weights[i] * std::pow(r3.nodes[i], 4);
  CHECK(s == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(gauss_legendre_rule(0, -1.0, 1.0), Error);
  CHECK_THROWS_AS(gauss_legendre_rule(3, 1.0, 1.0), Error);
}

TEST_CASE("property: Gauss-Legendre degree exactness") {
  for (int m = 1; m <= 64; ++m) {
    const double a = -0.5;
    const double b = 1.5;
    const auto r = gauss_legendre_rule(m, a, b);
    double wsum = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) {
      CHECK(r.weights[i] > 0.0);
      if (i > 0) CHECK(r.nodes[i - 1] < r.nodes[i]);
      wsum += r.weights[i];
    }
    CHECK(rel(wsum, b - a) < 1e-14);
    for (int deg = 0; deg <= 2 * m - 1; ++deg) {
      double q = 0.0;
      for (size_t i = 0; i < r.nodes.size(); ++i) q += r.weights[i] * std::pow(r.nodes[i], deg);
      const double exact = (std::pow(b, deg + 1) - std::pow(a, deg + 1)) / (deg + 1);
      INFO("m=" << m << " deg=" << deg);
      CHECK(std::abs(q - exact) <= 1e-13 * std::max(1.0, std::abs(exact)) * (1 + deg));
    }
  }
}

TEST_CASE("reference_integral examples") {
  const Point c0{0.0};
  {
    const auto prob = gaussian_problem(1.0, ScalarField::constant(1, 1.0), 0);
    const auto v = reference_integral(prob, 100, c0);
    CHECK(v.converged);
    CHECK(v.log_scale == 0.0);
    CHECK(rel(v.mantissa, std::sqrt(pi / 100) * std::erf(10.0)) < 1e-12);
  }
  {
    const auto prob = gaussian_problem(0.5, ScalarField::polynomial(1, {{MultiIndex({2}), 1.0}}), 2);
    const auto v = reference_integral(prob, 400, c0);
    CHECK(rel(v.mantissa, std::sqrt(2 * pi) * std::pow(400.0, -1.5)) < 1e-12);
  }
  {
    const auto prob = gaussian_problem(1.0, ScalarField::zero(1), 0);
    for (long n : {1L, 100L, 100000L}) CHECK(reference_integral(prob, n, c0).mantissa == 0.0);
  }
}

TEST_CASE("property: closed forms for n in [10, 1e5]") {
  const Point c0{0.0};
  for (int j = 0; j <= 3; ++j) {
    const auto g = ScalarField::polynomial(1, {{MultiIndex({2 * j}), 1.0}});
    for (double a : {0.5, 1.0, 3.0}) {
      const auto prob = gaussian_problem(a, g, 2 * j);
      for (long n : {10L, 31L, 100L, 1000L, 10000L, 100000L}) {
        const auto v = reference_integral(prob, n, c0);
        INFO("j=" << j << " a=" << a << " n=" << n);
        CHECK(v.converged);
        CHECK(rel(v.mantissa, truncated_even_moment(j, a * n)) < 1e-9);
      }
    }
  }
}

TEST_CASE("property: doubling base_order is self-consistent") {
  for (const char* name : {"classical", "cubic_p15", "d2_isotropic"}) {
    const auto prob = builtin_problem(name);
    const std::vector<long> ns{64, 4096};
    const auto r = verify_assumptions(prob, ns);
    for (const auto& rec : r.records) {
      QuadratureConfig a;
      QuadratureConfig b;
      b.base_order = 2 * a.base_order;
      const auto va = reference_integral(prob, rec.n, rec.c_n, a);
      const auto vb = reference_integral(prob, rec.n, rec.c_n, b);
      INFO(name << " n=" << rec.n);
      CHECK(rel(va.mantissa, vb.mantissa) < 10 * a.rel_tol);
    }
  }
}

TEST_CASE("property: positivity and shift invariance") {
  for (auto prob : builtin_problems()) {
    const std::vector<long> ns{256};
    const auto r = verify_assumptions(prob, ns);
    const auto& rec = r.records.front();
    const auto v = reference_integral(prob, 256, rec.c_n);
    CHECK(v.mantissa >= 0.0);  // every built-in g is nonnegative on the box

    std::vector<PolyTerm> shifted(prob.h.terms().begin(), prob.h.terms().end());
    shifted.push_back({MultiIndex::zero(prob.dim()), 3.75});
    ProblemSpec moved = prob;
    moved.h = ScalarField::polynomial(prob.dim(), shifted);
    const auto w = reference_integral(moved, 256, rec.c_n);
    INFO(prob.name);
    CHECK(rel(w.mantissa, v.mantissa) < 1e-12);
    CHECK(rel(w.log_scale - v.log_scale, 256 * 3.75) < 1e-12);
  }
}

TEST_CASE("property: Wick oracle agrees with tensor quadrature") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 4; ++trial) {
    const int d = 2 + trial % 2;
    // A = -(M M^T + d I) / d is negative definite and non-diagonal.
    std::vector<double> m(static_cast<size_t>(d * d));
    for (double& v : m) v = n01(rng);
    SymMatrix a(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double s = i == j ? d : 0.0;
        for (int l = 0; l < d; ++l) s += m[i * d + l] * m[j * d + l];
        a.set(i, j, -s / d);
      }
    const SymMatrix cov = inverse(a * -1.0);
    std::vector<PolyTerm> h;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        h.push_back({MultiIndex::unit(d, i) + MultiIndex::unit(d, j), (i == j ? 0.5 : 1.0) * a(i, j)});
    ProblemSpec prob;
    for (int i = 0; i < d; ++i) {
      const double r = 8.0 * std::sqrt(cov(i, i));  // 8 marginal standard deviations
      prob.box.push_back({-r, r});
    }
    prob.h = ScalarField::polynomial(d, h);
    prob.sigma = ScalarField::zero(d);
    prob.g = ScalarField::constant(d, 1.0);
    prob.p = INFINITY;
    std::vector<MultiIndex> betas;
    std::vector<ScalarField> monomials;
    for (int t = 0; t <= 4; ++t) {
      for (const auto& beta : enumerate_multi_indices(d, t, false)) {
        betas.push_back(beta);
        monomials.push_back(ScalarField::polynomial(d, {{beta, 1.0}}));
      }
    }
    QuadratureConfig cfg;
    cfg.base_order = 24;
    cfg.refinement_levels = 0;
    cfg.rel_tol = 1e-11;
    const Point c(static_cast<size_t>(d), 0.0);
    const auto values = reference_integrals(prob, 1, c, monomials, cfg);
    const double mass = gaussian_moment_wick(a, MultiIndex::zero(d));
    for (size_t b = 0; b < betas.size(); ++b) {
      const double w = gaussian_moment_wick(a, betas[b]);
      INFO("d=" << d << " beta=" << betas[b].to_string() << " wick=" << w << " quad=" << values[b].mantissa);
      CHECK(values[b].converged);
      if (betas[b].order() % 2 == 0) {
        CHECK(rel(values[b].mantissa, w) <= 1e-8);
      } else {
        CHECK(std::abs(values[b].mantissa) <= 1e-12 * mass);
      }
    }
  }
}

TEST_CASE("batched amplitudes match single integrals") {
  const auto prob = builtin_problem("cubic_p15");
  const Point c{0.0};
  const ScalarField amps[] = {prob.g, ScalarField::zero(1), ScalarField::polynomial(1, {{MultiIndex({1}), 1.0}})};
  const auto batch = reference_integrals(prob, 256, c, amps);
  CHECK(batch[0].mantissa == doctest::Approx(reference_integral(prob, 256, c).mantissa).epsilon(1e-12));
  CHECK(batch[1].mantissa == 0.0);
  CHECK(batch[1].converged);
  CHECK(batch[2].converged);
  const ScalarField wrong[] = {ScalarField::constant(2, 1.0)};
  CHECK_THROWS_AS(reference_integrals(prob, 256, c, wrong), Error);
}

}  // TEST_SUITE
