#include <cmath>

#include "doctest.h"
#include "laplace/error.hpp"
#include "laplace/harness.hpp"
#include "laplace/problem_io.hpp"

using namespace laplace;

namespace {

ErrorCode code_of(std::string_view text) {
  try {
    (void)parse_problem(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_SUITE("problem_io") {

TEST_CASE("parse a full problem") {
  const auto prob = parse_problem(R"(
    # comment line
    name demo
    dim 2
    box -1 1 -2 3
    h poly       # trailing comment
    -0.5 2 0
    -1 0 2
    end
    sigma builtin cos_sum
    g one
    p 1.25
    s 0.5
    k 0
  )");
  CHECK(prob.name == "demo");
  CHECK(prob.dim() == 2);
  CHECK(prob.box[1].lo == -2.0);
  CHECK(prob.box[1].hi == 3.0);
  CHECK(prob.h.terms().size() == 2);
  CHECK(prob.h(Point{1.0, 1.0}) == -1.5);
  CHECK(prob.sigma.kind() == FieldKind::kBuiltin);
  CHECK(prob.p == 1.25);
  CHECK(prob.s == 0.5);
  CHECK(prob.perturbed());
}

TEST_CASE("defaults") {
  const auto prob = parse_problem("dim 1\nbox -1 1\nh poly\n-1 2\nend\ng one\nk 0\n");
  CHECK(std::isinf(prob.p));
  CHECK(prob.s == 0.0);
  CHECK(prob.sigma.is_zero());
  CHECK_FALSE(prob.perturbed());
}

TEST_CASE("parse errors") {
  CHECK(code_of("dim 1\nbox -1 1\nh poly\n-1 2\nend\ng one\n") == ErrorCode::kParse);            // missing k
  CHECK(code_of("dim 1\nbox -1 1\nh poly\n-1 2\nend\ng one\nk 0\nk 0\n") == ErrorCode::kParse);  // duplicate
  CHECK(code_of("dim 1\nbox -1 1\nh poly\n-1 2\nend\ng one\nk 0\nfoo 1\n") == ErrorCode::kParse);
  CHECK(code_of("dim 1\nbox -1 1\nh poly\n-1 2 3\nend\ng one\nk 0\n") == ErrorCode::kParse);
  CHECK(code_of("dim 1\nbox -1 1\nh poly\n-1 2\ng one\nk 0\n") == ErrorCode::kParse);  // unterminated
  CHECK(code_of("dim 1\nbox -1 x\nh poly\n-1 2\nend\ng one\nk 0\n") == ErrorCode::kParse);
  CHECK(code_of("dim 1\nbox -1 1 2\nh poly\n-1 2\nend\ng one\nk 0\n") == ErrorCode::kParse);
  CHECK(code_of("dim 1\nbox 1 -1\nh poly\n-1 2\nend\ng one\nk 0\n") == ErrorCode::kInvalidArgument);
  CHECK(code_of("dim 1\nbox -1 1\nh poly\n-1 2\nend\ng nosuch\nk 0\n") == ErrorCode::kInvalidArgument);
}

TEST_CASE("parse_polynomial") {
  const auto f = parse_polynomial(1, "-0.5 2\n");
  CHECK(f(Point{2.0}) == -2.0);
  CHECK_THROWS_AS(parse_polynomial(2, "1 2"), Error);
}

TEST_CASE("property: format_problem round-trips the built-in suite") {
  for (const auto& prob : builtin_problems()) {
    const std::string text = format_problem(prob);
    const auto back = parse_problem(text);
    INFO(text);
    CHECK(back.name == prob.name);
    CHECK(back.dim() == prob.dim());
    CHECK(back.k == prob.k);
    CHECK(back.s == prob.s);
    CHECK((back.p == prob.p || (std::isinf(back.p) && !prob.perturbed())));
    CHECK(format_problem(back) == text);
    const Point x(static_cast<size_t>(prob.dim()), 0.37);
    CHECK(back.h(x) == prob.h(x));
    CHECK(back.g(x) == prob.g(x));
    CHECK(back.sigma(x) == prob.sigma(x));
  }
}

TEST_CASE("load_problem uses the file stem as default name") {
  const auto prob = load_problem(LAPLACE_TEST_DATA "/drift_sigma_x.prob");
  CHECK(prob.name == "drift_sigma_x");
  CHECK_THROWS_AS(load_problem(LAPLACE_TEST_DATA "/does_not_exist.prob"), Error);
}

}  // TEST_SUITE
