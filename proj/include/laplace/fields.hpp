#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "laplace/symmat.hpp"

namespace laplace {

inline constexpr int kMaxDimension = 6;
inline constexpr int kMaxDegree = 16;

using Point = std::vector<double>;

// Multi-index alpha = (alpha_1, ..., alpha_d) with non-negative entries.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  static MultiIndex zero(int dim);
  static MultiIndex unit(int dim, int axis, int count = 1);

  int dim() const noexcept { return static_cast<int>(e_.size()); }
  int order() const noexcept;
  double factorial() const;
  bool is_even() const noexcept;
  int operator[](int i) const { return e_[static_cast<size_t>(i)]; }
  std::span<const int> entries() const noexcept { return e_; }

  MultiIndex operator+(const MultiIndex& other) const;
  bool operator==(const MultiIndex&) const = default;

  std::string to_string() const;

 private:
  std::vector<int> e_;
};

struct PolyTerm {
  MultiIndex exponent;
  double coeff = 0.0;
};

enum class FieldKind { kPolynomial, kBuiltin, kNumeric };

// Immutable d-variate scalar field with a multi-index derivative oracle.
//  - polynomial: exact term-wise differentiation, any order;
//  - builtin: named closed form with registered analytic partials;
//  - numeric: evaluation only, central finite differences up to a declared
//    order.
// Copies share the immutable implementation and are safe to evaluate from
// several threads.
class ScalarField {
 public:
  using EvalFn = std::function<double(std::span<const double>)>;
  using PartialFn = std::function<double(const MultiIndex&, std::span<const double>)>;

  ScalarField() = default;

  static ScalarField polynomial(int dim, std::vector<PolyTerm> terms);
  static ScalarField constant(int dim, double value);
  static ScalarField zero(int dim) { return constant(dim, 0.0); }
  static ScalarField builtin(const std::string& name, int dim);
  // step_scale multiplies the default finite-difference step.
  static ScalarField numeric(int dim, EvalFn f, int max_order, double step_scale = 1.0,
                             std::string name = "numeric");

  bool valid() const noexcept { return impl_ != nullptr; }
  FieldKind kind() const;
  int dim() const;
  int max_order() const;
  const std::string& name() const;
  // Polynomial terms; empty for the other kinds.
  std::span<const PolyTerm> terms() const;
  // True when the field is known to vanish identically.
  bool is_zero() const;

  double operator()(std::span<const double> x) const;
  double partial(const MultiIndex& alpha, std::span<const double> x) const;
  // f(x) without its constant term (polynomials); f(x) for the other kinds.
  double variable_part(std::span<const double> x) const;
  // f(x) - f(y). Polynomial constant terms cancel exactly.
  double difference(std::span<const double> x, std::span<const double> y) const {
    return variable_part(x) - variable_part(y);
  }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

double eval_partial(const ScalarField& f, const MultiIndex& alpha, std::span<const double> x);

// derivative_tensor of order 1 and 2.
std::vector<double> gradient(const ScalarField& f, std::span<const double> x);
SymMatrix hessian(const ScalarField& f, std::span<const double> x);

/// All alpha with |alpha| = total, first entry descending (so (2,0) precedes
/// (0,2)); restricted to all-even entries when even_only is set.
std::vector<MultiIndex> enumerate_multi_indices(int dim, int total, bool even_only);

std::vector<std::string> builtin_field_names();

}  // namespace laplace
