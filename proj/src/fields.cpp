#include "laplace/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "laplace/error.hpp"

namespace laplace {

namespace {

constexpr int kUnlimitedOrder = std::numeric_limits<int>::max();

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDimension) {
    fail(ErrorCode::kInvalidArgument,
         "dimension must be in [1, " + std::to_string(kMaxDimension) + "], got " +
             std::to_string(dim));
  }
}

double ipow(double x, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

// Probabilists' Hermite polynomial He_m(x).
double hermite_he(int m, double x) {
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = x;
  for (int k = 1; k < m; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

// Index of the single differentiated axis, -1 for alpha = 0, -2 when mixed.
int single_axis(const MultiIndex& alpha) {
  int axis = -1;
  for (int i = 0; i < alpha.dim(); ++i) {
    if (alpha[i] == 0) continue;
    if (axis >= 0) return -2;
    axis = i;
  }
  return axis;
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> entries) : e_(std::move(entries)) {
  for (int v : e_) {
    if (v < 0) fail(ErrorCode::kInvalidArgument, "multi-index entries must be non-negative");
  }
}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<int>(static_cast<size_t>(dim), 0)); }

MultiIndex MultiIndex::unit(int dim, int axis, int count) {
  std::vector<int> e(static_cast<size_t>(dim), 0);
  e.at(static_cast<size_t>(axis)) = count;
  return MultiIndex(std::move(e));
}

int MultiIndex::order() const noexcept {
  int sum = 0;
  for (int v : e_) sum += v;
  return sum;
}

double MultiIndex::factorial() const {
  double out = 1.0;
  for (int v : e_) out *= std::tgamma(v + 1.0);
  return out;
}

bool MultiIndex::is_even() const noexcept {
  return std::all_of(e_.begin(), e_.end(), [](int v) { return v % 2 == 0; });
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (dim() != other.dim()) fail(ErrorCode::kDimensionMismatch, "multi-index dimensions differ");
  std::vector<int> e = e_;
  for (size_t i = 0; i < e.size(); ++i) e[i] += other.e_[i];
  return MultiIndex(std::move(e));
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (size_t i = 0; i < e_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e_[i]);
  }
  return s + ")";
}

struct ScalarField::Impl {
  FieldKind kind = FieldKind::kPolynomial;
  int dim = 0;
  int max_order = kUnlimitedOrder;
  std::string name;
  std::vector<PolyTerm> terms;
  // Flat copies of the terms for evaluation: exponents row-major per term.
  std::vector<double> coeffs;
  std::vector<int> powers;
  bool zero = false;
  EvalFn eval;
  PartialFn partial;  // builtin only
  double step_scale = 1.0;
};

ScalarField ScalarField::polynomial(int dim, std::vector<PolyTerm> terms) {
  check_dim(dim);
  auto impl = std::make_shared<Impl>();
  impl->kind = FieldKind::kPolynomial;
  impl->dim = dim;
  impl->name = "poly";
  bool all_zero = true;
  for (const auto& t : terms) {
    if (t.exponent.dim() != dim) {
      fail(ErrorCode::kDimensionMismatch, "polynomial term " + t.exponent.to_string() +
                                              " does not have dimension " + std::to_string(dim));
    }
    if (t.exponent.order() > kMaxDegree) {
      fail(ErrorCode::kInvalidArgument,
           "polynomial degree exceeds cap of " + std::to_string(kMaxDegree));
    }
    if (!std::isfinite(t.coeff)) fail(ErrorCode::kInvalidArgument, "non-finite coefficient");
    if (t.coeff != 0.0) all_zero = false;
  }
  impl->zero = all_zero;
  impl->terms = std::move(terms);
  for (const auto& t : impl->terms) {
    impl->coeffs.push_back(t.coeff);
    impl->powers.insert(impl->powers.end(), t.exponent.entries().begin(), t.exponent.entries().end());
  }
  ScalarField f;
  f.impl_ = std::move(impl);
  return f;
}

ScalarField ScalarField::constant(int dim, double value) {
  return polynomial(dim, {PolyTerm{MultiIndex::zero(dim), value}});
}

ScalarField ScalarField::builtin(const std::string& name, int dim) {
  check_dim(dim);
  if (name == "zero") return zero(dim);
  if (name == "one") return constant(dim, 1.0);

  auto impl = std::make_shared<Impl>();
  impl->kind = FieldKind::kBuiltin;
  impl->dim = dim;
  impl->name = name;
  if (name == "exp_sum") {
    // exp(x_1 + ... + x_d); every partial equals the field itself.
    impl->eval = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return std::exp(s);
    };
    impl->partial = [f = impl->eval](const MultiIndex&, std::span<const double> x) { return f(x); };
  } else if (name == "gaussian") {
    // exp(-|x|^2 / 2)
    impl->eval = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return std::exp(-0.5 * s);
    };
    impl->partial = [](const MultiIndex& alpha, std::span<const double> x) {
      double out = 1.0;
      for (int i = 0; i < alpha.dim(); ++i) {
        const double xi = x[static_cast<size_t>(i)];
        const double sign = (alpha[i] % 2 == 0) ? 1.0 : -1.0;
        out *= sign * hermite_he(alpha[i], xi) * std::exp(-0.5 * xi * xi);
      }
      return out;
    };
  } else if (name == "cos_sum") {
    // sum_i cos(x_i)
    impl->eval = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += std::cos(v);
      return s;
    };
    impl->partial = [f = impl->eval](const MultiIndex& alpha, std::span<const double> x) {
      const int axis = single_axis(alpha);
      if (axis == -1) return f(x);
      if (axis == -2) return 0.0;
      const double xi = x[static_cast<size_t>(axis)];
      switch (alpha[axis] % 4) {
        case 0: return std::cos(xi);
        case 1: return -std::sin(xi);
        case 2: return -std::cos(xi);
        default: return std::sin(xi);
      }
    };
  } else if (name == "neg_log_cosh") {
    // -sum_i log cosh(x_i); analytic partials up to order 3.
    impl->max_order = 3;
    impl->eval = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s -= log_cosh(v);
      return s;
    };
    impl->partial = [f = impl->eval](const MultiIndex& alpha, std::span<const double> x) {
      const int axis = single_axis(alpha);
      if (axis == -1) return f(x);
      if (axis == -2) return 0.0;
      const double t = std::tanh(x[static_cast<size_t>(axis)]);
      const double sech2 = 1.0 - t * t;
      switch (alpha[axis]) {
        case 1: return -t;
        case 2: return -sech2;
        default: return 2.0 * t * sech2;
      }
    };
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown builtin field '" + name + "'");
  }
  ScalarField f;
  f.impl_ = std::move(impl);
  return f;
}

ScalarField ScalarField::numeric(int dim, EvalFn fn, int max_order, double step_scale,
                                 std::string name) {
  check_dim(dim);
  if (!fn) fail(ErrorCode::kInvalidArgument, "numeric field needs an evaluator");
  if (max_order < 0 || max_order > 4) {
    fail(ErrorCode::kInvalidArgument, "numeric fields support derivative orders 0..4");
  }
  if (!(step_scale > 0.0)) fail(ErrorCode::kInvalidArgument, "step scale must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = FieldKind::kNumeric;
  impl->dim = dim;
  impl->max_order = max_order;
  impl->name = std::move(name);
  impl->eval = std::move(fn);
  impl->step_scale = step_scale;
  ScalarField f;
  f.impl_ = std::move(impl);
  return f;
}

FieldKind ScalarField::kind() const { return impl_->kind; }
int ScalarField::dim() const { return impl_->dim; }
int ScalarField::max_order() const { return impl_->max_order; }
const std::string& ScalarField::name() const { return impl_->name; }
std::span<const PolyTerm> ScalarField::terms() const { return impl_->terms; }
bool ScalarField::is_zero() const { return impl_->zero; }

double ScalarField::operator()(std::span<const double> x) const {
  const Impl& f = *impl_;
  if (static_cast<int>(x.size()) != f.dim) {
    fail(ErrorCode::kDimensionMismatch, "point dimension does not match field");
  }
  if (f.kind != FieldKind::kPolynomial) return f.eval(x);
  double sum = 0.0;
  const int* e = f.powers.data();
  for (double c : f.coeffs) {
    for (int i = 0; i < f.dim; ++i, ++e) c *= ipow(x[static_cast<size_t>(i)], *e);
    sum += c;
  }
  return sum;
}

double ScalarField::partial(const MultiIndex& alpha, std::span<const double> x) const {
  const Impl& f = *impl_;
  if (alpha.dim() != f.dim || static_cast<int>(x.size()) != f.dim) {
    fail(ErrorCode::kDimensionMismatch,
         "field of dimension " + std::to_string(f.dim) + " evaluated with multi-index " +
             alpha.to_string() + " at a point of dimension " + std::to_string(x.size()));
  }
  if (alpha.order() > f.max_order) {
    fail(ErrorCode::kDerivativeOrder, "derivative order " + std::to_string(alpha.order()) +
                                          " exceeds capability " + std::to_string(f.max_order) +
                                          " of field '" + f.name + "'");
  }
  switch (f.kind) {
    case FieldKind::kPolynomial: {
      double sum = 0.0;
      for (const auto& t : f.terms) {
        double v = t.coeff;
        for (int i = 0; i < f.dim && v != 0.0; ++i) {
          const int a = t.exponent[i];
          const int m = alpha[i];
          if (m > a) {
            v = 0.0;
            break;
          }
          for (int j = 0; j < m; ++j) v *= (a - j);
          v *= ipow(x[static_cast<size_t>(i)], a - m);
        }
        sum += v;
      }
      return sum;
    }
    case FieldKind::kBuiltin:
      return f.partial(alpha, x);
    case FieldKind::kNumeric: {
      const int total = alpha.order();
      if (total == 0) return f.eval(x);
      // Product of per-axis central stencils of order m,
      //   sum_j (-1)^j C(m, j) f(x + (m/2 - j) h) / h^m,
      // whose error is even in h; one Richardson step cancels the h^2 term.
      const double base =
          f.step_scale * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (total + 4));
      auto stencil = [&](double shrink) {
        std::vector<double> step(static_cast<size_t>(f.dim));
        for (int i = 0; i < f.dim; ++i) {
          step[static_cast<size_t>(i)] = shrink * base * std::max(1.0, std::abs(x[static_cast<size_t>(i)]));
        }
        Point probe(x.begin(), x.end());
        double sum = 0.0;
        // Odometer over stencil positions j_i in [0, alpha_i].
        std::vector<int> j(static_cast<size_t>(f.dim), 0);
        while (true) {
          double weight = 1.0;
          for (int i = 0; i < f.dim; ++i) {
            const int m = alpha[i];
            if (m == 0) continue;
            const auto ji = j[static_cast<size_t>(i)];
            const double h = step[static_cast<size_t>(i)];
            probe[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + (0.5 * m - ji) * h;
            const double binom = std::tgamma(m + 1.0) / (std::tgamma(ji + 1.0) * std::tgamma(m - ji + 1.0));
            weight *= ((ji % 2 == 0) ? binom : -binom) / ipow(h, m);
          }
          sum += weight * f.eval(probe);
          int i = 0;
          for (; i < f.dim; ++i) {
            if (++j[static_cast<size_t>(i)] <= alpha[i]) break;
            j[static_cast<size_t>(i)] = 0;
          }
          if (i == f.dim) break;
        }
        return sum;
      };
      return (4.0 * stencil(0.5) - stencil(1.0)) / 3.0;
    }
  }
  return 0.0;
}

double ScalarField::variable_part(std::span<const double> x) const {
  const Impl& f = *impl_;
  if (static_cast<int>(x.size()) != f.dim) {
    fail(ErrorCode::kDimensionMismatch, "point dimension does not match field");
  }
  if (f.kind != FieldKind::kPolynomial) return f.eval(x);
  double sum = 0.0;
  const int* e = f.powers.data();
  for (double c : f.coeffs) {
    bool constant = true;
    for (int i = 0; i < f.dim; ++i, ++e) {
      constant = constant && *e == 0;
      c *= ipow(x[static_cast<size_t>(i)], *e);
    }
    if (!constant) sum += c;
  }
  return sum;
}

double eval_partial(const ScalarField& f, const MultiIndex& alpha, std::span<const double> x) {
  return f.partial(alpha, x);
}

std::vector<double> gradient(const ScalarField& f, std::span<const double> x) {
  const int d = f.dim();
  std::vector<double> g(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) g[static_cast<size_t>(i)] = f.partial(MultiIndex::unit(d, i), x);
  return g;
}

SymMatrix hessian(const ScalarField& f, std::span<const double> x) {
  const int d = f.dim();
  SymMatrix h(d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      h.set(i, j, f.partial(MultiIndex::unit(d, i) + MultiIndex::unit(d, j), x));
    }
  }
  return h;
}

namespace {

void enumerate_rec(int axis, int remaining, bool even_only, std::vector<int>& cur,
                   std::vector<MultiIndex>& out) {
  const int d = static_cast<int>(cur.size());
  if (axis == d - 1) {
    if (even_only && remaining % 2 != 0) return;
    cur[static_cast<size_t>(axis)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    if (even_only && v % 2 != 0) continue;
    cur[static_cast<size_t>(axis)] = v;
    enumerate_rec(axis + 1, remaining - v, even_only, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_multi_indices(int dim, int total, bool even_only) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "dimension must be at least 1");
  if (total < 0) fail(ErrorCode::kInvalidArgument, "total order must be non-negative");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<size_t>(dim), 0);
  enumerate_rec(0, total, even_only, cur, out);
  return out;
}

std::vector<std::string> builtin_field_names() {
  return {"zero", "one", "exp_sum", "gaussian", "cos_sum", "neg_log_cosh"};
}

}  // namespace laplace
