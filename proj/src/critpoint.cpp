#include "laplace/critpoint.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "laplace/error.hpp"

namespace laplace {

namespace {

constexpr int kMaxNewtonIterations = 50;
constexpr double kDerivativeZeroTol = 1e-9;
constexpr double kDetFloor = 1e-8;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

bool box_contains(const Box& box, std::span<const double> x) {
  for (size_t i = 0; i < box.size(); ++i) {
    if (!(x[i] > box[i].lo && x[i] < box[i].hi)) return false;
  }
  return true;
}

double box_distance(const Box& box, std::span<const double> x) {
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < box.size(); ++i) {
    d = std::min({d, x[i] - box[i].lo, box[i].hi - x[i]});
  }
  return d;
}

int effective_grid(int per_axis, long max_points, int dim) {
  int m = per_axis;
  while (m > 3 && std::pow(static_cast<double>(m), dim) > static_cast<double>(max_points)) --m;
  return m;
}

// Visits the uniform tensor grid with `per_axis` points per axis, endpoints
// included, in lexicographic order.
void for_each_grid_point(const Box& box, int per_axis, const std::function<void(const Point&)>& fn) {
  const size_t d = box.size();
  std::vector<int> idx(d, 0);
  Point x(d);
  while (true) {
    for (size_t i = 0; i < d; ++i) {
      const double t = static_cast<double>(idx[i]) / (per_axis - 1);
      x[i] = (idx[i] == per_axis - 1) ? box[i].hi : box[i].lo + t * (box[i].hi - box[i].lo);
    }
    fn(x);
    size_t i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < per_axis) break;
      idx[i] = 0;
    }
    if (i == d) return;
  }
}

struct Objective {
  std::function<double(std::span<const double>, std::span<const double>)> diff;  // f(x) - f(y)
  std::function<std::vector<double>(std::span<const double>)> grad;
  std::function<SymMatrix(std::span<const double>)> hess;
};

// Damped Newton ascent. The step uses |eigenvalues| of the Hessian so that it
// is an ascent direction even away from the concave region; step halving
// until the objective increases or the gradient shrinks.
Point newton_maximize(const Objective& obj, Point x, const Box& box, double tol) {
  for (int iter = 0; iter <= kMaxNewtonIterations; ++iter) {
    const std::vector<double> g = obj.grad(x);
    const double gnorm = norm2(g);
    if (gnorm < tol) return x;
    if (iter == kMaxNewtonIterations) break;

    const EigenDecomposition eig = jacobi_eigen(obj.hess(x));
    const int d = eig.dim();
    double scale = 1.0;
    for (double mu : eig.eigenvalues) scale = std::max(scale, std::abs(mu));
    std::vector<double> step(static_cast<size_t>(d), 0.0);
    for (int m = 0; m < d; ++m) {
      double proj = 0.0;
      for (int r = 0; r < d; ++r) proj += eig.basis_at(r, m) * g[static_cast<size_t>(r)];
      const double mu = std::max(std::abs(eig.eigenvalues[static_cast<size_t>(m)]), 1e-8 * scale);
      for (int r = 0; r < d; ++r) step[static_cast<size_t>(r)] += eig.basis_at(r, m) * proj / mu;
    }

    bool accepted = false;
    double t = 1.0;
    Point y(x.size());
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] + t * step[i];
      if (!box_contains(box, y)) continue;
      if (obj.diff(y, x) > 0.0 || norm2(obj.grad(y)) < gnorm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    x = y;
  }
  fail(ErrorCode::kNoConvergence,
       "Newton iteration did not reach gradient norm " + std::to_string(tol) + " near " +
           format_point(x));
}

struct Located {
  Point c;
  std::vector<PerturbedRecord> records;
};

PerturbedRecord make_record(const ProblemSpec& prob, long n, Point c_n) {
  PerturbedRecord r;
  r.n = n;
  r.epsilon = prob.epsilon(n);
  r.value = prob.phase(c_n, n);
  r.grad_norm = norm2(prob.phase_gradient(c_n, n));
  r.hessian = prob.phase_hessian(c_n, n);
  const auto eig = jacobi_eigen(r.hessian);
  r.eigenvalues = eig.eigenvalues;
  r.det = 1.0;
  for (double v : eig.eigenvalues) r.det *= v;
  r.c_n = std::move(c_n);
  return r;
}

void check_n_list(std::span<const long> n_list) {
  if (n_list.empty()) fail(ErrorCode::kInvalidArgument, "n list is empty");
  for (size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) fail(ErrorCode::kInvalidArgument, "n must be at least 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      fail(ErrorCode::kInvalidArgument, "n list must be strictly ascending");
    }
  }
}

}  // namespace

double ProblemSpec::effective_p() const {
  return perturbed() ? p : std::numeric_limits<double>::infinity();
}

double ProblemSpec::epsilon(long n) const {
  if (!perturbed()) return 0.0;
  return s * std::pow(static_cast<double>(n), -p);
}

double ProblemSpec::phase(std::span<const double> x, long n) const {
  const double eps = epsilon(n);
  return eps == 0.0 ? h(x) : h(x) + eps * sigma(x);
}

double ProblemSpec::phase_difference(std::span<const double> x, std::span<const double> y,
                                     long n) const {
  const double eps = epsilon(n);
  const double base = h.difference(x, y);
  return eps == 0.0 ? base : base + eps * sigma.difference(x, y);
}

std::vector<double> ProblemSpec::phase_gradient(std::span<const double> x, long n) const {
  std::vector<double> out = gradient(h, x);
  const double eps = epsilon(n);
  if (eps != 0.0) {
    const std::vector<double> gs = gradient(sigma, x);
    for (size_t i = 0; i < out.size(); ++i) out[i] += eps * gs[i];
  }
  return out;
}

SymMatrix ProblemSpec::phase_hessian(std::span<const double> x, long n) const {
  const double eps = epsilon(n);
  if (eps == 0.0) return hessian(h, x);
  return hessian(h, x) + hessian(sigma, x) * eps;
}

bool ProblemSpec::contains(std::span<const double> x) const { return box_contains(box, x); }

double ProblemSpec::distance_to_boundary(std::span<const double> x) const {
  return box_distance(box, x);
}

double ProblemSpec::min_half_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& iv : box) w = std::min(w, 0.5 * (iv.hi - iv.lo));
  return w;
}

void ProblemSpec::validate() const {
  const int d = dim();
  if (d < 1 || d > kMaxDimension) {
    fail(ErrorCode::kInvalidArgument, "box dimension must be in [1, 6]");
  }
  for (const auto& iv : box) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.lo < iv.hi)) {
      fail(ErrorCode::kInvalidArgument, "box intervals must satisfy a < b");
    }
  }
  if (!h.valid() || !g.valid()) fail(ErrorCode::kInvalidArgument, "h and g are required");
  if (h.dim() != d || g.dim() != d || (sigma.valid() && sigma.dim() != d)) {
    fail(ErrorCode::kDimensionMismatch, "fields must share the box dimension");
  }
  if (!sigma.valid()) fail(ErrorCode::kInvalidArgument, "sigma must be set (use zero)");
  if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorCode::kInvalidArgument, "s must be >= 0");
  if (!(p > 0.0)) fail(ErrorCode::kInvalidArgument, "p must be positive");
  if (k < 0 || k % 2 != 0) fail(ErrorCode::kInvalidArgument, "k must be an even integer >= 0");
}

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kWarn: return "warn";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kNotRequired: return "not-required";
  }
  return "?";
}

bool CriticalReport::hard_ok() const {
  return std::none_of(flags.begin(), flags.end(), [](const AssumptionFlag& f) {
    return f.hard && f.status == CheckStatus::kFail;
  });
}

const PerturbedRecord* CriticalReport::find(long n) const {
  for (const auto& r : records) {
    if (r.n == n) return &r;
  }
  return nullptr;
}

Point find_max_interior(const ScalarField& f, const Box& box, int grid_per_axis, double margin,
                        double newton_tol) {
  if (grid_per_axis < 3) fail(ErrorCode::kInvalidArgument, "grid needs at least 3 points per axis");
  if (static_cast<int>(box.size()) != f.dim()) {
    fail(ErrorCode::kDimensionMismatch, "box and field dimensions differ");
  }
  double min_half = std::numeric_limits<double>::infinity();
  for (const auto& iv : box) min_half = std::min(min_half, 0.5 * (iv.hi - iv.lo));
  if (!(margin > 0.0 && margin < min_half)) {
    fail(ErrorCode::kInvalidArgument, "margin must lie in (0, smallest half-width)");
  }

  Point best;
  double best_value = -std::numeric_limits<double>::infinity();
  for_each_grid_point(box, grid_per_axis, [&](const Point& x) {
    const double v = f(x);
    if (v > best_value) {
      best_value = v;
      best = x;
    }
  });
  if (best.empty()) fail(ErrorCode::kInvalidArgument, "field is not finite on the grid");
  if (box_distance(box, best) < margin) {
    fail(ErrorCode::kBoundaryMaximum,
         "grid maximum " + format_point(best) + " lies within " + std::to_string(margin) +
             " of the boundary");
  }

  const Objective obj{
      [&f](std::span<const double> x, std::span<const double> y) { return f.difference(x, y); },
      [&f](std::span<const double> x) { return gradient(f, x); },
      [&f](std::span<const double> x) { return hessian(f, x); }};
  Point c = newton_maximize(obj, best, box, newton_tol);
  if (box_distance(box, c) < margin) {
    fail(ErrorCode::kBoundaryMaximum,
         "maximizer " + format_point(c) + " lies within " + std::to_string(margin) +
             " of the boundary");
  }
  return c;
}

Point track_c_n(const ProblemSpec& prob, long n, std::span<const double> start, double newton_tol) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "n must be at least 1");
  if (static_cast<int>(start.size()) != prob.dim()) {
    fail(ErrorCode::kDimensionMismatch, "start point dimension differs from the problem");
  }
  const Objective obj{
      [&](std::span<const double> x, std::span<const double> y) {
        return prob.phase_difference(x, y, n);
      },
      [&](std::span<const double> x) { return prob.phase_gradient(x, n); },
      [&](std::span<const double> x) { return prob.phase_hessian(x, n); }};
  Point c_n = newton_maximize(obj, Point(start.begin(), start.end()), prob.box, newton_tol);
  if (!is_negative_definite(prob.phase_hessian(c_n, n), 1e-12)) {
    fail(ErrorCode::kAssumptionViolated,
         "A(iii): Hessian of h_n at " + format_point(c_n) + " is not negative definite (n = " +
             std::to_string(n) + ")");
  }
  return c_n;
}

namespace {

Located locate(const ProblemSpec& prob, std::span<const long> n_list, const VerifyOptions& opt,
               int grid) {
  Located out;
  const double margin = opt.margin_fraction * prob.min_half_width();
  out.c = find_max_interior(prob.h, prob.box, grid, margin, opt.newton_tol);
  Point start = out.c;
  for (long n : n_list) {
    Point c_n = track_c_n(prob, n, start, opt.newton_tol);
    if (prob.distance_to_boundary(c_n) < margin) {
      fail(ErrorCode::kAssumptionViolated,
           "A(iii): c_n = " + format_point(c_n) + " is not interior at n = " + std::to_string(n));
    }
    start = c_n;
    out.records.push_back(make_record(prob, n, std::move(c_n)));
  }
  return out;
}

void add_flag(CriticalReport& r, std::string tag, CheckStatus status, bool hard, std::string detail) {
  r.flags.push_back(AssumptionFlag{std::move(tag), status, hard, std::move(detail)});
}

void check_amplitude(const ProblemSpec& prob, CriticalReport& r) {
  const int d = prob.dim();
  std::ostringstream detail;
  try {
    if (prob.k == 0) {
      const double gc = prob.g(r.c);
      detail << "g(c) = " << gc;
      add_flag(r, "B", std::abs(gc) > kDerivativeZeroTol ? CheckStatus::kPass : CheckStatus::kFail,
               true, detail.str());
      return;
    }
    for (int order = 0; order < prob.k; ++order) {
      for (const auto& alpha : enumerate_multi_indices(d, order, false)) {
        const double v = prob.g.partial(alpha, r.c);
        if (std::abs(v) > kDerivativeZeroTol) {
          detail << "partial " << alpha.to_string() << " g(c) = " << v << " is nonzero";
          add_flag(r, "B", CheckStatus::kFail, true, detail.str());
          return;
        }
      }
    }
    for (const auto& beta : enumerate_multi_indices(d, prob.k, true)) {
      const double v = prob.g.partial(beta, r.c);
      if (std::abs(v) > kDerivativeZeroTol) {
        detail << "lower derivatives vanish; partial " << beta.to_string() << " g(c) = " << v;
        add_flag(r, "B", CheckStatus::kPass, true, detail.str());
        return;
      }
    }
    add_flag(r, "B", CheckStatus::kFail, true,
             "every all-even derivative of order k vanishes at c");
  } catch (const Error& e) {
    add_flag(r, "B", CheckStatus::kFail, true, e.what());
  }
}

}  // namespace

CriticalReport verify_assumptions(const ProblemSpec& prob, std::span<const long> n_list,
                                  const VerifyOptions& opt) {
  prob.validate();
  check_n_list(n_list);
  const int d = prob.dim();
  CriticalReport r;
  r.grid_per_axis = effective_grid(opt.grid_per_axis, opt.max_grid_points, d);
  r.grid_points = static_cast<long>(std::pow(static_cast<double>(r.grid_per_axis), d));
  r.delta = opt.delta_fraction * prob.min_half_width();
  const double margin = opt.margin_fraction * prob.min_half_width();
  const bool perturbed = prob.perturbed();

  try {
    r.c = find_max_interior(prob.h, prob.box, r.grid_per_axis, margin, opt.newton_tol);
  } catch (const Error& e) {
    add_flag(r, "A(ii)", CheckStatus::kFail, true, e.what());
    return r;
  }
  r.value = prob.h(r.c);
  r.grad_norm = norm2(gradient(prob.h, r.c));
  r.hessian = hessian(prob.h, r.c);
  {
    const auto eig = jacobi_eigen(r.hessian);
    r.eigenvalues = eig.eigenvalues;
    r.det = 1.0;
    for (double v : eig.eigenvalues) r.det *= v;
  }

  // Tail gap over the grid outside B_delta(c), plus radial projections of the
  // inner grid points onto the sphere |x - c| = delta.
  r.tail_gap = std::numeric_limits<double>::infinity();
  const double shell = r.delta * (1.0 - 1e-12);
  auto consider = [&](std::span<const double> x) {
    r.tail_gap = std::min(r.tail_gap, prob.h.difference(r.c, x));
  };
  Point projected(static_cast<size_t>(d));
  for_each_grid_point(prob.box, r.grid_per_axis, [&](const Point& x) {
    const double dist = distance(x, r.c);
    if (dist >= shell) {
      consider(x);
    } else if (dist > 0.0) {
      for (int i = 0; i < d; ++i) {
        projected[static_cast<size_t>(i)] =
            r.c[static_cast<size_t>(i)] + r.delta * (x[static_cast<size_t>(i)] - r.c[static_cast<size_t>(i)]) / dist;
      }
      if (prob.contains(projected)) consider(projected);
    }
  });
  for (int i = 0; i < d; ++i) {
    for (double sign : {-1.0, 1.0}) {
      projected = r.c;
      projected[static_cast<size_t>(i)] += sign * r.delta;
      if (prob.contains(projected)) consider(projected);
    }
  }

  {
    std::ostringstream os;
    os << "c = " << format_point(r.c) << ", det D2h(c) = " << r.det << ", tail gap A = " << r.tail_gap
       << " (delta = " << r.delta << ")";
    const bool ok = std::abs(r.det) > kDetFloor && r.eigenvalues.back() < 0.0 && r.tail_gap > 0.0;
    add_flag(r, "A(ii)", ok ? CheckStatus::kPass : CheckStatus::kFail, true, os.str());
  }

  // A(iii): track c_n, warm-started along ascending n.
  bool tracked = true;
  try {
    Point start = r.c;
    for (long n : n_list) {
      Point c_n = track_c_n(prob, n, start, opt.newton_tol);
      if (prob.distance_to_boundary(c_n) < margin) {
        fail(ErrorCode::kAssumptionViolated,
             "c_n = " + format_point(c_n) + " is not interior at n = " + std::to_string(n));
      }
      start = c_n;
      r.records.push_back(make_record(prob, n, std::move(c_n)));
    }
  } catch (const Error& e) {
    tracked = false;
    add_flag(r, "A(iii)", perturbed ? CheckStatus::kFail : CheckStatus::kNotRequired, perturbed,
             e.what());
  }
  if (tracked) {
    std::ostringstream os;
    os << "c_n interior with negative-definite Hessian for " << r.records.size() << " values of n";
    add_flag(r, "A(iii)", perturbed ? CheckStatus::kPass : CheckStatus::kNotRequired, perturbed,
             os.str());
  }

  // A(iv) and A(v) on the sample grid.
  r.min_abs_det_phase = std::numeric_limits<double>::infinity();
  r.max_abs_second = 0.0;
  r.max_abs_third = 0.0;
  std::vector<double> eps_list;
  for (long n : n_list) eps_list.push_back(prob.epsilon(n));
  const double eps_max = eps_list.empty() ? 0.0 : *std::max_element(eps_list.begin(), eps_list.end());
  const auto second = enumerate_multi_indices(d, 2, false);
  const auto third = enumerate_multi_indices(d, 3, false);
  std::string bound_note;
  bool third_available = true;
  std::vector<double> m(static_cast<size_t>(d * d));
  for_each_grid_point(prob.box, r.grid_per_axis, [&](const Point& x) {
    const SymMatrix hh = hessian(prob.h, x);
    const SymMatrix hs = perturbed ? hessian(prob.sigma, x) : SymMatrix(d);
    for (double eps : eps_list) {
      for (size_t i = 0; i < m.size(); ++i) m[i] = hh.data()[i] + eps * hs.data()[i];
      r.min_abs_det_phase = std::min(r.min_abs_det_phase, std::abs(lu_determinant(m, d)));
    }
    for (const auto& alpha : second) {
      double v = std::abs(prob.h.partial(alpha, x));
      if (perturbed) v += eps_max * std::abs(prob.sigma.partial(alpha, x));
      r.max_abs_second = std::max(r.max_abs_second, v);
    }
    if (!third_available) return;
    try {
      for (const auto& alpha : third) {
        double v = std::abs(prob.h.partial(alpha, x));
        if (perturbed) v += eps_max * std::abs(prob.sigma.partial(alpha, x));
        r.max_abs_third = std::max(r.max_abs_third, v);
      }
    } catch (const Error& e) {
      third_available = false;
      bound_note = e.what();
    }
  });
  {
    std::ostringstream os;
    os << "min |det D2h_n| over " << r.grid_points << " grid points and " << n_list.size()
       << " values of n = " << r.min_abs_det_phase;
    const CheckStatus st = r.min_abs_det_phase > kDetFloor ? CheckStatus::kPass : CheckStatus::kWarn;
    add_flag(r, "A(iv)", perturbed ? st : CheckStatus::kNotRequired, false, os.str());
  }
  {
    std::ostringstream os;
    os << "max |d2 h_n| = " << r.max_abs_second << ", max |d3 h_n| = " << r.max_abs_third;
    if (!third_available) os << " (third derivatives unavailable: " << bound_note << ")";
    const bool ok = std::isfinite(r.max_abs_second) && std::isfinite(r.max_abs_third) && third_available;
    add_flag(r, "A(v)", perturbed ? (ok ? CheckStatus::kPass : CheckStatus::kWarn) : CheckStatus::kNotRequired,
             false, os.str());
  }

  // A(vi): C-dagger over the recorded n.
  r.eigen_floor = std::numeric_limits<double>::infinity();
  for (const auto& rec : r.records) {
    double sum = 0.0;
    for (double lambda : rec.eigenvalues) sum += lambda * lambda;
    r.eigen_floor = std::min(r.eigen_floor, sum);
  }
  if (r.records.empty()) r.eigen_floor = 0.0;
  {
    std::ostringstream os;
    os << "C-dagger = " << r.eigen_floor;
    const CheckStatus st = r.eigen_floor > 0.0 ? CheckStatus::kPass : CheckStatus::kFail;
    add_flag(r, "A(vi)", perturbed ? st : CheckStatus::kNotRequired, perturbed, os.str());
  }

  check_amplitude(prob, r);
  return r;
}

namespace {

DriftFit fit_drift(std::span<const long> n, std::vector<double> values) {
  DriftFit out;
  std::vector<std::pair<long, double>> pts;
  for (size_t i = 0; i < n.size(); ++i) pts.emplace_back(n[i], values[i]);
  out.values = std::move(values);
  out.fit = fit_rate_or_exact(pts);
  out.exact = !out.fit.has_value();
  return out;
}

void check_drift_inputs(const ProblemSpec& prob, std::span<const long> n_list) {
  if (!prob.perturbed()) fail(ErrorCode::kInvalidArgument, "drift rates need s > 0 and sigma != 0");
  check_n_list(n_list);
  if (n_list.size() < 4) fail(ErrorCode::kInvalidArgument, "drift rates need at least 4 values of n");
  if (static_cast<double>(n_list.back()) < 100.0 * static_cast<double>(n_list.front())) {
    fail(ErrorCode::kInvalidArgument, "drift rates need n spanning at least two decades");
  }
}

}  // namespace

DriftRates drift_rates(const ProblemSpec& prob, const CriticalReport& report) {
  std::vector<long> n_list;
  for (const auto& rec : report.records) n_list.push_back(rec.n);
  check_drift_inputs(prob, n_list);
  const size_t d = report.eigenvalues.size();
  DriftRates out;
  out.n = n_list;
  std::vector<double> cn;
  std::vector<double> det;
  std::vector<std::vector<double>> eig(d);
  for (const auto& rec : report.records) {
    cn.push_back(distance(rec.c_n, report.c));
    det.push_back(std::abs(rec.det - report.det));
    for (size_t i = 0; i < d; ++i) eig[i].push_back(std::abs(rec.eigenvalues[i] - report.eigenvalues[i]));
  }
  out.cn = fit_drift(n_list, std::move(cn));
  out.det = fit_drift(n_list, std::move(det));
  for (size_t i = 0; i < d; ++i) out.eigen.push_back(fit_drift(n_list, std::move(eig[i])));
  return out;
}

DriftRates drift_rates(const ProblemSpec& prob, std::span<const long> n_list,
                       const VerifyOptions& opt) {
  prob.validate();
  check_drift_inputs(prob, n_list);
  const int grid = effective_grid(opt.grid_per_axis, opt.max_grid_points, prob.dim());
  Located loc = locate(prob, n_list, opt, grid);
  CriticalReport r;
  r.c = loc.c;
  r.hessian = hessian(prob.h, r.c);
  const auto eig = jacobi_eigen(r.hessian);
  r.eigenvalues = eig.eigenvalues;
  r.det = 1.0;
  for (double v : eig.eigenvalues) r.det *= v;
  r.records = std::move(loc.records);
  return drift_rates(prob, r);
}

}  // namespace laplace
