#include "laplace/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "laplace/error.hpp"

namespace laplace {

QuadratureRule gauss_legendre_rule(int m, double a, double b) {
  if (m < 1) fail(ErrorCode::kInvalidArgument, "Gauss-Legendre order must be at least 1");
  if (!(a < b)) fail(ErrorCode::kInvalidArgument, "Gauss-Legendre interval needs a < b");
  std::vector<double> x(static_cast<size_t>(m));
  std::vector<double> w(static_cast<size_t>(m));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  // Roots come in +-pairs; solve for the non-negative half.
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    bool done = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      // P_m'(z) = m (z P_m - P_{m-1}) / (z^2 - 1)
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) {
        done = true;
        break;
      }
    }
    if (!done && m > 1) fail(ErrorCode::kNoConvergence, "Legendre root iteration failed");
    if (m == 1) {
      z = 0.0;
      dp = 1.0;
    } else {
      // Re-evaluate the derivative at the converged root.
      double p0 = 1.0;
      double p1 = z;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
    }
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<size_t>(i);
    const auto hi = static_cast<size_t>(m - 1 - i);
    x[lo] = -z;
    x[hi] = z;
    w[lo] = weight;
    w[hi] = weight;
  }
  if (m % 2 == 1) x[static_cast<size_t>(m / 2)] = 0.0;
  QuadratureRule rule;
  rule.nodes.resize(x.size());
  rule.weights.resize(w.size());
  for (size_t i = 0; i < x.size(); ++i) {
    rule.nodes[i] = mid + half * x[i];
    rule.weights[i] = half * w[i];
  }
  return rule;
}

namespace {

constexpr double kPruneExponent = -80.0;

struct Panel {
  double a;
  double b;
};

// Panels on one axis, geometric toward the center from both sides.
std::vector<Panel> axis_panels(double lo, double hi, double center, long n, int min_levels) {
  std::vector<Panel> left;
  std::vector<Panel> right;
  const double target = 10.0 / std::sqrt(static_cast<double>(n));
  auto levels_for = [&](double len) {
    int lev = min_levels;
    while (len * std::ldexp(1.0, -lev) > target) ++lev;
    return lev;
  };
  const double len_left = center - lo;
  if (len_left > 0.0) {
    const int lev = levels_for(len_left);
    double outer = lo;
    for (int j = 1; j <= lev; ++j) {
      const double inner = center - len_left * std::ldexp(1.0, -j);
      left.push_back({outer, inner});
      outer = inner;
    }
    left.push_back({outer, center});
  }
  const double len_right = hi - center;
  if (len_right > 0.0) {
    const int lev = levels_for(len_right);
    double inner = center;
    for (int j = lev; j >= 1; --j) {
      const double outer = center + len_right * std::ldexp(1.0, -j);
      right.push_back({inner, outer});
      inner = outer;
    }
    right.push_back({inner, hi});
  }
  left.insert(left.end(), right.begin(), right.end());
  return left;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

class Integrand {
 public:
  Integrand(const ProblemSpec& prob, long n, std::span<const double> center)
      : prob_(prob),
        n_(static_cast<double>(n)),
        eps_(prob.epsilon(n)),
        h_ref_(prob.h.variable_part(center)),
        sigma_ref_(eps_ == 0.0 ? 0.0 : prob.sigma.variable_part(center)) {}

  double exponent(std::span<const double> x) const {
    double delta = prob_.h.variable_part(x) - h_ref_;
    if (eps_ != 0.0) delta += eps_ * (prob_.sigma.variable_part(x) - sigma_ref_);
    return n_ * delta;
  }

 private:
  const ProblemSpec& prob_;
  double n_;
  double eps_;
  double h_ref_;
  double sigma_ref_;
};

}  // namespace

ReferenceValue reference_integral(const ProblemSpec& prob, long n, std::span<const double> center,
                                  const QuadratureConfig& cfg) {
  const ScalarField amplitude[] = {prob.g};
  return reference_integrals(prob, n, center, amplitude, cfg).front();
}

std::vector<ReferenceValue> reference_integrals(const ProblemSpec& prob, long n, std::span<const double> center,
                                                std::span<const ScalarField> amplitudes,
                                                const QuadratureConfig& cfg) {
  prob.validate();
  if (n < 1) fail(ErrorCode::kInvalidArgument, "n must be at least 1");
  if (cfg.base_order < 2) fail(ErrorCode::kInvalidArgument, "base_order must be at least 2");
  if (!(cfg.rel_tol > 0.0)) fail(ErrorCode::kInvalidArgument, "rel_tol must be positive");
  if (cfg.refinement_levels < 0) fail(ErrorCode::kInvalidArgument, "refinement_levels must be >= 0");
  const int d = prob.dim();
  if (static_cast<int>(center.size()) != d) {
    fail(ErrorCode::kDimensionMismatch, "center dimension differs from the problem");
  }
  for (int i = 0; i < d; ++i) {
    const double ci = center[static_cast<size_t>(i)];
    if (!(ci >= prob.box[static_cast<size_t>(i)].lo && ci <= prob.box[static_cast<size_t>(i)].hi)) {
      fail(ErrorCode::kInvalidArgument, "quadrature center lies outside the box");
    }
  }
  for (const auto& g : amplitudes) {
    if (!g.valid() || g.dim() != d) fail(ErrorCode::kDimensionMismatch, "amplitude dimension differs from the problem");
  }

  const Integrand f(prob, n, center);
  std::vector<std::vector<Panel>> panels;
  for (int i = 0; i < d; ++i) {
    const auto& iv = prob.box[static_cast<size_t>(i)];
    panels.push_back(axis_panels(iv.lo, iv.hi, center[static_cast<size_t>(i)], n, cfg.refinement_levels));
  }

  // Active cells: probe corners, midpoint and the point nearest the center.
  std::vector<std::vector<int>> cells;
  {
    std::vector<int> idx(static_cast<size_t>(d), 0);
    Point probe(static_cast<size_t>(d));
    while (true) {
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < d; ++i) {
        const Panel& pn = panels[static_cast<size_t>(i)][static_cast<size_t>(idx[static_cast<size_t>(i)])];
        probe[static_cast<size_t>(i)] = std::clamp(center[static_cast<size_t>(i)], pn.a, pn.b);
      }
      best = std::max(best, f.exponent(probe));
      for (int i = 0; i < d; ++i) {
        const Panel& pn = panels[static_cast<size_t>(i)][static_cast<size_t>(idx[static_cast<size_t>(i)])];
        probe[static_cast<size_t>(i)] = 0.5 * (pn.a + pn.b);
      }
      best = std::max(best, f.exponent(probe));
      for (int corner = 0; corner < (1 << d) && best < kPruneExponent; ++corner) {
        for (int i = 0; i < d; ++i) {
          const Panel& pn = panels[static_cast<size_t>(i)][static_cast<size_t>(idx[static_cast<size_t>(i)])];
          probe[static_cast<size_t>(i)] = (corner >> i) & 1 ? pn.b : pn.a;
        }
        best = std::max(best, f.exponent(probe));
      }
      if (best >= kPruneExponent) cells.push_back(idx);
      int i = 0;
      for (; i < d; ++i) {
        if (++idx[static_cast<size_t>(i)] < static_cast<int>(panels[static_cast<size_t>(i)].size())) break;
        idx[static_cast<size_t>(i)] = 0;
      }
      if (i == d) break;
    }
  }

  const size_t count = amplitudes.size();
  std::vector<ReferenceValue> out(count);
  for (auto& v : out) v.log_scale = static_cast<double>(n) * prob.phase(center, n);
  std::vector<size_t> live;  // amplitudes that are not identically zero
  for (size_t j = 0; j < count; ++j) {
    if (amplitudes[j].is_zero()) {
      out[j].converged = true;
    } else {
      live.push_back(j);
    }
  }
  if (live.empty()) return out;

  std::vector<double> previous(count, 0.0);
  bool have_previous = false;
  for (int order = cfg.base_order; order <= 1024; order *= 2) {
    const double per_cell = std::pow(static_cast<double>(order), d);
    const double total = per_cell * static_cast<double>(cells.size());
    if (total > static_cast<double>(cfg.max_total_nodes)) {
      if (!have_previous) {
        fail(ErrorCode::kNoConvergence,
             "quadrature node budget too small for the first round (" + std::to_string(total) + " nodes)");
      }
      break;
    }

    // Rules per axis and panel for this order.
    std::vector<std::vector<QuadratureRule>> rules(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
      for (const Panel& pn : panels[static_cast<size_t>(i)]) {
        rules[static_cast<size_t>(i)].push_back(gauss_legendre_rule(order, pn.a, pn.b));
      }
    }

    // Per amplitude: signed and absolute cell sums.
    std::vector<std::vector<double>> cell_sums(count);
    std::vector<std::vector<double>> cell_mass(count);
    std::vector<std::vector<double>> node_terms(count);
    std::vector<std::vector<double>> node_mass(count);
    for (size_t j : live) {
      cell_sums[j].reserve(cells.size());
      cell_mass[j].reserve(cells.size());
      node_terms[j].reserve(static_cast<size_t>(per_cell));
      node_mass[j].reserve(static_cast<size_t>(per_cell));
    }
    Point x(static_cast<size_t>(d));
    std::vector<int> k(static_cast<size_t>(d));
    for (const auto& cell : cells) {
      for (size_t j : live) {
        node_terms[j].clear();
        node_mass[j].clear();
      }
      std::fill(k.begin(), k.end(), 0);
      while (true) {
        double w = 1.0;
        for (int i = 0; i < d; ++i) {
          const QuadratureRule& r = rules[static_cast<size_t>(i)][static_cast<size_t>(cell[static_cast<size_t>(i)])];
          x[static_cast<size_t>(i)] = r.nodes[static_cast<size_t>(k[static_cast<size_t>(i)])];
          w *= r.weights[static_cast<size_t>(k[static_cast<size_t>(i)])];
        }
        const double weight = w * std::exp(f.exponent(x));
        for (size_t j : live) {
          const double term = weight * amplitudes[j](x);
          node_terms[j].push_back(term);
          node_mass[j].push_back(std::abs(term));
        }
        int i = 0;
        for (; i < d; ++i) {
          if (++k[static_cast<size_t>(i)] < order) break;
          k[static_cast<size_t>(i)] = 0;
        }
        if (i == d) break;
      }
      for (size_t j : live) {
        cell_sums[j].push_back(pairwise_sum(node_terms[j]));
        cell_mass[j].push_back(pairwise_sum(node_mass[j]));
      }
    }

    bool all_converged = have_previous;
    for (size_t j : live) {
      const double value = pairwise_sum(cell_sums[j]);
      // Tolerance relative to the integral of |integrand| so that amplitudes
      // with cancelling signs can still converge.
      const double mass = pairwise_sum(cell_mass[j]);
      ReferenceValue& r = out[j];
      r.mantissa = value;
      r.nodes = static_cast<long long>(total);
      r.order = order;
      if (have_previous) {
        r.est_error = std::abs(value - previous[j]);
        r.converged = r.est_error <= cfg.rel_tol * mass;
        all_converged = all_converged && r.converged;
      }
      previous[j] = value;
    }
    if (all_converged) return out;
    have_previous = true;
  }
  return out;
}

}  // namespace laplace
