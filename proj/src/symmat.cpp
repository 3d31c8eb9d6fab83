#include "laplace/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "laplace/error.hpp"

namespace laplace {

namespace {

void require_same_dim(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "matrix dimensions differ: " + std::to_string(a.dim()) + " vs " +
             std::to_string(b.dim()));
  }
}

}  // namespace

SymMatrix::SymMatrix(int dim) : dim_(dim) {
  if (dim < 0) fail(ErrorCode::kInvalidArgument, "negative matrix dimension");
  a_.assign(static_cast<size_t>(dim * dim), 0.0);
}

SymMatrix::SymMatrix(int dim, std::vector<double> row_major)
    : dim_(dim), a_(std::move(row_major)) {
  if (dim < 0 || a_.size() != static_cast<size_t>(dim * dim)) {
    fail(ErrorCode::kDimensionMismatch, "matrix data does not match dimension");
  }
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      double& upper = a_[static_cast<size_t>(i * dim_ + j)];
      double& lower = a_[static_cast<size_t>(j * dim_ + i)];
      if (!std::isfinite(upper) || !std::isfinite(lower)) {
        fail(ErrorCode::kInvalidArgument, "matrix entries must be finite");
      }
      const double mean = 0.5 * (upper + lower);
      upper = mean;
      lower = mean;
    }
  }
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(static_cast<int>(diag.size()));
  for (int i = 0; i < m.dim(); ++i) m.set(i, i, diag[static_cast<size_t>(i)]);
  return m;
}

void SymMatrix::set(int i, int j, double value) {
  a_[static_cast<size_t>(i * dim_ + j)] = value;
  a_[static_cast<size_t>(j * dim_ + i)] = value;
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
  require_same_dim(*this, other);
  SymMatrix out = *this;
  for (size_t i = 0; i < a_.size(); ++i) out.a_[i] += other.a_[i];
  return out;
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
  require_same_dim(*this, other);
  SymMatrix out = *this;
  for (size_t i = 0; i < a_.size(); ++i) out.a_[i] -= other.a_[i];
  return out;
}

SymMatrix SymMatrix::operator*(double scale) const {
  SymMatrix out = *this;
  for (double& v : out.a_) v *= scale;
  return out;
}

double hs_norm(const SymMatrix& a) {
  double sum = 0.0;
  for (double v : a.data()) sum += v * v;
  return std::sqrt(sum);
}

EigenDecomposition jacobi_eigen(const SymMatrix& input) {
  const int d = input.dim();
  std::vector<double> a(input.data().begin(), input.data().end());
  std::vector<double> v(static_cast<size_t>(d * d), 0.0);
  for (int i = 0; i < d; ++i) v[static_cast<size_t>(i * d + i)] = 1.0;
  auto at = [d](std::vector<double>& m, int i, int j) -> double& {
    return m[static_cast<size_t>(i * d + j)];
  };

  const double threshold = 1e-13 * hs_norm(input);
  auto off_mass = [&] {
    double sum = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j) sum += at(a, i, j) * at(a, i, j);
    return std::sqrt(sum);
  };

  const int max_sweeps = std::max(1, 30 * d * d);
  int sweep = 0;
  while (off_mass() > threshold) {
    if (++sweep > max_sweeps) {
      fail(ErrorCode::kNoConvergence, "Jacobi eigensolver did not converge");
    }
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double app = at(a, p, p);
        const double aqq = at(a, q, q);
        // Rotation angle zeroing a(p, q); stable tangent formula.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < d; ++r) {
          const double arp = at(a, r, p);
          const double arq = at(a, r, q);
          at(a, r, p) = c * arp - s * arq;
          at(a, r, q) = s * arp + c * arq;
        }
        for (int r = 0; r < d; ++r) {
          const double apr = at(a, p, r);
          const double aqr = at(a, q, r);
          at(a, p, r) = c * apr - s * aqr;
          at(a, q, r) = s * apr + c * aqr;
        }
        at(a, p, q) = 0.0;
        at(a, q, p) = 0.0;
        for (int r = 0; r < d; ++r) {
          const double vrp = at(v, r, p);
          const double vrq = at(v, r, q);
          at(v, r, p) = c * vrp - s * vrq;
          at(v, r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<int> order(static_cast<size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return at(a, x, x) < at(a, y, y); });

  EigenDecomposition out;
  out.eigenvalues.resize(static_cast<size_t>(d));
  out.basis.resize(static_cast<size_t>(d * d));
  for (int col = 0; col < d; ++col) {
    const int src = order[static_cast<size_t>(col)];
    out.eigenvalues[static_cast<size_t>(col)] = at(a, src, src);
    for (int row = 0; row < d; ++row) {
      out.basis[static_cast<size_t>(row * d + col)] = at(v, row, src);
    }
  }
  return out;
}

double determinant(const SymMatrix& a) {
  const EigenDecomposition eig = jacobi_eigen(a);
  double det = 1.0;
  for (double lambda : eig.eigenvalues) det *= lambda;
  return det;
}

double lu_determinant(std::vector<double> m, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(m[static_cast<size_t>(r * n + col)]) >
          std::abs(m[static_cast<size_t>(pivot * n + col)])) {
        pivot = r;
      }
    }
    const double pv = m[static_cast<size_t>(pivot * n + col)];
    if (pv == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(m[static_cast<size_t>(pivot * n + c)], m[static_cast<size_t>(col * n + c)]);
      }
      det = -det;
    }
    det *= pv;
    for (int r = col + 1; r < n; ++r) {
      const double factor = m[static_cast<size_t>(r * n + col)] / pv;
      for (int c = col; c < n; ++c) {
        m[static_cast<size_t>(r * n + c)] -= factor * m[static_cast<size_t>(col * n + c)];
      }
    }
  }
  return det;
}

SymMatrix adjugate(const SymMatrix& a) {
  const int d = a.dim();
  SymMatrix adj(d);
  if (d == 1) {
    adj.set(0, 0, 1.0);
    return adj;
  }
  std::vector<double> minor(static_cast<size_t>((d - 1) * (d - 1)));
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      // Cofactor C_ij; adj(A)_ji = C_ij, and adj is symmetric for symmetric A.
      size_t k = 0;
      for (int r = 0; r < d; ++r) {
        if (r == i) continue;
        for (int c = 0; c < d; ++c) {
          if (c == j) continue;
          minor[k++] = a(r, c);
        }
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj.set(i, j, sign * lu_determinant(minor, d - 1));
    }
  }
  return adj;
}

WeylGap weyl_gap(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b);
  const auto ea = jacobi_eigen(a);
  const auto eb = jacobi_eigen(b);
  WeylGap out;
  for (size_t i = 0; i < ea.eigenvalues.size(); ++i) {
    out.gap = std::max(out.gap, std::abs(ea.eigenvalues[i] - eb.eigenvalues[i]));
  }
  out.bound = hs_norm(a - b);
  return out;
}

bool is_negative_definite(const SymMatrix& a, double tol) {
  if (a.dim() == 0) return false;
  return jacobi_eigen(a).eigenvalues.back() < -tol;
}

SymMatrix inverse(const SymMatrix& a) {
  const int d = a.dim();
  const auto eig = jacobi_eigen(a);
  SymMatrix inv(d);
  for (double lambda : eig.eigenvalues) {
    if (lambda == 0.0) fail(ErrorCode::kDegenerate, "matrix is singular");
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double sum = 0.0;
      for (int m = 0; m < d; ++m) {
        sum += eig.basis_at(i, m) * eig.basis_at(j, m) / eig.eigenvalues[static_cast<size_t>(m)];
      }
      inv.set(i, j, sum);
    }
  }
  return inv;
}

std::vector<double> multiply(const SymMatrix& a, std::span<const double> v) {
  if (static_cast<int>(v.size()) != a.dim()) {
    fail(ErrorCode::kDimensionMismatch, "vector length does not match matrix");
  }
  std::vector<double> out(v.size(), 0.0);
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) out[static_cast<size_t>(i)] += a(i, j) * v[static_cast<size_t>(j)];
  }
  return out;
}

}  // namespace laplace
