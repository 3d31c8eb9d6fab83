#pragma once

#include <span>
#include <vector>

namespace laplace {

// Dense symmetric d x d matrix, row-major storage. Entries are symmetrized
// on construction so that (i, j) and (j, i) are bit-identical.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim);
  SymMatrix(int dim, std::vector<double> row_major);

  static SymMatrix identity(int dim);
  static SymMatrix diagonal(std::span<const double> diag);

  int dim() const noexcept { return dim_; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i * dim_ + j)]; }
  // Writes both (i, j) and (j, i).
  void set(int i, int j, double value);
  std::span<const double> data() const noexcept { return a_; }

  SymMatrix operator+(const SymMatrix& other) const;
  SymMatrix operator-(const SymMatrix& other) const;
  SymMatrix operator*(double scale) const;

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> basis;        // row-major d x d, column j is eigenvector j

  int dim() const noexcept { return static_cast<int>(eigenvalues.size()); }
  double basis_at(int row, int col) const {
    return basis[static_cast<size_t>(row * dim() + col)];
  }
};

struct WeylGap {
  double gap = 0.0;    // max_i |lambda_i(A) - lambda_i(B)|, ascending pairing
  double bound = 0.0;  // hs_norm(A - B)
};

/// Cyclic Jacobi rotations until the off-diagonal Hilbert-Schmidt mass drops
/// below 1e-13 * hs_norm(A). Throws kNoConvergence after 30 d^2 sweeps.
EigenDecomposition jacobi_eigen(const SymMatrix& a);

/// Product of the Jacobi eigenvalues.
double determinant(const SymMatrix& a);

/// Transposed matrix of signed cofactors. Defined for singular input too.
SymMatrix adjugate(const SymMatrix& a);

double hs_norm(const SymMatrix& a);

WeylGap weyl_gap(const SymMatrix& a, const SymMatrix& b);

/// True iff the largest eigenvalue is below -tol.
bool is_negative_definite(const SymMatrix& a, double tol);

/// Inverse through the eigendecomposition. Throws kDegenerate when singular.
SymMatrix inverse(const SymMatrix& a);

std::vector<double> multiply(const SymMatrix& a, std::span<const double> v);

// Determinant of a general row-major n x n matrix by partially pivoted LU.
double lu_determinant(std::vector<double> m, int n);

}  // namespace laplace
