#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace mvsys {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Classification tolerance for stability margins. Margins inside the band are
// reported as marginal rather than forced into a stable/unstable verdict.
inline constexpr double kMarginTol = 1e-9;

// Absolute floor for the positive-semidefiniteness test. Guards exact-zero
// eigenvalues against roundoff when the caller passes tol = 0.
inline constexpr double kPsdFloor = 1e-12;

// Square matrix that is symmetric by construction: the stored value is
// (M + M^T)/2 of the input. Downstream code relies on this so symmetric
// eigensolvers are always applicable.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix Identity(int n);
  static SymMatrix Zero(int n);

  const Matrix& mat() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  double operator()(int i, int j) const { return m_(i, j); }

  // Smallest eigenvalue via the symmetric solver.
  double min_eig() const;
  double max_eig() const;

 private:
  Matrix m_;
};

// trace(a b^T); requires equal shapes.
double frobenius_inner(const Matrix& a, const Matrix& b);
double frobenius_inner(const SymMatrix& a, const SymMatrix& b);

// Sum of singular values. Equals the trace on the PSD cone.
double nuclear_norm(const Matrix& a);
double nuclear_norm(const SymMatrix& a);

// min_eig(a) >= -max(tol * max(1, ||a||_*), floor). The relative scaling keeps
// the test meaningful for badly scaled matrices; the floor absorbs roundoff on
// exactly singular inputs.
bool is_psd(const SymMatrix& a, double tol);

// Orthonormal basis of vec'd symmetric matrices: vec(X) = F * vech_bar(X),
// F^T F = I. Columns follow the column-stacked lower triangle; off-diagonal
// columns carry 1/sqrt(2) at both mirror positions.
Matrix build_F(int n);

// [X11, sqrt(2) X21, ..., sqrt(2) Xn1, X22, sqrt(2) X32, ...]^T, length
// n(n+1)/2. Isometry: <X,Y>_F = vech_bar(X).dot(vech_bar(Y)).
Vector vech_bar(const SymMatrix& x);
SymMatrix unvech_bar(const Vector& v, int n);

inline int reduced_dim(int n) { return n * (n + 1) / 2; }

// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, int rows, int cols);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace mvsys
