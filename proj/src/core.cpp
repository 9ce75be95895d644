#include "mvsys/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace mvsys {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("SymMatrix: input must be square");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::Identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::Zero(int n) { return SymMatrix(Matrix::Zero(n, n)); }

double SymMatrix::min_eig() const {
  if (m_.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double SymMatrix::max_eig() const {
  if (m_.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m_.rows() - 1);
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("frobenius_inner: shape mismatch");
  }
  return a.cwiseProduct(b).sum();
}

double frobenius_inner(const SymMatrix& a, const SymMatrix& b) {
  return frobenius_inner(a.mat(), b.mat());
}

double nuclear_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

double nuclear_norm(const SymMatrix& a) { return nuclear_norm(a.mat()); }

bool is_psd(const SymMatrix& a, double tol) {
  if (tol < 0) throw std::invalid_argument("is_psd: tolerance must be >= 0");
  const double thresh = std::max(tol * std::max(1.0, nuclear_norm(a)), kPsdFloor);
  return a.min_eig() >= -thresh;
}

Matrix build_F(int n) {
  if (n <= 0) throw std::invalid_argument("build_F: n must be positive");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix f = Matrix::Zero(n * n, reduced_dim(n));
  int col = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      if (i == j) {
        f(j * n + i, col) = 1.0;
      } else {
        f(j * n + i, col) = inv_sqrt2;
        f(i * n + j, col) = inv_sqrt2;
      }
      ++col;
    }
  }
  return f;
}

Vector vech_bar(const SymMatrix& x) {
  const int n = x.dim();
  const double sqrt2 = std::sqrt(2.0);
  Vector v(reduced_dim(n));
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      v(k++) = (i == j) ? x(i, j) : sqrt2 * x(i, j);
    }
  }
  return v;
}

SymMatrix unvech_bar(const Vector& v, int n) {
  if (v.size() != reduced_dim(n)) {
    throw std::invalid_argument("unvech_bar: length does not match dimension");
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Matrix x(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      if (i == j) {
        x(i, j) = v(k);
      } else {
        x(i, j) = inv_sqrt2 * v(k);
        x(j, i) = x(i, j);
      }
      ++k;
    }
  }
  return SymMatrix(x);
}

Vector vec(const Matrix& a) {
  Vector v(a.size());
  int k = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) v(k++) = a(i, j);
  }
  return v;
}

Matrix unvec(const Vector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw std::invalid_argument("unvec: length does not match shape");
  }
  Matrix a(rows, cols);
  int k = 0;
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) a(i, j) = v(k++);
  }
  return a;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace mvsys
