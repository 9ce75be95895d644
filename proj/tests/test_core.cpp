#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvsys/core.hpp"
#include "mvsys/rng.hpp"

#include <cmath>
#include <vector>

using namespace mvsys;

namespace {

Matrix random_matrix(SplitMix64& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = 2.0 * rng.uniform() - 1.0;
  }
  return m;
}

SymMatrix random_sym(SplitMix64& rng, int n) { return SymMatrix(random_matrix(rng, n, n)); }

}  // namespace

TEST_CASE("SymMatrix symmetrizes its input") {
  Matrix m(2, 2);
  m << 1.0, 4.0, 2.0, 3.0;
  const SymMatrix s(m);
  CHECK(s(0, 1) == doctest::Approx(3.0));
  CHECK(s(1, 0) == doctest::Approx(3.0));
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s.mat().isApprox(s.mat().transpose()));
  CHECK_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("eigenvalue bounds match hand-computed spectrum") {
  // [[2,1],[1,2]] has eigenvalues 1 and 3
  Matrix m(2, 2);
  m << 2.0, 1.0, 1.0, 2.0;
  const SymMatrix s(m);
  CHECK(s.min_eig() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.max_eig() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("frobenius inner product") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  CHECK(frobenius_inner(a, b) == doctest::Approx(5.0 + 12.0 + 21.0 + 32.0));
  CHECK_THROWS_AS(frobenius_inner(a, Matrix::Zero(3, 2)), std::invalid_argument);
}

TEST_CASE("nuclear norm equals singular value sum") {
  Matrix m(2, 2);
  m << 3, 0, 4, 0;  // singular values 5, 0
  CHECK(nuclear_norm(m) == doctest::Approx(5.0).epsilon(1e-12));
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << -2.0, 1.0, 0.5;
  CHECK(nuclear_norm(d) == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("psd test honors floor and relative tolerance") {
  CHECK(is_psd(SymMatrix::Identity(3), 0.0));
  Matrix tiny = Matrix::Identity(2, 2);
  tiny(1, 1) = -1e-13;  // within the absolute floor
  CHECK(is_psd(SymMatrix(tiny), 0.0));
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1e-6;
  CHECK_FALSE(is_psd(SymMatrix(bad), 1e-9));
}

TEST_CASE("F basis is an isometry onto vec'd symmetric matrices") {
  SplitMix64 rng(7);
  for (int n : {1, 2, 3, 5}) {
    const Matrix f = build_F(n);
    CHECK(f.rows() == n * n);
    CHECK(f.cols() == reduced_dim(n));
    CHECK((f.transpose() * f - Matrix::Identity(f.cols(), f.cols())).cwiseAbs().maxCoeff() <
          1e-14);
    for (int rep = 0; rep < 5; ++rep) {
      const SymMatrix x = random_sym(rng, n);
      const Vector direct = vec(x.mat());
      const Vector via = f * vech_bar(x);
      CHECK((direct - via).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("vech_bar preserves the Frobenius inner product") {
  SplitMix64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix x = random_sym(rng, 4);
    const SymMatrix y = random_sym(rng, 4);
    CHECK(frobenius_inner(x, y) ==
          doctest::Approx(vech_bar(x).dot(vech_bar(y))).epsilon(1e-12));
    const SymMatrix back = unvech_bar(vech_bar(x), 4);
    CHECK((back.mat() - x.mat()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("vec/kron obey the product identity") {
  SplitMix64 rng(13);
  // vec(A X B) = (B^T (x) A) vec(X)
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_matrix(rng, 3, 2);
    const Matrix x = random_matrix(rng, 2, 4);
    const Matrix b = random_matrix(rng, 4, 3);
    const Vector lhs = vec(a * x * b);
    const Vector rhs = kron(b.transpose(), a) * vec(x);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
  }
  const Matrix m = unvec(vec(random_matrix(rng, 3, 5)), 3, 5);
  CHECK(m.rows() == 3);
  CHECK(m.cols() == 5);
}

TEST_CASE("kron small example by hand") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 0, 1, 1, 0;
  const Matrix k = kron(a, b);
  REQUIRE(k.rows() == 4);
  Matrix expect(4, 4);
  expect << 0, 1, 0, 2,  //
      1, 0, 2, 0,        //
      0, 3, 0, 4,        //
      3, 0, 4, 0;
  CHECK((k - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rng streams are deterministic and substreams decorrelate") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  SplitMix64 s1 = SplitMix64::substream(42, 1);
  SplitMix64 s2 = SplitMix64::substream(42, 2);
  CHECK(s1.next_u64() != s2.next_u64());
  SplitMix64 s1b = SplitMix64::substream(42, 1);
  SplitMix64 s1c = SplitMix64::substream(42, 1);
  CHECK(s1b.next_u64() == s1c.next_u64());
}

TEST_CASE("rng marginals look right at fixed seed") {
  SplitMix64 rng(2024);
  const int n = 200000;
  double usum = 0.0, nsum = 0.0, n2sum = 0.0, esum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    usum += u;
    const double g = rng.normal();
    nsum += g;
    n2sum += g * g;
    esum += rng.exponential(2.0);
  }
  CHECK(usum / n == doctest::Approx(0.5).epsilon(5e-3));
  CHECK(std::fabs(nsum / n) < 0.01);
  CHECK(n2sum / n == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(esum / n == doctest::Approx(0.5).epsilon(1e-2));
  CHECK_THROWS_AS(rng.exponential(0.0), std::invalid_argument);
}

TEST_CASE("categorical respects the weights") {
  SplitMix64 rng(5);
  std::vector<double> w = {1.0, 3.0};
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const int k = rng.categorical(w);
    REQUIRE(k >= 0);
    REQUIRE(k < 2);
    hits += k;
  }
  CHECK(static_cast<double>(hits) / n == doctest::Approx(0.75).epsilon(1e-2));
}
