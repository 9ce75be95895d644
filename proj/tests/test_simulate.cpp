#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvsys/simulate.hpp"

#include <cmath>

using namespace mvsys;

namespace {

ContinuousGenerator scalar_ct(double a, double b = 0.0) {
  ContinuousGenerator g;
  g.n = 1;
  g.a0 = MatrixSchedule::constant(Matrix::Constant(1, 1, a));
  if (b != 0.0) g.noise.push_back(MatrixSchedule::constant(Matrix::Constant(1, 1, b)));
  return g;
}

Matrix random_matrix(SplitMix64& rng, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = 2.0 * rng.uniform() - 1.0;
  }
  return m;
}

HybridGenerator benchmark_hybrid(double dwell) {
  HybridGenerator h;
  h.flow.n = 1;
  h.flow.a0 = MatrixSchedule::constant(Matrix::Constant(1, 1, -1.0));
  h.jump.n = 1;
  h.jump.jumps.push_back(MatrixSchedule::constant(Matrix::Constant(1, 1, 2.0)));
  h.impulses.kind = ImpulseSchedule::Kind::Periodic;
  h.impulses.period = dwell;
  return h;
}

}  // namespace

TEST_CASE("scalar moment flow reproduces the exponential") {
  const auto traj = integrate_ct(scalar_ct(-1.0), SymMatrix::Identity(1), 0.0, 1.0, 1e-3);
  CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(traj.states.back()(0, 0) - std::exp(-2.0)) < 1e-8);
  CHECK_FALSE(traj.truncated);
}

TEST_CASE("step halving shrinks the error at fourth order") {
  const double exact = std::exp(-2.0);
  const auto coarse = integrate_ct(scalar_ct(-1.0), SymMatrix::Identity(1), 0.0, 1.0, 0.02);
  const auto fine = integrate_ct(scalar_ct(-1.0), SymMatrix::Identity(1), 0.0, 1.0, 0.01);
  const double e1 = std::fabs(coarse.states.back()(0, 0) - exact);
  const double e2 = std::fabs(fine.states.back()(0, 0) - exact);
  REQUIRE(e2 > 0.0);
  const double ratio = e1 / e2;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("diagonal noise-free flow matches the similarity solution") {
  // X(t) = e^{At} X0 e^{A^T t}: entries scale by e^{(ai+aj) t}
  ContinuousGenerator g;
  g.n = 2;
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -0.5;
  a(1, 1) = -1.5;
  g.a0 = MatrixSchedule::constant(a);
  Matrix x0(2, 2);
  x0 << 2.0, 0.5, 0.5, 1.0;
  const auto traj = integrate_ct(g, SymMatrix(x0), 0.0, 2.0, 1e-3);
  const auto& xf = traj.states.back();
  CHECK(xf(0, 0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-9));
  CHECK(xf(0, 1) == doctest::Approx(0.5 * std::exp(-4.0)).epsilon(1e-9));
  CHECK(xf(1, 1) == doctest::Approx(1.0 * std::exp(-6.0)).epsilon(1e-9));
}

TEST_CASE("integration lands exactly on the horizon") {
  const auto traj = integrate_ct(scalar_ct(-1.0), SymMatrix::Identity(1), 0.0, 1.0, 0.3);
  CHECK(traj.times.back() == 1.0);
  // ceil(1.0/0.3) = 4 steps; traj.dt keeps the requested step
  CHECK(traj.times.size() == 5);
  CHECK(traj.dt == 0.3);
  CHECK(traj.times[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("positive semidefiniteness survives integration") {
  SplitMix64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 2);
    ContinuousGenerator g;
    g.n = n;
    g.a0 = MatrixSchedule::constant(random_matrix(rng, n));
    if (rng.uniform() < 0.5) g.noise.push_back(MatrixSchedule::constant(random_matrix(rng, n)));
    const Matrix r = random_matrix(rng, n);
    const SymMatrix x0(r * r.transpose());
    const auto traj = integrate_ct(g, x0, 0.0, 1.0, 5e-3);
    for (const auto& x : traj.states) {
      CHECK(x.min_eig() >= -1e-9 * std::max(1.0, nuclear_norm(x)));
    }
  }
}

TEST_CASE("discrete iteration is exactly geometric") {
  DiscreteGenerator g;
  g.n = 1;
  g.jumps.push_back(MatrixSchedule::constant(Matrix::Constant(1, 1, 0.9)));
  const auto traj = iterate_dt(g, SymMatrix::Identity(1), 0, 20);
  REQUIRE(traj.times.size() == 21);
  double expect = 1.0;
  for (size_t k = 0; k < traj.states.size(); ++k) {
    CHECK(traj.states[k](0, 0) == doctest::Approx(expect).epsilon(1e-15));
    expect *= 0.81;
  }
}

TEST_CASE("delayed scalar flow matches the first-interval closed form") {
  // x' = -2x + 0.25 x(t-1), constant unit history:
  // x(t) = 0.125 + 0.875 e^{-2t} on [0,1]
  ContinuousGenerator g = scalar_ct(-1.0);
  DelayTerms d;
  DelayTerm t;
  t.matrix = MatrixSchedule::constant(Matrix::Constant(1, 1, 0.5));
  t.delay = 1.0;
  d.terms.push_back(t);
  std::vector<std::pair<double, SymMatrix>> history = {{-1.0, SymMatrix::Identity(1)},
                                                       {0.0, SymMatrix::Identity(1)}};
  const auto traj = integrate_ct_delay(g, d, history, 0.0, 1.0, 1e-3);
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const double tt = traj.times[i];
    const double closed = 0.125 + 0.875 * std::exp(-2.0 * tt);
    CHECK(std::fabs(traj.states[i](0, 0) - closed) < 1e-8);
  }

  // beyond the first interval the solution keeps decaying toward 0
  const auto longer = integrate_ct_delay(g, d, history, 0.0, 6.0, 1e-3);
  CHECK(longer.states.back()(0, 0) < 0.2);
  CHECK(longer.states.back()(0, 0) > 0.0);
}

TEST_CASE("delay integration rejects bad setups") {
  ContinuousGenerator g = scalar_ct(-1.0);
  DelayTerms d;
  DelayTerm t;
  t.matrix = MatrixSchedule::constant(Matrix::Constant(1, 1, 0.5));
  t.delay = 0.5;
  d.terms.push_back(t);
  std::vector<std::pair<double, SymMatrix>> history = {{-0.5, SymMatrix::Identity(1)},
                                                       {0.0, SymMatrix::Identity(1)}};
  // dt larger than the smallest positive delay
  CHECK_THROWS_AS(integrate_ct_delay(g, d, history, 0.0, 1.0, 0.7), std::invalid_argument);
  // history not reaching back far enough
  std::vector<std::pair<double, SymMatrix>> shallow = {{-0.1, SymMatrix::Identity(1)},
                                                       {0.0, SymMatrix::Identity(1)}};
  CHECK_THROWS_AS(integrate_ct_delay(g, d, shallow, 0.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("zero-delay channel equals an instantaneous noise channel") {
  ContinuousGenerator with_noise = scalar_ct(-1.0, 0.5);
  ContinuousGenerator bare = scalar_ct(-1.0);
  DelayTerms d;
  DelayTerm t;
  t.matrix = MatrixSchedule::constant(Matrix::Constant(1, 1, 0.5));
  t.delay = 0.0;
  d.terms.push_back(t);
  std::vector<std::pair<double, SymMatrix>> history = {{0.0, SymMatrix::Identity(1)}};
  const auto a = integrate_ct(with_noise, SymMatrix::Identity(1), 0.0, 1.0, 1e-3);
  const auto b = integrate_ct_delay(bare, d, history, 0.0, 1.0, 1e-3);
  REQUIRE(a.times.size() == b.times.size());
  for (size_t i = 0; i < a.times.size(); ++i) {
    CHECK(std::fabs(a.states[i](0, 0) - b.states[i](0, 0)) < 1e-10);
  }
}

TEST_CASE("hybrid benchmark contracts by the period factor") {
  const double dwell = 1.0;
  const double factor = 4.0 * std::exp(-2.0 * dwell);
  const auto traj = simulate_hybrid(benchmark_hybrid(dwell), SymMatrix::Identity(1), 0.0, 3.0, 1e-3);
  REQUIRE(traj.jumps.size() == 3);
  // post-jump values at t = 1, 2 are factor^k
  CHECK(std::fabs(traj.at_right(1.0)(0, 0) - factor) < 1e-6);
  CHECK(std::fabs(traj.at_right(2.0)(0, 0) - factor * factor) < 1e-6);
  // pre-jump at t=1 is e^{-2}
  CHECK(std::fabs(traj.at(1.0)(0, 0) - std::exp(-2.0)) < 1e-6);
  // jump bookkeeping: four times the pre value
  CHECK(traj.jumps[0].post(0, 0) == doctest::Approx(4.0 * traj.jumps[0].pre(0, 0)).epsilon(1e-12));
}

TEST_CASE("decay estimation recovers rate and jump factor") {
  const auto smooth = integrate_ct(scalar_ct(-1.0), SymMatrix::Identity(1), 0.0, 5.0, 1e-2);
  const auto est = estimate_decay(smooth);
  CHECK(est.alpha_hat == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(est.r_squared > 0.999);

  const auto hyb = simulate_hybrid(benchmark_hybrid(1.0), SymMatrix::Identity(1), 0.0, 6.0, 1e-3);
  const auto he = estimate_decay(hyb);
  CHECK(he.alpha_hat == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(he.rho_hat == doctest::Approx(4.0).epsilon(1e-4));
}

TEST_CASE("randomized dwell schedules replay under the same seed") {
  HybridGenerator h = benchmark_hybrid(1.0);
  h.impulses.kind = ImpulseSchedule::Kind::Range;
  h.impulses.tmin = 0.2;
  h.impulses.tmax = 0.6;
  const auto a = simulate_hybrid(h, SymMatrix::Identity(1), 0.0, 3.0, 1e-3, 99);
  const auto b = simulate_hybrid(h, SymMatrix::Identity(1), 0.0, 3.0, 1e-3, 99);
  REQUIRE(a.times.size() == b.times.size());
  for (size_t i = 0; i < a.times.size(); ++i) {
    CHECK(a.times[i] == b.times[i]);
    CHECK(a.states[i](0, 0) == b.states[i](0, 0));
  }
  const auto c = simulate_hybrid(h, SymMatrix::Identity(1), 0.0, 3.0, 1e-3, 100);
  bool differs = c.jumps.size() != a.jumps.size();
  if (!differs && !a.jumps.empty()) differs = c.jumps[0].t != a.jumps[0].t;
  CHECK(differs);
}

TEST_CASE("explosive flow truncates with a diagnostic") {
  const auto traj = integrate_ct(scalar_ct(30.0), SymMatrix::Identity(1), 0.0, 30.0, 1e-2);
  CHECK(traj.truncated);
  CHECK_FALSE(traj.diagnostic.empty());
  CHECK(traj.times.back() < 30.0);
}
