#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvsys/lift.hpp"
#include "mvsys/simulate.hpp"

#include <cmath>
#include <vector>

using namespace mvsys;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

Matrix random_matrix(SplitMix64& rng, int r, int c) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = 2.0 * rng.uniform() - 1.0;
  }
  return m;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("diffusion-with-jumps closure folds rates into a decay term") {
  StochasticSpec s;
  s.kind = StochKind::CtSdePoisson;
  s.n = 1;
  s.a0 = m1(-1.0);
  s.brownian = {m1(0.5)};
  s.poisson = {{m1(2.0), 0.3}};
  const auto lifted = lift_ct_sde_poisson(s);
  REQUIRE(lifted.is_ct());
  const auto& g = lifted.ct();
  CHECK(g.n == 1);
  CHECK(g.mu(0.0) == doctest::Approx(-0.3).epsilon(1e-15));
  REQUIRE(g.noise.size() == 2);
  CHECK(g.noise[1](0.0)(0, 0) == doctest::Approx(std::sqrt(0.3) * 2.0).epsilon(1e-15));
  // scalar moment rate: 2a + b^2 + rate*(m^2 - 1)
  const double rate = 2.0 * (-1.0) + 0.25 + 0.3 * (4.0 - 1.0);
  const auto spec = spectrum_ct(g);
  CHECK(spec.margin == doctest::Approx(rate).epsilon(1e-12));
  CHECK_FALSE(lifted.structure.has_value());
  CHECK_FALSE(lifted.provenance.empty());
}

TEST_CASE("geometric diffusion moment rate is 2a plus sigma squared") {
  StochasticSpec s;
  s.kind = StochKind::CtSdePoisson;
  s.n = 1;
  s.a0 = m1(0.5);
  s.brownian = {m1(1.0)};
  const auto lifted = lift_any(s);
  CHECK(spectrum_ct(lifted.ct()).margin == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("chain-modulated flow reproduces the coupled moment equations") {
  // two scalar modes, symmetric unit switching: d/dt [X1;X2] =
  // [[2a1-1, 1], [1, 2a2-1]] [X1;X2]
  StochasticSpec s;
  s.kind = StochKind::CtMarkovJump;
  s.n = 1;
  s.modes.push_back({m1(-2.0), {}});
  s.modes.push_back({m1(0.25), {}});
  s.rate_matrix = Matrix(2, 2);
  s.rate_matrix << -1.0, 1.0, 1.0, -1.0;
  const auto lifted = lift_ct_markov(s);
  REQUIRE(lifted.is_ct());
  REQUIRE(lifted.structure.has_value());
  CHECK(lifted.structure->modes == 2);
  CHECK(lifted.structure->block == 1);

  Matrix e1 = Matrix::Zero(2, 2);
  e1(0, 0) = 1.0;
  Matrix e2 = Matrix::Zero(2, 2);
  e2(1, 1) = 1.0;
  const auto c1 = apply_ct(lifted.ct(), SymMatrix(e1), 0.0);
  const auto c2 = apply_ct(lifted.ct(), SymMatrix(e2), 0.0);
  CHECK(c1(0, 0) == doctest::Approx(2.0 * (-2.0) - 1.0).epsilon(1e-14));
  CHECK(c1(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c2(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c2(1, 1) == doctest::Approx(2.0 * 0.25 - 1.0).epsilon(1e-14));
}

TEST_CASE("chain-modulated flow with matrix modes and asymmetric rates") {
  SplitMix64 rng(7);
  const int n = 2;
  StochasticSpec s;
  s.kind = StochKind::CtMarkovJump;
  s.n = n;
  s.modes.push_back({random_matrix(rng, n, n), {random_matrix(rng, n, n)}});
  s.modes.push_back({random_matrix(rng, n, n), {random_matrix(rng, n, n)}});
  s.rate_matrix = Matrix(2, 2);
  s.rate_matrix << -2.0, 2.0, 0.5, -0.5;
  const auto lifted = lift_ct_markov(s);

  std::vector<Matrix> x(2);
  for (int i = 0; i < 2; ++i) {
    const Matrix r = random_matrix(rng, n, n);
    x[i] = r * r.transpose();
  }
  Matrix big = Matrix::Zero(2 * n, 2 * n);
  big.block(0, 0, n, n) = x[0];
  big.block(n, n, n, n) = x[1];
  const auto out = apply_ct(lifted.ct(), SymMatrix(big), 0.0);

  for (int i = 0; i < 2; ++i) {
    const auto& mode = s.modes[i];
    Matrix expect = mode.a0 * x[i] + x[i] * mode.a0.transpose() +
                    mode.brownian[0] * x[i] * mode.brownian[0].transpose() +
                    s.rate_matrix(i, i) * x[i];
    const int j = 1 - i;
    expect += s.rate_matrix(j, i) * x[j];
    CHECK(max_abs(out.mat().block(i * n, i * n, n, n) - expect) < 1e-12);
  }
}

TEST_CASE("random-parameter step closure matches branch enumeration") {
  // rademacher parameter, one channel, two steps: 4 equally likely branches
  StochasticSpec s;
  s.kind = StochKind::DtRandomParam;
  s.n = 2;
  SplitMix64 rng(11);
  s.a0 = random_matrix(rng, 2, 2);
  s.dt_noise = {random_matrix(rng, 2, 2)};
  const auto lifted = lift_dt_random(s);
  REQUIRE(lifted.is_dt());
  REQUIRE(lifted.dt().jumps.size() == 2);

  const Matrix r = random_matrix(rng, 2, 2);
  const Matrix x0 = r * r.transpose();
  Matrix expect = Matrix::Zero(2, 2);
  for (int b0 = -1; b0 <= 1; b0 += 2) {
    for (int b1 = -1; b1 <= 1; b1 += 2) {
      const Matrix step0 = s.a0 + b0 * s.dt_noise[0];
      const Matrix step1 = s.a0 + b1 * s.dt_noise[0];
      const Matrix x2 = step1 * step0 * x0 * step0.transpose() * step1.transpose();
      expect += 0.25 * x2;
    }
  }
  const auto traj = iterate_dt(lifted.dt(), SymMatrix(x0), 0, 2);
  CHECK(max_abs(traj.states.back().mat() - expect) < 1e-12);
}

TEST_CASE("bernoulli-parameter step closure matches branch enumeration") {
  StochasticSpec s;
  s.kind = StochKind::DtRandomParam;
  s.n = 2;
  s.bernoulli = true;
  SplitMix64 rng(13);
  s.a0 = random_matrix(rng, 2, 2);
  s.dt_noise = {random_matrix(rng, 2, 2), random_matrix(rng, 2, 2)};
  s.p = {0.3, 0.8};
  const auto lifted = lift_dt_random(s);
  REQUIRE(lifted.dt().jumps.size() == 3);

  const Matrix r = random_matrix(rng, 2, 2);
  const Matrix x0 = r * r.transpose();
  Matrix expect = Matrix::Zero(2, 2);
  for (int c0 = 0; c0 <= 1; ++c0) {
    for (int c1 = 0; c1 <= 1; ++c1) {
      const double w = (c0 ? 0.3 : 0.7) * (c1 ? 0.8 : 0.2);
      const Matrix step = s.a0 + c0 * s.dt_noise[0] + c1 * s.dt_noise[1];
      expect += w * step * x0 * step.transpose();
    }
  }
  const auto one = apply_dt(lifted.dt(), SymMatrix(x0), 0.0);
  CHECK(max_abs(one.mat() - expect) < 1e-12);

  s.p = {0.3};
  CHECK_THROWS_AS(lift_dt_random(s), std::invalid_argument);
  s.p = {0.3, 1.5};
  CHECK_THROWS_AS(lift_dt_random(s), std::invalid_argument);
}

TEST_CASE("chain-modulated steps match exhaustive path enumeration") {
  StochasticSpec s;
  s.kind = StochKind::DtMarkovJump;
  s.n = 2;
  SplitMix64 rng(17);
  s.modes.push_back({random_matrix(rng, 2, 2), {random_matrix(rng, 2, 2)}});
  s.modes.push_back({random_matrix(rng, 2, 2), {}});
  s.trans_matrix = Matrix(2, 2);
  s.trans_matrix << 0.7, 0.3, 0.2, 0.8;
  s.initial_dist = {0.6, 0.4};
  s.x0 = Vector(2);
  s.x0 << 1.0, -0.5;
  const auto lifted = lift_dt_markov(s);
  REQUIRE(lifted.is_dt());
  REQUIRE(lifted.structure.has_value());

  // indicator moments: X_i(k+1) = sum_j P(j,i) [A_j X_j A_j^T + B_j X_j B_j^T]
  const Matrix xx = s.x0 * s.x0.transpose();
  std::vector<Matrix> x = {0.6 * xx, 0.4 * xx};
  for (int step = 0; step < 2; ++step) {
    std::vector<Matrix> nx(2, Matrix::Zero(2, 2));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        Matrix term = s.modes[j].a0 * x[j] * s.modes[j].a0.transpose();
        for (const Matrix& b : s.modes[j].brownian) term += b * x[j] * b.transpose();
        nx[i] += s.trans_matrix(j, i) * term;
      }
    }
    x = nx;
  }

  const auto x0_lift = lift_initial_state(s);
  CHECK(max_abs(x0_lift.mat().block(0, 0, 2, 2) - 0.6 * xx) < 1e-15);
  CHECK(max_abs(x0_lift.mat().block(2, 2, 2, 2) - 0.4 * xx) < 1e-15);
  const auto traj = iterate_dt(lifted.dt(), x0_lift, 0, 2);
  CHECK(max_abs(traj.states.back().mat().block(0, 0, 2, 2) - x[0]) < 1e-12);
  CHECK(max_abs(traj.states.back().mat().block(2, 2, 2, 2) - x[1]) < 1e-12);
}

TEST_CASE("held-input augmentation wires the sampler as a jump channel") {
  StochasticSpec s;
  s.kind = StochKind::CtSampledPoisson;
  s.n = 1;
  s.m = 1;
  s.a0 = m1(1.0);
  s.b0 = m1(1.0);
  s.k1 = m1(-3.0);
  s.k2 = m1(0.0);
  s.sample_rate = 40.0;
  s.brownian = {m1(0.2)};
  s.brownian_b = {m1(0.1)};
  const auto lifted = lift_sampled_poisson(s);
  REQUIRE(lifted.is_ct());
  const auto& g = lifted.ct();
  CHECK(g.n == 2);
  Matrix drift(2, 2);
  drift << 1.0, 1.0, 0.0, 0.0;
  CHECK(max_abs(g.a0(0.0) - drift) == 0.0);
  REQUIRE(g.noise.size() == 2);
  Matrix bch(2, 2);
  bch << 0.2, 0.1, 0.0, 0.0;
  CHECK(max_abs(g.noise[0](0.0) - bch) == 0.0);
  Matrix sampler(2, 2);
  sampler << 1.0, 0.0, -3.0, 0.0;
  CHECK(max_abs(g.noise[1](0.0) - std::sqrt(40.0) * sampler) < 1e-14);
  CHECK(g.mu(0.0) == doctest::Approx(-40.0).epsilon(1e-15));

  // fast sampling approximates the stable continuous closed loop
  CHECK(spectrum_ct(g).verdict == Verdict::Stable);
  s.sample_rate = 0.05;
  CHECK_FALSE(spectrum_ct(lift_sampled_poisson(s).ct()).verdict == Verdict::Stable);
}

TEST_CASE("impulsive diffusion keeps its jump channels verbatim") {
  StochasticSpec s;
  s.kind = StochKind::HybridSdeImpulses;
  s.n = 2;
  SplitMix64 rng(19);
  s.a0 = random_matrix(rng, 2, 2);
  s.brownian = {random_matrix(rng, 2, 2)};
  s.jump.j0 = random_matrix(rng, 2, 2);
  s.jump.jn = {random_matrix(rng, 2, 2)};
  s.impulses.kind = ImpulseSchedule::Kind::Periodic;
  s.impulses.period = 0.5;
  const auto lifted = lift_hybrid(s);
  REQUIRE(lifted.is_hybrid());
  const auto& h = lifted.hybrid();
  CHECK(h.impulses.kind == ImpulseSchedule::Kind::Periodic);
  CHECK(h.impulses.period == 0.5);
  REQUIRE(h.jump.jumps.size() == 2);

  const Matrix r = random_matrix(rng, 2, 2);
  const Matrix x = r * r.transpose();
  const Matrix expect = s.jump.j0 * x * s.jump.j0.transpose() +
                        s.jump.jn[0] * x * s.jump.jn[0].transpose();
  CHECK(max_abs(apply_dt(h.jump, SymMatrix(x), 0.0).mat() - expect) < 1e-13);
}

TEST_CASE("switched sequences become piecewise schedules with identity jumps") {
  StochasticSpec s;
  s.kind = StochKind::HybridSwitched;
  s.n = 1;
  s.t0 = 0.0;
  s.modes.push_back({m1(-1.0), {}});
  s.modes.push_back({m1(2.0), {}});
  s.sequence = {0, 1, 0};
  s.impulses.kind = ImpulseSchedule::Kind::Explicit;
  s.impulses.times = {1.0, 2.5};
  const auto lifted = lift_hybrid(s);
  const auto& h = lifted.hybrid();
  CHECK(h.flow.a0(0.5)(0, 0) == -1.0);
  CHECK(h.flow.a0(1.5)(0, 0) == 2.0);
  CHECK(h.flow.a0(3.0)(0, 0) == -1.0);
  CHECK(max_abs(h.jump.jumps[0](0.0) - Matrix::Identity(1, 1)) == 0.0);

  s.sequence = {0, 1};
  CHECK_THROWS_AS(lift_hybrid(s), std::invalid_argument);
  s.sequence = {0, 1, 0};
  s.impulses.kind = ImpulseSchedule::Kind::Periodic;
  s.impulses.period = 1.0;
  CHECK_THROWS_AS(lift_hybrid(s), std::invalid_argument);
}

TEST_CASE("deterministic sampling becomes a periodic sampler jump") {
  StochasticSpec s;
  s.kind = StochKind::HybridSampled;
  s.n = 1;
  s.m = 1;
  s.a0 = m1(1.0);
  s.b0 = m1(1.0);
  s.k1 = m1(-3.0);
  s.k2 = m1(0.0);
  s.impulses.kind = ImpulseSchedule::Kind::Periodic;
  s.impulses.period = 0.05;
  const auto lifted = lift_hybrid(s);
  const auto& h = lifted.hybrid();
  CHECK(h.flow.n == 2);
  Matrix sampler(2, 2);
  sampler << 1.0, 0.0, -3.0, 0.0;
  CHECK(max_abs(h.jump.jumps[0](0.0) - sampler) == 0.0);
  // fast periodic sampling stabilizes the loop; the period map confirms it
  const auto report = check_hybrid_dwell(h, 0.05, DwellMode::Constant);
  CHECK(report.verdict == Verdict::Stable);
}

TEST_CASE("transient-mode chain folds impulses into flow channels") {
  // two continuous modes, one transient; hand-computed coupled ODE matrix
  StochasticSpec s;
  s.kind = StochKind::HybridMarkovImpulsive;
  s.n = 1;
  s.modes.push_back({m1(-1.0), {}});
  s.modes.push_back({m1(-2.0), {}});
  s.disc_modes.push_back({m1(0.8), {m1(0.3)}});
  s.rate_matrix = Matrix(2, 3);
  s.rate_matrix << -3.0, 1.0, 2.0, 1.0, -1.0, 0.0;
  s.trans_matrix = Matrix(1, 3);
  s.trans_matrix << 0.5, 0.5, 0.0;
  const auto lifted = lift_hybrid(s);
  REQUIRE(lifted.is_hybrid());
  REQUIRE(lifted.structure.has_value());
  const auto& h = lifted.hybrid();

  // d/dt X0 = (2a0 + l00 + r*p*(j0^2+jn^2)) X0 + l10 X1, impulse weight 2*0.5*0.73
  const double imp = 0.8 * 0.8 + 0.3 * 0.3;
  Matrix e0 = Matrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  Matrix e1 = Matrix::Zero(2, 2);
  e1(1, 1) = 1.0;
  const auto c0 = apply_ct(h.flow, SymMatrix(e0), 0.0);
  const auto c1 = apply_ct(h.flow, SymMatrix(e1), 0.0);
  CHECK(c0(0, 0) == doctest::Approx(-2.0 - 3.0 + 2.0 * 0.5 * imp).epsilon(1e-13));
  CHECK(c0(1, 1) == doctest::Approx(1.0 + 2.0 * 0.5 * imp).epsilon(1e-13));
  CHECK(c1(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(c1(1, 1) == doctest::Approx(-4.0 - 1.0).epsilon(1e-13));

  // transient modes must not feed other transient modes
  s.trans_matrix << 0.5, 0.25, 0.25;
  CHECK_THROWS_AS(lift_hybrid(s), std::invalid_argument);
}

TEST_CASE("initial moment layouts follow the lift") {
  StochasticSpec s;
  s.kind = StochKind::CtSdePoisson;
  s.n = 2;
  s.a0 = Matrix::Identity(2, 2);
  s.x0 = Vector(2);
  s.x0 << 1.0, 2.0;
  const auto plain = lift_initial_state(s);
  CHECK(plain(0, 0) == 1.0);
  CHECK(plain(0, 1) == 2.0);
  CHECK(plain(1, 1) == 4.0);

  s.kind = StochKind::CtSampledPoisson;
  s.m = 1;
  const auto aug = lift_initial_state(s);
  REQUIRE(aug.dim() == 3);
  CHECK(aug(2, 2) == 0.0);  // default held input is zero
  s.u0 = Vector(1);
  s.u0 << 3.0;
  const auto aug2 = lift_initial_state(s);
  CHECK(aug2(2, 2) == 9.0);
  CHECK(aug2(0, 2) == 3.0);

  s.kind = StochKind::CtSdePoisson;
  s.x0 = Vector(1);
  CHECK_THROWS_AS(lift_initial_state(s), std::invalid_argument);
}

TEST_CASE("malformed chain matrices are rejected") {
  StochasticSpec s;
  s.kind = StochKind::CtMarkovJump;
  s.n = 1;
  s.modes.push_back({m1(-1.0), {}});
  s.modes.push_back({m1(-1.0), {}});
  s.rate_matrix = Matrix(2, 2);
  s.rate_matrix << -1.0, 1.0, -0.5, 0.5;  // negative off-diagonal
  CHECK_THROWS_AS(lift_ct_markov(s), std::invalid_argument);
  s.rate_matrix << -1.0, 2.0, 1.0, -1.0;  // row does not sum to zero
  CHECK_THROWS_AS(lift_ct_markov(s), std::invalid_argument);

  StochasticSpec d;
  d.kind = StochKind::DtMarkovJump;
  d.n = 1;
  d.modes.push_back({m1(0.5), {}});
  d.modes.push_back({m1(0.5), {}});
  d.trans_matrix = Matrix(2, 2);
  d.trans_matrix << 0.7, 0.4, 0.2, 0.8;  // row sums to 1.1
  CHECK_THROWS_AS(lift_dt_markov(d), std::invalid_argument);
  d.trans_matrix << 0.7, 0.3, 0.2, 0.8;
  d.initial_dist = {0.5, 0.6};
  CHECK_THROWS_AS(lift_initial_state(d), std::invalid_argument);
}

TEST_CASE("kind names are stable snake case") {
  CHECK(std::string(to_string(StochKind::CtSdePoisson)) == "ct_sde_poisson");
  CHECK(std::string(to_string(StochKind::DtMarkovJump)) == "dt_markov_jump");
  CHECK(std::string(to_string(StochKind::HybridMarkovImpulsive)) == "hybrid_markov_impulsive");
}
