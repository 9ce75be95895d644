#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvsys/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace mvsys;

namespace {

Matrix random_matrix(SplitMix64& rng, int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = 2.0 * rng.uniform() - 1.0;
  }
  return m;
}

SymMatrix random_sym(SplitMix64& rng, int n) { return SymMatrix(random_matrix(rng, n)); }

ContinuousGenerator scalar_ct(double a, double b, double mu = 0.0) {
  ContinuousGenerator g;
  g.n = 1;
  g.a0 = MatrixSchedule::constant(Matrix::Constant(1, 1, a));
  if (b != 0.0) g.noise.push_back(MatrixSchedule::constant(Matrix::Constant(1, 1, b)));
  g.mu = ScalarSchedule::constant(mu);
  return g;
}

DiscreteGenerator scalar_dt(std::vector<double> js) {
  DiscreteGenerator g;
  g.n = 1;
  for (double j : js) g.jumps.push_back(MatrixSchedule::constant(Matrix::Constant(1, 1, j)));
  return g;
}

// Two scalar modes coupled by a symmetric unit-rate chain, lifted by hand:
// drift blockdiag(a1 - 1/2, a2 - 1/2) plus the swap channel [[0,1],[1,0]].
ContinuousGenerator two_mode_lift(double a1, double a2) {
  ContinuousGenerator g;
  g.n = 2;
  Matrix drift = Matrix::Zero(2, 2);
  drift(0, 0) = a1 - 0.5;
  drift(1, 1) = a2 - 0.5;
  g.a0 = MatrixSchedule::constant(drift);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  g.noise.push_back(MatrixSchedule::constant(swap));
  return g;
}

}  // namespace

TEST_CASE("reduced matrices represent the operators in coordinates") {
  SplitMix64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    ContinuousGenerator g;
    g.n = n;
    g.a0 = MatrixSchedule::constant(random_matrix(rng, n));
    const int nch = static_cast<int>(rng.next_u64() % 3);
    for (int i = 0; i < nch; ++i) {
      g.noise.push_back(MatrixSchedule::constant(random_matrix(rng, n)));
    }
    g.mu = ScalarSchedule::constant(2.0 * rng.uniform() - 1.0);

    const Matrix mc = build_mc(g, 0.0);
    const SymMatrix x = random_sym(rng, n);
    const Vector via = mc * vech_bar(x);
    const Vector direct = vech_bar(apply_ct(g, x, 0.0));
    CHECK((via - direct).cwiseAbs().maxCoeff() < 1e-12);

    // independent construction through the vec/kron calculus
    const Matrix f = build_F(n);
    const Matrix eye = Matrix::Identity(n, n);
    Matrix big = kron(eye, g.a0(0.0)) + kron(g.a0(0.0), eye) +
                 g.mu(0.0) * Matrix::Identity(n * n, n * n);
    for (const auto& ch : g.noise) big += kron(ch(0.0), ch(0.0));
    CHECK((mc - f.transpose() * big * f).cwiseAbs().maxCoeff() < 1e-12);

    CHECK((build_mc_adjoint(g, 0.0) - mc.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Vector adj = build_mc_adjoint(g, 0.0) * vech_bar(x);
    CHECK((adj - vech_bar(apply_ct_adjoint(g, x, 0.0))).cwiseAbs().maxCoeff() < 1e-12);

    DiscreteGenerator d;
    d.n = n;
    for (int i = 0; i < 1 + static_cast<int>(rng.next_u64() % 2); ++i) {
      d.jumps.push_back(MatrixSchedule::constant(random_matrix(rng, n)));
    }
    const Matrix md = build_md(d, 0.0);
    CHECK((md * vech_bar(x) - vech_bar(apply_dt(d, x, 0.0))).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((build_md_adjoint(d, 0.0) - md.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("scalar spectra in closed form") {
  // flow margin 2a + b^2 + mu
  const auto sp = spectrum_ct(scalar_ct(-1.0, 0.5, 0.25));
  CHECK(sp.margin == doctest::Approx(-2.0 + 0.25 + 0.25).epsilon(1e-12));
  CHECK(sp.verdict == Verdict::Stable);

  const auto sp2 = spectrum_ct(scalar_ct(0.1, 1.0));
  CHECK(sp2.margin == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(sp2.verdict == Verdict::Unstable);

  // step factor j1^2 + j2^2
  const auto sd = spectrum_dt(scalar_dt({0.6, 0.5}));
  CHECK(sd.margin == doctest::Approx(0.36 + 0.25 - 1.0).epsilon(1e-12));
  CHECK(sd.verdict == Verdict::Stable);
  CHECK(spectrum_dt(scalar_dt({1.1})).verdict == Verdict::Unstable);

  // marginal: 2a + b^2 = 0
  CHECK(spectrum_ct(scalar_ct(-0.5, 1.0)).verdict == Verdict::Marginal);
}

TEST_CASE("diagonal drift spectrum enumerates pair sums") {
  ContinuousGenerator g;
  g.n = 2;
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -3.0;
  g.a0 = MatrixSchedule::constant(a);
  const auto sp = spectrum_ct(g);
  // eigenvalues {2 a1, a1 + a2, 2 a2} = {-2, -4, -6}
  std::vector<double> got;
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
    CHECK(std::fabs(sp.eigenvalues(i).imag()) < 1e-12);
    got.push_back(sp.eigenvalues(i).real());
  }
  std::sort(got.begin(), got.end());
  REQUIRE(got.size() == 3);
  CHECK(got[0] == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(got[1] == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(got[2] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(sp.margin == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("time-varying coefficients are rejected by the spectral path") {
  ContinuousGenerator g;
  g.n = 1;
  g.a0 = MatrixSchedule::linear({0.0, 1.0}, {Matrix::Constant(1, 1, -1.0), Matrix::Constant(1, 1, -2.0)});
  CHECK_THROWS_AS(spectrum_ct(g), std::invalid_argument);
}

TEST_CASE("scalar Lyapunov and Stein solves in closed form") {
  // 2aP + b^2 P = -1  =>  P = 1/(3) for a=-2, b=1
  const auto cert = solve_lyapunov_ct(scalar_ct(-2.0, 1.0), SymMatrix::Identity(1));
  CHECK(cert.solver_ok);
  CHECK(cert.p(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(cert.residual < 1e-12);
  CHECK(cert.valid());

  // sum j^2 P - P = -1  =>  P = 1/(1 - 0.61)
  const auto sd = solve_stein_dt(scalar_dt({0.6, 0.5}), SymMatrix::Identity(1));
  CHECK(sd.solver_ok);
  CHECK(sd.p(0, 0) == doctest::Approx(1.0 / 0.39).epsilon(1e-12));
  CHECK(sd.valid());

  // unstable flow gives a negative "certificate", rejected
  const auto bad = solve_lyapunov_ct(scalar_ct(0.1, 1.0), SymMatrix::Identity(1));
  CHECK_FALSE(bad.valid());

  // marginal flow: reduced matrix singular
  const auto sing = solve_lyapunov_ct(scalar_ct(-0.5, 1.0), SymMatrix::Identity(1));
  CHECK_FALSE(sing.solver_ok);
  CHECK_FALSE(sing.valid());
}

TEST_CASE("spectral and certificate verdicts agree off the margin") {
  SplitMix64 rng(17);
  int checked = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    ContinuousGenerator g;
    g.n = n;
    Matrix a = random_matrix(rng, n);
    a -= (rng.uniform() < 0.5 ? 2.5 : 0.0) * Matrix::Identity(n, n);
    g.a0 = MatrixSchedule::constant(a);
    if (rng.uniform() < 0.7) g.noise.push_back(MatrixSchedule::constant(random_matrix(rng, n)));

    const auto sp = spectrum_ct(g);
    if (std::fabs(sp.margin) <= 1e-6) continue;
    ++checked;
    const auto cert = solve_lyapunov_ct(g, SymMatrix::Identity(n));
    CHECK((sp.verdict == Verdict::Stable) == cert.valid());
    if (cert.solver_ok) CHECK(cert.residual <= 1e-9 * std::max(1.0, nuclear_norm(cert.p)));
  }
  CHECK(checked >= 20);
}

TEST_CASE("delay independence certificate has the documented margins") {
  // a = -2, delayed channel b = 1: P = 1/3, eps = 1/2 with one channel
  ContinuousGenerator g = scalar_ct(-2.0, 0.0);
  DelayTerms d;
  DelayTerm t;
  t.matrix = MatrixSchedule::constant(Matrix::Constant(1, 1, 1.0));
  t.delay = 3.0;
  d.terms.push_back(t);

  const auto rep = check_delay_independent_ct(g, d);
  CHECK(rep.certified);
  CHECK(rep.spectrum.verdict == Verdict::Stable);
  CHECK(rep.spectrum.margin == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(rep.epsilon == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.p(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rep.flow_margin == doctest::Approx(0.5).epsilon(1e-9));
  REQUIRE(rep.channel_margins.size() == 1);
  CHECK(rep.channel_margins[0] == doctest::Approx(0.5).epsilon(1e-9));
  // margins never fall below eps/2 on certified systems
  CHECK(rep.flow_margin >= rep.epsilon / 2.0 - 1e-12);
  CHECK(rep.channel_margins[0] >= rep.epsilon / 2.0 - 1e-12);

  // unstable sum: not certified
  ContinuousGenerator bad = scalar_ct(0.1, 0.0);
  const auto rb = check_delay_independent_ct(bad, d);
  CHECK_FALSE(rb.certified);
  CHECK(rb.spectrum.verdict == Verdict::Unstable);
}

TEST_CASE("delay independence in discrete time") {
  DiscreteGenerator g = scalar_dt({0.5});
  DelayTerms d;
  DelayTerm t;
  t.matrix = MatrixSchedule::constant(Matrix::Constant(1, 1, 0.5));
  t.delay = 4.0;
  d.terms.push_back(t);
  // summed step factor 0.25 + 0.25 = 0.5 < 1
  const auto rep = check_delay_independent_dt(g, d);
  CHECK(rep.certified);
  CHECK(rep.spectrum.margin == doctest::Approx(-0.5).epsilon(1e-12));

  DiscreteGenerator bad = scalar_dt({0.9});
  const auto rb = check_delay_independent_dt(bad, d);
  CHECK(rb.spectrum.margin == doctest::Approx(0.81 + 0.25 - 1.0).epsilon(1e-12));
  CHECK_FALSE(rb.certified);
}

TEST_CASE("coupled mode solve agrees with the hand-built two-mode flow") {
  // indicator moments obey d/dt [X1;X2] = [[2a1-1, 1],[1, 2a2-1]] [X1;X2]
  BlockStructure st{2, 1};

  const auto stable = check_markov_ct(two_mode_lift(-1.0, -0.25), st);
  Matrix h(2, 2);
  h << -3.0, 1.0, 1.0, -1.5;
  CHECK(h.eigenvalues().real().maxCoeff() < 0);
  CHECK(stable.verdict == Verdict::Stable);
  CHECK(stable.solver_ok);
  CHECK(stable.p_min_eig > 0);
  CHECK(stable.residual < 1e-9);
  REQUIRE(stable.p.size() == 2);

  const auto unstable = check_markov_ct(two_mode_lift(0.5, -0.25), st);
  Matrix hu(2, 2);
  hu << 0.0, 1.0, 1.0, -1.5;
  CHECK(hu.eigenvalues().real().maxCoeff() > 0);
  CHECK(unstable.verdict == Verdict::Unstable);
}

TEST_CASE("coupled solve rejects lifts that leak across blocks") {
  ContinuousGenerator g;
  g.n = 2;
  g.a0 = MatrixSchedule::constant(Matrix::Identity(2, 2));
  g.noise.push_back(MatrixSchedule::constant(Matrix::Ones(2, 2)));  // not a mode shuffle
  CHECK_THROWS_AS(check_markov_ct(g, BlockStructure{2, 1}), std::invalid_argument);
}

TEST_CASE("dwell factor in closed form for the scalar hybrid") {
  HybridGenerator h;
  h.flow.n = 1;
  h.flow.a0 = MatrixSchedule::constant(Matrix::Constant(1, 1, 1.0));
  h.jump.n = 1;
  h.jump.jumps.push_back(MatrixSchedule::constant(Matrix::Constant(1, 1, 0.5)));

  // factor = 0.25 e^{2 T}
  const auto stable = check_hybrid_dwell(h, 0.5, DwellMode::Constant);
  CHECK(stable.factor == doctest::Approx(0.25 * std::exp(1.0)).epsilon(1e-12));
  CHECK(stable.verdict == Verdict::Stable);
  CHECK_FALSE(stable.flow_hurwitz);
  CHECK(stable.flow_margin == doctest::Approx(2.0).epsilon(1e-12));

  const auto unstable = check_hybrid_dwell(h, 0.75, DwellMode::Constant);
  CHECK(unstable.factor == doctest::Approx(0.25 * std::exp(1.5)).epsilon(1e-12));
  CHECK(unstable.verdict == Verdict::Unstable);

  // minimum-dwell semantics require the flow itself to be contracting
  const auto min_mode = check_hybrid_dwell(h, 0.5, DwellMode::Minimum);
  CHECK(min_mode.verdict == Verdict::Unstable);

  HybridGenerator calm = h;
  calm.flow.a0 = MatrixSchedule::constant(Matrix::Constant(1, 1, -0.1));
  const auto calm_rep = check_hybrid_dwell(calm, 0.5, DwellMode::Minimum);
  CHECK(calm_rep.flow_hurwitz);
  CHECK(calm_rep.verdict == Verdict::Stable);
}
