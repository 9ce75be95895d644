#include "mvsys/lift.hpp"

#include <cmath>

namespace mvsys {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_square(const Matrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument(std::string(what) + ": wrong shape");
  }
}

// Continuous-time chain generator: off-diagonal rates >= 0, rows sum to 0.
void check_rate_matrix(const Matrix& lam, int rows, int cols) {
  require(lam.rows() == rows && lam.cols() == cols, "rate matrix: wrong shape");
  for (int i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      if (j != i) require(lam(i, j) >= 0, "rate matrix: negative off-diagonal rate");
      sum += lam(i, j);
    }
    require(std::fabs(sum) <= 1e-9 * std::max(1.0, lam.cwiseAbs().maxCoeff()),
            "rate matrix: rows must sum to zero");
  }
}

void check_stochastic_matrix(const Matrix& pi, int rows, int cols) {
  require(pi.rows() == rows && pi.cols() == cols, "transition matrix: wrong shape");
  for (int i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      require(pi(i, j) >= 0, "transition matrix: negative entry");
      sum += pi(i, j);
    }
    require(std::fabs(sum - 1.0) <= 1e-9, "transition matrix: rows must sum to one");
  }
}

std::vector<double> mode_distribution(const StochasticSpec& s, int modes) {
  if (s.initial_dist.empty()) {
    std::vector<double> d(modes, 0.0);
    d[0] = 1.0;
    return d;
  }
  require(static_cast<int>(s.initial_dist.size()) == modes,
          "initial_dist: size must match mode count");
  double sum = 0.0;
  for (double w : s.initial_dist) {
    require(w >= 0, "initial_dist: negative weight");
    sum += w;
  }
  require(std::fabs(sum - 1.0) <= 1e-9, "initial_dist: must sum to one");
  return s.initial_dist;
}

// Cyclic selection channel for mode-indicator lifts: entries sqrt(rate(c->r))
// placed at (r, c) with r = c - shift (mod modes).
Matrix shift_channel(const Matrix& rates, int modes, int shift, int block) {
  Matrix c = Matrix::Zero(modes, modes);
  for (int col = 0; col < modes; ++col) {
    const int row = ((col - shift) % modes + modes) % modes;
    c(row, col) = std::sqrt(rates(col, row));
  }
  return kron(c, Matrix::Identity(block, block));
}

Matrix augmented_drift(const Matrix& a, const Matrix& b, int n, int m) {
  Matrix out = Matrix::Zero(n + m, n + m);
  out.topLeftCorner(n, n) = a;
  out.topRightCorner(n, m) = b;
  return out;
}

// Held-input update [[I,0],[K1,K2]] on the augmented state (x, u).
Matrix sampler_jump(const Matrix& k1, const Matrix& k2, int n, int m) {
  Matrix j = Matrix::Zero(n + m, n + m);
  j.topLeftCorner(n, n) = Matrix::Identity(n, n);
  j.bottomLeftCorner(m, n) = k1;
  j.bottomRightCorner(m, m) = k2;
  return j;
}

ContinuousGenerator make_ct(int n, Matrix a0, std::vector<Matrix> noise, double mu) {
  ContinuousGenerator g;
  g.n = n;
  g.a0 = MatrixSchedule::constant(std::move(a0));
  for (auto& m : noise) g.noise.push_back(MatrixSchedule::constant(std::move(m)));
  g.mu = ScalarSchedule::constant(mu);
  g.validate();
  return g;
}

DiscreteGenerator make_dt(int n, std::vector<Matrix> jumps) {
  DiscreteGenerator g;
  g.n = n;
  for (auto& m : jumps) g.jumps.push_back(MatrixSchedule::constant(std::move(m)));
  g.validate();
  return g;
}

}  // namespace

const char* to_string(StochKind k) {
  switch (k) {
    case StochKind::CtSdePoisson: return "ct_sde_poisson";
    case StochKind::CtMarkovJump: return "ct_markov_jump";
    case StochKind::CtSampledPoisson: return "ct_sampled_poisson";
    case StochKind::DtRandomParam: return "dt_random_param";
    case StochKind::DtMarkovJump: return "dt_markov_jump";
    case StochKind::HybridSdeImpulses: return "hybrid_sde_impulses";
    case StochKind::HybridSwitched: return "hybrid_switched";
    case StochKind::HybridSampled: return "hybrid_sampled";
    case StochKind::HybridMarkovImpulsive: return "hybrid_markov_impulsive";
  }
  return "?";
}

const ContinuousGenerator& LiftedSystem::ct() const {
  if (!is_ct()) throw std::logic_error("LiftedSystem: not a continuous lift");
  return std::get<ContinuousGenerator>(body);
}

const DiscreteGenerator& LiftedSystem::dt() const {
  if (!is_dt()) throw std::logic_error("LiftedSystem: not a discrete lift");
  return std::get<DiscreteGenerator>(body);
}

const HybridGenerator& LiftedSystem::hybrid() const {
  if (!is_hybrid()) throw std::logic_error("LiftedSystem: not a hybrid lift");
  return std::get<HybridGenerator>(body);
}

int LiftedSystem::dim() const {
  if (is_ct()) return ct().n;
  if (is_dt()) return dt().n;
  return hybrid().flow.n;
}

LiftedSystem lift_ct_sde_poisson(const StochasticSpec& s) {
  require(s.n > 0, "lift: n must be positive");
  check_square(s.a0, s.n, "drift");
  std::vector<Matrix> noise = s.brownian;
  for (const Matrix& b : noise) check_square(b, s.n, "brownian channel");
  double rate_sum = 0.0;
  for (const auto& term : s.poisson) {
    check_square(term.map, s.n, "jump map");
    require(term.rate >= 0, "lift: negative jump rate");
    // compensated jump channel: sqrt(rate) M, rate folded into mu below
    noise.push_back(std::sqrt(term.rate) * term.map);
    rate_sum += term.rate;
  }
  LiftedSystem out;
  out.body = make_ct(s.n, s.a0, std::move(noise), -rate_sum);
  out.provenance = "second-moment closure: " + std::to_string(s.brownian.size()) +
                   " diffusion channel(s), " + std::to_string(s.poisson.size()) +
                   " jump channel(s) folded with mu = -total rate";
  return out;
}

LiftedSystem lift_ct_markov(const StochasticSpec& s) {
  const int mcount = static_cast<int>(s.modes.size());
  require(s.n > 0 && mcount > 0, "lift: need n > 0 and at least one mode");
  check_rate_matrix(s.rate_matrix, mcount, mcount);

  size_t nb = 0;
  for (const auto& mode : s.modes) {
    check_square(mode.a0, s.n, "mode drift");
    for (const Matrix& b : mode.brownian) check_square(b, s.n, "mode brownian");
    nb = std::max(nb, mode.brownian.size());
  }

  const int nn = s.n * mcount;
  Matrix drift = Matrix::Zero(nn, nn);
  for (int i = 0; i < mcount; ++i) {
    drift.block(i * s.n, i * s.n, s.n, s.n) =
        s.modes[i].a0 + 0.5 * s.rate_matrix(i, i) * Matrix::Identity(s.n, s.n);
  }

  std::vector<Matrix> noise;
  // per-mode diffusion, block-diagonal per channel index
  for (size_t ch = 0; ch < nb; ++ch) {
    Matrix b = Matrix::Zero(nn, nn);
    for (int i = 0; i < mcount; ++i) {
      if (ch < s.modes[i].brownian.size()) {
        b.block(i * s.n, i * s.n, s.n, s.n) = s.modes[i].brownian[ch];
      }
    }
    noise.push_back(std::move(b));
  }
  // chain transitions as cyclic sqrt-rate channels
  for (int shift = 1; shift < mcount; ++shift) {
    noise.push_back(shift_channel(s.rate_matrix, mcount, shift, s.n));
  }

  LiftedSystem out;
  out.body = make_ct(nn, std::move(drift), std::move(noise), 0.0);
  out.structure = BlockStructure{mcount, s.n};
  out.provenance = "mode-indicator second moments: block " + std::to_string(s.n) + " x " +
                   std::to_string(mcount) + " modes, chain rates as sqrt-weighted channels";
  return out;
}

LiftedSystem lift_dt_random(const StochasticSpec& s) {
  require(s.n > 0, "lift: n must be positive");
  check_square(s.a0, s.n, "step map");
  for (const Matrix& a : s.dt_noise) check_square(a, s.n, "noise map");

  std::vector<Matrix> jumps;
  std::string note;
  if (!s.bernoulli) {
    // zero-mean unit-variance parameters: channels enter verbatim
    jumps.push_back(s.a0);
    for (const Matrix& a : s.dt_noise) jumps.push_back(a);
    note = "zero-mean unit-variance parameters, channels kept verbatim";
  } else {
    require(s.p.size() == s.dt_noise.size(), "lift: p size must match noise channels");
    Matrix mean = s.a0;
    for (size_t i = 0; i < s.dt_noise.size(); ++i) {
      require(s.p[i] >= 0 && s.p[i] <= 1, "lift: bernoulli p outside [0,1]");
      mean += s.p[i] * s.dt_noise[i];
    }
    jumps.push_back(mean);
    for (size_t i = 0; i < s.dt_noise.size(); ++i) {
      jumps.push_back(std::sqrt(s.p[i] * (1.0 - s.p[i])) * s.dt_noise[i]);
    }
    note = "bernoulli parameters: mean map plus sqrt(p(1-p))-scaled channels";
  }

  LiftedSystem out;
  out.body = make_dt(s.n, std::move(jumps));
  out.provenance = "second-moment closure: " + note;
  return out;
}

LiftedSystem lift_dt_markov(const StochasticSpec& s) {
  const int mcount = static_cast<int>(s.modes.size());
  require(s.n > 0 && mcount > 0, "lift: need n > 0 and at least one mode");
  check_stochastic_matrix(s.trans_matrix, mcount, mcount);
  size_t nb = 0;
  for (const auto& mode : s.modes) {
    check_square(mode.a0, s.n, "mode step map");
    for (const Matrix& b : mode.brownian) check_square(b, s.n, "mode noise");
    nb = std::max(nb, mode.brownian.size());
  }

  const int nn = s.n * mcount;
  std::vector<Matrix> jumps;
  // sqrt-probability selection channels, one per cyclic shift, applied to the
  // mode map and to each noise channel
  for (int shift = 0; shift < mcount; ++shift) {
    Matrix a = Matrix::Zero(nn, nn);
    for (int col = 0; col < mcount; ++col) {
      const int row = ((col - shift) % mcount + mcount) % mcount;
      a.block(row * s.n, col * s.n, s.n, s.n) =
          std::sqrt(s.trans_matrix(col, row)) * s.modes[col].a0;
    }
    jumps.push_back(std::move(a));
    for (size_t ch = 0; ch < nb; ++ch) {
      Matrix b = Matrix::Zero(nn, nn);
      bool nonzero = false;
      for (int col = 0; col < mcount; ++col) {
        if (ch >= s.modes[col].brownian.size()) continue;
        const int row = ((col - shift) % mcount + mcount) % mcount;
        b.block(row * s.n, col * s.n, s.n, s.n) =
            std::sqrt(s.trans_matrix(col, row)) * s.modes[col].brownian[ch];
        nonzero = true;
      }
      if (nonzero) jumps.push_back(std::move(b));
    }
  }

  LiftedSystem out;
  out.body = make_dt(nn, std::move(jumps));
  out.structure = BlockStructure{mcount, s.n};
  out.provenance = "mode-indicator second moments: sqrt-probability selection channels";
  return out;
}

LiftedSystem lift_sampled_poisson(const StochasticSpec& s) {
  require(s.n > 0 && s.m > 0, "lift: sampled kinds need n > 0 and m > 0");
  require(s.sample_rate > 0, "lift: sample rate must be > 0");
  check_square(s.a0, s.n, "plant drift");
  require(s.b0.rows() == s.n && s.b0.cols() == s.m, "lift: b0 must be n x m");
  require(s.k1.rows() == s.m && s.k1.cols() == s.n, "lift: k1 must be m x n");
  require(s.k2.rows() == s.m && s.k2.cols() == s.m, "lift: k2 must be m x m");

  const int na = s.n + s.m;
  std::vector<Matrix> noise;
  for (size_t i = 0; i < s.brownian.size(); ++i) {
    check_square(s.brownian[i], s.n, "brownian channel");
    Matrix bi = Matrix::Zero(s.n, s.m);
    if (i < s.brownian_b.size()) {
      require(s.brownian_b[i].rows() == s.n && s.brownian_b[i].cols() == s.m,
              "lift: brownian_b must be n x m");
      bi = s.brownian_b[i];
    }
    noise.push_back(augmented_drift(s.brownian[i], bi, s.n, s.m));
  }
  const Matrix j = sampler_jump(s.k1, s.k2, s.n, s.m);
  noise.push_back(std::sqrt(s.sample_rate) * j);

  LiftedSystem out;
  out.body = make_ct(na, augmented_drift(s.a0, s.b0, s.n, s.m), std::move(noise),
                     -s.sample_rate);
  out.provenance = "held-input augmentation (x,u) with the sampler as a rate-" +
                   std::to_string(s.sample_rate) + " jump channel";
  return out;
}

namespace {

LiftedSystem lift_hybrid_sde_impulses(const StochasticSpec& s) {
  require(s.n > 0, "lift: n must be positive");
  check_square(s.a0, s.n, "drift");
  check_square(s.jump.j0, s.n, "jump mean map");
  std::vector<Matrix> jumps{s.jump.j0};
  for (const Matrix& j : s.jump.jn) {
    check_square(j, s.n, "jump noise map");
    jumps.push_back(j);
  }
  for (const Matrix& b : s.brownian) check_square(b, s.n, "brownian channel");

  HybridGenerator h;
  h.flow = make_ct(s.n, s.a0, s.brownian, 0.0);
  h.jump = make_dt(s.n, std::move(jumps));
  h.impulses = s.impulses;
  h.validate();
  LiftedSystem out;
  out.body = std::move(h);
  out.provenance = "diffusion flow with unit-variance impulse channels kept verbatim";
  return out;
}

LiftedSystem lift_hybrid_switched(const StochasticSpec& s) {
  const int mcount = static_cast<int>(s.modes.size());
  require(s.n > 0 && mcount > 0, "lift: need n > 0 and at least one mode");
  size_t nb = 0;
  for (const auto& mode : s.modes) {
    check_square(mode.a0, s.n, "mode drift");
    for (const Matrix& b : mode.brownian) check_square(b, s.n, "mode brownian");
    nb = std::max(nb, mode.brownian.size());
  }

  HybridGenerator h;
  h.jump = make_dt(s.n, {Matrix::Identity(s.n, s.n)});  // state continuous at switches
  h.impulses = s.impulses;

  if (mcount == 1) {
    h.flow = make_ct(s.n, s.modes[0].a0, s.modes[0].brownian, 0.0);
  } else {
    require(s.impulses.kind == ImpulseSchedule::Kind::Explicit,
            "lift: multi-mode switched systems need explicit switching times");
    require(s.sequence.size() == s.impulses.times.size() + 1,
            "lift: sequence must cover every segment");
    std::vector<double> grid{s.t0};
    for (double t : s.impulses.times) {
      require(t > grid.back(), "lift: switching times must increase past t0");
      grid.push_back(t);
    }
    std::vector<Matrix> drift_vals;
    std::vector<std::vector<Matrix>> noise_vals(nb);
    for (int mode_idx : s.sequence) {
      require(mode_idx >= 0 && mode_idx < mcount, "lift: sequence entry out of range");
      const auto& mode = s.modes[mode_idx];
      drift_vals.push_back(mode.a0);
      for (size_t ch = 0; ch < nb; ++ch) {
        noise_vals[ch].push_back(ch < mode.brownian.size() ? mode.brownian[ch]
                                                           : Matrix::Zero(s.n, s.n));
      }
    }
    ContinuousGenerator flow;
    flow.n = s.n;
    flow.a0 = MatrixSchedule::piecewise(grid, drift_vals);
    for (size_t ch = 0; ch < nb; ++ch) {
      flow.noise.push_back(MatrixSchedule::piecewise(grid, noise_vals[ch]));
    }
    flow.validate();
    h.flow = std::move(flow);
  }
  h.validate();
  LiftedSystem out;
  out.body = std::move(h);
  out.provenance = "piecewise mode schedules with identity jumps at the switching times";
  return out;
}

LiftedSystem lift_hybrid_sampled(const StochasticSpec& s) {
  require(s.n > 0 && s.m > 0, "lift: sampled kinds need n > 0 and m > 0");
  check_square(s.a0, s.n, "plant drift");
  require(s.b0.rows() == s.n && s.b0.cols() == s.m, "lift: b0 must be n x m");
  require(s.k1.rows() == s.m && s.k1.cols() == s.n, "lift: k1 must be m x n");
  require(s.k2.rows() == s.m && s.k2.cols() == s.m, "lift: k2 must be m x m");

  std::vector<Matrix> noise;
  for (size_t i = 0; i < s.brownian.size(); ++i) {
    check_square(s.brownian[i], s.n, "brownian channel");
    Matrix bi = Matrix::Zero(s.n, s.m);
    if (i < s.brownian_b.size()) bi = s.brownian_b[i];
    noise.push_back(augmented_drift(s.brownian[i], bi, s.n, s.m));
  }
  HybridGenerator h;
  h.flow = make_ct(s.n + s.m, augmented_drift(s.a0, s.b0, s.n, s.m), std::move(noise), 0.0);
  h.jump = make_dt(s.n + s.m, {sampler_jump(s.k1, s.k2, s.n, s.m)});
  h.impulses = s.impulses;
  h.validate();
  LiftedSystem out;
  out.body = std::move(h);
  out.provenance = "held-input augmentation (x,u); sampler applied at the impulse instants";
  return out;
}

// Chain with transient impulse modes: between impulsive events the chain
// moves through the continuous modes; hitting a transient mode applies the
// jump maps and redistributes instantly. Event times are exponential, so the
// indicator second moments close as a pure flow; impulse effects appear as
// sqrt(rate * prob)-weighted channels.
LiftedSystem lift_hybrid_markov_impulsive(const StochasticSpec& s) {
  const int mc = static_cast<int>(s.modes.size());
  const int md = static_cast<int>(s.disc_modes.size());
  require(s.n > 0 && mc > 0 && md > 0, "lift: need n > 0, continuous and transient modes");
  check_rate_matrix(s.rate_matrix, mc, mc + md);
  check_stochastic_matrix(s.trans_matrix, md, mc + md);
  for (int l = 0; l < md; ++l) {
    for (int j = mc; j < mc + md; ++j) {
      require(s.trans_matrix(l, j) == 0.0,
              "lift: transient modes must redistribute onto continuous modes");
    }
  }
  size_t nb = 0;
  for (const auto& mode : s.modes) {
    check_square(mode.a0, s.n, "mode drift");
    for (const Matrix& b : mode.brownian) check_square(b, s.n, "mode brownian");
    nb = std::max(nb, mode.brownian.size());
  }
  for (const auto& dm : s.disc_modes) {
    check_square(dm.j0, s.n, "transient jump map");
    for (const Matrix& j : dm.jn) check_square(j, s.n, "transient jump noise");
  }

  const int nn = s.n * mc;
  Matrix drift = Matrix::Zero(nn, nn);
  for (int i = 0; i < mc; ++i) {
    drift.block(i * s.n, i * s.n, s.n, s.n) =
        s.modes[i].a0 + 0.5 * s.rate_matrix(i, i) * Matrix::Identity(s.n, s.n);
  }

  std::vector<Matrix> noise;
  for (size_t ch = 0; ch < nb; ++ch) {
    Matrix b = Matrix::Zero(nn, nn);
    for (int i = 0; i < mc; ++i) {
      if (ch < s.modes[i].brownian.size()) {
        b.block(i * s.n, i * s.n, s.n, s.n) = s.modes[i].brownian[ch];
      }
    }
    noise.push_back(std::move(b));
  }
  for (int shift = 1; shift < mc; ++shift) {
    noise.push_back(shift_channel(s.rate_matrix.leftCols(mc), mc, shift, s.n));
  }
  // impulsive transitions: source j -> transient l -> target i
  for (int l = 0; l < md; ++l) {
    std::vector<Matrix> maps{s.disc_modes[l].j0};
    for (const Matrix& jn : s.disc_modes[l].jn) maps.push_back(jn);
    for (int j = 0; j < mc; ++j) {
      const double rate = s.rate_matrix(j, mc + l);
      if (rate <= 0) continue;
      for (int i = 0; i < mc; ++i) {
        const double prob = s.trans_matrix(l, i);
        if (prob <= 0) continue;
        const double w = std::sqrt(rate * prob);
        for (const Matrix& map : maps) {
          Matrix ch = Matrix::Zero(nn, nn);
          ch.block(i * s.n, j * s.n, s.n, s.n) = w * map;
          noise.push_back(std::move(ch));
        }
      }
    }
  }

  HybridGenerator h;
  h.flow = make_ct(nn, std::move(drift), std::move(noise), 0.0);
  h.jump = make_dt(nn, {Matrix::Identity(nn, nn)});
  h.impulses.kind = ImpulseSchedule::Kind::Explicit;
  h.impulses.times = {};  // event times are chain-driven and already folded
  LiftedSystem out;
  out.body = std::move(h);
  out.structure = BlockStructure{mc, s.n};
  out.provenance =
      "indicator second moments over the continuous modes; transient-mode events folded "
      "as sqrt(rate*prob)-weighted jump channels in the flow";
  return out;
}

}  // namespace

LiftedSystem lift_hybrid(const StochasticSpec& s) {
  switch (s.kind) {
    case StochKind::HybridSdeImpulses: return lift_hybrid_sde_impulses(s);
    case StochKind::HybridSwitched: return lift_hybrid_switched(s);
    case StochKind::HybridSampled: return lift_hybrid_sampled(s);
    case StochKind::HybridMarkovImpulsive: return lift_hybrid_markov_impulsive(s);
    default:
      throw std::invalid_argument("lift_hybrid: kind is not a hybrid model");
  }
}

LiftedSystem lift_any(const StochasticSpec& s) {
  switch (s.kind) {
    case StochKind::CtSdePoisson: return lift_ct_sde_poisson(s);
    case StochKind::CtMarkovJump: return lift_ct_markov(s);
    case StochKind::CtSampledPoisson: return lift_sampled_poisson(s);
    case StochKind::DtRandomParam: return lift_dt_random(s);
    case StochKind::DtMarkovJump: return lift_dt_markov(s);
    case StochKind::HybridSdeImpulses:
    case StochKind::HybridSwitched:
    case StochKind::HybridSampled:
    case StochKind::HybridMarkovImpulsive: return lift_hybrid(s);
  }
  throw std::invalid_argument("lift_any: unknown kind");
}

SymMatrix lift_initial_state(const StochasticSpec& s) {
  require(s.x0.size() == s.n, "lift_initial_state: x0 must have length n");
  const Matrix xx = s.x0 * s.x0.transpose();
  switch (s.kind) {
    case StochKind::CtSdePoisson:
    case StochKind::HybridSdeImpulses:
      return SymMatrix(xx);
    case StochKind::HybridSwitched:
      return SymMatrix(xx);
    case StochKind::CtMarkovJump:
    case StochKind::DtMarkovJump: {
      const int mcount = static_cast<int>(s.modes.size());
      const auto dist = mode_distribution(s, mcount);
      Matrix big = Matrix::Zero(s.n * mcount, s.n * mcount);
      for (int i = 0; i < mcount; ++i) {
        big.block(i * s.n, i * s.n, s.n, s.n) = dist[i] * xx;
      }
      return SymMatrix(big);
    }
    case StochKind::HybridMarkovImpulsive: {
      const int mc = static_cast<int>(s.modes.size());
      const auto dist = mode_distribution(s, mc);  // law over continuous modes
      Matrix big = Matrix::Zero(s.n * mc, s.n * mc);
      for (int i = 0; i < mc; ++i) big.block(i * s.n, i * s.n, s.n, s.n) = dist[i] * xx;
      return SymMatrix(big);
    }
    case StochKind::CtSampledPoisson:
    case StochKind::HybridSampled: {
      Vector z(s.n + s.m);
      z.head(s.n) = s.x0;
      if (s.u0.size() == 0) {
        z.tail(s.m).setZero();
      } else {
        require(s.u0.size() == s.m, "lift_initial_state: u0 must have length m");
        z.tail(s.m) = s.u0;
      }
      return SymMatrix(z * z.transpose());
    }
    case StochKind::DtRandomParam:
      return SymMatrix(xx);
  }
  throw std::invalid_argument("lift_initial_state: unknown kind");
}

}  // namespace mvsys
