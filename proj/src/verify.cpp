#include "mvsys/verify.hpp"

#include <algorithm>
#include <cmath>

namespace mvsys {

namespace {

struct Accumulator {
  std::vector<double> times;
  std::vector<Matrix> sum, sum2;
  int dim = 0;

  void init(std::vector<double> grid, int d) {
    times = std::move(grid);
    dim = d;
    sum.assign(times.size(), Matrix::Zero(d, d));
    sum2.assign(times.size(), Matrix::Zero(d, d));
  }
  // contribution of one path at one node, e.g. xx^T placed in its mode block
  void add(size_t node, const Matrix& value) {
    sum[node] += value;
    sum2[node] += value.cwiseProduct(value);
  }
  PathEnsemble finish(int n_paths, uint64_t seed) const {
    PathEnsemble e;
    e.times = times;
    e.n_paths = n_paths;
    e.state_dim = dim;
    e.seed = seed;
    const double np = static_cast<double>(n_paths);
    for (size_t j = 0; j < times.size(); ++j) {
      const Matrix mean = sum[j] / np;
      e.moments.emplace_back(mean);
      const Matrix var = (sum2[j] / np - mean.cwiseProduct(mean)).cwiseMax(0.0);
      e.stderrs.push_back(std::sqrt(var.maxCoeff() / np));
    }
    return e;
  }
};

std::vector<double> ct_grid(double t0, double tf, double dt) {
  if (!(dt > 0) || !(tf > t0)) throw std::invalid_argument("simulate_paths: bad grid");
  const int steps = std::max(1, static_cast<int>(std::ceil((tf - t0) / dt - 1e-9)));
  const double h = (tf - t0) / steps;
  std::vector<double> grid(steps + 1);
  for (int j = 0; j <= steps; ++j) grid[j] = (j == steps) ? tf : t0 + j * h;
  return grid;
}

// Timed discrete event along one path. `mode` is the chain state after the
// event (mode-switch kinds); `jump`/`transient` select an impulsive map.
struct Event {
  double t = 0.0;
  int mode = -1;
  bool jump = false;
  int transient = -1;
};

// Poisson arrivals for channel-indexed jumps, merged in time order.
std::vector<Event> sample_poisson_events(const std::vector<double>& rates, double t0, double tf,
                                         SplitMix64& rng) {
  std::vector<Event> events;
  for (size_t c = 0; c < rates.size(); ++c) {
    if (rates[c] <= 0) continue;
    double t = t0;
    for (;;) {
      t += rng.exponential(rates[c]);
      if (t > tf) break;
      Event ev;
      ev.t = t;
      ev.transient = static_cast<int>(c);
      ev.jump = true;
      events.push_back(ev);
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  return events;
}

// Embedded-chain sample for a rate matrix whose rows may target transient
// columns (>= mc). Transient hits emit a jump event and redistribute through
// pi. Returns the event list; io_mode carries sigma(t0) in and is untouched.
std::vector<Event> sample_chain_events(const Matrix& lam, const Matrix& pi, int mc, int mode0,
                                       double t0, double tf, SplitMix64& rng) {
  std::vector<Event> events;
  int mode = mode0;
  double t = t0;
  const int cols = static_cast<int>(lam.cols());
  for (;;) {
    const double q = -lam(mode, mode);
    if (!(q > 0)) break;  // absorbing
    t += rng.exponential(q);
    if (t > tf) break;
    std::vector<double> w(cols, 0.0);
    for (int j = 0; j < cols; ++j) {
      if (j != mode) w[j] = lam(mode, j);
    }
    const int target = rng.categorical(w);
    Event ev;
    ev.t = t;
    if (target < mc) {
      ev.mode = target;
    } else {
      ev.jump = true;
      ev.transient = target - mc;
      std::vector<double> wr(mc, 0.0);
      for (int j = 0; j < mc; ++j) wr[j] = pi(target - mc, j);
      ev.mode = rng.categorical(wr);
    }
    events.push_back(ev);
    mode = ev.mode;
  }
  return events;
}

int draw_initial_mode(const StochasticSpec& s, int modes, SplitMix64& rng) {
  if (s.initial_dist.empty()) return 0;
  if (static_cast<int>(s.initial_dist.size()) != modes) {
    throw std::invalid_argument("simulate_paths: initial_dist size must match mode count");
  }
  return rng.categorical(s.initial_dist);
}

// One Euler-Maruyama update: x += h A x + sqrt(h) sum_i xi_i B_i x.
void em_step(Vector& x, const Matrix& a, const std::vector<Matrix>& noise, double h,
             SplitMix64& rng) {
  Vector dx = h * (a * x);
  const double sq = std::sqrt(h);
  for (const Matrix& b : noise) {
    dx += (sq * rng.normal()) * (b * x);
  }
  x += dx;
}

Vector apply_jump_noise(const JumpNoise& jn, const Vector& x, SplitMix64& rng) {
  Vector out = jn.j0 * x;
  for (const Matrix& j : jn.jn) out += rng.rademacher() * (j * x);
  return out;
}

Matrix augmented(const Matrix& a, const Matrix& b, int n, int m) {
  Matrix out = Matrix::Zero(n + m, n + m);
  out.topLeftCorner(n, n) = a;
  out.topRightCorner(n, m) = b;
  return out;
}

Matrix sampler_map(const Matrix& k1, const Matrix& k2, int n, int m) {
  Matrix j = Matrix::Zero(n + m, n + m);
  j.topLeftCorner(n, n) = Matrix::Identity(n, n);
  j.bottomLeftCorner(m, n) = k1;
  j.bottomRightCorner(m, m) = k2;
  return j;
}

Vector initial_vector(const StochasticSpec& s, bool augmented_state) {
  if (s.x0.size() != s.n) {
    throw std::invalid_argument("simulate_paths: spec must carry x0 of length n");
  }
  if (!augmented_state) return s.x0;
  Vector z = Vector::Zero(s.n + s.m);
  z.head(s.n) = s.x0;
  if (s.u0.size() != 0) {
    if (s.u0.size() != s.m) throw std::invalid_argument("simulate_paths: u0 must have length m");
    z.tail(s.m) = s.u0;
  }
  return z;
}

// Flat continuous kinds: one drift/noise set, optional timed jump maps.
PathEnsemble run_ct_flat(const StochasticSpec& s, const Matrix& drift,
                         const std::vector<Matrix>& noise,
                         const std::vector<Matrix>& event_maps,
                         const std::vector<double>& poisson_rates,
                         const std::vector<Event>& fixed_events, bool use_jump_noise,
                         bool augmented_state, int n_paths, uint64_t seed, double dt, double tf) {
  const auto grid = ct_grid(s.t0, tf, dt);
  const int d = static_cast<int>(drift.rows());
  Accumulator acc;
  acc.init(grid, d);

  for (int path = 0; path < n_paths; ++path) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<uint64_t>(path) + 1);
    std::vector<Event> events = fixed_events;
    if (!poisson_rates.empty()) {
      events = sample_poisson_events(poisson_rates, s.t0, tf, rng);
    }
    Vector x = initial_vector(s, augmented_state);
    size_t next_ev = 0;
    for (size_t j = 0; j < grid.size(); ++j) {
      acc.add(j, x * x.transpose());
      if (j + 1 == grid.size()) break;
      const double h = grid[j + 1] - grid[j];
      em_step(x, drift, noise, h, rng);
      const double tnext = grid[j + 1];
      while (next_ev < events.size() && events[next_ev].t <= tnext + 1e-12) {
        const Event& ev = events[next_ev];
        if (use_jump_noise) {
          x = apply_jump_noise(s.jump, x, rng);
        } else {
          x = event_maps.at(static_cast<size_t>(std::max(ev.transient, 0))) * x;
        }
        ++next_ev;
      }
    }
  }
  return acc.finish(n_paths, seed);
}

// Chain-modulated continuous kinds, accumulating mode-indicator blocks.
PathEnsemble run_ct_chain(const StochasticSpec& s, int n_paths, uint64_t seed, double dt,
                          double tf) {
  const bool transient = s.kind == StochKind::HybridMarkovImpulsive;
  const int mc = static_cast<int>(s.modes.size());
  if (mc == 0) throw std::invalid_argument("simulate_paths: chain kinds need modes");
  const auto grid = ct_grid(s.t0, tf, dt);
  Accumulator acc;
  acc.init(grid, s.n * mc);

  Matrix pi = s.trans_matrix;
  if (!transient) pi = Matrix::Zero(0, 0);

  for (int path = 0; path < n_paths; ++path) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<uint64_t>(path) + 1);
    int mode = draw_initial_mode(s, mc, rng);
    const std::vector<Event> events =
        sample_chain_events(s.rate_matrix, pi,
                            transient ? mc : static_cast<int>(s.rate_matrix.cols()), mode,
                            s.t0, tf, rng);
    Vector x = initial_vector(s, false);
    size_t next_ev = 0;
    for (size_t j = 0; j < grid.size(); ++j) {
      Matrix big = Matrix::Zero(acc.dim, acc.dim);
      big.block(mode * s.n, mode * s.n, s.n, s.n) = x * x.transpose();
      acc.add(j, big);
      if (j + 1 == grid.size()) break;
      const double h = grid[j + 1] - grid[j];
      // mode held over the step; switches land at their sampled instants
      em_step(x, s.modes[mode].a0, s.modes[mode].brownian, h, rng);
      const double tnext = grid[j + 1];
      while (next_ev < events.size() && events[next_ev].t <= tnext + 1e-12) {
        const Event& ev = events[next_ev];
        if (ev.jump) x = apply_jump_noise(s.disc_modes[ev.transient], x, rng);
        mode = ev.mode;
        ++next_ev;
      }
    }
  }
  return acc.finish(n_paths, seed);
}

// Deterministic switching: the mode is a function of time.
PathEnsemble run_ct_switched(const StochasticSpec& s, int n_paths, uint64_t seed, double dt,
                             double tf) {
  const int mc = static_cast<int>(s.modes.size());
  if (mc == 0) throw std::invalid_argument("simulate_paths: switched kind needs modes");
  std::vector<double> switch_times;
  std::vector<int> seq{0};
  if (mc > 1) {
    if (s.impulses.kind != ImpulseSchedule::Kind::Explicit) {
      throw std::invalid_argument("simulate_paths: switched kind needs explicit instants");
    }
    switch_times = s.impulses.resolve(s.t0, tf, nullptr);
    seq = s.sequence;
    if (seq.size() < switch_times.size() + 1) {
      throw std::invalid_argument("simulate_paths: sequence must cover every segment");
    }
  }
  const auto grid = ct_grid(s.t0, tf, dt);
  Accumulator acc;
  acc.init(grid, s.n);

  for (int path = 0; path < n_paths; ++path) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<uint64_t>(path) + 1);
    Vector x = initial_vector(s, false);
    size_t seg = 0;
    for (size_t j = 0; j < grid.size(); ++j) {
      acc.add(j, x * x.transpose());
      if (j + 1 == grid.size()) break;
      const double h = grid[j + 1] - grid[j];
      const auto& mode = s.modes[static_cast<size_t>(seq[seg])];
      em_step(x, mode.a0, mode.brownian, h, rng);
      while (seg < switch_times.size() && switch_times[seg] <= grid[j + 1] + 1e-12) ++seg;
    }
  }
  return acc.finish(n_paths, seed);
}

PathEnsemble run_dt(const StochasticSpec& s, int n_paths, uint64_t seed, double tf) {
  const int steps = static_cast<int>(tf);
  if (steps < 0) throw std::invalid_argument("simulate_paths: negative step count");
  std::vector<double> grid(steps + 1);
  for (int k = 0; k <= steps; ++k) grid[k] = k;
  const bool markov = s.kind == StochKind::DtMarkovJump;
  const int mcount = markov ? static_cast<int>(s.modes.size()) : 1;
  Accumulator acc;
  acc.init(grid, s.n * mcount);

  for (int path = 0; path < n_paths; ++path) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<uint64_t>(path) + 1);
    Vector x = initial_vector(s, false);
    int mode = markov ? draw_initial_mode(s, mcount, rng) : 0;
    for (int k = 0; k <= steps; ++k) {
      if (markov) {
        Matrix big = Matrix::Zero(acc.dim, acc.dim);
        big.block(mode * s.n, mode * s.n, s.n, s.n) = x * x.transpose();
        acc.add(k, big);
      } else {
        acc.add(k, x * x.transpose());
      }
      if (k == steps) break;
      if (markov) {
        const auto& md = s.modes[mode];
        Vector nx = md.a0 * x;
        for (const Matrix& b : md.brownian) nx += rng.rademacher() * (b * x);
        x = nx;
        std::vector<double> w(mcount);
        for (int j = 0; j < mcount; ++j) w[j] = s.trans_matrix(mode, j);
        mode = rng.categorical(w);
      } else {
        Vector nx = s.a0 * x;
        for (size_t i = 0; i < s.dt_noise.size(); ++i) {
          const double nu = s.bernoulli ? rng.bernoulli(s.p[i]) : rng.rademacher();
          nx += nu * (s.dt_noise[i] * x);
        }
        x = nx;
      }
    }
  }
  return acc.finish(n_paths, seed);
}

}  // namespace

PathEnsemble simulate_paths(const StochasticSpec& s, int n_paths, uint64_t seed, double dt,
                            double tf) {
  if (n_paths <= 0) throw std::invalid_argument("simulate_paths: need at least one path");
  switch (s.kind) {
    case StochKind::CtSdePoisson: {
      std::vector<Matrix> maps;
      std::vector<double> rates;
      for (const auto& term : s.poisson) {
        maps.push_back(term.map);
        rates.push_back(term.rate);
      }
      return run_ct_flat(s, s.a0, s.brownian, maps, rates, {}, false, false, n_paths, seed, dt,
                         tf);
    }
    case StochKind::CtSampledPoisson: {
      std::vector<Matrix> noise;
      for (size_t i = 0; i < s.brownian.size(); ++i) {
        const Matrix bi = i < s.brownian_b.size() ? s.brownian_b[i] : Matrix::Zero(s.n, s.m);
        noise.push_back(augmented(s.brownian[i], bi, s.n, s.m));
      }
      return run_ct_flat(s, augmented(s.a0, s.b0, s.n, s.m), noise,
                         {sampler_map(s.k1, s.k2, s.n, s.m)}, {s.sample_rate}, {}, false, true,
                         n_paths, seed, dt, tf);
    }
    case StochKind::CtMarkovJump:
    case StochKind::HybridMarkovImpulsive:
      return run_ct_chain(s, n_paths, seed, dt, tf);
    case StochKind::DtRandomParam:
    case StochKind::DtMarkovJump:
      return run_dt(s, n_paths, seed, tf);
    case StochKind::HybridSdeImpulses: {
      // impulse instants shared across paths; substream 0 matches the one
      // simulate_hybrid uses for the lifted trajectory under the same seed
      SplitMix64 dwell = SplitMix64::substream(seed, 0);
      std::vector<Event> events;
      for (double t : s.impulses.resolve(
               s.t0, tf, s.impulses.kind == ImpulseSchedule::Kind::Range ? &dwell : nullptr)) {
        Event ev;
        ev.t = t;
        ev.jump = true;
        events.push_back(ev);
      }
      return run_ct_flat(s, s.a0, s.brownian, {}, {}, events, true, false, n_paths, seed, dt,
                         tf);
    }
    case StochKind::HybridSampled: {
      SplitMix64 dwell = SplitMix64::substream(seed, 0);
      std::vector<Event> events;
      for (double t : s.impulses.resolve(
               s.t0, tf, s.impulses.kind == ImpulseSchedule::Kind::Range ? &dwell : nullptr)) {
        Event ev;
        ev.t = t;
        ev.jump = true;
        ev.transient = 0;
        events.push_back(ev);
      }
      std::vector<Matrix> noise;
      for (size_t i = 0; i < s.brownian.size(); ++i) {
        const Matrix bi = i < s.brownian_b.size() ? s.brownian_b[i] : Matrix::Zero(s.n, s.m);
        noise.push_back(augmented(s.brownian[i], bi, s.n, s.m));
      }
      return run_ct_flat(s, augmented(s.a0, s.b0, s.n, s.m), noise,
                         {sampler_map(s.k1, s.k2, s.n, s.m)}, {}, events, false, true, n_paths,
                         seed, dt, tf);
    }
    case StochKind::HybridSwitched:
      return run_ct_switched(s, n_paths, seed, dt, tf);
  }
  throw std::invalid_argument("simulate_paths: unsupported kind");
}

ComparisonReport compare_moments(const PathEnsemble& e, const Trajectory& lifted,
                                 double z_threshold, double min_fraction) {
  if (e.times.empty()) throw std::invalid_argument("compare_moments: empty ensemble");
  ComparisonReport rep;
  rep.z_threshold = z_threshold;
  size_t within = 0;
  for (size_t j = 0; j < e.times.size(); ++j) {
    const SymMatrix ref = lifted.at_right(e.times[j]);
    if (ref.dim() != e.state_dim) {
      throw std::invalid_argument("compare_moments: dimension mismatch");
    }
    const double diff = (e.moments[j].mat() - ref.mat()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, ref.mat().cwiseAbs().maxCoeff());
    const double denom = std::max(e.stderrs[j], 1e-12 * scale);
    const double z = diff / denom;
    rep.z_scores.push_back(z);
    rep.max_z = std::max(rep.max_z, z);
    rep.max_rel_err = std::max(rep.max_rel_err, diff / scale);
    if (z <= z_threshold) ++within;
  }
  rep.frac_within = static_cast<double>(within) / static_cast<double>(e.times.size());
  rep.pass = rep.frac_within >= min_fraction;
  return rep;
}

double estimate_ms_decay(const PathEnsemble& e) {
  std::vector<double> t, y;
  for (size_t j = 0; j < e.times.size(); ++j) {
    const double tr = e.moments[j].mat().trace();
    if (tr > 0 && std::isfinite(tr)) {
      t.push_back(e.times[j]);
      y.push_back(std::log(tr));
    }
  }
  if (t.size() < 2) throw std::invalid_argument("estimate_ms_decay: too few usable points");
  // drop the leading transient
  const size_t start = t.size() / 5;
  const size_t count = t.size() - start;
  if (count < 2 || t.back() == t[start]) {
    throw std::invalid_argument("estimate_ms_decay: degenerate grid");
  }
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (size_t j = start; j < t.size(); ++j) {
    st += t[j];
    sy += y[j];
    stt += t[j] * t[j];
    sty += t[j] * y[j];
  }
  const double nn = static_cast<double>(count);
  return (nn * sty - st * sy) / (nn * stt - st * st);
}

}  // namespace mvsys
