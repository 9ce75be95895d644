#include "mvsys/simulate.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>

namespace mvsys {

namespace {

bool entries_ok(const SymMatrix& x) {
  return x.mat().allFinite() && x.mat().cwiseAbs().maxCoeff() <= kBlowupThreshold;
}

int step_count(double t0, double tf, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (!(tf > t0)) throw std::invalid_argument("integrate: tf must exceed t0");
  return std::max(1, static_cast<int>(std::ceil((tf - t0) / dt - 1e-9)));
}

using Rhs = std::function<SymMatrix(double, const SymMatrix&)>;

// One classical RK4 step; each stage state is re-symmetrized through the
// SymMatrix constructor.
SymMatrix rk4_step(const Rhs& rhs, double t, const SymMatrix& x, double h) {
  const SymMatrix k1 = rhs(t, x);
  const SymMatrix y2(x.mat() + 0.5 * h * k1.mat());
  const SymMatrix k2 = rhs(t + 0.5 * h, y2);
  const SymMatrix y3(x.mat() + 0.5 * h * k2.mat());
  const SymMatrix k3 = rhs(t + 0.5 * h, y3);
  const SymMatrix y4(x.mat() + h * k3.mat());
  const SymMatrix k4 = rhs(t + h, y4);
  return SymMatrix(x.mat() +
                   (h / 6.0) * (k1.mat() + 2.0 * k2.mat() + 2.0 * k3.mat() + k4.mat()));
}

// Appends RK4 samples over [t0, tf] to traj, starting from the last stored
// state. Returns false when the state blows up.
bool integrate_segment(const Rhs& rhs, Trajectory& traj, double t0, double tf, double dt,
                       int jump_count) {
  const int steps = step_count(t0, tf, dt);
  const double h = (tf - t0) / steps;
  SymMatrix x = traj.states.back();
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    x = rk4_step(rhs, t, x, h);
    const double tn = (i + 1 == steps) ? tf : t0 + (i + 1) * h;
    if (!entries_ok(x)) {
      traj.truncated = true;
      traj.diagnostic = "state exceeded blow-up threshold near t=" + std::to_string(tn);
      return false;
    }
    traj.times.push_back(tn);
    traj.states.push_back(x);
    traj.jump_counts.push_back(jump_count);
  }
  return true;
}

}  // namespace

SymMatrix Trajectory::at(double t) const {
  if (times.empty()) throw std::logic_error("Trajectory::at: empty trajectory");
  const double slack = 1e-9 * std::max(1.0, std::fabs(times.back()));
  if (t < times.front() - slack || t > times.back() + slack) {
    throw std::out_of_range("Trajectory::at: time outside sampled range");
  }
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  // first index with times[i] >= t
  const size_t i = std::lower_bound(times.begin(), times.end(), t) - times.begin();
  if (times[i] == t) return states[i];  // pre-jump value on duplicates
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return SymMatrix(states[i - 1].mat() + w * (states[i].mat() - states[i - 1].mat()));
}

SymMatrix Trajectory::at_right(double t) const {
  if (times.empty()) throw std::logic_error("Trajectory::at_right: empty trajectory");
  const double slack = 1e-9 * std::max(1.0, std::fabs(times.back()));
  if (t < times.front() - slack || t > times.back() + slack) {
    throw std::out_of_range("Trajectory::at_right: time outside sampled range");
  }
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  // last index with times[i] <= t
  size_t i = std::upper_bound(times.begin(), times.end(), t) - times.begin();
  if (times[i - 1] == t) return states[i - 1];
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  return SymMatrix(states[i - 1].mat() + w * (states[i].mat() - states[i - 1].mat()));
}

Trajectory integrate_ct(const ContinuousGenerator& g, const SymMatrix& x0, double t0, double tf,
                        double dt) {
  g.validate();
  if (x0.dim() != g.n) throw std::invalid_argument("integrate_ct: state dimension mismatch");
  Trajectory traj;
  traj.dt = dt;
  traj.integrator = "rk4";
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  traj.jump_counts.push_back(0);
  const Rhs rhs = [&g](double t, const SymMatrix& x) { return apply_ct(g, x, t); };
  integrate_segment(rhs, traj, t0, tf, dt, 0);
  return traj;
}

Trajectory iterate_dt(const DiscreteGenerator& g, const SymMatrix& x0, int k0, int kf) {
  g.validate();
  if (x0.dim() != g.n) throw std::invalid_argument("iterate_dt: state dimension mismatch");
  if (kf < k0) throw std::invalid_argument("iterate_dt: kf must be >= k0");
  Trajectory traj;
  traj.dt = 1.0;
  traj.integrator = "exact-step";
  SymMatrix x = x0;
  traj.times.push_back(k0);
  traj.states.push_back(x);
  traj.jump_counts.push_back(0);
  for (int k = k0; k < kf; ++k) {
    x = apply_dt(g, x, k);
    if (!entries_ok(x)) {
      traj.truncated = true;
      traj.diagnostic = "state exceeded blow-up threshold at k=" + std::to_string(k + 1);
      break;
    }
    traj.times.push_back(k + 1);
    traj.states.push_back(x);
    traj.jump_counts.push_back(0);
  }
  return traj;
}

Trajectory integrate_ct_delay(const ContinuousGenerator& g, const DelayTerms& d,
                              const std::vector<std::pair<double, SymMatrix>>& history,
                              double t0, double tf, double dt) {
  g.validate();
  d.validate(g.n);
  if (history.empty()) throw std::invalid_argument("integrate_ct_delay: empty history");
  for (size_t i = 1; i < history.size(); ++i) {
    if (!(history[i].first > history[i - 1].first)) {
      throw std::invalid_argument("integrate_ct_delay: history times must increase");
    }
  }
  const double hmax = d.max_delay();
  const double slack = 1e-9 * std::max(1.0, std::fabs(t0) + hmax);
  if (history.front().first > t0 - hmax + slack) {
    throw std::invalid_argument("integrate_ct_delay: history shorter than the largest delay");
  }
  if (std::fabs(history.back().first - t0) > slack) {
    throw std::invalid_argument("integrate_ct_delay: history must end exactly at t0");
  }
  if (const auto hmin = d.min_positive_delay(); hmin && dt > *hmin + slack) {
    throw std::invalid_argument("integrate_ct_delay: dt exceeds the smallest positive delay");
  }

  // combined lookup table: history then computed samples
  std::vector<double> ts;
  std::vector<SymMatrix> xs;
  for (const auto& [t, x] : history) {
    if (x.dim() != g.n) throw std::invalid_argument("integrate_ct_delay: history dim mismatch");
    ts.push_back(t);
    xs.push_back(x);
  }
  const auto lookup = [&ts, &xs](double t) -> SymMatrix {
    if (t <= ts.front()) return xs.front();
    if (t >= ts.back()) return xs.back();
    const size_t i = std::lower_bound(ts.begin(), ts.end(), t) - ts.begin();
    if (ts[i] == t) return xs[i];
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return SymMatrix(xs[i - 1].mat() + w * (xs[i].mat() - xs[i - 1].mat()));
  };

  // zero-delay channels act on the stage state itself
  const Rhs rhs = [&](double t, const SymMatrix& x) {
    Matrix r = apply_ct(g, x, t).mat();
    for (const auto& term : d.terms) {
      const Matrix b = term.matrix(t);
      const Matrix xd = (term.delay == 0.0) ? x.mat() : lookup(t - term.delay).mat();
      r += b * xd * b.transpose();
    }
    return SymMatrix(r);
  };

  Trajectory traj;
  traj.dt = dt;
  traj.integrator = "rk4-steps";
  traj.times.push_back(t0);
  traj.states.push_back(xs.back());
  traj.jump_counts.push_back(0);

  const int steps = step_count(t0, tf, dt);
  const double h = (tf - t0) / steps;
  SymMatrix x = xs.back();
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    x = rk4_step(rhs, t, x, h);
    const double tn = (i + 1 == steps) ? tf : t0 + (i + 1) * h;
    if (!entries_ok(x)) {
      traj.truncated = true;
      traj.diagnostic = "state exceeded blow-up threshold near t=" + std::to_string(tn);
      break;
    }
    ts.push_back(tn);
    xs.push_back(x);
    traj.times.push_back(tn);
    traj.states.push_back(x);
    traj.jump_counts.push_back(0);
  }
  return traj;
}

Trajectory simulate_hybrid(const HybridGenerator& g, const SymMatrix& x0, double t0, double tf,
                           double dt, uint64_t seed) {
  g.validate();
  if (x0.dim() != g.flow.n) throw std::invalid_argument("simulate_hybrid: dimension mismatch");

  SplitMix64 rng = SplitMix64::substream(seed, 0);
  const std::vector<double> instants =
      g.impulses.resolve(t0, tf, g.impulses.kind == ImpulseSchedule::Kind::Range ? &rng : nullptr);

  Trajectory traj;
  traj.dt = dt;
  traj.integrator = "rk4+jump";
  traj.seed = seed;
  traj.seeded = g.impulses.kind == ImpulseSchedule::Kind::Range;
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  traj.jump_counts.push_back(0);

  const Rhs rhs = [&g](double t, const SymMatrix& x) { return apply_ct(g.flow, x, t); };

  double seg_start = t0;
  int jumps_done = 0;
  for (double tk : instants) {
    if (tk > seg_start &&
        !integrate_segment(rhs, traj, seg_start, tk, dt, jumps_done)) {
      return traj;
    }
    const SymMatrix pre = traj.states.back();
    const SymMatrix post = apply_dt(g.jump, pre, static_cast<double>(jumps_done));
    traj.jumps.push_back({tk, pre, post});
    ++jumps_done;
    // duplicate sample at tk carrying the post-jump value
    traj.times.push_back(tk);
    traj.states.push_back(post);
    traj.jump_counts.push_back(jumps_done);
    if (!entries_ok(post)) {
      traj.truncated = true;
      traj.diagnostic = "state exceeded blow-up threshold at jump t=" + std::to_string(tk);
      return traj;
    }
    seg_start = tk;
  }
  if (seg_start < tf) {
    integrate_segment(rhs, traj, seg_start, tf, dt, jumps_done);
  }
  return traj;
}

DecayEstimate estimate_decay(const Trajectory& traj) {
  DecayEstimate est;
  std::vector<double> t, y;
  std::vector<int> kappa;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const double nn = nuclear_norm(traj.states[i]);
    if (!(nn > 0) || !std::isfinite(nn)) continue;
    t.push_back(traj.times[i]);
    y.push_back(std::log(nn));
    kappa.push_back(traj.jump_count_at(i));
  }
  if (t.size() < 2 || t.back() == t.front()) {
    est.degenerate = true;
    return est;
  }
  const bool with_jumps = kappa.back() > 0;
  const int cols = with_jumps ? 3 : 2;
  Matrix a(t.size(), cols);
  Vector b(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = -(t[i] - t.front());
    if (with_jumps) a(i, 2) = kappa[i];
    b(i) = y[i];
  }
  const Vector beta = a.colPivHouseholderQr().solve(b);
  est.alpha_hat = beta(1);
  est.rho_hat = with_jumps ? std::exp(beta(2)) : 1.0;
  const double ss_res = (a * beta - b).squaredNorm();
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).matrix().squaredNorm();
  est.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return est;
}

}  // namespace mvsys
