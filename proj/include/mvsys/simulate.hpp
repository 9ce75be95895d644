#pragma once

#include "mvsys/analysis.hpp"
#include "mvsys/generators.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mvsys {

// Entry magnitude beyond which integration truncates with a diagnostic.
inline constexpr double kBlowupThreshold = 1e300;

struct JumpRecord {
  double t = 0.0;
  SymMatrix pre;
  SymMatrix post;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SymMatrix> states;
  // Jumps applied strictly before each sample; empty means none anywhere.
  std::vector<int> jump_counts;
  std::vector<JumpRecord> jumps;

  double dt = 0.0;
  std::string integrator;
  uint64_t seed = 0;
  bool seeded = false;
  bool truncated = false;
  std::string diagnostic;

  // Linear interpolation between samples. At a jump instant (duplicate time)
  // the pre-jump value is returned.
  SymMatrix at(double t) const;
  // Same, but returns the post-jump value at jump instants.
  SymMatrix at_right(double t) const;
  int jump_count_at(size_t i) const { return jump_counts.empty() ? 0 : jump_counts[i]; }
};

// Fixed-step classical RK4 on the matrix flow; every stage is symmetrized.
// The step count is ceil((tf-t0)/dt) so the final sample lands exactly on tf.
Trajectory integrate_ct(const ContinuousGenerator& g, const SymMatrix& x0, double t0, double tf,
                        double dt);

Trajectory iterate_dt(const DiscreteGenerator& g, const SymMatrix& x0, int k0, int kf);

// Method of steps with linear interpolation for the retarded reads. history
// must cover [t0 - max_delay, t0] with its final sample at t0. dt larger than
// the smallest positive delay is rejected.
Trajectory integrate_ct_delay(const ContinuousGenerator& g, const DelayTerms& d,
                              const std::vector<std::pair<double, SymMatrix>>& history,
                              double t0, double tf, double dt);

// Flow segments joined by jump maps at the impulse instants; integration
// steps land exactly on each instant. seed feeds randomized dwell times.
Trajectory simulate_hybrid(const HybridGenerator& g, const SymMatrix& x0, double t0, double tf,
                           double dt, uint64_t seed = 0);

struct DecayEstimate {
  double alpha_hat = 0.0;  // per-unit-time decay rate; positive = contracting
  double rho_hat = 1.0;    // per-jump factor (hybrid); 1 when no jumps
  double r_squared = 0.0;
  bool degenerate = false;
};

// Least-squares fit of log nuclear norm against elapsed time and jump count.
DecayEstimate estimate_decay(const Trajectory& traj);

}  // namespace mvsys
