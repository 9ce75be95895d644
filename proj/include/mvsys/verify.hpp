#pragma once

#include "mvsys/lift.hpp"
#include "mvsys/simulate.hpp"

#include <cstdint>
#include <vector>

namespace mvsys {

// Ensemble second moments on a fixed grid. For mode-switched kinds the
// moment matrices are the block-diagonal mode-indicator stacks, matching the
// lifted state layout, so comparisons need no reshaping.
struct PathEnsemble {
  std::vector<double> times;
  std::vector<SymMatrix> moments;
  std::vector<double> stderrs;  // largest entrywise standard error per time
  int n_paths = 0;
  int state_dim = 0;
  uint64_t seed = 0;
};

// Euler-Maruyama path ensemble with exact event-time sampling (exponential
// inter-arrivals, exact chain draws). Per-path substreams make the result
// independent of scheduling. Discrete-time kinds read tf as the step count
// and ignore dt.
PathEnsemble simulate_paths(const StochasticSpec& s, int n_paths, uint64_t seed, double dt,
                            double tf);

struct ComparisonReport {
  std::vector<double> z_scores;  // per grid time, largest-entry deviation
  double max_z = 0.0;
  double frac_within = 0.0;  // fraction of grid points with z <= threshold
  double max_rel_err = 0.0;
  double z_threshold = 4.0;
  bool pass = false;
};

// Compares the ensemble against the deterministic moment trajectory of the
// lift, read right-continuously so both sides see post-jump values.
ComparisonReport compare_moments(const PathEnsemble& e, const Trajectory& lifted,
                                 double z_threshold = 4.0, double min_fraction = 0.95);

// Slope of log trace(moment) over the trailing 80% of the grid; negative
// means mean-square decay. Matches the lifted spectral margin for long
// horizons.
double estimate_ms_decay(const PathEnsemble& e);

}  // namespace mvsys
