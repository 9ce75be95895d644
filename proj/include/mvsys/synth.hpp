#pragma once

#include "mvsys/analysis.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mvsys {

struct LmiVariable {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool symmetric = false;
  Matrix init;  // starting point; defaults to I (symmetric) or 0
};

// One affine constraint: assemble(vars) must be symmetric and is required
// <= -eps I (NegDef) or >= eps I (PosDef).
struct LmiConstraint {
  enum class Sense { NegDef, PosDef };
  int dim = 0;
  Sense sense = Sense::NegDef;
  std::function<Matrix(const std::vector<Matrix>&)> assemble;
  std::string label;
};

struct LmiProblem {
  std::vector<LmiVariable> vars;
  std::vector<LmiConstraint> constraints;
  double epsilon = 1e-6;
};

struct LmiSolution {
  bool feasible = false;
  std::vector<Matrix> values;
  int iterations = 0;
  // per-constraint margin at strictness eps: -max_eig(S)-eps resp.
  // min_eig(S)-eps; >= 0 when satisfied
  std::vector<double> margins;
  double worst_margin = 0.0;
  // distance from the affine-feasible iterate to the shifted cones, recorded
  // every iteration; non-increasing by construction
  std::vector<double> violation_history;
};

// Feasibility search by alternating projections between the affine span of
// the constraints (least-squares step) and the product of shifted definite
// cones (eigenvalue clipping). A returned point satisfies every margin up to
// tol; not finding one proves nothing.
LmiSolution solve_lmi(const LmiProblem& problem, int max_iters = 10000, double tol = 1e-9);

struct SynthOptions {
  double epsilon = 0.0;  // 0 = auto: 1e-6 * (1 + largest input norm)
  int max_iters = 10000;
  double tol = 1e-9;
  int grid = 8;       // hybrid certificate nodes
  int max_grid = 64;  // refinement cap
};

struct GainSet {
  bool found = false;
  // one per channel; 0 x n when the channel has no input
  std::vector<Matrix> gains;
  SymMatrix q;
  std::vector<Matrix> u;
  double epsilon = 0.0;
  std::vector<double> margins;
  SpectrumReport closed_loop;
  std::string status;
};

// State feedback per channel for the continuous flow: channel i becomes
// Ai + Bi Ki. b must supply one input matrix per channel (drift first); use
// 0-column matrices for channels without input. The closed loop is re-checked
// spectrally and the verdict attached.
GainSet synth_ct_lti(const ContinuousGenerator& g, const std::vector<Matrix>& b,
                     SynthOptions opt = {});

GainSet synth_dt_lti(const DiscreteGenerator& g, const std::vector<Matrix>& b,
                     SynthOptions opt = {});

struct HybridSynthResult {
  bool found = false;
  std::vector<Matrix> flow_gains;
  std::vector<Matrix> jump_gains;
  std::vector<SymMatrix> q_nodes;  // certificate profile on the dwell grid
  double epsilon = 0.0;
  int grid = 0;
  HybridDwellReport closed_loop;
  std::vector<double> node_factors;  // period factor per certified dwell node
  std::string status;
};

// Piecewise-linear certificate profile on [0, dwell_max] with constant flow
// gains (closed loop stays time-invariant) and jump gains applied at the
// impulses. dwell_min == dwell_max targets a fixed dwell; a strict range
// targets the grid nodes inside [dwell_min, dwell_max]. DwellMode::Minimum
// adds the stationary tail condition so longer dwells stay covered.
// Infeasible grids are refined (doubled) up to opt.max_grid.
//
// Constant gains are recovered from single profile values, which is exact
// when the controlled channel sees only one profile node (jump input with a
// fixed dwell, or input-free flow) and heuristic otherwise. `found` is always
// decided by re-running the dwell test on the closed loop, never by LMI
// feasibility alone.
HybridSynthResult synth_hybrid_dwell(const HybridGenerator& g, const std::vector<Matrix>& b,
                                     const std::vector<Matrix>& e, double dwell_min,
                                     double dwell_max, DwellMode mode, SynthOptions opt = {});

// Input-free feasibility probe for the continuous design inequality: the
// same blocks compressed by orthonormal bases of the input null spaces.
// Used as an independent cross-check of synth_ct_lti feasibility.
bool feasible_ct_nullspace(const ContinuousGenerator& g, const std::vector<Matrix>& b,
                           SynthOptions opt = {});

}  // namespace mvsys
