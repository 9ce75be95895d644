#pragma once

#include "mvsys/analysis.hpp"
#include "mvsys/generators.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mvsys {

enum class StochKind {
  CtSdePoisson,       // linear SDE with Brownian channels and Poisson jumps
  CtMarkovJump,       // modes switched by a continuous-time Markov chain
  CtSampledPoisson,   // sampled-data loop, update instants Poisson
  DtRandomParam,      // i.i.d. multiplicative parameters per step
  DtMarkovJump,       // modes switched by a discrete-time Markov chain
  HybridSdeImpulses,  // SDE flow with impulsive multiplicative jumps
  HybridSwitched,     // deterministic mode sequence, state continuous
  HybridSampled,      // sampled-data loop, deterministic update instants
  HybridMarkovImpulsive,  // chain with transient impulse modes
};

const char* to_string(StochKind k);

struct PoissonJumpTerm {
  Matrix map;
  double rate = 0.0;
};

struct ModeDynamics {
  Matrix a0;
  std::vector<Matrix> brownian;
};

// x+ = (j0 + sum_i nu_i jn[i]) x with nu_i zero-mean unit-variance i.i.d.
struct JumpNoise {
  Matrix j0;
  std::vector<Matrix> jn;
};

struct StochasticSpec {
  StochKind kind = StochKind::CtSdePoisson;
  int n = 0;
  int m = 0;  // input dimension for sampled-data kinds
  double t0 = 0.0;

  Matrix a0;
  std::vector<Matrix> brownian;
  std::vector<PoissonJumpTerm> poisson;

  // DtRandomParam: a0 + sum nu_i noise[i]; bernoulli draws use p
  bool bernoulli = false;
  std::vector<Matrix> dt_noise;
  std::vector<double> p;

  std::vector<ModeDynamics> modes;
  Matrix rate_matrix;   // CT chain generator; rows sum to 0
  Matrix trans_matrix;  // DT chain transition matrix; rows sum to 1
  std::vector<double> initial_dist;  // chain law at t0; defaults to mode 0

  Matrix b0;
  std::vector<Matrix> brownian_b;  // paired with brownian for sampled kinds
  Matrix k1, k2;
  double sample_rate = 0.0;

  JumpNoise jump;                    // HybridSdeImpulses
  std::vector<JumpNoise> disc_modes;  // HybridMarkovImpulsive transient modes
  std::vector<int> sequence;          // HybridSwitched mode per segment
  ImpulseSchedule impulses;

  Vector x0;  // initial state for path simulation
  Vector u0;  // initial held input for sampled kinds (defaults to zero)
};

// Deterministic evolution of the second moment (or mode-indicator second
// moments) of a stochastic model, expressed in the generator vocabulary so
// the analysis and simulation routines apply unchanged.
struct LiftedSystem {
  std::variant<ContinuousGenerator, DiscreteGenerator, HybridGenerator> body;
  std::optional<BlockStructure> structure;  // set for mode-indicator lifts
  std::string provenance;

  bool is_ct() const { return std::holds_alternative<ContinuousGenerator>(body); }
  bool is_dt() const { return std::holds_alternative<DiscreteGenerator>(body); }
  bool is_hybrid() const { return std::holds_alternative<HybridGenerator>(body); }
  const ContinuousGenerator& ct() const;
  const DiscreteGenerator& dt() const;
  const HybridGenerator& hybrid() const;
  int dim() const;
};

LiftedSystem lift_ct_sde_poisson(const StochasticSpec& s);
LiftedSystem lift_ct_markov(const StochasticSpec& s);
LiftedSystem lift_dt_random(const StochasticSpec& s);
LiftedSystem lift_dt_markov(const StochasticSpec& s);
LiftedSystem lift_sampled_poisson(const StochasticSpec& s);
LiftedSystem lift_hybrid(const StochasticSpec& s);

// Dispatch on s.kind.
LiftedSystem lift_any(const StochasticSpec& s);

// Initial moment matrix matching the lift's block layout: xx^T, or indicator
// blocks weighted by the initial mode distribution, or the augmented (x,u)
// moment for sampled kinds.
SymMatrix lift_initial_state(const StochasticSpec& s);

}  // namespace mvsys
