#pragma once

#include "mvsys/core.hpp"
#include "mvsys/rng.hpp"
#include "mvsys/schedule.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace mvsys {

// d/dt X = A0 X + X A0^T + sum_i Ai X Ai^T + mu X on symmetric matrices.
// The quadratic channels model second moments of multiplicative noise; mu
// carries scalar compensation terms (e.g. Poisson rates folded by a lift).
struct ContinuousGenerator {
  int n = 0;
  MatrixSchedule a0;
  std::vector<MatrixSchedule> noise;
  ScalarSchedule mu = ScalarSchedule::constant(0.0);

  bool is_lti() const;
  void validate() const;
};

// X(k+1) = sum_i Ji X Ji^T. Schedules are indexed by the step counter.
struct DiscreteGenerator {
  int n = 0;
  std::vector<MatrixSchedule> jumps;

  bool is_lti() const;
  void validate() const;
};

// One retarded channel: contributes B(t) X(t - delay) B(t)^T.
struct DelayTerm {
  MatrixSchedule matrix;
  double delay = 0.0;
};

struct DelayTerms {
  std::vector<DelayTerm> terms;

  double max_delay() const;
  // Smallest strictly positive delay; nullopt when all are zero.
  std::optional<double> min_positive_delay() const;
  void validate(int n) const;
};

// Impulse/jump instants for hybrid evolution.
struct ImpulseSchedule {
  enum class Kind { Explicit, Periodic, Range };
  Kind kind = Kind::Explicit;
  std::vector<double> times;  // Explicit
  double period = 0.0;        // Periodic
  double tmin = 0.0, tmax = 0.0;  // Range: dwell drawn uniformly per jump

  // Jump instants inside (t0, tf]. No jump fires at t0 itself. Range kind
  // draws dwell times from rng (required non-null there).
  std::vector<double> resolve(double t0, double tf, SplitMix64* rng) const;
  void validate() const;
};

struct HybridGenerator {
  ContinuousGenerator flow;
  DiscreteGenerator jump;
  ImpulseSchedule impulses;

  bool is_lti() const { return flow.is_lti() && jump.is_lti(); }
  void validate() const;
};

// Result is exactly symmetric (symmetrized once after assembly).
SymMatrix apply_ct(const ContinuousGenerator& g, const SymMatrix& x, double t);

// Adjoint under the Frobenius pairing: A0^T P + P A0 + sum Ai^T P Ai + mu P.
SymMatrix apply_ct_adjoint(const ContinuousGenerator& g, const SymMatrix& p, double t);

SymMatrix apply_dt(const DiscreteGenerator& g, const SymMatrix& x, double k);
SymMatrix apply_dt_adjoint(const DiscreteGenerator& g, const SymMatrix& p, double k);

// Delayed contribution sum_i Bi(t) history(t - h_i) Bi(t)^T. The history
// callback must cover every requested instant.
using HistoryFn = std::function<SymMatrix(double)>;
SymMatrix apply_delay_ct(const DelayTerms& d, const HistoryFn& history, double t);

}  // namespace mvsys
