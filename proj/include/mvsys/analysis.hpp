#pragma once

#include "mvsys/core.hpp"
#include "mvsys/generators.hpp"

#include <complex>
#include <string>
#include <vector>

namespace mvsys {

enum class Verdict { Stable, Unstable, Marginal };

const char* to_string(Verdict v);

struct SpectrumReport {
  Eigen::VectorXcd eigenvalues;
  // Continuous time: largest real part. Discrete time: largest modulus - 1.
  double margin = 0.0;
  Verdict verdict = Verdict::Marginal;
  // Eigenvectors mapped back to matrix space (complex symmetric matrices).
  std::vector<Eigen::MatrixXcd> eigenmatrices;
};

// Reduced evolution matrix of the flow on vech_bar coordinates:
// F^T (I (x) A0 + A0 (x) I + sum Ai (x) Ai + mu I) F, size n(n+1)/2.
Matrix build_mc(const ContinuousGenerator& g, double t);
Matrix build_mc_adjoint(const ContinuousGenerator& g, double t);

// Reduced one-step matrix F^T (sum Ji (x) Ji) F.
Matrix build_md(const DiscreteGenerator& g, double k);
Matrix build_md_adjoint(const DiscreteGenerator& g, double k);

// Spectral verdicts for time-invariant generators. Margins within tol of the
// stability boundary are classified marginal.
SpectrumReport spectrum_ct(const ContinuousGenerator& g, double tol = kMarginTol);
SpectrumReport spectrum_dt(const DiscreteGenerator& g, double tol = kMarginTol);

struct LyapunovCertificate {
  SymMatrix p;
  SymMatrix q;
  double residual = 0.0;   // ||equation lhs + q||_F
  double p_min_eig = 0.0;
  double q_min_eig = 0.0;
  bool solver_ok = false;  // false when the reduced system is singular
  // Certifies stability: solvable, tiny residual, p strictly positive.
  bool valid(double tol = kMarginTol) const;
};

// Solve adjoint_flow(P) = -Q on the reduced space. Q must be PD for the
// certificate to be meaningful; Q = I is the conventional choice.
LyapunovCertificate solve_lyapunov_ct(const ContinuousGenerator& g, const SymMatrix& q);

// Solve adjoint_step(P) - P = -Q.
LyapunovCertificate solve_stein_dt(const DiscreteGenerator& g, const SymMatrix& q);

struct DelayIndependenceReport {
  // Spectrum of the zero-delay summed generator; stability there is
  // equivalent to stability for every constant delay value.
  SpectrumReport spectrum;
  bool certified = false;
  SymMatrix p;
  std::vector<SymMatrix> q;        // one bound per delayed channel
  double epsilon = 0.0;
  double flow_margin = 0.0;        // -max_eig(adjoint(P) + sum Qi)
  std::vector<double> channel_margins;  // -max_eig(channel adjoint(P) - Qi)
};

DelayIndependenceReport check_delay_independent_ct(const ContinuousGenerator& g,
                                                   const DelayTerms& d,
                                                   double tol = kMarginTol);
DelayIndependenceReport check_delay_independent_dt(const DiscreteGenerator& g,
                                                   const DelayTerms& d,
                                                   double tol = kMarginTol);

// Block layout of a lifted mode-indicator system: `modes` diagonal blocks of
// size `block` each.
struct BlockStructure {
  int modes = 0;
  int block = 0;
  int dim() const { return modes * block; }
};

struct CoupledCertificate {
  std::vector<SymMatrix> p;  // one per mode
  std::vector<SymMatrix> q;
  double residual = 0.0;
  double p_min_eig = 0.0;
  bool solver_ok = false;
  Verdict verdict = Verdict::Marginal;
};

// Mode-coupled Lyapunov solve restricted to block-diagonal P, for lifted
// generators that preserve block-diagonal structure (mode-indicator lifts).
CoupledCertificate check_markov_ct(const ContinuousGenerator& lifted, const BlockStructure& s,
                                   double tol = kMarginTol);
CoupledCertificate check_markov_dt(const DiscreteGenerator& lifted, const BlockStructure& s,
                                   double tol = kMarginTol);

enum class DwellMode { Constant, Minimum };

struct HybridDwellReport {
  double dwell = 0.0;
  // Spectral radius of the reduced period map (flow over one dwell interval,
  // then jump).
  double factor = 0.0;
  double flow_margin = 0.0;  // spectral abscissa of the reduced flow matrix
  bool flow_hurwitz = false;
  Verdict verdict = Verdict::Marginal;
  Matrix period_map;
};

// Dwell-time test for time-invariant hybrid generators. Constant mode: the
// period-map contraction decides. Minimum mode: longer dwells must also be
// safe, which additionally needs the flow stable on its own.
HybridDwellReport check_hybrid_dwell(const HybridGenerator& g, double dwell, DwellMode mode,
                                     double tol = kMarginTol);

}  // namespace mvsys
