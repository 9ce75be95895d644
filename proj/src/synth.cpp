#include "mvsys/synth.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace mvsys {

namespace {

int param_size(const LmiVariable& v) {
  return v.symmetric ? reduced_dim(v.rows) : v.rows * v.cols;
}

std::vector<Matrix> unpack(const std::vector<LmiVariable>& vars, const Vector& theta) {
  std::vector<Matrix> out;
  out.reserve(vars.size());
  int off = 0;
  for (const auto& v : vars) {
    const int sz = param_size(v);
    const Vector seg = theta.segment(off, sz);
    if (v.symmetric) {
      out.push_back(unvech_bar(seg, v.rows).mat());
    } else {
      out.push_back(unvec(seg, v.rows, v.cols));
    }
    off += sz;
  }
  return out;
}

Vector initial_theta(const std::vector<LmiVariable>& vars) {
  int total = 0;
  for (const auto& v : vars) total += param_size(v);
  Vector theta = Vector::Zero(total);
  int off = 0;
  for (const auto& v : vars) {
    const int sz = param_size(v);
    Matrix start;
    if (v.init.rows() == v.rows && v.init.cols() == v.cols) {
      start = v.init;
    } else if (v.symmetric) {
      start = Matrix::Identity(v.rows, v.rows);
    } else {
      start = Matrix::Zero(v.rows, v.cols);
    }
    if (v.symmetric) {
      theta.segment(off, sz) = vech_bar(SymMatrix(start));
    } else {
      theta.segment(off, sz) = vec(start);
    }
    off += sz;
  }
  return theta;
}

// Exact Frobenius projection onto {S <= -eps I} / {S >= eps I}: clip the
// spectrum, keep the eigenvectors.
Matrix clip_definite(const Matrix& s, LmiConstraint::Sense sense, double eps) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) throw std::runtime_error("solve_lmi: eigensolver failed");
  Vector lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    lam(i) = sense == LmiConstraint::Sense::NegDef ? std::min(lam(i), -eps)
                                                   : std::max(lam(i), eps);
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

LmiSolution solve_lmi(const LmiProblem& problem, int max_iters, double tol) {
  if (problem.vars.empty()) throw std::invalid_argument("solve_lmi: no variables");
  if (problem.constraints.empty()) throw std::invalid_argument("solve_lmi: no constraints");
  if (!(problem.epsilon > 0.0)) throw std::invalid_argument("solve_lmi: epsilon must be positive");

  int n_theta = 0;
  for (const auto& v : problem.vars) {
    if (v.rows <= 0 || v.cols <= 0 || (v.symmetric && v.rows != v.cols)) {
      throw std::invalid_argument("solve_lmi: bad variable shape: " + v.name);
    }
    n_theta += param_size(v);
  }

  int total_s = 0;
  std::vector<int> offsets;
  for (const auto& c : problem.constraints) {
    if (c.dim <= 0 || !c.assemble) throw std::invalid_argument("solve_lmi: bad constraint: " + c.label);
    offsets.push_back(total_s);
    total_s += reduced_dim(c.dim);
  }

  // Reduced coordinates are isometric to the Frobenius metric, so the
  // eigenvalue clipping below is the exact projection in these coordinates.
  auto eval_all = [&](const Vector& theta) {
    const auto vals = unpack(problem.vars, theta);
    Vector s(total_s);
    for (size_t k = 0; k < problem.constraints.size(); ++k) {
      const auto& c = problem.constraints[k];
      Matrix m = c.assemble(vals);
      if (m.rows() != c.dim || m.cols() != c.dim) {
        throw std::invalid_argument("solve_lmi: assembled size mismatch: " + c.label);
      }
      s.segment(offsets[k], reduced_dim(c.dim)) = vech_bar(SymMatrix(m));
    }
    return s;
  };

  const Vector g0 = eval_all(Vector::Zero(n_theta));
  Matrix G(total_s, n_theta);
  for (int j = 0; j < n_theta; ++j) {
    Vector unit = Vector::Zero(n_theta);
    unit(j) = 1.0;
    G.col(j) = eval_all(unit) - g0;
  }

  // Least-squares projection onto the graph {s = G theta + g0}:
  // (I + G^T G) theta = theta_hat + G^T (s_hat - g0).
  Eigen::LDLT<Matrix> graph(Matrix::Identity(n_theta, n_theta) + G.transpose() * G);
  if (graph.info() != Eigen::Success) throw std::runtime_error("solve_lmi: graph factorization failed");

  auto clip_all = [&](const Vector& s) {
    Vector out(total_s);
    for (size_t k = 0; k < problem.constraints.size(); ++k) {
      const auto& c = problem.constraints[k];
      const int sz = reduced_dim(c.dim);
      const Matrix m = unvech_bar(s.segment(offsets[k], sz), c.dim).mat();
      out.segment(offsets[k], sz) = vech_bar(SymMatrix(clip_definite(m, c.sense, problem.epsilon)));
    }
    return out;
  };

  const double scale = std::max(1.0, g0.cwiseAbs().maxCoeff());
  const double target = tol * scale;

  Vector theta = initial_theta(problem.vars);
  Vector s = G * theta + g0;

  LmiSolution sol;
  sol.violation_history.reserve(static_cast<size_t>(std::min(max_iters, 1 << 16)));
  for (int iter = 1; iter <= max_iters; ++iter) {
    const Vector sb = clip_all(s);
    const double dist = (s - sb).norm();
    sol.violation_history.push_back(dist);
    sol.iterations = iter;
    if (dist <= 0.1 * target) break;
    // A stalled gap far from the target will not close within any budget we
    // would grant; treat it as an infeasibility certificate for this run.
    const size_t h = sol.violation_history.size();
    if (iter >= 1000 && iter % 500 == 0 && dist > 1e3 * target) {
      const double past = sol.violation_history[h - 500];
      if (dist > past * (1.0 - 1e-4)) break;
    }
    theta = graph.solve(theta + G.transpose() * (sb - g0));
    s = G * theta + g0;
  }

  sol.values = unpack(problem.vars, theta);
  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < problem.constraints.size(); ++k) {
    const auto& c = problem.constraints[k];
    const SymMatrix m(c.assemble(sol.values));
    const double margin = c.sense == LmiConstraint::Sense::NegDef
                              ? -m.max_eig() - problem.epsilon
                              : m.min_eig() - problem.epsilon;
    sol.margins.push_back(margin);
    worst = std::min(worst, margin);
  }
  sol.worst_margin = worst;
  sol.feasible = worst >= -target;
  return sol;
}

namespace {

struct LtiChannels {
  std::vector<Matrix> a;  // channel maps
  std::vector<Matrix> b;  // per-channel input (0 cols = uncontrolled)
  double mu = 0.0;
};

void check_inputs(const std::vector<Matrix>& b, int n, size_t nch, const char* who) {
  if (b.size() != nch) {
    throw std::invalid_argument(std::string(who) + ": need one input matrix per channel");
  }
  for (const auto& m : b) {
    if (m.size() != 0 && m.rows() != n) {
      throw std::invalid_argument(std::string(who) + ": input row count must match state dimension");
    }
  }
}

double auto_epsilon(const std::vector<Matrix>& a, const std::vector<Matrix>& b, double eps) {
  if (eps > 0.0) return eps;
  double norm = 0.0;
  for (const auto& m : a) norm = std::max(norm, m.norm());
  for (const auto& m : b) {
    if (m.size() != 0) norm = std::max(norm, m.norm());
  }
  return 1e-6 * (1.0 + norm);
}

// Variable list: Q first, then one U per controlled channel. uvar[i] is the
// index into the variable vector, or -1 when channel i has no input.
std::vector<int> add_gain_vars(LmiProblem& prob, const std::vector<Matrix>& b, int n) {
  std::vector<int> uvar(b.size(), -1);
  for (size_t i = 0; i < b.size(); ++i) {
    const int m = static_cast<int>(b[i].cols());
    if (b[i].size() == 0 || m == 0) continue;
    uvar[i] = static_cast<int>(prob.vars.size());
    prob.vars.push_back({"U" + std::to_string(i), m, n, false, Matrix()});
  }
  return uvar;
}

Matrix closed_term(const Matrix& a, const Matrix& b, int uvar, const std::vector<Matrix>& vals,
                   const Matrix& q) {
  Matrix m = a * q;
  if (uvar >= 0) m += b * vals[uvar];
  return m;
}

// [[He[A0 Q + B0 U0] + mu Q + slope, rows (Ai Q + Bi Ui)^T], [cols, -I (x) Q]]
// Values of Q and the slope term are supplied by the caller so the same
// assembler serves both the time-invariant and the gridded profile case.
Matrix flow_block(const LtiChannels& ch, const std::vector<int>& uvar,
                  const std::vector<Matrix>& vals, const Matrix& q, const Matrix& slope) {
  const int n = static_cast<int>(q.rows());
  const int nn = static_cast<int>(ch.a.size()) - 1;  // quadratic channels
  const int d = n * (1 + nn);
  Matrix s = Matrix::Zero(d, d);
  const Matrix tl = closed_term(ch.a[0], ch.b[0], uvar[0], vals, q);
  s.block(0, 0, n, n) = tl + tl.transpose() + ch.mu * q + slope;
  for (int i = 1; i <= nn; ++i) {
    const Matrix mi = closed_term(ch.a[i], ch.b[i], uvar[i], vals, q);
    s.block(0, i * n, n, n) = mi.transpose();
    s.block(i * n, 0, n, n) = mi;
    s.block(i * n, i * n, n, n) = -q;
  }
  return s;
}

// [[-Qpre, rows (Ji Qpre + Ei Vi)^T], [cols, -I (x) Qpost]]
Matrix jump_block(const LtiChannels& ch, const std::vector<int>& uvar,
                  const std::vector<Matrix>& vals, const Matrix& qpre, const Matrix& qpost) {
  const int n = static_cast<int>(qpre.rows());
  const int nj = static_cast<int>(ch.a.size());
  const int d = n * (1 + nj);
  Matrix s = Matrix::Zero(d, d);
  s.block(0, 0, n, n) = -qpre;
  for (int i = 0; i < nj; ++i) {
    const Matrix mi = closed_term(ch.a[i], ch.b[i], uvar[i], vals, qpre);
    s.block(0, (i + 1) * n, n, n) = mi.transpose();
    s.block((i + 1) * n, 0, n, n) = mi;
    s.block((i + 1) * n, (i + 1) * n, n, n) = -qpost;
  }
  return s;
}

std::vector<Matrix> extract_gains(const LtiChannels& ch, const std::vector<int>& uvar,
                                  const std::vector<Matrix>& vals, const Matrix& q) {
  const int n = static_cast<int>(q.rows());
  Eigen::LDLT<Matrix> qf(q);
  std::vector<Matrix> gains;
  for (size_t i = 0; i < ch.b.size(); ++i) {
    if (uvar[i] < 0) {
      gains.push_back(Matrix::Zero(0, n));
    } else {
      // K = U Q^{-1}, solved as Q K^T = U^T
      gains.push_back(qf.solve(vals[uvar[i]].transpose()).transpose());
    }
  }
  return gains;
}

std::string describe(const LmiSolution& sol) {
  std::ostringstream os;
  os << (sol.feasible ? "feasible" : "infeasible") << " after " << sol.iterations
     << " iterations, worst margin " << sol.worst_margin;
  return os.str();
}

LtiChannels ct_channels(const ContinuousGenerator& g, const std::vector<Matrix>& b,
                        const char* who) {
  g.validate();
  if (!g.is_lti()) throw std::invalid_argument(std::string(who) + ": schedules must be constant");
  check_inputs(b, g.n, 1 + g.noise.size(), who);
  LtiChannels ch;
  ch.a.push_back(g.a0(0.0));
  for (const auto& s : g.noise) ch.a.push_back(s(0.0));
  ch.b = b;
  ch.mu = g.mu(0.0);
  return ch;
}

LtiChannels dt_channels(const DiscreteGenerator& g, const std::vector<Matrix>& b,
                        const char* who) {
  g.validate();
  if (!g.is_lti()) throw std::invalid_argument(std::string(who) + ": schedules must be constant");
  check_inputs(b, g.n, g.jumps.size(), who);
  LtiChannels ch;
  for (const auto& s : g.jumps) ch.a.push_back(s(0.0));
  ch.b = b;
  return ch;
}

}  // namespace

GainSet synth_ct_lti(const ContinuousGenerator& g, const std::vector<Matrix>& b,
                     SynthOptions opt) {
  const LtiChannels ch = ct_channels(g, b, "synth_ct_lti");
  const int n = g.n;

  LmiProblem prob;
  prob.epsilon = auto_epsilon(ch.a, ch.b, opt.epsilon);
  prob.vars.push_back({"Q", n, n, true, Matrix()});
  const std::vector<int> uvar = add_gain_vars(prob, ch.b, n);

  const int d = n * static_cast<int>(ch.a.size());
  prob.constraints.push_back(
      {d, LmiConstraint::Sense::NegDef,
       [ch, uvar](const std::vector<Matrix>& v) {
         return flow_block(ch, uvar, v, v[0], Matrix::Zero(v[0].rows(), v[0].cols()));
       },
       "flow"});
  prob.constraints.push_back({n, LmiConstraint::Sense::PosDef,
                              [n](const std::vector<Matrix>& v) {
                                return Matrix(v[0] - Matrix::Identity(n, n));
                              },
                              "scale"});

  const LmiSolution sol = solve_lmi(prob, opt.max_iters, opt.tol);

  GainSet out;
  out.epsilon = prob.epsilon;
  out.margins = sol.margins;
  out.q = SymMatrix(sol.values[0]);
  for (size_t i = 0; i < ch.b.size(); ++i) {
    out.u.push_back(uvar[i] >= 0 ? sol.values[uvar[i]] : Matrix::Zero(0, n));
  }
  out.status = describe(sol);
  if (!sol.feasible) return out;

  out.gains = extract_gains(ch, uvar, sol.values, sol.values[0]);
  ContinuousGenerator closed;
  closed.n = n;
  closed.a0 = MatrixSchedule::constant(ch.a[0] + (uvar[0] >= 0 ? Matrix(ch.b[0] * out.gains[0])
                                                               : Matrix::Zero(n, n)));
  for (size_t i = 1; i < ch.a.size(); ++i) {
    Matrix cl = ch.a[i];
    if (uvar[i] >= 0) cl += ch.b[i] * out.gains[i];
    closed.noise.push_back(MatrixSchedule::constant(cl));
  }
  closed.mu = ScalarSchedule::constant(ch.mu);
  out.closed_loop = spectrum_ct(closed);
  out.found = out.closed_loop.verdict == Verdict::Stable;
  if (!out.found) out.status += "; closed-loop spectrum re-check failed";
  return out;
}

GainSet synth_dt_lti(const DiscreteGenerator& g, const std::vector<Matrix>& b, SynthOptions opt) {
  const LtiChannels ch = dt_channels(g, b, "synth_dt_lti");
  const int n = g.n;

  LmiProblem prob;
  prob.epsilon = auto_epsilon(ch.a, ch.b, opt.epsilon);
  prob.vars.push_back({"Q", n, n, true, Matrix()});
  const std::vector<int> uvar = add_gain_vars(prob, ch.b, n);

  const int d = n * (1 + static_cast<int>(ch.a.size()));
  prob.constraints.push_back({d, LmiConstraint::Sense::NegDef,
                              [ch, uvar](const std::vector<Matrix>& v) {
                                return jump_block(ch, uvar, v, v[0], v[0]);
                              },
                              "step"});
  prob.constraints.push_back({n, LmiConstraint::Sense::PosDef,
                              [n](const std::vector<Matrix>& v) {
                                return Matrix(v[0] - Matrix::Identity(n, n));
                              },
                              "scale"});

  const LmiSolution sol = solve_lmi(prob, opt.max_iters, opt.tol);

  GainSet out;
  out.epsilon = prob.epsilon;
  out.margins = sol.margins;
  out.q = SymMatrix(sol.values[0]);
  for (size_t i = 0; i < ch.b.size(); ++i) {
    out.u.push_back(uvar[i] >= 0 ? sol.values[uvar[i]] : Matrix::Zero(0, n));
  }
  out.status = describe(sol);
  if (!sol.feasible) return out;

  out.gains = extract_gains(ch, uvar, sol.values, sol.values[0]);
  DiscreteGenerator closed;
  closed.n = n;
  for (size_t i = 0; i < ch.a.size(); ++i) {
    Matrix cl = ch.a[i];
    if (uvar[i] >= 0) cl += ch.b[i] * out.gains[i];
    closed.jumps.push_back(MatrixSchedule::constant(cl));
  }
  out.closed_loop = spectrum_dt(closed);
  out.found = out.closed_loop.verdict == Verdict::Stable;
  if (!out.found) out.status += "; closed-loop spectrum re-check failed";
  return out;
}

HybridSynthResult synth_hybrid_dwell(const HybridGenerator& g, const std::vector<Matrix>& b,
                                     const std::vector<Matrix>& e, double dwell_min,
                                     double dwell_max, DwellMode mode, SynthOptions opt) {
  g.validate();
  if (!g.is_lti()) throw std::invalid_argument("synth_hybrid_dwell: schedules must be constant");
  if (!(dwell_min > 0.0) || dwell_max < dwell_min) {
    throw std::invalid_argument("synth_hybrid_dwell: need 0 < dwell_min <= dwell_max");
  }
  if (mode == DwellMode::Minimum && dwell_min != dwell_max) {
    throw std::invalid_argument("synth_hybrid_dwell: minimum-dwell mode takes a single dwell");
  }
  if (opt.grid < 2) throw std::invalid_argument("synth_hybrid_dwell: grid needs at least 2 nodes");

  const LtiChannels flow = ct_channels(g.flow, b, "synth_hybrid_dwell");
  const LtiChannels jump = dt_channels(g.jump, e, "synth_hybrid_dwell");
  const int n = g.flow.n;

  std::vector<Matrix> all = flow.a;
  all.insert(all.end(), jump.a.begin(), jump.a.end());
  std::vector<Matrix> allb = flow.b;
  allb.insert(allb.end(), jump.b.begin(), jump.b.end());
  const double eps = auto_epsilon(all, allb, opt.epsilon);

  HybridSynthResult out;
  out.epsilon = eps;

  LmiSolution sol;
  std::vector<int> fvar, jvar;
  const int cap = std::max(opt.grid, opt.max_grid);
  int m = 0;
  for (m = opt.grid; m <= cap; m *= 2) {
    const double delta = dwell_max / (m - 1);

    LmiProblem prob;
    prob.epsilon = eps;
    for (int j = 0; j < m; ++j) {
      prob.vars.push_back({"Q" + std::to_string(j), n, n, true, Matrix()});
    }
    fvar = add_gain_vars(prob, flow.b, n);
    jvar = add_gain_vars(prob, jump.b, n);

    const int fd = n * static_cast<int>(flow.a.size());
    const int jd = n * (1 + static_cast<int>(jump.a.size()));

    // Decay along the profile: both segment endpoints see the segment slope,
    // so the affine-in-time inequality holds across each whole segment.
    for (int seg = 0; seg + 1 < m; ++seg) {
      for (int node : {seg, seg + 1}) {
        prob.constraints.push_back(
            {fd, LmiConstraint::Sense::NegDef,
             [flow, fvar, seg, node, delta](const std::vector<Matrix>& v) {
               const Matrix slope = (v[seg + 1] - v[seg]) / delta;
               return flow_block(flow, fvar, v, v[node], Matrix(-slope));
             },
             "flow seg " + std::to_string(seg) + " node " + std::to_string(node)});
      }
    }
    if (mode == DwellMode::Minimum) {
      // Profile held constant past the dwell: the tail must decay on its own.
      prob.constraints.push_back(
          {fd, LmiConstraint::Sense::NegDef,
           [flow, fvar, m, n](const std::vector<Matrix>& v) {
             return flow_block(flow, fvar, v, v[m - 1], Matrix::Zero(n, n));
           },
           "flow tail"});
    }

    std::vector<int> jump_nodes;
    for (int j = 0; j < m; ++j) {
      const double tau = j * delta;
      if (tau >= dwell_min - 1e-9 * dwell_max) jump_nodes.push_back(j);
    }
    for (int j : jump_nodes) {
      prob.constraints.push_back({jd, LmiConstraint::Sense::NegDef,
                                  [jump, jvar, j](const std::vector<Matrix>& v) {
                                    return jump_block(jump, jvar, v, v[j], v[0]);
                                  },
                                  "jump node " + std::to_string(j)});
    }
    for (int j = 0; j < m; ++j) {
      prob.constraints.push_back({n, LmiConstraint::Sense::PosDef,
                                  [n, j](const std::vector<Matrix>& v) {
                                    return Matrix(v[j] - Matrix::Identity(n, n));
                                  },
                                  "scale node " + std::to_string(j)});
    }

    sol = solve_lmi(prob, opt.max_iters, opt.tol);
    if (sol.feasible) break;
  }

  out.grid = std::min(m, cap);
  if (!sol.feasible) {
    out.status = "infeasible up to grid " + std::to_string(cap) + "; " + describe(sol);
    return out;
  }
  out.status = describe(sol) + " at grid " + std::to_string(out.grid);

  for (int j = 0; j < out.grid; ++j) out.q_nodes.push_back(SymMatrix(sol.values[j]));
  // Gains are recovered against one profile value each (start of flow,
  // pre-jump). When the profile varies and that channel has an input this is
  // a heuristic recovery; the dwell re-check below is what decides `found`.
  out.flow_gains = extract_gains(flow, fvar, sol.values, sol.values[0]);
  out.jump_gains = extract_gains(jump, jvar, sol.values, sol.values[out.grid - 1]);

  HybridGenerator closed;
  closed.flow.n = n;
  {
    Matrix cl = flow.a[0];
    if (fvar[0] >= 0) cl += flow.b[0] * out.flow_gains[0];
    closed.flow.a0 = MatrixSchedule::constant(cl);
  }
  for (size_t i = 1; i < flow.a.size(); ++i) {
    Matrix cl = flow.a[i];
    if (fvar[i] >= 0) cl += flow.b[i] * out.flow_gains[i];
    closed.flow.noise.push_back(MatrixSchedule::constant(cl));
  }
  closed.flow.mu = ScalarSchedule::constant(flow.mu);
  closed.jump.n = n;
  for (size_t i = 0; i < jump.a.size(); ++i) {
    Matrix cl = jump.a[i];
    if (jvar[i] >= 0) cl += jump.b[i] * out.jump_gains[i];
    closed.jump.jumps.push_back(MatrixSchedule::constant(cl));
  }
  closed.impulses.kind = ImpulseSchedule::Kind::Periodic;
  closed.impulses.period = dwell_max;

  // Independent re-check of the closed loop at every certified dwell node.
  const double delta = dwell_max / (out.grid - 1);
  bool all_stable = true;
  HybridDwellReport worst;
  bool have = false;
  for (int j = 0; j < out.grid; ++j) {
    const double tau = j * delta;
    if (tau < dwell_min - 1e-9 * dwell_max) continue;
    const HybridDwellReport rep = check_hybrid_dwell(closed, tau, mode, opt.tol);
    out.node_factors.push_back(rep.factor);
    all_stable = all_stable && rep.verdict == Verdict::Stable;
    if (!have || rep.factor > worst.factor) worst = rep;
    have = true;
  }
  out.closed_loop = worst;
  out.found = all_stable;
  if (!out.found) out.status += "; closed-loop dwell re-check failed";
  return out;
}

bool feasible_ct_nullspace(const ContinuousGenerator& g, const std::vector<Matrix>& b,
                           SynthOptions opt) {
  const LtiChannels ch = ct_channels(g, b, "feasible_ct_nullspace");
  const int n = g.n;
  const int nch = static_cast<int>(ch.a.size());

  // Orthonormal basis of ker(Bi^T) per channel; a full-row-rank input wipes
  // its block out of the compressed inequality entirely.
  std::vector<Matrix> w(nch);
  int total = 0;
  for (int i = 0; i < nch; ++i) {
    if (ch.b[i].size() == 0 || ch.b[i].cols() == 0) {
      w[i] = Matrix::Identity(n, n);
    } else {
      Eigen::FullPivLU<Matrix> lu(ch.b[i].transpose());
      if (lu.dimensionOfKernel() == 0) {
        w[i] = Matrix::Zero(n, 0);
      } else {
        const Matrix k = lu.kernel();
        Eigen::HouseholderQR<Matrix> qr(k);
        w[i] = qr.householderQ() * Matrix::Identity(n, static_cast<int>(k.cols()));
      }
    }
    total += static_cast<int>(w[i].cols());
  }
  if (total == 0) return true;  // every direction has input authority

  Matrix wbar = Matrix::Zero(n * nch, total);
  int col = 0;
  for (int i = 0; i < nch; ++i) {
    wbar.block(i * n, col, n, w[i].cols()) = w[i];
    col += static_cast<int>(w[i].cols());
  }

  const double eps = auto_epsilon(ch.a, ch.b, opt.epsilon);
  LmiProblem prob;
  prob.epsilon = eps;
  prob.vars.push_back({"Q", n, n, true, Matrix()});
  const std::vector<int> nogain(nch, -1);
  prob.constraints.push_back(
      {total, LmiConstraint::Sense::NegDef,
       [ch, nogain, wbar, n](const std::vector<Matrix>& v) {
         const Matrix s = flow_block(ch, nogain, v, v[0], Matrix::Zero(n, n));
         return Matrix(wbar.transpose() * s * wbar);
       },
       "compressed flow"});
  prob.constraints.push_back({n, LmiConstraint::Sense::PosDef,
                              [n](const std::vector<Matrix>& v) {
                                return Matrix(v[0] - Matrix::Identity(n, n));
                              },
                              "scale"});

  return solve_lmi(prob, opt.max_iters, opt.tol).feasible;
}

}  // namespace mvsys
