#include "mvsys/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace mvsys {

namespace {

Verdict classify(double margin, double tol) {
  if (margin < -tol) return Verdict::Stable;
  if (margin > tol) return Verdict::Unstable;
  return Verdict::Marginal;
}

struct ReducedSolve {
  Vector x;
  bool ok = false;
};

// Solve m x = rhs with singularity detection relative to the matrix scale.
ReducedSolve solve_reduced(const Matrix& m, const Vector& rhs) {
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-12 * std::max(1.0, m.norm()));
  ReducedSolve out;
  if (!lu.isInvertible()) return out;
  out.x = lu.solve(rhs);
  out.ok = true;
  return out;
}

SpectrumReport spectrum_of(const Matrix& m, int n, bool discrete, double tol) {
  Eigen::EigenSolver<Matrix> es(m);
  SpectrumReport rep;
  rep.eigenvalues = es.eigenvalues();
  double margin = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
    const std::complex<double> lam = rep.eigenvalues(i);
    margin = std::max(margin, discrete ? std::abs(lam) - 1.0 : lam.real());
  }
  rep.margin = margin;
  rep.verdict = classify(margin, tol);
  rep.eigenmatrices.reserve(rep.eigenvalues.size());
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    Eigen::MatrixXcd em(n, n);
    const SymMatrix re = unvech_bar(v.real(), n);
    const SymMatrix im = unvech_bar(v.imag(), n);
    em.real() = re.mat();
    em.imag() = im.mat();
    rep.eigenmatrices.push_back(std::move(em));
  }
  return rep;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Marginal: return "marginal";
  }
  return "marginal";
}

Matrix build_mc(const ContinuousGenerator& g, double t) {
  g.validate();
  const int n = g.n;
  const Matrix f = build_F(n);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a0 = g.a0(t);
  Matrix k = kron(id, a0) + kron(a0, id) + g.mu(t) * Matrix::Identity(n * n, n * n);
  for (const auto& s : g.noise) {
    const Matrix ai = s(t);
    k += kron(ai, ai);
  }
  return f.transpose() * k * f;
}

Matrix build_mc_adjoint(const ContinuousGenerator& g, double t) {
  const int n = g.n;
  const Matrix f = build_F(n);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a0t = g.a0(t).transpose();
  Matrix k = kron(id, a0t) + kron(a0t, id) + g.mu(t) * Matrix::Identity(n * n, n * n);
  for (const auto& s : g.noise) {
    const Matrix ait = s(t).transpose();
    k += kron(ait, ait);
  }
  return f.transpose() * k * f;
}

Matrix build_md(const DiscreteGenerator& g, double k) {
  g.validate();
  const int n = g.n;
  const Matrix f = build_F(n);
  Matrix kk = Matrix::Zero(n * n, n * n);
  for (const auto& s : g.jumps) {
    const Matrix ji = s(k);
    kk += kron(ji, ji);
  }
  return f.transpose() * kk * f;
}

Matrix build_md_adjoint(const DiscreteGenerator& g, double k) {
  const int n = g.n;
  const Matrix f = build_F(n);
  Matrix kk = Matrix::Zero(n * n, n * n);
  for (const auto& s : g.jumps) {
    const Matrix jit = s(k).transpose();
    kk += kron(jit, jit);
  }
  return f.transpose() * kk * f;
}

SpectrumReport spectrum_ct(const ContinuousGenerator& g, double tol) {
  if (!g.is_lti()) throw std::invalid_argument("spectrum_ct: generator must be time-invariant");
  return spectrum_of(build_mc(g, 0.0), g.n, /*discrete=*/false, tol);
}

SpectrumReport spectrum_dt(const DiscreteGenerator& g, double tol) {
  if (!g.is_lti()) throw std::invalid_argument("spectrum_dt: generator must be time-invariant");
  return spectrum_of(build_md(g, 0.0), g.n, /*discrete=*/true, tol);
}

bool LyapunovCertificate::valid(double tol) const {
  if (!solver_ok) return false;
  const double scale = std::max(1.0, nuclear_norm(p));
  if (residual > 1e-9 * scale) return false;
  return p_min_eig > tol * std::max(1.0, nuclear_norm(p)) && q_min_eig > 0;
}

LyapunovCertificate solve_lyapunov_ct(const ContinuousGenerator& g, const SymMatrix& q) {
  if (q.dim() != g.n) throw std::invalid_argument("solve_lyapunov_ct: shape mismatch");
  LyapunovCertificate cert;
  cert.q = q;
  cert.q_min_eig = q.min_eig();
  const Matrix madj = build_mc_adjoint(g, 0.0);
  const auto sol = solve_reduced(madj, -vech_bar(q));
  if (!sol.ok) {
    cert.p = SymMatrix::Zero(g.n);
    return cert;
  }
  cert.p = unvech_bar(sol.x, g.n);
  cert.p_min_eig = cert.p.min_eig();
  cert.residual = (apply_ct_adjoint(g, cert.p, 0.0).mat() + q.mat()).norm();
  cert.solver_ok = true;
  return cert;
}

LyapunovCertificate solve_stein_dt(const DiscreteGenerator& g, const SymMatrix& q) {
  if (q.dim() != g.n) throw std::invalid_argument("solve_stein_dt: shape mismatch");
  LyapunovCertificate cert;
  cert.q = q;
  cert.q_min_eig = q.min_eig();
  const int s = reduced_dim(g.n);
  const Matrix lhs = build_md_adjoint(g, 0.0) - Matrix::Identity(s, s);
  const auto sol = solve_reduced(lhs, -vech_bar(q));
  if (!sol.ok) {
    cert.p = SymMatrix::Zero(g.n);
    return cert;
  }
  cert.p = unvech_bar(sol.x, g.n);
  cert.p_min_eig = cert.p.min_eig();
  cert.residual =
      (apply_dt_adjoint(g, cert.p, 0.0).mat() - cert.p.mat() + q.mat()).norm();
  cert.solver_ok = true;
  return cert;
}

DelayIndependenceReport check_delay_independent_ct(const ContinuousGenerator& g,
                                                   const DelayTerms& d, double tol) {
  if (!g.is_lti()) {
    throw std::invalid_argument("check_delay_independent_ct: generator must be time-invariant");
  }
  d.validate(g.n);
  for (const auto& term : d.terms) {
    if (!term.matrix.is_constant()) {
      throw std::invalid_argument("check_delay_independent_ct: delay coefficients must be constant");
    }
  }

  // Zero-delay summed generator: the delayed channels enter like noise terms.
  ContinuousGenerator sum = g;
  for (const auto& term : d.terms) sum.noise.push_back(term.matrix);

  DelayIndependenceReport rep;
  rep.spectrum = spectrum_ct(sum, tol);
  rep.p = SymMatrix::Zero(g.n);
  if (rep.spectrum.verdict != Verdict::Stable) return rep;

  const LyapunovCertificate cert = solve_lyapunov_ct(sum, SymMatrix::Identity(g.n));
  if (!cert.valid(tol)) return rep;

  // adjoint_sum(P) = -I splits as adjoint_flow(P) + sum channel_adjoints(P).
  // With epsilon = 1/(2N), Qi = channel_adjoint(P) + eps I leaves margin 1/2
  // in the flow inequality and eps per channel, both >= eps/2.
  const size_t nch = d.terms.size();
  rep.p = cert.p;
  rep.epsilon = 0.5 / static_cast<double>(nch);
  Matrix qsum = Matrix::Zero(g.n, g.n);
  for (const auto& term : d.terms) {
    const Matrix b = term.matrix(0.0);
    Matrix qi = b.transpose() * cert.p.mat() * b + rep.epsilon * Matrix::Identity(g.n, g.n);
    rep.q.emplace_back(qi);
    qsum += qi;
    // channel inequality: channel_adjoint(P) - Qi <= 0
    const SymMatrix slack(b.transpose() * cert.p.mat() * b - qi);
    rep.channel_margins.push_back(-slack.max_eig());
  }
  const SymMatrix flow_lhs(apply_ct_adjoint(g, cert.p, 0.0).mat() + qsum);
  rep.flow_margin = -flow_lhs.max_eig();
  bool ok = rep.flow_margin > 0;
  for (double m : rep.channel_margins) ok = ok && m >= 0;
  rep.certified = ok && is_psd(cert.p, 0.0) && cert.p_min_eig > 0;
  return rep;
}

DelayIndependenceReport check_delay_independent_dt(const DiscreteGenerator& g,
                                                   const DelayTerms& d, double tol) {
  if (!g.is_lti()) {
    throw std::invalid_argument("check_delay_independent_dt: generator must be time-invariant");
  }
  d.validate(g.n);
  for (const auto& term : d.terms) {
    if (!term.matrix.is_constant()) {
      throw std::invalid_argument("check_delay_independent_dt: delay coefficients must be constant");
    }
  }

  DiscreteGenerator sum = g;
  for (const auto& term : d.terms) sum.jumps.push_back(term.matrix);

  DelayIndependenceReport rep;
  rep.spectrum = spectrum_dt(sum, tol);
  rep.p = SymMatrix::Zero(g.n);
  if (rep.spectrum.verdict != Verdict::Stable) return rep;

  const LyapunovCertificate cert = solve_stein_dt(sum, SymMatrix::Identity(g.n));
  if (!cert.valid(tol)) return rep;

  const size_t nch = d.terms.size();
  rep.p = cert.p;
  rep.epsilon = 0.5 / static_cast<double>(nch);
  Matrix qsum = Matrix::Zero(g.n, g.n);
  for (const auto& term : d.terms) {
    const Matrix h = term.matrix(0.0);
    Matrix qi = h.transpose() * cert.p.mat() * h + rep.epsilon * Matrix::Identity(g.n, g.n);
    rep.q.emplace_back(qi);
    qsum += qi;
    const SymMatrix slack(h.transpose() * cert.p.mat() * h - qi);
    rep.channel_margins.push_back(-slack.max_eig());
  }
  const SymMatrix step_lhs(apply_dt_adjoint(g, cert.p, 0.0).mat() - cert.p.mat() + qsum);
  rep.flow_margin = -step_lhs.max_eig();
  bool ok = rep.flow_margin > 0;
  for (double m : rep.channel_margins) ok = ok && m >= 0;
  rep.certified = ok && cert.p_min_eig > 0;
  return rep;
}

namespace {

// Matrix of the lifted adjoint restricted to block-diagonal symmetric
// matrices, built by applying the operator to a block-diagonal basis.
// Throws when the operator leaks outside the block-diagonal subspace.
template <class ApplyAdjoint>
Matrix restricted_adjoint_matrix(const ApplyAdjoint& apply, const BlockStructure& s,
                                 double leak_tol) {
  const int nb = s.block;
  const int srd = reduced_dim(nb);
  const int total = s.modes * srd;
  Matrix out(total, total);
  for (int mode = 0; mode < s.modes; ++mode) {
    for (int r = 0; r < srd; ++r) {
      Matrix big = Matrix::Zero(s.dim(), s.dim());
      const SymMatrix basis = unvech_bar(Vector::Unit(srd, r), nb);
      big.block(mode * nb, mode * nb, nb, nb) = basis.mat();
      const SymMatrix image = apply(SymMatrix(big));
      // column: vech_bar of each diagonal block, leak check off the diagonal
      double off = 0.0;
      for (int bi = 0; bi < s.modes; ++bi) {
        for (int bj = 0; bj < s.modes; ++bj) {
          if (bi == bj) continue;
          off = std::max(off, image.mat().block(bi * nb, bj * nb, nb, nb).cwiseAbs().maxCoeff());
        }
      }
      if (off > leak_tol * std::max(1.0, image.mat().norm())) {
        throw std::invalid_argument("restricted solve: operator is not block-diagonal closed");
      }
      for (int bi = 0; bi < s.modes; ++bi) {
        const SymMatrix blk(image.mat().block(bi * nb, bi * nb, nb, nb));
        out.block(bi * srd, mode * srd + r, srd, 1) = vech_bar(blk);
      }
    }
  }
  return out;
}

template <class ApplyAdjoint>
CoupledCertificate coupled_solve(const ApplyAdjoint& apply, const BlockStructure& s,
                                 bool discrete, double tol) {
  if (s.modes <= 0 || s.block <= 0) {
    throw std::invalid_argument("coupled solve: bad block structure");
  }
  const int nb = s.block;
  const int srd = reduced_dim(nb);
  const int total = s.modes * srd;

  Matrix lhs = restricted_adjoint_matrix(apply, s, 1e-9);
  if (discrete) lhs -= Matrix::Identity(total, total);

  // rhs: Qi = I per mode
  Vector rhs(total);
  const Vector qv = vech_bar(SymMatrix::Identity(nb));
  for (int mode = 0; mode < s.modes; ++mode) rhs.segment(mode * srd, srd) = -qv;

  CoupledCertificate cert;
  for (int mode = 0; mode < s.modes; ++mode) cert.q.push_back(SymMatrix::Identity(nb));
  const auto sol = solve_reduced(lhs, rhs);
  if (!sol.ok) {
    cert.verdict = Verdict::Marginal;
    return cert;
  }
  cert.solver_ok = true;

  Matrix pbig = Matrix::Zero(s.dim(), s.dim());
  double pmin = std::numeric_limits<double>::infinity();
  double pnuc = 0.0;
  for (int mode = 0; mode < s.modes; ++mode) {
    const SymMatrix pi = unvech_bar(sol.x.segment(mode * srd, srd), nb);
    pbig.block(mode * nb, mode * nb, nb, nb) = pi.mat();
    pmin = std::min(pmin, pi.min_eig());
    pnuc = std::max(pnuc, nuclear_norm(pi));
    cert.p.push_back(pi);
  }
  cert.p_min_eig = pmin;

  // residual of the stacked equation
  SymMatrix image = apply(SymMatrix(pbig));
  Matrix res = image.mat();
  if (discrete) res -= pbig;
  for (int mode = 0; mode < s.modes; ++mode) {
    res.block(mode * nb, mode * nb, nb, nb) += Matrix::Identity(nb, nb);
  }
  cert.residual = res.norm();

  const double scale = std::max(1.0, pnuc);
  if (cert.residual > 1e-9 * scale) {
    cert.verdict = Verdict::Marginal;
  } else if (pmin > tol * scale) {
    cert.verdict = Verdict::Stable;
  } else if (pmin < -tol * scale) {
    cert.verdict = Verdict::Unstable;
  } else {
    cert.verdict = Verdict::Marginal;
  }
  return cert;
}

}  // namespace

CoupledCertificate check_markov_ct(const ContinuousGenerator& lifted, const BlockStructure& s,
                                   double tol) {
  if (!lifted.is_lti()) {
    throw std::invalid_argument("check_markov_ct: generator must be time-invariant");
  }
  if (lifted.n != s.dim()) {
    throw std::invalid_argument("check_markov_ct: block structure does not tile the state");
  }
  return coupled_solve(
      [&](const SymMatrix& p) { return apply_ct_adjoint(lifted, p, 0.0); }, s,
      /*discrete=*/false, tol);
}

CoupledCertificate check_markov_dt(const DiscreteGenerator& lifted, const BlockStructure& s,
                                   double tol) {
  if (!lifted.is_lti()) {
    throw std::invalid_argument("check_markov_dt: generator must be time-invariant");
  }
  if (lifted.n != s.dim()) {
    throw std::invalid_argument("check_markov_dt: block structure does not tile the state");
  }
  return coupled_solve(
      [&](const SymMatrix& p) { return apply_dt_adjoint(lifted, p, 0.0); }, s,
      /*discrete=*/true, tol);
}

HybridDwellReport check_hybrid_dwell(const HybridGenerator& g, double dwell, DwellMode mode,
                                     double tol) {
  g.validate();
  if (!g.is_lti()) {
    throw std::invalid_argument("check_hybrid_dwell: generators must be time-invariant");
  }
  if (!(dwell > 0)) throw std::invalid_argument("check_hybrid_dwell: dwell must be > 0");

  HybridDwellReport rep;
  rep.dwell = dwell;
  const Matrix mc = build_mc(g.flow, 0.0);
  const Matrix md = build_md(g.jump, 0.0);
  const Matrix flow_map = (mc * dwell).exp();
  rep.period_map = md * flow_map;  // flow the dwell interval, then jump

  Eigen::EigenSolver<Matrix> es(rep.period_map);
  double rho = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  }
  rep.factor = rho;

  Eigen::EigenSolver<Matrix> esf(mc);
  double abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < esf.eigenvalues().size(); ++i) {
    abscissa = std::max(abscissa, esf.eigenvalues()(i).real());
  }
  rep.flow_margin = abscissa;
  rep.flow_hurwitz = abscissa < -tol;

  const Verdict period = classify(rho - 1.0, tol);
  if (mode == DwellMode::Constant) {
    rep.verdict = period;
  } else {
    // arbitrary dwell >= the given one: the flow must be contracting on its
    // own so waiting longer can only help
    if (period == Verdict::Stable && rep.flow_hurwitz) {
      rep.verdict = Verdict::Stable;
    } else if (period == Verdict::Unstable || classify(abscissa, tol) == Verdict::Unstable) {
      rep.verdict = Verdict::Unstable;
    } else {
      rep.verdict = Verdict::Marginal;
    }
  }
  return rep;
}

}  // namespace mvsys
