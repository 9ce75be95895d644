#include "mvsys/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvsys {

namespace {

void check_square_schedule(const MatrixSchedule& s, int n, const char* what) {
  for (const Matrix& m : s.values()) {
    if (m.rows() != n || m.cols() != n) {
      throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + "x" +
                                  std::to_string(n) + " coefficients");
    }
  }
}

}  // namespace

bool ContinuousGenerator::is_lti() const {
  if (!a0.is_constant() || !mu.is_constant()) return false;
  return std::all_of(noise.begin(), noise.end(),
                     [](const MatrixSchedule& s) { return s.is_constant(); });
}

void ContinuousGenerator::validate() const {
  if (n <= 0) throw std::invalid_argument("ContinuousGenerator: n must be positive");
  check_square_schedule(a0, n, "ContinuousGenerator drift");
  for (const auto& s : noise) check_square_schedule(s, n, "ContinuousGenerator noise");
}

bool DiscreteGenerator::is_lti() const {
  return std::all_of(jumps.begin(), jumps.end(),
                     [](const MatrixSchedule& s) { return s.is_constant(); });
}

void DiscreteGenerator::validate() const {
  if (n <= 0) throw std::invalid_argument("DiscreteGenerator: n must be positive");
  if (jumps.empty()) throw std::invalid_argument("DiscreteGenerator: needs at least one map");
  for (const auto& s : jumps) check_square_schedule(s, n, "DiscreteGenerator map");
}

double DelayTerms::max_delay() const {
  double h = 0.0;
  for (const auto& term : terms) h = std::max(h, term.delay);
  return h;
}

std::optional<double> DelayTerms::min_positive_delay() const {
  std::optional<double> h;
  for (const auto& term : terms) {
    if (term.delay > 0 && (!h || term.delay < *h)) h = term.delay;
  }
  return h;
}

void DelayTerms::validate(int n) const {
  for (const auto& term : terms) {
    if (term.delay < 0) throw std::invalid_argument("DelayTerms: negative delay");
    check_square_schedule(term.matrix, n, "DelayTerms coefficient");
  }
}

void ImpulseSchedule::validate() const {
  switch (kind) {
    case Kind::Explicit:
      for (size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
          throw std::invalid_argument("ImpulseSchedule: times must be strictly increasing");
        }
      }
      break;
    case Kind::Periodic:
      if (!(period > 0)) throw std::invalid_argument("ImpulseSchedule: period must be > 0");
      break;
    case Kind::Range:
      if (!(tmin > 0) || !(tmax >= tmin)) {
        throw std::invalid_argument("ImpulseSchedule: need 0 < tmin <= tmax");
      }
      break;
  }
}

std::vector<double> ImpulseSchedule::resolve(double t0, double tf, SplitMix64* rng) const {
  validate();
  if (!(tf > t0)) throw std::invalid_argument("ImpulseSchedule: empty window");
  std::vector<double> out;
  const double slack = 1e-12 * std::max(1.0, std::fabs(tf));
  switch (kind) {
    case Kind::Explicit:
      for (double t : times) {
        if (t > t0 + slack && t <= tf + slack) out.push_back(std::min(t, tf));
      }
      break;
    case Kind::Periodic:
      for (int k = 1;; ++k) {
        const double t = t0 + k * period;
        if (t > tf + slack) break;
        out.push_back(std::min(t, tf));
      }
      break;
    case Kind::Range: {
      if (rng == nullptr) {
        throw std::invalid_argument("ImpulseSchedule: range kind needs a seeded generator");
      }
      double t = t0;
      for (;;) {
        t += tmin + (tmax - tmin) * rng->uniform();
        if (t > tf + slack) break;
        out.push_back(std::min(t, tf));
      }
      break;
    }
  }
  return out;
}

void HybridGenerator::validate() const {
  flow.validate();
  jump.validate();
  impulses.validate();
  if (flow.n != jump.n) {
    throw std::invalid_argument("HybridGenerator: flow and jump dimensions differ");
  }
}

SymMatrix apply_ct(const ContinuousGenerator& g, const SymMatrix& x, double t) {
  if (x.dim() != g.n) throw std::invalid_argument("apply_ct: state dimension mismatch");
  const Matrix a0 = g.a0(t);
  Matrix r = a0 * x.mat() + x.mat() * a0.transpose() + g.mu(t) * x.mat();
  for (const auto& s : g.noise) {
    const Matrix ai = s(t);
    r += ai * x.mat() * ai.transpose();
  }
  return SymMatrix(r);
}

SymMatrix apply_ct_adjoint(const ContinuousGenerator& g, const SymMatrix& p, double t) {
  if (p.dim() != g.n) throw std::invalid_argument("apply_ct_adjoint: dimension mismatch");
  const Matrix a0 = g.a0(t);
  Matrix r = a0.transpose() * p.mat() + p.mat() * a0 + g.mu(t) * p.mat();
  for (const auto& s : g.noise) {
    const Matrix ai = s(t);
    r += ai.transpose() * p.mat() * ai;
  }
  return SymMatrix(r);
}

SymMatrix apply_dt(const DiscreteGenerator& g, const SymMatrix& x, double k) {
  if (x.dim() != g.n) throw std::invalid_argument("apply_dt: state dimension mismatch");
  Matrix r = Matrix::Zero(g.n, g.n);
  for (const auto& s : g.jumps) {
    const Matrix ji = s(k);
    r += ji * x.mat() * ji.transpose();
  }
  return SymMatrix(r);
}

SymMatrix apply_dt_adjoint(const DiscreteGenerator& g, const SymMatrix& p, double k) {
  if (p.dim() != g.n) throw std::invalid_argument("apply_dt_adjoint: dimension mismatch");
  Matrix r = Matrix::Zero(g.n, g.n);
  for (const auto& s : g.jumps) {
    const Matrix ji = s(k);
    r += ji.transpose() * p.mat() * ji;
  }
  return SymMatrix(r);
}

SymMatrix apply_delay_ct(const DelayTerms& d, const HistoryFn& history, double t) {
  if (d.terms.empty()) throw std::invalid_argument("apply_delay_ct: no delay terms");
  Matrix r;
  bool first = true;
  for (const auto& term : d.terms) {
    const Matrix b = term.matrix(t);
    const SymMatrix xd = history(t - term.delay);
    if (xd.dim() != b.cols()) {
      throw std::invalid_argument("apply_delay_ct: history dimension mismatch");
    }
    Matrix contrib = b * xd.mat() * b.transpose();
    if (first) {
      r = std::move(contrib);
      first = false;
    } else {
      r += contrib;
    }
  }
  return SymMatrix(r);
}

}  // namespace mvsys
