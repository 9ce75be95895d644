#include "mvsys/io.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace mvsys {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (item.key() == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw SchemaError(where + ": unknown field \"" + item.key() + "\"");
  }
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw SchemaError(what + ": expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw SchemaError(what + ": expected an integer");
  return j.get<int>();
}

std::string text(const Json& j, const std::string& what) {
  if (!j.is_string()) throw SchemaError(what + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> number_list(const Json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + ": expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], what));
  return out;
}

// Wraps construction-time argument errors as schema violations with context.
template <class F>
auto reframe(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(where + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

}  // namespace

// ---- primitives ------------------------------------------------------------

Json to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    data.push_back(std::move(row));
  }
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::move(data);
  return j;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (j.is_number()) {
    Matrix m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (j.is_array()) {
    if (j.empty()) throw SchemaError(what + ": empty matrix literal");
    if (!j[0].is_array()) throw SchemaError(what + ": matrix rows must be arrays");
    const size_t rows = j.size();
    const size_t cols = j[0].size();
    if (cols == 0) throw SchemaError(what + ": matrix rows must be non-empty");
    Matrix m(rows, cols);
    for (size_t r = 0; r < rows; ++r) {
      if (!j[r].is_array() || j[r].size() != cols) {
        throw SchemaError(what + ": ragged matrix rows");
      }
      for (size_t c = 0; c < cols; ++c) m(r, c) = number(j[r][c], what);
    }
    return m;
  }
  if (j.is_object()) {
    check_keys(j, {"rows", "cols", "data"}, what);
    const int rows = integer(require(j, "rows", what), what + ".rows");
    const int cols = integer(require(j, "cols", what), what + ".cols");
    if (rows < 0 || cols < 0) throw SchemaError(what + ": negative matrix shape");
    const Json& data = require(j, "data", what);
    if (!data.is_array() || data.size() != static_cast<size_t>(rows)) {
      throw SchemaError(what + ": data must hold " + std::to_string(rows) + " rows");
    }
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      if (!data[r].is_array() || data[r].size() != static_cast<size_t>(cols)) {
        throw SchemaError(what + ": ragged matrix rows");
      }
      for (int c = 0; c < cols; ++c) m(r, c) = number(data[r][c], what);
    }
    return m;
  }
  throw SchemaError(what + ": expected a matrix");
}

SymMatrix sym_from_json(const Json& j, const std::string& what) {
  const Matrix m = matrix_from_json(j, what);
  if (m.rows() != m.cols()) throw SchemaError(what + ": symmetric matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw SchemaError(what + ": matrix is not symmetric");
  }
  return SymMatrix(m);
}

Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Vector vector_from_json(const Json& j, const std::string& what) {
  if (j.is_array() && (j.empty() || j[0].is_number())) {
    const auto vals = number_list(j, what);
    Vector v(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) v(i) = vals[i];
    return v;
  }
  const Matrix m = matrix_from_json(j, what);
  if (m.cols() != 1) throw SchemaError(what + ": expected a column vector");
  return m.col(0);
}

// ---- schedules -------------------------------------------------------------

namespace {

const char* mode_name(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::Constant: return "constant";
    case ScheduleMode::PiecewiseConstant: return "piecewise";
    case ScheduleMode::LinearInterp: return "linear";
    case ScheduleMode::Periodic: return "periodic";
  }
  return "?";
}

template <class T, class ToJson>
Json schedule_to_json_impl(const Schedule<T>& s, ToJson&& emit) {
  if (s.is_constant()) return emit(s.values()[0]);
  Json j;
  j["mode"] = mode_name(s.mode());
  j["times"] = s.times();
  Json vals = Json::array();
  for (const auto& v : s.values()) vals.push_back(emit(v));
  j["values"] = std::move(vals);
  if (s.mode() == ScheduleMode::Periodic) j["period"] = s.period();
  return j;
}

template <class T, class FromJson>
Schedule<T> schedule_from_json_impl(const Json& j, const std::string& what, FromJson&& parse) {
  if (!(j.is_object() && j.contains("mode"))) {
    return Schedule<T>::constant(parse(j, what));
  }
  check_keys(j, {"mode", "times", "values", "period"}, what);
  const std::string mode = text(require(j, "mode", what), what + ".mode");
  const Json& vals = require(j, "values", what);
  if (!vals.is_array() || vals.empty()) throw SchemaError(what + ": values must be a non-empty array");
  std::vector<T> values;
  for (size_t i = 0; i < vals.size(); ++i) values.push_back(parse(vals[i], what));
  if (mode == "constant") {
    if (values.size() != 1) throw SchemaError(what + ": constant schedule takes one value");
    return Schedule<T>::constant(values[0]);
  }
  const auto times = number_list(require(j, "times", what), what + ".times");
  return reframe(what, [&] {
    if (mode == "piecewise") return Schedule<T>::piecewise(times, values);
    if (mode == "linear") return Schedule<T>::linear(times, values);
    if (mode == "periodic") {
      const double period = number(require(j, "period", what), what + ".period");
      return Schedule<T>::periodic(times, values, period);
    }
    throw std::invalid_argument("unknown schedule mode \"" + mode + "\"");
  });
}

}  // namespace

Json to_json(const MatrixSchedule& s) {
  return schedule_to_json_impl(s, [](const Matrix& m) { return to_json(m); });
}

Json to_json(const ScalarSchedule& s) {
  return schedule_to_json_impl(s, [](double v) { return Json(v); });
}

MatrixSchedule matrix_schedule_from_json(const Json& j, const std::string& what) {
  return schedule_from_json_impl<Matrix>(j, what, [](const Json& v, const std::string& w) {
    return matrix_from_json(v, w);
  });
}

ScalarSchedule scalar_schedule_from_json(const Json& j, const std::string& what) {
  return schedule_from_json_impl<double>(j, what, [](const Json& v, const std::string& w) {
    return number(v, w);
  });
}

Json to_json(const ImpulseSchedule& s) {
  Json j;
  switch (s.kind) {
    case ImpulseSchedule::Kind::Explicit:
      j["kind"] = "explicit";
      j["times"] = s.times;
      break;
    case ImpulseSchedule::Kind::Periodic:
      j["kind"] = "periodic";
      j["period"] = s.period;
      break;
    case ImpulseSchedule::Kind::Range:
      j["kind"] = "range";
      j["tmin"] = s.tmin;
      j["tmax"] = s.tmax;
      break;
  }
  return j;
}

ImpulseSchedule impulses_from_json(const Json& j, const std::string& what) {
  if (!j.is_object()) throw SchemaError(what + ": expected an impulse schedule object");
  check_keys(j, {"kind", "times", "period", "tmin", "tmax"}, what);
  const std::string kind = text(require(j, "kind", what), what + ".kind");
  ImpulseSchedule s;
  if (kind == "explicit") {
    s.kind = ImpulseSchedule::Kind::Explicit;
    s.times = number_list(require(j, "times", what), what + ".times");
  } else if (kind == "periodic") {
    s.kind = ImpulseSchedule::Kind::Periodic;
    s.period = number(require(j, "period", what), what + ".period");
  } else if (kind == "range") {
    s.kind = ImpulseSchedule::Kind::Range;
    s.tmin = number(require(j, "tmin", what), what + ".tmin");
    s.tmax = number(require(j, "tmax", what), what + ".tmax");
  } else {
    throw SchemaError(what + ": unknown impulse kind \"" + kind + "\"");
  }
  reframe(what, [&] { s.validate(); return 0; });
  return s;
}

// ---- generators ------------------------------------------------------------

namespace {

std::vector<Matrix> matrix_list(const Json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + ": expected an array of matrices");
  std::vector<Matrix> out;
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(matrix_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ContinuousGenerator ct_from_json(const Json& sys, const std::string& where) {
  ContinuousGenerator g;
  g.n = integer(require(sys, "n", where), where + ".n");
  g.a0 = matrix_schedule_from_json(require(sys, "a0", where), where + ".a0");
  if (sys.contains("noise")) {
    const Json& noise = sys.at("noise");
    if (!noise.is_array()) throw SchemaError(where + ".noise: expected an array");
    for (size_t i = 0; i < noise.size(); ++i) {
      g.noise.push_back(
          matrix_schedule_from_json(noise[i], where + ".noise[" + std::to_string(i) + "]"));
    }
  }
  if (sys.contains("mu")) {
    g.mu = scalar_schedule_from_json(sys.at("mu"), where + ".mu");
  }
  reframe(where, [&] { g.validate(); return 0; });
  return g;
}

DiscreteGenerator dt_from_json(const Json& sys, const std::string& where) {
  DiscreteGenerator g;
  g.n = integer(require(sys, "n", where), where + ".n");
  const Json& jumps = require(sys, "jumps", where);
  if (!jumps.is_array()) throw SchemaError(where + ".jumps: expected an array");
  for (size_t i = 0; i < jumps.size(); ++i) {
    g.jumps.push_back(
        matrix_schedule_from_json(jumps[i], where + ".jumps[" + std::to_string(i) + "]"));
  }
  reframe(where, [&] { g.validate(); return 0; });
  return g;
}

DelayTerms delay_from_json(const Json& j, int n, const std::string& where) {
  DelayTerms d;
  if (!j.is_array()) throw SchemaError(where + ": expected an array of delay terms");
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_object()) throw SchemaError(at + ": expected an object");
    check_keys(j[i], {"matrix", "delay"}, at);
    DelayTerm term;
    term.matrix = matrix_schedule_from_json(require(j[i], "matrix", at), at + ".matrix");
    term.delay = number(require(j[i], "delay", at), at + ".delay");
    d.terms.push_back(std::move(term));
  }
  reframe(where, [&] { d.validate(n); return 0; });
  return d;
}

BlockStructure structure_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  check_keys(j, {"modes", "block"}, where);
  BlockStructure s;
  s.modes = integer(require(j, "modes", where), where + ".modes");
  s.block = integer(require(j, "block", where), where + ".block");
  if (s.modes <= 0 || s.block <= 0) throw SchemaError(where + ": modes/block must be positive");
  return s;
}

StochKind kind_from_string(const std::string& k, const std::string& where) {
  for (StochKind kind :
       {StochKind::CtSdePoisson, StochKind::CtMarkovJump, StochKind::CtSampledPoisson,
        StochKind::DtRandomParam, StochKind::DtMarkovJump, StochKind::HybridSdeImpulses,
        StochKind::HybridSwitched, StochKind::HybridSampled, StochKind::HybridMarkovImpulsive}) {
    if (k == to_string(kind)) return kind;
  }
  throw SchemaError(where + ": unknown kind \"" + k + "\"");
}

StochasticSpec stoch_from_json(const Json& sys, const std::string& where) {
  check_keys(sys,
             {"type", "kind", "n", "m", "t0", "matrices", "rates", "markov", "modes",
              "jump_modes", "sequence", "impulses", "sampling", "x0", "u0"},
             where);
  StochasticSpec s;
  s.kind = kind_from_string(text(require(sys, "kind", where), where + ".kind"), where + ".kind");
  s.n = integer(require(sys, "n", where), where + ".n");
  if (sys.contains("m")) s.m = integer(sys.at("m"), where + ".m");
  if (sys.contains("t0")) s.t0 = number(sys.at("t0"), where + ".t0");

  std::vector<Matrix> poisson_maps;
  if (sys.contains("matrices")) {
    const Json& m = sys.at("matrices");
    if (!m.is_object()) throw SchemaError(where + ".matrices: expected an object");
    check_keys(m, {"A0", "A", "Mjump", "D", "B0", "B", "K1", "K2", "J0", "Jn"},
               where + ".matrices");
    const std::string at = where + ".matrices";
    if (m.contains("A0")) s.a0 = matrix_from_json(m.at("A0"), at + ".A0");
    if (m.contains("A")) s.brownian = matrix_list(m.at("A"), at + ".A");
    if (m.contains("Mjump")) poisson_maps = matrix_list(m.at("Mjump"), at + ".Mjump");
    if (m.contains("D")) s.dt_noise = matrix_list(m.at("D"), at + ".D");
    if (m.contains("B0")) s.b0 = matrix_from_json(m.at("B0"), at + ".B0");
    if (m.contains("B")) s.brownian_b = matrix_list(m.at("B"), at + ".B");
    if (m.contains("K1")) s.k1 = matrix_from_json(m.at("K1"), at + ".K1");
    if (m.contains("K2")) s.k2 = matrix_from_json(m.at("K2"), at + ".K2");
    if (m.contains("J0")) s.jump.j0 = matrix_from_json(m.at("J0"), at + ".J0");
    if (m.contains("Jn")) s.jump.jn = matrix_list(m.at("Jn"), at + ".Jn");
  }

  std::vector<double> poisson_rates;
  if (sys.contains("rates")) {
    const Json& r = sys.at("rates");
    if (!r.is_object()) throw SchemaError(where + ".rates: expected an object");
    check_keys(r, {"poisson", "p", "bernoulli"}, where + ".rates");
    if (r.contains("poisson")) poisson_rates = number_list(r.at("poisson"), where + ".rates.poisson");
    if (r.contains("p")) s.p = number_list(r.at("p"), where + ".rates.p");
    if (r.contains("bernoulli")) {
      if (!r.at("bernoulli").is_boolean()) {
        throw SchemaError(where + ".rates.bernoulli: expected a boolean");
      }
      s.bernoulli = r.at("bernoulli").get<bool>();
    }
  }
  if (poisson_maps.size() != poisson_rates.size()) {
    throw SchemaError(where + ": matrices.Mjump and rates.poisson must pair up");
  }
  for (size_t i = 0; i < poisson_maps.size(); ++i) {
    s.poisson.push_back({poisson_maps[i], poisson_rates[i]});
  }

  if (sys.contains("markov")) {
    const Json& mk = sys.at("markov");
    if (!mk.is_object()) throw SchemaError(where + ".markov: expected an object");
    check_keys(mk, {"Lambda", "Pi", "initial"}, where + ".markov");
    if (mk.contains("Lambda")) s.rate_matrix = matrix_from_json(mk.at("Lambda"), where + ".markov.Lambda");
    if (mk.contains("Pi")) s.trans_matrix = matrix_from_json(mk.at("Pi"), where + ".markov.Pi");
    if (mk.contains("initial")) s.initial_dist = number_list(mk.at("initial"), where + ".markov.initial");
  }

  if (sys.contains("modes")) {
    const Json& modes = sys.at("modes");
    if (!modes.is_array()) throw SchemaError(where + ".modes: expected an array");
    for (size_t i = 0; i < modes.size(); ++i) {
      const std::string at = where + ".modes[" + std::to_string(i) + "]";
      if (!modes[i].is_object()) throw SchemaError(at + ": expected an object");
      check_keys(modes[i], {"A0", "B"}, at);
      ModeDynamics md;
      md.a0 = matrix_from_json(require(modes[i], "A0", at), at + ".A0");
      if (modes[i].contains("B")) md.brownian = matrix_list(modes[i].at("B"), at + ".B");
      s.modes.push_back(std::move(md));
    }
  }

  if (sys.contains("jump_modes")) {
    const Json& jm = sys.at("jump_modes");
    if (!jm.is_array()) throw SchemaError(where + ".jump_modes: expected an array");
    for (size_t i = 0; i < jm.size(); ++i) {
      const std::string at = where + ".jump_modes[" + std::to_string(i) + "]";
      if (!jm[i].is_object()) throw SchemaError(at + ": expected an object");
      check_keys(jm[i], {"J0", "Jn"}, at);
      JumpNoise jn;
      jn.j0 = matrix_from_json(require(jm[i], "J0", at), at + ".J0");
      if (jm[i].contains("Jn")) jn.jn = matrix_list(jm[i].at("Jn"), at + ".Jn");
      s.disc_modes.push_back(std::move(jn));
    }
  }

  if (sys.contains("sequence")) {
    const Json& seq = sys.at("sequence");
    if (!seq.is_array()) throw SchemaError(where + ".sequence: expected an array");
    for (size_t i = 0; i < seq.size(); ++i) {
      s.sequence.push_back(integer(seq[i], where + ".sequence"));
    }
  }

  if (sys.contains("impulses")) {
    s.impulses = impulses_from_json(sys.at("impulses"), where + ".impulses");
  }

  if (sys.contains("sampling")) {
    const Json& sp = sys.at("sampling");
    if (!sp.is_object()) throw SchemaError(where + ".sampling: expected an object");
    check_keys(sp, {"rate"}, where + ".sampling");
    if (sp.contains("rate")) s.sample_rate = number(sp.at("rate"), where + ".sampling.rate");
  }

  if (sys.contains("x0")) s.x0 = vector_from_json(sys.at("x0"), where + ".x0");
  if (sys.contains("u0")) s.u0 = vector_from_json(sys.at("u0"), where + ".u0");
  return s;
}

std::vector<Matrix> inputs_from_json(const Json& j, const std::string& where) {
  return matrix_list(j, where);
}

}  // namespace

SystemSpec system_from_json(const Json& root) {
  if (!root.is_object()) throw SchemaError("top level: expected an object");
  check_keys(root, {"version", "system", "options"}, "top level");
  const std::string version = text(require(root, "version", "top level"), "version");
  if (version != kSchemaVersion) {
    throw SchemaError("version: expected \"" + std::string(kSchemaVersion) + "\", got \"" +
                      version + "\"");
  }
  const Json& sys = require(root, "system", "top level");
  if (!sys.is_object()) throw SchemaError("system: expected an object");

  SystemSpec spec;
  if (root.contains("options")) {
    const Json& opt = root.at("options");
    if (!opt.is_object()) throw SchemaError("options: expected an object");
    check_keys(opt,
               {"tol", "dt", "tf", "t0", "steps", "x0", "seed", "paths", "dwell", "dwell_min",
                "dwell_max", "grid", "dwell_mode", "z_threshold", "min_fraction"},
               "options");
    spec.options = opt;
  }

  const std::string type = text(require(sys, "type", "system"), "system.type");
  if (type == "ct") {
    check_keys(sys, {"type", "n", "a0", "noise", "mu", "delay", "inputs", "structure", "provenance"},
               "system");
    spec.type = SystemType::Ct;
    spec.ct = ct_from_json(sys, "system");
    if (sys.contains("delay")) spec.delay = delay_from_json(sys.at("delay"), spec.ct.n, "system.delay");
    if (sys.contains("inputs")) spec.inputs = inputs_from_json(sys.at("inputs"), "system.inputs");
  } else if (type == "dt") {
    check_keys(sys, {"type", "n", "jumps", "delay", "inputs", "structure", "provenance"}, "system");
    spec.type = SystemType::Dt;
    spec.dt = dt_from_json(sys, "system");
    if (sys.contains("delay")) spec.delay = delay_from_json(sys.at("delay"), spec.dt.n, "system.delay");
    if (sys.contains("inputs")) spec.inputs = inputs_from_json(sys.at("inputs"), "system.inputs");
  } else if (type == "hybrid") {
    check_keys(sys, {"type", "flow", "jump", "impulses", "structure", "provenance"}, "system");
    spec.type = SystemType::Hybrid;
    const Json& flow = require(sys, "flow", "system");
    if (!flow.is_object()) throw SchemaError("system.flow: expected an object");
    check_keys(flow, {"n", "a0", "noise", "mu", "inputs"}, "system.flow");
    spec.hybrid.flow = ct_from_json(flow, "system.flow");
    if (flow.contains("inputs")) {
      spec.flow_inputs = inputs_from_json(flow.at("inputs"), "system.flow.inputs");
    }
    const Json& jump = require(sys, "jump", "system");
    if (!jump.is_object()) throw SchemaError("system.jump: expected an object");
    check_keys(jump, {"n", "jumps", "inputs"}, "system.jump");
    spec.hybrid.jump = dt_from_json(jump, "system.jump");
    if (jump.contains("inputs")) {
      spec.jump_inputs = inputs_from_json(jump.at("inputs"), "system.jump.inputs");
    }
    spec.hybrid.impulses = impulses_from_json(require(sys, "impulses", "system"), "system.impulses");
    reframe("system", [&] { spec.hybrid.validate(); return 0; });
  } else if (type == "stochastic") {
    spec.type = SystemType::Stochastic;
    spec.stoch = stoch_from_json(sys, "system");
  } else {
    throw SchemaError("system.type: unknown type \"" + type + "\"");
  }

  if (sys.contains("structure")) {
    spec.structure = structure_from_json(sys.at("structure"), "system.structure");
  }
  if (sys.contains("provenance")) {
    spec.provenance = text(sys.at("provenance"), "system.provenance");
  }
  return spec;
}

SystemSpec load_system_file(const std::string& path) {
  const std::string content = read_file(path);
  Json root;
  try {
    root = Json::parse(content);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  return system_from_json(root);
}

Json to_json(const ContinuousGenerator& g) {
  Json j;
  j["type"] = "ct";
  j["n"] = g.n;
  j["a0"] = to_json(g.a0);
  if (!g.noise.empty()) {
    Json noise = Json::array();
    for (const auto& s : g.noise) noise.push_back(to_json(s));
    j["noise"] = std::move(noise);
  }
  if (!(g.mu.is_constant() && g.mu.values()[0] == 0.0)) j["mu"] = to_json(g.mu);
  return j;
}

Json to_json(const DiscreteGenerator& g) {
  Json j;
  j["type"] = "dt";
  j["n"] = g.n;
  Json jumps = Json::array();
  for (const auto& s : g.jumps) jumps.push_back(to_json(s));
  j["jumps"] = std::move(jumps);
  return j;
}

Json to_json(const HybridGenerator& g) {
  Json j;
  j["type"] = "hybrid";
  Json flow = to_json(g.flow);
  flow.erase("type");
  Json jump = to_json(g.jump);
  jump.erase("type");
  j["flow"] = std::move(flow);
  j["jump"] = std::move(jump);
  j["impulses"] = to_json(g.impulses);
  return j;
}

Json lifted_to_file_json(const LiftedSystem& l) {
  Json sys;
  if (l.is_ct()) {
    sys = to_json(l.ct());
  } else if (l.is_dt()) {
    sys = to_json(l.dt());
  } else {
    sys = to_json(l.hybrid());
  }
  if (l.structure) {
    Json s;
    s["modes"] = l.structure->modes;
    s["block"] = l.structure->block;
    sys["structure"] = std::move(s);
  }
  if (!l.provenance.empty()) sys["provenance"] = l.provenance;
  Json root;
  root["version"] = kSchemaVersion;
  root["system"] = std::move(sys);
  return root;
}

LiftedSystem lifted_from_spec(const SystemSpec& spec) {
  LiftedSystem l;
  switch (spec.type) {
    case SystemType::Ct: l.body = spec.ct; break;
    case SystemType::Dt: l.body = spec.dt; break;
    case SystemType::Hybrid: l.body = spec.hybrid; break;
    case SystemType::Stochastic:
      throw UnsupportedError("stochastic spec must be lifted before moment analysis");
  }
  l.structure = spec.structure;
  l.provenance = spec.provenance;
  return l;
}

// ---- reports ---------------------------------------------------------------

Json to_json(const SpectrumReport& r) {
  Json eig = Json::array();
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
    Json e;
    e["re"] = r.eigenvalues(i).real();
    e["im"] = r.eigenvalues(i).imag();
    eig.push_back(std::move(e));
  }
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["margin"] = r.margin;
  j["eigenvalues"] = std::move(eig);
  return j;
}

Json to_json(const LyapunovCertificate& c) {
  Json j;
  j["P"] = to_json(c.p.mat());
  j["Q"] = to_json(c.q.mat());
  j["residual"] = c.residual;
  j["p_min_eig"] = c.p_min_eig;
  j["q_min_eig"] = c.q_min_eig;
  j["solver_ok"] = c.solver_ok;
  j["valid"] = c.valid();
  return j;
}

Json to_json(const DelayIndependenceReport& r) {
  Json q = Json::array();
  for (const auto& qi : r.q) q.push_back(to_json(qi.mat()));
  Json j;
  j["spectrum"] = to_json(r.spectrum);
  j["certified"] = r.certified;
  j["P"] = to_json(r.p.mat());
  j["Q"] = std::move(q);
  j["epsilon"] = r.epsilon;
  j["flow_margin"] = r.flow_margin;
  j["channel_margins"] = r.channel_margins;
  return j;
}

Json to_json(const CoupledCertificate& c) {
  Json p = Json::array(), q = Json::array();
  for (const auto& pi : c.p) p.push_back(to_json(pi.mat()));
  for (const auto& qi : c.q) q.push_back(to_json(qi.mat()));
  Json j;
  j["verdict"] = to_string(c.verdict);
  j["P"] = std::move(p);
  j["Q"] = std::move(q);
  j["residual"] = c.residual;
  j["p_min_eig"] = c.p_min_eig;
  j["solver_ok"] = c.solver_ok;
  return j;
}

Json to_json(const HybridDwellReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["dwell"] = r.dwell;
  j["factor"] = r.factor;
  j["flow_margin"] = r.flow_margin;
  j["flow_hurwitz"] = r.flow_hurwitz;
  return j;
}

Json to_json(const DecayEstimate& e) {
  Json j;
  j["alpha_hat"] = e.alpha_hat;
  j["rho_hat"] = e.rho_hat;
  j["r_squared"] = e.r_squared;
  j["degenerate"] = e.degenerate;
  return j;
}

Json to_json(const ComparisonReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["max_z"] = r.max_z;
  j["frac_within"] = r.frac_within;
  j["max_rel_err"] = r.max_rel_err;
  j["z_threshold"] = r.z_threshold;
  j["z_scores"] = r.z_scores;
  return j;
}

Json to_json(const PathEnsemble& e) {
  Json trace = Json::array();
  for (const auto& m : e.moments) trace.push_back(m.mat().trace());
  Json j;
  j["n_paths"] = e.n_paths;
  j["state_dim"] = e.state_dim;
  j["seed"] = e.seed;
  j["times"] = e.times;
  j["trace"] = std::move(trace);
  j["stderr"] = e.stderrs;
  return j;
}

Json to_json(const GainSet& g) {
  Json gains = Json::array(), u = Json::array();
  for (const auto& k : g.gains) gains.push_back(to_json(k));
  for (const auto& m : g.u) u.push_back(to_json(m));
  Json j;
  j["found"] = g.found;
  j["K"] = std::move(gains);
  j["Q"] = to_json(g.q.mat());
  j["U"] = std::move(u);
  j["epsilon"] = g.epsilon;
  j["margins"] = g.margins;
  j["closed_loop"] = to_json(g.closed_loop);
  j["status"] = g.status;
  return j;
}

Json to_json(const HybridSynthResult& g) {
  Json fk = Json::array(), jk = Json::array(), qn = Json::array();
  for (const auto& k : g.flow_gains) fk.push_back(to_json(k));
  for (const auto& k : g.jump_gains) jk.push_back(to_json(k));
  for (const auto& q : g.q_nodes) qn.push_back(to_json(q.mat()));
  Json j;
  j["found"] = g.found;
  j["flow_K"] = std::move(fk);
  j["jump_K"] = std::move(jk);
  j["Q_nodes"] = std::move(qn);
  j["epsilon"] = g.epsilon;
  j["grid"] = g.grid;
  j["node_factors"] = g.node_factors;
  j["closed_loop"] = to_json(g.closed_loop);
  j["status"] = g.status;
  return j;
}

Json trajectory_to_json(const Trajectory& t) {
  Json states = Json::array();
  for (const auto& x : t.states) states.push_back(to_json(vech_bar(x)));
  Json j;
  j["integrator"] = t.integrator;
  j["dt"] = t.dt;
  if (t.seeded) j["seed"] = t.seed;
  j["truncated"] = t.truncated;
  if (!t.diagnostic.empty()) j["diagnostic"] = t.diagnostic;
  j["times"] = t.times;
  j["states"] = std::move(states);
  j["jump_counts"] = t.jump_counts;
  return j;
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  os.precision(17);
  const int n = t.states.empty() ? 0 : t.states[0].dim();
  os << "t";
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) os << ",v" << i + 1 << "_" << j + 1;
  }
  os << ",min_eig,nuclear_norm,jumps\n";
  for (size_t k = 0; k < t.times.size(); ++k) {
    os << t.times[k];
    const Vector v = vech_bar(t.states[k]);
    for (Eigen::Index i = 0; i < v.size(); ++i) os << "," << v(i);
    os << "," << t.states[k].min_eig() << "," << nuclear_norm(t.states[k]) << ","
       << t.jump_count_at(k) << "\n";
  }
  return os.str();
}

// ---- misc ------------------------------------------------------------------

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string input_hash(const Json& j) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mvsys
