#include "mvsys/cli.hpp"

#include "mvsys/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mvsys {

namespace {

struct Global {
  double tol = kMarginTol;
  std::string json_out;
  bool quiet = false;
};

Json parse_json_text(const std::string& content, const std::string& what) {
  try {
    return Json::parse(content);
  } catch (const Json::parse_error& e) {
    throw SchemaError(what + ": malformed JSON: " + e.what());
  }
}

Json base_report(const char* command, const Json& root, const std::string& path) {
  Json r;
  r["tool_version"] = kToolVersion;
  r["command"] = command;
  r["spec_file"] = path;
  r["input_hash"] = input_hash(root);
  return r;
}

void emit(Json report, double ms, const Global& g) {
  report["timing_ms"] = ms;
  const std::string text = report.dump(2) + "\n";
  if (!g.json_out.empty()) write_file(g.json_out, text);
  if (!g.quiet) std::cout << text;
}

double opt_num(const Json& options, const char* key, double fallback) {
  if (!options.contains(key)) return fallback;
  if (!options.at(key).is_number()) {
    throw SchemaError(std::string("options.") + key + ": expected a number");
  }
  return options.at(key).get<double>();
}

std::string opt_str(const Json& options, const char* key, const std::string& fallback) {
  if (!options.contains(key)) return fallback;
  if (!options.at(key).is_string()) {
    throw SchemaError(std::string("options.") + key + ": expected a string");
  }
  return options.at(key).get<std::string>();
}

// flag > options block > fallback
double resolve(const std::optional<double>& flag, const Json& options, const char* key,
               double fallback) {
  if (flag) return *flag;
  return opt_num(options, key, fallback);
}

DwellMode dwell_mode_from(const std::string& name) {
  if (name == "constant") return DwellMode::Constant;
  if (name == "minimum") return DwellMode::Minimum;
  throw SchemaError("dwell_mode: expected \"constant\" or \"minimum\", got \"" + name + "\"");
}

// Fixed dwell for analysis: explicit option first, then the impulse schedule
// (periodic period; range minimum). Non-uniform explicit times have no single
// dwell to test.
std::pair<double, DwellMode> resolve_dwell_analysis(const HybridGenerator& g, const Json& options) {
  DwellMode mode = dwell_mode_from(opt_str(options, "dwell_mode", "constant"));
  if (options.contains("dwell")) return {opt_num(options, "dwell", 0.0), mode};
  switch (g.impulses.kind) {
    case ImpulseSchedule::Kind::Periodic:
      return {g.impulses.period, mode};
    case ImpulseSchedule::Kind::Range:
      return {g.impulses.tmin, DwellMode::Minimum};
    case ImpulseSchedule::Kind::Explicit: {
      const auto& ts = g.impulses.times;
      if (ts.size() >= 2) {
        const double gap = ts[1] - ts[0];
        bool uniform = true;
        for (size_t i = 2; i < ts.size(); ++i) {
          if (std::fabs((ts[i] - ts[i - 1]) - gap) > 1e-9 * std::max(1.0, std::fabs(gap))) {
            uniform = false;
            break;
          }
        }
        if (uniform) return {gap, mode};
      }
      throw UnsupportedError(
          "dwell analysis needs a fixed dwell; impulse times are not uniformly spaced "
          "(set options.dwell)");
    }
  }
  throw UnsupportedError("no dwell available");
}

int verdict_exit(Verdict v) { return v == Verdict::Stable ? 0 : 1; }

// ---- analyze ---------------------------------------------------------------

int cmd_analyze(const std::string& path, const Global& gl) {
  const auto start = std::chrono::steady_clock::now();
  const Json root = parse_json_text(read_file(path), path);
  const SystemSpec spec = system_from_json(root);
  Json report = base_report("analyze", root, path);

  Verdict overall = Verdict::Marginal;
  if (spec.type == SystemType::Ct) {
    if (!spec.ct.is_lti()) {
      throw UnsupportedError("spectral analysis needs constant coefficients; use simulate");
    }
    const SpectrumReport sp = spectrum_ct(spec.ct, gl.tol);
    report["spectrum"] = to_json(sp);
    Json certs;
    certs["lyapunov"] = to_json(solve_lyapunov_ct(spec.ct, SymMatrix::Identity(spec.ct.n)));
    report["certificates"] = std::move(certs);
    overall = sp.verdict;
    if (!spec.delay.terms.empty()) {
      const auto d = check_delay_independent_ct(spec.ct, spec.delay, gl.tol);
      report["delay"] = to_json(d);
      overall = d.spectrum.verdict;
    }
    if (spec.structure) {
      report["markov"] = to_json(check_markov_ct(spec.ct, *spec.structure, gl.tol));
    }
  } else if (spec.type == SystemType::Dt) {
    if (!spec.dt.is_lti()) {
      throw UnsupportedError("spectral analysis needs constant coefficients; use simulate");
    }
    const SpectrumReport sp = spectrum_dt(spec.dt, gl.tol);
    report["spectrum"] = to_json(sp);
    Json certs;
    certs["stein"] = to_json(solve_stein_dt(spec.dt, SymMatrix::Identity(spec.dt.n)));
    report["certificates"] = std::move(certs);
    overall = sp.verdict;
    if (!spec.delay.terms.empty()) {
      const auto d = check_delay_independent_dt(spec.dt, spec.delay, gl.tol);
      report["delay"] = to_json(d);
      overall = d.spectrum.verdict;
    }
    if (spec.structure) {
      report["markov"] = to_json(check_markov_dt(spec.dt, *spec.structure, gl.tol));
    }
  } else if (spec.type == SystemType::Hybrid) {
    if (!spec.hybrid.is_lti()) {
      throw UnsupportedError("dwell analysis needs constant coefficients; use simulate");
    }
    const auto [dwell, mode] = resolve_dwell_analysis(spec.hybrid, spec.options);
    const HybridDwellReport rep = check_hybrid_dwell(spec.hybrid, dwell, mode, gl.tol);
    report["dwell"] = to_json(rep);
    overall = rep.verdict;
  } else {
    throw UnsupportedError("stochastic specs are analyzed through their moment lift; run lift");
  }

  report["verdict"] = to_string(overall);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(std::move(report), ms, gl);
  return verdict_exit(overall);
}

// ---- simulate --------------------------------------------------------------

SymMatrix initial_moment(const std::optional<std::string>& flag, const Json& options, int n,
                         Json& report) {
  if (flag) {
    report["x0_source"] = "flag";
    return sym_from_json(parse_json_text(*flag, "--x0"), "--x0");
  }
  if (options.contains("x0")) {
    report["x0_source"] = "options";
    return sym_from_json(options.at("x0"), "options.x0");
  }
  report["x0_source"] = "default-identity";
  return SymMatrix::Identity(n);
}

int cmd_simulate(const std::string& path, const std::optional<double>& tf_flag,
                 const std::optional<double>& dt_flag, const std::optional<std::string>& x0_flag,
                 const std::optional<double>& seed_flag, const std::string& csv_out,
                 const Global& gl) {
  const auto start = std::chrono::steady_clock::now();
  const Json root = parse_json_text(read_file(path), path);
  const SystemSpec spec = system_from_json(root);
  Json report = base_report("simulate", root, path);

  const double tf = resolve(tf_flag, spec.options, "tf", std::nan(""));
  if (std::isnan(tf)) throw SchemaError("horizon required: pass --tf or set options.tf");
  const double dt = resolve(dt_flag, spec.options, "dt", 1e-3);
  const double t0 = opt_num(spec.options, "t0", 0.0);
  const uint64_t seed = static_cast<uint64_t>(resolve(seed_flag, spec.options, "seed", 0.0));

  Trajectory traj;
  if (spec.type == SystemType::Ct) {
    const SymMatrix x0 = initial_moment(x0_flag, spec.options, spec.ct.n, report);
    report["x0"] = to_json(x0.mat());
    if (spec.delay.terms.empty()) {
      traj = integrate_ct(spec.ct, x0, t0, tf, dt);
    } else {
      const double hmax = spec.delay.max_delay();
      std::vector<std::pair<double, SymMatrix>> history;
      if (hmax > 0.0) history.push_back({t0 - hmax, x0});
      history.push_back({t0, x0});
      traj = integrate_ct_delay(spec.ct, spec.delay, history, t0, tf, dt);
    }
  } else if (spec.type == SystemType::Dt) {
    const SymMatrix x0 = initial_moment(x0_flag, spec.options, spec.dt.n, report);
    report["x0"] = to_json(x0.mat());
    const int k0 = static_cast<int>(std::llround(t0));
    traj = iterate_dt(spec.dt, x0, k0, k0 + static_cast<int>(std::llround(tf)));
  } else if (spec.type == SystemType::Hybrid) {
    const SymMatrix x0 = initial_moment(x0_flag, spec.options, spec.hybrid.flow.n, report);
    report["x0"] = to_json(x0.mat());
    traj = simulate_hybrid(spec.hybrid, x0, t0, tf, dt, seed);
  } else {
    if (x0_flag) {
      throw UnsupportedError(
          "stochastic specs take their initial moment from the spec (x0 / markov.initial)");
    }
    const LiftedSystem l = lift_any(spec.stoch);
    const SymMatrix x0 = lift_initial_state(spec.stoch);
    report["x0"] = to_json(x0.mat());
    report["x0_source"] = "lift";
    report["lift_provenance"] = l.provenance;
    if (l.is_ct()) {
      traj = integrate_ct(l.ct(), x0, spec.stoch.t0, tf, dt);
    } else if (l.is_dt()) {
      traj = iterate_dt(l.dt(), x0, 0, static_cast<int>(std::llround(tf)));
    } else {
      traj = simulate_hybrid(l.hybrid(), x0, spec.stoch.t0, tf, dt, seed);
    }
  }

  report["integrator"] = traj.integrator;
  report["dt"] = traj.dt;
  report["samples"] = traj.times.size();
  report["jumps"] = traj.jumps.size();
  report["truncated"] = traj.truncated;
  if (!traj.diagnostic.empty()) report["diagnostic"] = traj.diagnostic;
  if (!traj.states.empty()) {
    Json last;
    last["t"] = traj.times.back();
    last["min_eig"] = traj.states.back().min_eig();
    last["nuclear_norm"] = nuclear_norm(traj.states.back());
    report["final"] = std::move(last);
  }
  report["decay"] = to_json(estimate_decay(traj));
  if (!csv_out.empty()) {
    write_file(csv_out, trajectory_csv(traj));
    report["csv"] = csv_out;
  }

  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(std::move(report), ms, gl);
  return traj.truncated ? 1 : 0;
}

// ---- lift ------------------------------------------------------------------

int cmd_lift(const std::string& path, const std::string& out, const Global& gl) {
  const auto start = std::chrono::steady_clock::now();
  const Json root = parse_json_text(read_file(path), path);
  const SystemSpec spec = system_from_json(root);
  if (spec.type != SystemType::Stochastic) {
    throw UnsupportedError("lift takes a stochastic system spec");
  }
  const LiftedSystem l = lift_any(spec.stoch);
  Json report = base_report("lift", root, path);
  report["kind"] = to_string(spec.stoch.kind);
  report["dim"] = l.dim();
  report["provenance"] = l.provenance;
  if (l.structure) {
    Json s;
    s["modes"] = l.structure->modes;
    s["block"] = l.structure->block;
    report["structure"] = std::move(s);
  }
  const Json doc = lifted_to_file_json(l);
  if (!out.empty()) {
    write_file(out, doc.dump(2) + "\n");
    report["lifted_file"] = out;
  } else {
    report["lifted"] = doc;
  }
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(std::move(report), ms, gl);
  return 0;
}

// ---- verify ----------------------------------------------------------------

int cmd_verify(const std::string& path, const std::optional<double>& paths_flag,
               const std::optional<double>& seed_flag, const std::optional<double>& dt_flag,
               const std::optional<double>& tf_flag, const std::string& against,
               const std::string& csv_out, const Global& gl) {
  const auto start = std::chrono::steady_clock::now();
  const Json root = parse_json_text(read_file(path), path);
  const SystemSpec spec = system_from_json(root);
  if (spec.type != SystemType::Stochastic) {
    throw UnsupportedError("verify takes a stochastic system spec");
  }
  const StochasticSpec& s = spec.stoch;

  const int n_paths = static_cast<int>(resolve(paths_flag, spec.options, "paths", 1000.0));
  const uint64_t seed = static_cast<uint64_t>(resolve(seed_flag, spec.options, "seed", 1.0));
  const double dt = resolve(dt_flag, spec.options, "dt", 1e-3);
  const double tf = resolve(tf_flag, spec.options, "tf", std::nan(""));
  if (std::isnan(tf)) throw SchemaError("horizon required: pass --tf or set options.tf");
  const double z_threshold = opt_num(spec.options, "z_threshold", 4.0);
  const double min_fraction = opt_num(spec.options, "min_fraction", 0.95);

  Json report = base_report("verify", root, path);
  report["kind"] = to_string(s.kind);

  const PathEnsemble ensemble = simulate_paths(s, n_paths, seed, dt, tf);
  report["ensemble"] = to_json(ensemble);
  if (!csv_out.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "t,trace,stderr\n";
    for (size_t i = 0; i < ensemble.times.size(); ++i) {
      os << ensemble.times[i] << "," << ensemble.moments[i].mat().trace() << ","
         << ensemble.stderrs[i] << "\n";
    }
    write_file(csv_out, os.str());
    report["csv"] = csv_out;
  }

  const LiftedSystem l =
      against.empty() ? lift_any(s) : lifted_from_spec(load_system_file(against));
  report["against"] = against.empty() ? "internal lift" : against;

  int code = 1;
  if (l.dim() != ensemble.state_dim) {
    Json cmp;
    cmp["pass"] = false;
    cmp["note"] = "reference dimension " + std::to_string(l.dim()) + " != ensemble dimension " +
                  std::to_string(ensemble.state_dim);
    report["comparison"] = std::move(cmp);
    report["verdict"] = "fail";
  } else {
    const SymMatrix x0 = lift_initial_state(s);
    Trajectory ref;
    if (l.is_ct()) {
      ref = integrate_ct(l.ct(), x0, s.t0, tf, dt);
    } else if (l.is_dt()) {
      ref = iterate_dt(l.dt(), x0, 0, static_cast<int>(std::llround(tf)));
    } else {
      ref = simulate_hybrid(l.hybrid(), x0, s.t0, tf, dt, seed);
    }
    const ComparisonReport cmp = compare_moments(ensemble, ref, z_threshold, min_fraction);
    report["comparison"] = to_json(cmp);
    try {
      report["ms_decay"] = estimate_ms_decay(ensemble);
    } catch (const std::exception&) {
      // too few usable samples for a slope; omit the field
    }
    report["verdict"] = cmp.pass ? "pass" : "fail";
    code = cmp.pass ? 0 : 1;
  }

  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(std::move(report), ms, gl);
  return code;
}

// ---- synth -----------------------------------------------------------------

std::vector<Matrix> pad_inputs(std::vector<Matrix> v, size_t count, int n,
                               const std::string& where) {
  if (v.empty()) v.assign(count, Matrix::Zero(n, 0));
  if (v.size() != count) {
    throw SchemaError(where + ": need one input matrix per channel (" + std::to_string(count) +
                      "), got " + std::to_string(v.size()));
  }
  return v;
}

ContinuousGenerator close_ct(const ContinuousGenerator& g, const std::vector<Matrix>& b,
                             const std::vector<Matrix>& k) {
  ContinuousGenerator closed;
  closed.n = g.n;
  Matrix a0 = g.a0(0.0);
  if (k[0].rows() > 0) a0 += b[0] * k[0];
  closed.a0 = MatrixSchedule::constant(a0);
  for (size_t i = 0; i < g.noise.size(); ++i) {
    Matrix ai = g.noise[i](0.0);
    if (k[i + 1].rows() > 0) ai += b[i + 1] * k[i + 1];
    closed.noise.push_back(MatrixSchedule::constant(ai));
  }
  closed.mu = ScalarSchedule::constant(g.mu(0.0));
  return closed;
}

DiscreteGenerator close_dt(const DiscreteGenerator& g, const std::vector<Matrix>& b,
                           const std::vector<Matrix>& k) {
  DiscreteGenerator closed;
  closed.n = g.n;
  for (size_t i = 0; i < g.jumps.size(); ++i) {
    Matrix ji = g.jumps[i](0.0);
    if (k[i].rows() > 0) ji += b[i] * k[i];
    closed.jumps.push_back(MatrixSchedule::constant(ji));
  }
  return closed;
}

int cmd_synth(const std::string& path, const std::optional<double>& dwell_flag,
              const std::vector<double>& dwell_range, const std::optional<int>& grid_flag,
              const std::string& out, const Global& gl) {
  const auto start = std::chrono::steady_clock::now();
  const Json root = parse_json_text(read_file(path), path);
  const SystemSpec spec = system_from_json(root);
  Json report = base_report("synth", root, path);

  SynthOptions opt;
  opt.tol = gl.tol;
  if (grid_flag) opt.grid = *grid_flag;
  else opt.grid = static_cast<int>(opt_num(spec.options, "grid", 8.0));

  Json gains_doc;
  gains_doc["version"] = kSchemaVersion;
  bool found = false;
  std::string status;

  if (spec.type == SystemType::Ct) {
    if (spec.inputs.empty()) throw SchemaError("system.inputs required for synthesis");
    const auto b = pad_inputs(spec.inputs, 1 + spec.ct.noise.size(), spec.ct.n, "system.inputs");
    const GainSet r = synth_ct_lti(spec.ct, b, opt);
    gains_doc["gains"] = to_json(r);
    if (r.found) gains_doc["system"] = to_json(close_ct(spec.ct, b, r.gains));
    found = r.found;
    status = r.status;
  } else if (spec.type == SystemType::Dt) {
    if (spec.inputs.empty()) throw SchemaError("system.inputs required for synthesis");
    const auto b = pad_inputs(spec.inputs, spec.dt.jumps.size(), spec.dt.n, "system.inputs");
    const GainSet r = synth_dt_lti(spec.dt, b, opt);
    gains_doc["gains"] = to_json(r);
    if (r.found) gains_doc["system"] = to_json(close_dt(spec.dt, b, r.gains));
    found = r.found;
    status = r.status;
  } else if (spec.type == SystemType::Hybrid) {
    double dmin = 0.0, dmax = 0.0;
    if (dwell_flag && !dwell_range.empty()) {
      throw SchemaError("give either --dwell or --dwell-range, not both");
    }
    if (dwell_flag) {
      dmin = dmax = *dwell_flag;
    } else if (!dwell_range.empty()) {
      if (dwell_range.size() != 2) throw SchemaError("--dwell-range takes two values a,b");
      dmin = dwell_range[0];
      dmax = dwell_range[1];
    } else if (spec.options.contains("dwell")) {
      dmin = dmax = opt_num(spec.options, "dwell", 0.0);
    } else if (spec.options.contains("dwell_min") || spec.options.contains("dwell_max")) {
      dmin = opt_num(spec.options, "dwell_min", 0.0);
      dmax = opt_num(spec.options, "dwell_max", dmin);
    } else if (spec.hybrid.impulses.kind == ImpulseSchedule::Kind::Periodic) {
      dmin = dmax = spec.hybrid.impulses.period;
    } else if (spec.hybrid.impulses.kind == ImpulseSchedule::Kind::Range) {
      dmin = spec.hybrid.impulses.tmin;
      dmax = spec.hybrid.impulses.tmax;
    } else {
      throw SchemaError("dwell required: pass --dwell/--dwell-range or set options.dwell");
    }
    const DwellMode mode = dwell_mode_from(opt_str(spec.options, "dwell_mode", "constant"));
    const int n = spec.hybrid.flow.n;
    const auto fb = pad_inputs(spec.flow_inputs, 1 + spec.hybrid.flow.noise.size(), n,
                               "system.flow.inputs");
    const auto jb = pad_inputs(spec.jump_inputs, spec.hybrid.jump.jumps.size(), n,
                               "system.jump.inputs");
    bool any = false;
    for (const auto& m : fb) any = any || m.cols() > 0;
    for (const auto& m : jb) any = any || m.cols() > 0;
    if (!any) throw SchemaError("no input matrices given; nothing to design");

    const HybridSynthResult r = synth_hybrid_dwell(spec.hybrid, fb, jb, dmin, dmax, mode, opt);
    gains_doc["gains"] = to_json(r);
    if (r.found) {
      HybridGenerator closed;
      closed.flow = close_ct(spec.hybrid.flow, fb, r.flow_gains);
      closed.jump = close_dt(spec.hybrid.jump, jb, r.jump_gains);
      closed.impulses = spec.hybrid.impulses;
      Json sys = to_json(closed);
      gains_doc["system"] = std::move(sys);
    }
    found = r.found;
    status = r.status;
  } else {
    throw UnsupportedError("synthesis takes a ct, dt or hybrid system spec");
  }

  const std::string target = out.empty() ? "gains.json" : out;
  write_file(target, gains_doc.dump(2) + "\n");
  report["gains_file"] = target;
  report["found"] = found;
  report["status"] = status;
  report["verdict"] = found ? "found" : "not-found";

  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  emit(std::move(report), ms, gl);
  return found ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"moment-system toolkit: analyze, simulate, lift, verify and synthesize "
               "linear matrix-valued dynamics"};
  app.require_subcommand(1);

  Global gl;
  app.add_option("--tol", gl.tol, "verdict classification tolerance");
  app.add_option("--json-out", gl.json_out, "also write the report JSON to this path");
  app.add_flag("--quiet", gl.quiet, "suppress the report on stdout");
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string a_spec;
  auto* analyze = app.add_subcommand("analyze", "spectral and certificate analysis");
  analyze->fallthrough();
  analyze->add_option("spec", a_spec, "system spec file")->required();

  std::string s_spec, s_csv;
  std::optional<double> s_tf, s_dt, s_seed;
  std::optional<std::string> s_x0;
  auto* simulate = app.add_subcommand("simulate", "integrate the moment flow");
  simulate->fallthrough();
  simulate->add_option("spec", s_spec, "system spec file")->required();
  simulate->add_option("--tf", s_tf, "horizon (steps for discrete time)");
  simulate->add_option("--dt", s_dt, "step size");
  simulate->add_option("--x0", s_x0, "initial moment as inline JSON");
  simulate->add_option("--seed", s_seed, "seed for randomized impulse schedules");
  simulate->add_option("--out", s_csv, "write the trajectory CSV here");

  std::string l_spec, l_out;
  auto* lift = app.add_subcommand("lift", "compile a stochastic model to its moment system");
  lift->fallthrough();
  lift->add_option("spec", l_spec, "stochastic system spec file")->required();
  lift->add_option("-o,--out", l_out, "write the lifted system here");

  std::string v_spec, v_against, v_csv;
  std::optional<double> v_paths, v_seed, v_dt, v_tf;
  auto* verify = app.add_subcommand("verify", "Monte Carlo check of a moment lift");
  verify->fallthrough();
  verify->add_option("spec", v_spec, "stochastic system spec file")->required();
  verify->add_option("--paths", v_paths, "number of sample paths");
  verify->add_option("--seed", v_seed, "ensemble seed");
  verify->add_option("--dt", v_dt, "path integration step");
  verify->add_option("--tf", v_tf, "horizon (steps for discrete time)");
  verify->add_option("--against", v_against, "lifted system file to compare against");
  verify->add_option("--out", v_csv, "write trace/stderr CSV here");

  std::string y_spec, y_out;
  std::optional<double> y_dwell;
  std::vector<double> y_range;
  std::optional<int> y_grid;
  auto* synth = app.add_subcommand("synth", "state-feedback gain synthesis");
  synth->fallthrough();
  synth->add_option("spec", y_spec, "system spec file with input matrices")->required();
  synth->add_option("--dwell", y_dwell, "fixed dwell time (hybrid)");
  synth->add_option("--dwell-range", y_range, "dwell window a,b (hybrid)")->delimiter(',');
  synth->add_option("--grid", y_grid, "certificate profile nodes (hybrid)");
  synth->add_option("-o,--out", y_out, "gains output file (default gains.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_analyze(a_spec, gl);
    if (*simulate) return cmd_simulate(s_spec, s_tf, s_dt, s_x0, s_seed, s_csv, gl);
    if (*lift) return cmd_lift(l_spec, l_out, gl);
    if (*verify) return cmd_verify(v_spec, v_paths, v_seed, v_dt, v_tf, v_against, v_csv, gl);
    if (*synth) return cmd_synth(y_spec, y_dwell, y_range, y_grid, y_out, gl);
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 4;
}

}  // namespace mvsys
