#pragma once

#include "mvsys/analysis.hpp"
#include "mvsys/generators.hpp"
#include "mvsys/lift.hpp"
#include "mvsys/simulate.hpp"
#include "mvsys/synth.hpp"
#include "mvsys/verify.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvsys {

using Json = nlohmann::ordered_json;

// Input violates the file format (bad JSON, wrong shapes, unknown fields).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input is well-formed but asks for an analysis this build does not cover.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kSchemaVersion = "mvsys-1";

// ---- primitives ------------------------------------------------------------

// {"rows": r, "cols": c, "data": [[row]...]}; bare nested arrays (or a bare
// number for 1x1) are accepted on input.
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& what);
// Loads like matrix_from_json and additionally rejects asymmetry.
SymMatrix sym_from_json(const Json& j, const std::string& what);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& what);

// Constant schedules serialize to the bare value; anything else to
// {"mode": "piecewise"|"linear"|"periodic", "times": [...], "values": [...],
// "period": p}.
Json to_json(const MatrixSchedule& s);
Json to_json(const ScalarSchedule& s);
MatrixSchedule matrix_schedule_from_json(const Json& j, const std::string& what);
ScalarSchedule scalar_schedule_from_json(const Json& j, const std::string& what);

Json to_json(const ImpulseSchedule& s);
ImpulseSchedule impulses_from_json(const Json& j, const std::string& what);

// ---- system spec files -----------------------------------------------------

enum class SystemType { Ct, Dt, Hybrid, Stochastic };

// In-memory form of a "mvsys-1" spec file. Exactly one of the payloads is
// meaningful, selected by `type`; the optional blocks travel with it.
struct SystemSpec {
  SystemType type = SystemType::Ct;

  ContinuousGenerator ct;
  DiscreteGenerator dt;
  HybridGenerator hybrid;
  StochasticSpec stoch;

  DelayTerms delay;                         // ct/dt only
  std::vector<Matrix> inputs;               // ct/dt synthesis inputs
  std::vector<Matrix> flow_inputs;          // hybrid synthesis inputs
  std::vector<Matrix> jump_inputs;
  std::optional<BlockStructure> structure;  // mode-indicator block layout
  std::string provenance;

  Json options = Json::object();  // validated keys, read by the CLI
};

SystemSpec system_from_json(const Json& root);
// Parses the file (SchemaError on malformed JSON) and validates the schema.
SystemSpec load_system_file(const std::string& path);

Json to_json(const ContinuousGenerator& g);
Json to_json(const DiscreteGenerator& g);
Json to_json(const HybridGenerator& g);

// Full "mvsys-1" document for a lifted system; re-loadable by analyze and
// simulate, with the block structure and provenance preserved.
Json lifted_to_file_json(const LiftedSystem& l);
LiftedSystem lifted_from_spec(const SystemSpec& spec);

// ---- reports ---------------------------------------------------------------

Json to_json(const SpectrumReport& r);
Json to_json(const LyapunovCertificate& c);
Json to_json(const DelayIndependenceReport& r);
Json to_json(const CoupledCertificate& c);
Json to_json(const HybridDwellReport& r);
Json to_json(const DecayEstimate& e);
Json to_json(const ComparisonReport& r);
Json to_json(const PathEnsemble& e);
Json to_json(const GainSet& g);
Json to_json(const HybridSynthResult& g);

Json trajectory_to_json(const Trajectory& t);
// Columns: t, the scaled lower-triangle coordinates, min_eig, nuclear_norm,
// cumulative jump count.
std::string trajectory_csv(const Trajectory& t);

// ---- misc ------------------------------------------------------------------

uint64_t fnv1a64(const std::string& bytes);
// Hash of the canonical (whitespace-free) serialization, as fixed-width hex.
std::string input_hash(const Json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mvsys
