#ifndef CRDT_SCENARIO_HPP
#define CRDT_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crdt/client.hpp"
#include "crdt/serialize.hpp"

namespace crdt {

// Configuration errors in a scenario file; the CLI maps them to exit code 3.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SystemKind { Op, St };

struct CheckSpec {
  std::string name;  // sim | bisim | traces | convergence | causal | commutation | approx
  Json params;
};

struct Scenario {
  std::filesystem::path base_dir;
  Roster roster;
  std::string object;
  bool augment = false;
  SystemKind kind = SystemKind::Op;
  Discipline discipline = Discipline::Causal;
  BroadcastMode mode = BroadcastMode::SeparateSend;
  std::optional<Direction> emulate;
  bool constant_query_guest = false;
  Universe universe;
  Limits limits;
  int step_bound = 8;
  int max_trace_len = 3;
  int tau_budget = -1;
  std::vector<CheckSpec> checks;
  std::optional<std::string> program;  // source text
  std::string program_origin;          // path or "inline"
  client::Store store;
};

Scenario parse_scenario(const Json& j, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

PairOptions pair_options(const Scenario& s);
PairedSystem make_paired(const Scenario& s);  // requires `emulate`
OpSystem make_op_system(const Scenario& s);   // requires an op object
StSystem make_st_system(const Scenario& s);   // requires a state object

struct CheckRun {
  std::string name;
  Json params;
  Verdict verdict;
  Roster roster;
  double wall_ms = 0;
};

// Runs every listed check in order. `base` supplies worker count and prune flag.
std::vector<CheckRun> run_checks(const Scenario& s, const CheckOptions& base);

// Approximation in both directions across the scenario's paired environments.
std::vector<CheckRun> run_approximation(const Scenario& s, const client::ProgPtr& prog, const CheckOptions& base,
                                        std::optional<int> bound = std::nullopt);

Json make_report(const std::string& command, const Scenario& s, const std::vector<CheckRun>& runs);
int exit_code(const std::vector<CheckRun>& runs);

}  // namespace crdt

#endif  // CRDT_SCENARIO_HPP
