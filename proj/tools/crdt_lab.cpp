// crdt-lab: scenario-driven front end for the checker.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "crdt/scenario.hpp"

namespace {

using crdt::Json;

constexpr int kUsage = 3;

struct Flags {
  std::string scenario;
  std::string out;
  std::string program;
  int depth = -1;
  int max_trace_len = -1;
  int tau_budget = -2;
  bool no_prune = false;
};

int workers_from_env() {
  const char* w = std::getenv("CRDT_EMU_WORKERS");
  if (!w || !*w) return 1;
  char* end = nullptr;
  const long n = std::strtol(w, &end, 10);
  if (*end || n < 1 || n > 256) throw crdt::ScenarioError("CRDT_EMU_WORKERS must be a positive integer");
  return static_cast<int>(n);
}

void emit(const Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw crdt::ScenarioError("cannot write " + out);
  f << j.dump(2) << "\n";
}

void apply_overrides(crdt::Scenario& s, const Flags& f) {
  if (f.depth >= 0) {
    if (f.depth == 0) throw crdt::ScenarioError("--depth must be positive for checks");
    s.step_bound = f.depth;
    for (auto& c : s.checks) c.params.erase("step_bound");
  }
  if (f.max_trace_len > 0) {
    s.max_trace_len = f.max_trace_len;
    for (auto& c : s.checks) c.params.erase("max_trace_len");
  }
  if (f.tau_budget >= -1) {
    s.tau_budget = f.tau_budget;
    for (auto& c : s.checks) c.params.erase("tau_budget");
  }
}

crdt::CheckOptions base_options(const Flags& f) {
  crdt::CheckOptions o;
  o.workers = workers_from_env();
  o.prune = !f.no_prune;
  return o;
}

void summarize(const std::vector<crdt::CheckRun>& runs) {
  for (const auto& r : runs) {
    std::cerr << r.name;
    if (r.params.contains("relation")) std::cerr << " " << r.params["relation"].get<std::string>();
    if (r.params.contains("side")) std::cerr << " " << r.params["side"].get<std::string>();
    if (r.params.contains("k")) std::cerr << " " << r.params["k"].get<std::string>() << "-by-" << r.params["l"].get<std::string>();
    std::cerr << ": " << crdt::to_string(r.verdict.outcome) << " (" << r.verdict.stats.states << " states, "
              << static_cast<long>(r.wall_ms) << " ms)";
    if (r.verdict.failure) std::cerr << " " << r.verdict.failure->detail;
    std::cerr << "\n";
  }
}

template <typename System>
Json dump_graph(const System& sys, const std::string& side, int depth, const crdt::CheckOptions& o) {
  const auto g = crdt::explore(sys, depth, o);
  const auto& roster = sys.roster();
  Json nodes = Json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& c = g.nodes[i].config;
    Json states = Json::object();
    for (auto r : roster.ids()) states[roster.name(r)] = c.states[r.index].to_string();
    Json buffer = Json::array();
    for (const auto& e : c.buffer.entries())
      buffer.push_back({{"replica", roster.name(e.replica)}, {"payload", e.message.payload().to_string()}});
    nodes.push_back({{"id", i}, {"depth", g.nodes[i].depth}, {"states", states}, {"buffer", buffer}});
  }
  Json edges = Json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"from", e.from}, {"to", e.to}, {"label", e.label.to_string(roster)}});
  return Json{{"side", side},
              {"object", sys.object().name},
              {"depth", depth},
              {"node_count", g.nodes.size()},
              {"edge_count", g.edges.size()},
              {"exhausted", g.exhausted},
              {"nodes", nodes},
              {"edges", edges}};
}

int cmd_explore(const Flags& f) {
  crdt::Scenario s = crdt::load_scenario(f.scenario);
  const int depth = f.depth >= 0 ? f.depth : s.step_bound;
  const crdt::CheckOptions o = base_options(f);
  Json systems = Json::array();
  if (s.emulate) {
    const crdt::PairedSystem p = crdt::make_paired(s);
    const bool host_is_op = p.direction == crdt::Direction::OpToSt;
    systems.push_back(dump_graph(p.op, host_is_op ? "host" : "guest", depth, o));
    systems.push_back(dump_graph(p.st, host_is_op ? "guest" : "host", depth, o));
  } else if (s.kind == crdt::SystemKind::Op) {
    systems.push_back(dump_graph(crdt::make_op_system(s), "op", depth, o));
  } else {
    systems.push_back(dump_graph(crdt::make_st_system(s), "st", depth, o));
  }
  emit(Json{{"command", "explore"}, {"roster", s.roster.names()}, {"systems", systems}}, f.out);
  for (const auto& g : systems)
    std::cerr << g["side"].get<std::string>() << ": " << g["node_count"] << " nodes, " << g["edge_count"]
              << " edges\n";
  return 0;
}

int cmd_check(const Flags& f) {
  crdt::Scenario s = crdt::load_scenario(f.scenario);
  apply_overrides(s, f);
  if (s.checks.empty()) throw crdt::ScenarioError("scenario lists no checks");
  const auto runs = crdt::run_checks(s, base_options(f));
  emit(crdt::make_report("check", s, runs), f.out);
  summarize(runs);
  return crdt::exit_code(runs);
}

int cmd_run_client(const Flags& f) {
  crdt::Scenario s = crdt::load_scenario(f.scenario);
  apply_overrides(s, f);
  std::string text, origin;
  if (!f.program.empty()) {
    std::ifstream in(f.program);
    if (!in) throw crdt::ScenarioError("cannot read " + f.program);
    text.assign(std::istreambuf_iterator<char>(in), {});
    origin = f.program;
  } else if (s.program) {
    text = *s.program;
    origin = s.program_origin;
  } else {
    throw crdt::ScenarioError("no client program: pass --program or set client.program");
  }
  crdt::client::ProgPtr prog;
  try {
    prog = crdt::client::parse_program(text);
  } catch (const crdt::client::SyntaxError& e) {
    throw crdt::ScenarioError(origin + ":" + e.what());
  }
  const crdt::CheckOptions o = base_options(f);
  const auto runs = crdt::run_approximation(s, prog, o, s.step_bound);
  emit(crdt::make_report("run-client", s, runs), f.out);
  summarize(runs);
  return crdt::exit_code(runs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded checker for op-based and state-based CRDT semantics"};
  app.require_subcommand(1);
  Flags f;
  auto add_common = [&](CLI::App* c) {
    c->add_option("--scenario", f.scenario, "Scenario JSON file")->required();
    c->add_option("--depth", f.depth, "Step bound (overrides the scenario)")->check(CLI::NonNegativeNumber);
    c->add_option("--out", f.out, "Write the JSON output here instead of stdout");
    c->add_flag("--no-prune", f.no_prune, "Disable summary-based state pruning");
  };
  auto* explore = app.add_subcommand("explore", "Dump the transition graph(s) of a scenario");
  add_common(explore);
  auto* check = app.add_subcommand("check", "Run the checks listed in a scenario");
  add_common(check);
  check->add_option("--max-trace-len", f.max_trace_len, "Trace length bound")->check(CLI::PositiveNumber);
  check->add_option("--tau-budget", f.tau_budget, "Silent steps allowed per weak move")->check(CLI::NonNegativeNumber);
  auto* run_client = app.add_subcommand("run-client", "Check client-program approximation across the pair");
  add_common(run_client);
  run_client->add_option("--program", f.program, "Client program file (overrides the scenario)");
  run_client->add_option("--tau-budget", f.tau_budget, "Silent steps allowed per weak move")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    if (*explore) return cmd_explore(f);
    if (*check) return cmd_check(f);
    return cmd_run_client(f);
  } catch (const crdt::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
