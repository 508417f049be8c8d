#include "crdt/scenario.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

namespace crdt {

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ScenarioError(std::string("field '") + key + "': " + e.what());
  }
}

int positive(const Json& j, const char* key, int fallback) {
  const int v = get_or<int>(j, key, fallback);
  if (v <= 0) throw ScenarioError(std::string("bound '") + key + "' must be positive");
  return v;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Which which_from_string(const std::string& s) {
  if (s == "host-by-guest") return Which::HostByGuest;
  if (s == "guest-by-host") return Which::GuestByHost;
  throw ScenarioError("direction must be host-by-guest or guest-by-host, got '" + s + "'");
}

Which default_which(RelationId r) {
  return r == RelationId::R2 || r == RelationId::Q2 ? Which::GuestByHost : Which::HostByGuest;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Scenario parse_scenario(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  Scenario s;
  s.base_dir = base_dir;
  try {
    const auto names = j.at("roster").get<std::vector<std::string>>();
    if (names.empty()) throw ScenarioError("roster must not be empty");
    s.roster = Roster(names);

    const Json& obj = j.at("object");
    s.object = obj.is_string() ? obj.get<std::string>() : obj.at("name").get<std::string>();
    s.augment = obj.is_object() && get_or<bool>(obj, "augment", false);
    if (is_op_object_name(s.object))
      s.kind = SystemKind::Op;
    else if (is_st_object_name(s.object))
      s.kind = SystemKind::St;
    else
      throw ScenarioError("unknown object '" + s.object + "'");

    const Json sem = j.value("semantics", Json::object());
    if (sem.contains("kind")) {
      const auto k = sem.at("kind").get<std::string>();
      if ((k == "op") != (s.kind == SystemKind::Op) || (k != "op" && k != "st"))
        throw ScenarioError("semantics kind '" + k + "' does not fit object '" + s.object + "'");
    }
    const auto disc = get_or<std::string>(sem, "discipline", "causal");
    if (disc == "causal")
      s.discipline = Discipline::Causal;
    else if (disc == "reliable")
      s.discipline = Discipline::ReliableOnly;
    else
      throw ScenarioError("discipline must be causal or reliable");
    const auto bc = get_or<std::string>(sem, "broadcast", "separate");
    if (bc == "separate")
      s.mode = BroadcastMode::SeparateSend;
    else if (bc == "atomic")
      s.mode = BroadcastMode::AtomicBroadcast;
    else
      throw ScenarioError("broadcast must be separate or atomic");

    if (j.contains("emulate")) {
      const auto e = j.at("emulate").get<std::string>();
      if (e == "op-to-st")
        s.emulate = Direction::OpToSt;
      else if (e == "st-to-op")
        s.emulate = Direction::StToOp;
      else
        throw ScenarioError("emulate must be op-to-st or st-to-op");
      if ((*s.emulate == Direction::OpToSt) != (s.kind == SystemKind::Op))
        throw ScenarioError("emulation '" + e + "' needs a " +
                            (*s.emulate == Direction::OpToSt ? "n op-based" : " state-based") + " host object");
    }
    if (j.contains("guest_fault")) {
      if (j.at("guest_fault").get<std::string>() != "constant-query")
        throw ScenarioError("guest_fault must be constant-query");
      if (!s.emulate) throw ScenarioError("guest_fault needs an emulate directive");
      s.constant_query_guest = true;
    }

    for (const auto& op : j.at("ops")) s.universe.ops.push_back(Operation::parse(op.get<std::string>()));
    s.universe.queries = j.at("queries").get<std::vector<std::string>>();

    const Json lim = j.value("limits", Json::object());
    s.limits.updates_per_replica = get_or<int>(lim, "updates_per_replica", -1);
    s.limits.unique_ops = get_or<bool>(lim, "unique_ops", false);
    if (lim.contains("per_replica")) {
      s.limits.per_replica.assign(s.roster.size(), -1);
      for (const auto& [name, cap] : lim.at("per_replica").items())
        s.limits.per_replica[s.roster.lookup(name).index] = cap.get<int>();
    }

    const Json b = j.value("bounds", Json::object());
    s.step_bound = positive(b, "step_bound", 8);
    s.max_trace_len = positive(b, "max_trace_len", 3);
    s.tau_budget = get_or<int>(b, "tau_budget", -1);

    for (const auto& c : j.value("checks", Json::array())) {
      CheckSpec spec;
      spec.name = c.is_string() ? c.get<std::string>() : c.at("name").get<std::string>();
      spec.params = c.is_object() ? c : Json::object();
      spec.params.erase("name");
      static const std::vector<std::string> known{"sim", "bisim", "traces", "convergence", "causal", "commutation",
                                                  "approx"};
      if (std::find(known.begin(), known.end(), spec.name) == known.end())
        throw ScenarioError("unknown check '" + spec.name + "'");
      s.checks.push_back(std::move(spec));
    }

    if (j.contains("client")) {
      const Json& c = j.at("client");
      if (c.contains("program")) {
        const auto p = c.at("program").get<std::string>();
        s.program = read_file(base_dir / p);
        s.program_origin = p;
      } else if (c.contains("source")) {
        s.program = c.at("source").get<std::string>();
        s.program_origin = "inline";
      }
      const Json store = c.value("store", Json::object());
      for (const auto& [x, v] : store.items()) {
        const auto n = v.get<std::int64_t>();
        if (n < 0) throw ScenarioError("store values must be natural numbers");
        s.store[x] = n;
      }
    }
  } catch (const Json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  return parse_scenario(j, path.parent_path());
}

PairOptions pair_options(const Scenario& s) {
  PairOptions o;
  o.limits = s.limits;
  o.discipline = s.discipline;
  o.mode = s.mode;
  o.constant_query_guest = s.constant_query_guest;
  return o;
}

PairedSystem make_paired(const Scenario& s) {
  if (!s.emulate) throw ScenarioError("this check needs an emulate directive");
  if (*s.emulate == Direction::OpToSt) {
    OpObject host = make_op_object(s.object);
    if (s.augment) host = augment_history_op(host);
    return make_op_to_st(s.roster, host, s.universe, pair_options(s));
  }
  StObject host = make_st_object(s.object);
  if (s.augment) host = augment_history_st(host);
  return make_st_to_op(s.roster, host, s.universe, pair_options(s));
}

OpSystem make_op_system(const Scenario& s) {
  if (s.kind != SystemKind::Op) throw ScenarioError("object '" + s.object + "' is not op-based");
  OpObject o = make_op_object(s.object);
  if (s.augment) o = augment_history_op(o);
  return OpSystem(s.roster, o, s.universe, s.limits, s.discipline);
}

StSystem make_st_system(const Scenario& s) {
  if (s.kind != SystemKind::St) throw ScenarioError("object '" + s.object + "' is not state-based");
  StObject o = make_st_object(s.object);
  if (s.augment) o = augment_history_st(o);
  return StSystem(s.roster, o, s.universe, s.limits, s.mode);
}

namespace {

CheckOptions options_for(const Scenario& s, const CheckSpec& c, const CheckOptions& base) {
  CheckOptions o = base;
  o.step_bound = positive(c.params, "step_bound", s.step_bound);
  o.tau_budget = get_or<int>(c.params, "tau_budget", s.tau_budget);
  return o;
}

template <typename F>
CheckRun timed(const std::string& name, Json params, const Roster& roster, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckRun run{name, std::move(params), f(), roster, 0};
  run.wall_ms = elapsed_ms(t0);
  return run;
}

// Op system a sweep runs on: the op side of the pair when emulating.
template <typename F>
Verdict on_op_side(const Scenario& s, F&& f) {
  if (s.emulate) return f(make_paired(s).op);
  return f(make_op_system(s));
}

}  // namespace

std::vector<CheckRun> run_approximation(const Scenario& s, const client::ProgPtr& prog, const CheckOptions& base,
                                        std::optional<int> bound) {
  const PairedSystem sys = make_paired(s);
  const int k = bound.value_or(base.step_bound);
  const int l = 3 * k + 4;
  const bool host_is_op = sys.direction == Direction::OpToSt;
  Json hg{{"k", "host"}, {"l", "guest"}, {"bound_k", k}, {"bound_l", l}, {"program", client::print(*prog)}};
  Json gh{{"k", "guest"}, {"l", "host"}, {"bound_k", k}, {"bound_l", l}, {"program", client::print(*prog)}};
  std::vector<CheckRun> out;
  out.push_back(timed("approx", hg, s.roster, [&] {
    return host_is_op ? client::check_approximation(sys.op, sys.st, s.store, prog, k, l)
                      : client::check_approximation(sys.st, sys.op, s.store, prog, k, l);
  }));
  out.push_back(timed("approx", gh, s.roster, [&] {
    return host_is_op ? client::check_approximation(sys.st, sys.op, s.store, prog, k, l)
                      : client::check_approximation(sys.op, sys.st, s.store, prog, k, l);
  }));
  return out;
}

std::vector<CheckRun> run_checks(const Scenario& s, const CheckOptions& base) {
  std::vector<CheckRun> out;
  for (const auto& c : s.checks) {
    const CheckOptions o = options_for(s, c, base);
    Json params = c.params;
    try {
      if (c.name == "sim") {
        const PairedSystem sys = make_paired(s);
        if (!c.params.contains("relation")) throw ScenarioError("sim check needs a relation");
        const RelationId rel = relation_from_string(c.params.at("relation").get<std::string>());
        const Which which = c.params.contains("direction")
                                ? which_from_string(c.params.at("direction").get<std::string>())
                                : default_which(rel);
        params["relation"] = to_string(rel);
        params["direction"] = to_string(which);
        out.push_back(timed(c.name, params, s.roster, [&] { return check_weak_simulation(sys, rel, which, o); }));
      } else if (c.name == "bisim") {
        const PairedSystem sys = make_paired(s);
        out.push_back(timed(c.name, params, s.roster, [&] { return check_weak_bisimulation(sys, o); }));
      } else if (c.name == "traces") {
        const PairedSystem sys = make_paired(s);
        const int len = positive(c.params, "max_trace_len", s.max_trace_len);
        params["max_trace_len"] = len;
        out.push_back(timed(c.name, params, s.roster,
                            [&] { return check_trace_equivalence(sys, len, o.step_bound, o); }));
      } else if (c.name == "convergence") {
        // Convergence compares (value, history) results, so the object is always augmented.
        Scenario sa = s;
        sa.augment = true;
        if (sa.emulate) {
          const PairedSystem sys = make_paired(sa);
          const bool host_is_op = sys.direction == Direction::OpToSt;
          Json ph = params, pg = params;
          ph["side"] = "host";
          pg["side"] = "guest";
          out.push_back(timed(c.name, ph, s.roster, [&] {
            return host_is_op ? check_strong_convergence(sys.op, o) : check_strong_convergence(sys.st, o);
          }));
          out.push_back(timed(c.name, pg, s.roster, [&] {
            return host_is_op ? check_strong_convergence(sys.st, o) : check_strong_convergence(sys.op, o);
          }));
        } else if (s.kind == SystemKind::Op) {
          const OpSystem sys = make_op_system(sa);
          out.push_back(timed(c.name, params, s.roster, [&] { return check_strong_convergence(sys, o); }));
        } else {
          const StSystem sys = make_st_system(sa);
          out.push_back(timed(c.name, params, s.roster, [&] { return check_strong_convergence(sys, o); }));
        }
      } else if (c.name == "causal") {
        out.push_back(timed(c.name, params, s.roster, [&] {
          return on_op_side(s, [&](const OpSystem& sys) { return check_causal_safety(sys, o); });
        }));
      } else if (c.name == "commutation") {
        out.push_back(timed(c.name, params, s.roster, [&] {
          return on_op_side(s, [&](const OpSystem& sys) { return check_commutation(sys, o); });
        }));
      } else if (c.name == "approx") {
        if (!s.program) throw ScenarioError("approx check needs a client program");
        const client::ProgPtr prog = client::parse_program(*s.program);
        auto runs = run_approximation(s, prog, o, get_or<int>(c.params, "step_bound", s.step_bound));
        for (auto& r : runs) out.push_back(std::move(r));
      }
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(c.name + ": " + e.what());
    } catch (const client::SyntaxError& e) {
      throw ScenarioError(s.program_origin + ":" + e.what());
    }
  }
  return out;
}

int exit_code(const std::vector<CheckRun>& runs) {
  std::vector<Verdict> vs;
  for (const auto& r : runs) vs.push_back(r.verdict);
  return exit_code(vs);
}

Json make_report(const std::string& command, const Scenario& s, const std::vector<CheckRun>& runs) {
  Json checks = Json::array();
  for (const auto& r : runs) {
    Json j{{"name", r.name}, {"params", r.params}};
    const Json verdict = to_json(r.verdict, r.roster);
    for (const auto& [k, v] : verdict.items()) j[k] = v;
    j["wall_time_ms"] = r.wall_ms;
    checks.push_back(j);
  }
  Json report{{"command", command},
              {"roster", s.roster.names()},
              {"object", s.object},
              {"checks", checks},
              {"exit_code", exit_code(runs)}};
  return report;
}

}  // namespace crdt
