#include "crdt/serialize.hpp"

#include <stdexcept>

namespace crdt {

namespace {

std::runtime_error bad(const std::string& what) { return std::runtime_error("malformed JSON: " + what); }

}  // namespace

Json to_json(const Value& v, const Roster& roster) {
  switch (v.kind()) {
    case Value::Kind::Int:
      return v.as_int();
    case Value::Kind::Str:
      return Json{{"str", v.as_string()}};
    case Value::Kind::Set:
    case Value::Kind::Tuple: {
      Json items = Json::array();
      for (const auto& x : v.items()) items.push_back(to_json(x, roster));
      return Json{{v.is(Value::Kind::Set) ? "set" : "tuple", items}};
    }
    case Value::Kind::Map: {
      Json items = Json::array();
      for (const auto& [k, x] : v.entries()) items.push_back(Json::array({to_json(k, roster), to_json(x, roster)}));
      return Json{{"map", items}};
    }
    case Value::Kind::Msg: {
      const Message& m = v.as_message();
      return Json{{"msg",
                   {{"origin", roster.name(m.id().origin)},
                    {"seq", m.id().seq},
                    {"clock", m.clock().raw()},
                    {"payload", to_json(m.payload(), roster)}}}};
    }
  }
  return nullptr;
}

Value value_from_json(const Json& j, const Roster& roster) {
  if (j.is_number_integer()) return Value::integer(j.get<std::int64_t>());
  if (!j.is_object() || j.size() != 1) throw bad("value " + j.dump());
  const auto& [key, body] = *j.items().begin();
  if (key == "str") return Value::string(body.get<std::string>());
  if (key == "set" || key == "tuple") {
    std::vector<Value> xs;
    for (const auto& x : body) xs.push_back(value_from_json(x, roster));
    return key == "set" ? Value::set(std::move(xs)) : Value::tuple(std::move(xs));
  }
  if (key == "map") {
    std::vector<std::pair<Value, Value>> es;
    for (const auto& e : body) {
      if (!e.is_array() || e.size() != 2) throw bad("map entry " + e.dump());
      es.emplace_back(value_from_json(e[0], roster), value_from_json(e[1], roster));
    }
    return Value::map(std::move(es));
  }
  if (key == "msg") {
    VectorClock clock;
    const auto raw = body.at("clock").get<std::vector<std::uint32_t>>();
    for (std::size_t i = 0; i < raw.size(); ++i) clock.set(roster.at(i), raw[i]);
    MessageId id{roster.lookup(body.at("origin").get<std::string>()), body.at("seq").get<std::uint32_t>()};
    return Value::message(Message(id, clock, value_from_json(body.at("payload"), roster)));
  }
  throw bad("unknown value tag '" + key + "'");
}

Json to_json(const Event& e, const Roster& roster) {
  Json in = std::visit(
      [&](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, input::Upd>) return {{"kind", "upd"}, {"op", x.op.to_string()}};
        if constexpr (std::is_same_v<T, input::Qry>) return {{"kind", "qry"}, {"query", x.q}};
        if constexpr (std::is_same_v<T, input::Dlvr>)
          return {{"kind", "dlvr"}, {"message", to_json(Value::message(x.m), roster)}};
        return {{"kind", "none"}};
      },
      e.input);
  Json out = std::visit(
      [&](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, output::Ret>) return {{"kind", "ret"}, {"value", to_json(x.v, roster)}};
        if constexpr (std::is_same_v<T, output::Send>)
          return {{"kind", "send"}, {"message", to_json(Value::message(x.m), roster)}};
        return {{"kind", "none"}};
      },
      e.output);
  return Json{{"replica", roster.name(e.replica)}, {"input", in}, {"output", out}};
}

Event event_from_json(const Json& j, const Roster& roster) {
  Event e;
  e.replica = roster.lookup(j.at("replica").get<std::string>());
  const auto& in = j.at("input");
  const auto ik = in.at("kind").get<std::string>();
  if (ik == "upd")
    e.input = input::Upd{Operation::parse(in.at("op").get<std::string>())};
  else if (ik == "qry")
    e.input = input::Qry{in.at("query").get<std::string>()};
  else if (ik == "dlvr")
    e.input = input::Dlvr{value_from_json(in.at("message"), roster).as_message()};
  else if (ik == "none")
    e.input = input::None{};
  else
    throw bad("input kind '" + ik + "'");
  const auto& out = j.at("output");
  const auto ok = out.at("kind").get<std::string>();
  if (ok == "ret")
    e.output = output::Ret{value_from_json(out.at("value"), roster)};
  else if (ok == "send")
    e.output = output::Send{value_from_json(out.at("message"), roster).as_message()};
  else if (ok == "none")
    e.output = output::None{};
  else
    throw bad("output kind '" + ok + "'");
  return e;
}

Json to_json(const Label& l, const Roster& roster) {
  Json j{{"replica", roster.name(l.replica)}};
  switch (l.kind) {
    case LabelKind::Update:
      j["kind"] = "update";
      j["op"] = l.op.to_string();
      break;
    case LabelKind::Query:
      j["kind"] = "query";
      j["query"] = l.query;
      j["value"] = to_json(l.value, roster);
      break;
    case LabelKind::Silent:
      j["kind"] = "tau";
      j["silent"] = l.silent == SilentKind::Deliver ? "deliver" : "send";
      break;
  }
  return j;
}

Json to_json(const Stats& s) {
  return Json{{"states", s.states},
              {"edges", s.edges},
              {"max_depth", s.max_depth},
              {"matcher_hits", s.matcher_hits},
              {"fallback_hits", s.fallback_hits},
              {"cross_check_failures", s.cross_check_failures}};
}

Json to_json(const QueryProbe& p, const Roster& roster) {
  Json options = Json::array();
  for (const auto& o : p.options) options.push_back(to_json(o, roster));
  return Json{{"replica", roster.name(p.replica)},
              {"query", p.query},
              {"side", to_string(p.side)},
              {"value", to_json(p.value, roster)},
              {"options", options}};
}

Json to_json(const Failure& f, const Roster& roster) {
  Json j{{"kind", f.kind}, {"clause", f.clause}, {"detail", f.detail}};
  if (f.side) j["side"] = to_string(*f.side);
  if (f.label) j["label"] = to_json(*f.label, roster);
  if (f.probe) j["probe"] = to_json(*f.probe, roster);
  if (!f.trace.empty()) {
    Json t = Json::array();
    for (const auto& k : f.trace) t.push_back(label_key_to_string(k, roster));
    j["trace"] = t;
  }
  return j;
}

Side side_from_string(const std::string& s) {
  if (s == "op") return Side::Op;
  if (s == "st") return Side::St;
  throw bad("side '" + s + "'");
}

Json to_json(const std::vector<WitnessStep>& w, const Roster& roster) {
  Json out = Json::array();
  for (const auto& s : w) {
    Json j{{"side", to_string(s.side)}, {"event", to_json(s.event, roster)}};
    if (s.response) j["response"] = true;
    out.push_back(j);
  }
  return out;
}

std::vector<WitnessStep> witness_from_json(const Json& j, const Roster& roster) {
  std::vector<WitnessStep> out;
  for (const auto& s : j)
    out.push_back({side_from_string(s.at("side").get<std::string>()), event_from_json(s.at("event"), roster),
                   s.value("response", false)});
  return out;
}

Json to_json(const Verdict& v, const Roster& roster) {
  Json j{{"outcome", to_string(v.outcome)},
         {"bounds", {{"step_bound", v.stats.step_bound}, {"tau_budget", v.stats.tau_budget}, {"pruned", v.stats.pruned}}},
         {"stats", to_json(v.stats)}};
  if (!v.witness.empty() || v.outcome == Outcome::Counterexample) j["witness"] = to_json(v.witness, roster);
  if (v.failure) j["failure"] = to_json(*v.failure, roster);
  if (v.relation_failure) {
    j["relation_witness"] = to_json(v.relation_witness, roster);
    j["relation_failure"] = to_json(*v.relation_failure, roster);
  }
  return j;
}

}  // namespace crdt
