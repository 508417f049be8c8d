#include "crdt/objects.hpp"

#include <stdexcept>

namespace crdt {

namespace {

std::int64_t add_argument(const std::string& object, const Operation& op) {
  if (op.name != "add" || op.args.size() != 1)
    throw std::invalid_argument(object + ": unsupported operation '" + op.to_string() + "'");
  return op.args[0];
}

Value set_query(const std::string& object, const Query& q, const Value& s) {
  if (q == "sum") {
    std::int64_t total = 0;
    for (const auto& x : s.items()) total += x.as_int();
    return Value::integer(total);
  }
  if (q == "size") return Value::integer(static_cast<std::int64_t>(s.size()));
  throw std::invalid_argument(object + ": unsupported query '" + q + "'");
}

Value history_tag(ReplicaId r, const Operation& op, const Value& history) {
  std::int64_t mine = 0;
  for (const auto& t : history.items())
    if (t.items()[0].as_int() == r.index) ++mine;
  return Value::tuple({Value::integer(r.index), Value::integer(mine + 1), Value::string(op.to_string())});
}

}  // namespace

bool leq(const StObject& o, const Value& a, const Value& b) { return o.join(a, b) == b; }

OpObject gset_op() {
  OpObject o;
  o.name = "gset-op";
  o.initial = Value::set({});
  o.prep = [](ReplicaId, const Operation& op, const Value&) {
    return Value::integer(add_argument("gset-op", op));
  };
  o.effect = [](const Value& payload, const Value& s) { return set_insert(s, payload); };
  o.query = [](const Query& q, const Value& s) { return set_query("gset-op", q, s); };
  return o;
}

StObject gset_st() {
  StObject o;
  o.name = "gset-st";
  o.initial = Value::set({});
  o.join = [](const Value& a, const Value& b) { return set_union(a, b); };
  o.update = [](ReplicaId, const Operation& op, const Value& s) {
    return set_insert(s, Value::integer(add_argument("gset-st", op)));
  };
  o.query = [](const Query& q, const Value& s) { return set_query("gset-st", q, s); };
  return o;
}

StObject gcounter_st() {
  StObject o;
  o.name = "gcounter-st";
  o.initial = Value::map({});
  o.join = [](const Value& a, const Value& b) {
    Value out = a;
    for (const auto& [k, v] : b.entries()) {
      auto mine = out.lookup(k);
      if (!mine || mine->as_int() < v.as_int()) out = map_assign(out, k, v);
    }
    return out;
  };
  o.update = [](ReplicaId r, const Operation& op, const Value& s) {
    if (op.name != "inc" || !op.args.empty())
      throw std::invalid_argument("gcounter-st: unsupported operation '" + op.to_string() + "'");
    const auto key = Value::integer(r.index);
    const auto cur = s.lookup(key);
    return map_assign(s, key, Value::integer((cur ? cur->as_int() : 0) + 1));
  };
  o.query = [](const Query& q, const Value& s) {
    if (q != "sum" && q != "value")
      throw std::invalid_argument("gcounter-st: unsupported query '" + q + "'");
    std::int64_t total = 0;
    for (const auto& [k, v] : s.entries()) total += v.as_int();
    return Value::integer(total);
  };
  return o;
}

OpObject augment_history_op(const OpObject& o) {
  OpObject a;
  a.name = o.name + "+history";
  a.initial = Value::tuple({o.initial, Value::set({})});
  a.prep = [o](ReplicaId r, const Operation& op, const Value& s) {
    const auto& parts = s.items();
    return Value::tuple({o.prep(r, op, parts[0]), Value::set({history_tag(r, op, parts[1])})});
  };
  a.effect = [o](const Value& payload, const Value& s) {
    const auto& p = payload.items();
    const auto& parts = s.items();
    return Value::tuple({o.effect(p[0], parts[0]), set_union(parts[1], p[1])});
  };
  a.query = [o](const Query& q, const Value& s) {
    const auto& parts = s.items();
    return Value::tuple({o.query(q, parts[0]), parts[1]});
  };
  return a;
}

StObject augment_history_st(const StObject& o) {
  StObject a;
  a.name = o.name + "+history";
  a.initial = Value::tuple({o.initial, Value::set({})});
  a.join = [o](const Value& x, const Value& y) {
    return Value::tuple({o.join(x.items()[0], y.items()[0]), set_union(x.items()[1], y.items()[1])});
  };
  a.update = [o](ReplicaId r, const Operation& op, const Value& s) {
    const auto& parts = s.items();
    return Value::tuple({o.update(r, op, parts[0]), set_insert(parts[1], history_tag(r, op, parts[1]))});
  };
  a.query = [o](const Query& q, const Value& s) {
    const auto& parts = s.items();
    return Value::tuple({o.query(q, parts[0]), parts[1]});
  };
  return a;
}

std::pair<Value, Value> split_history_result(const Value& v) {
  if (!v.is(Value::Kind::Tuple) || v.size() != 2)
    throw std::invalid_argument("not a history-augmented result: " + v.to_string());
  return {v.items()[0], v.items()[1]};
}

bool is_op_object_name(const std::string& name) { return name == "gset-op"; }
bool is_st_object_name(const std::string& name) { return name == "gset-st" || name == "gcounter-st"; }

OpObject make_op_object(const std::string& name) {
  if (name == "gset-op") return gset_op();
  throw std::invalid_argument("unknown op-based object: " + name);
}

StObject make_st_object(const std::string& name) {
  if (name == "gset-st") return gset_st();
  if (name == "gcounter-st") return gcounter_st();
  throw std::invalid_argument("unknown state-based object: " + name);
}

}  // namespace crdt
