#include "crdt/emulation.hpp"

#include <algorithm>
#include <functional>

namespace crdt {

MessageSet max_set(const MessageSet& h) {
  MessageSet out;
  for (const auto& m : h) {
    bool maximal = true;
    for (const auto& x : h)
      if (happens_before(m, x)) {
        maximal = false;
        break;
      }
    if (maximal) out.push_back(m);
  }
  return out;
}

Value message_set_value(const MessageSet& h) {
  std::vector<Value> vs;
  vs.reserve(h.size());
  for (const auto& m : h) vs.push_back(Value::message(m));
  return Value::set(std::move(vs));
}

MessageSet as_message_set(const Value& h) {
  MessageSet out;
  out.reserve(h.size());
  for (const auto& v : h.items()) out.push_back(v.as_message());
  return out;
}

namespace {

// Maximal member with the smallest (origin, seq).
std::size_t peel_index(const MessageSet& h) {
  std::size_t best = h.size();
  for (std::size_t i = 0; i < h.size(); ++i) {
    bool maximal = true;
    for (const auto& x : h)
      if (happens_before(h[i], x)) {
        maximal = false;
        break;
      }
    if (maximal && (best == h.size() || h[i].id() < h[best].id())) best = i;
  }
  return best;
}

}  // namespace

Value interp(const MessageSet& h, const OpObject& o) {
  if (h.empty()) return o.initial;
  const auto i = peel_index(h);
  MessageSet rest = h;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
  return o.effect(h[i].payload(), interp(rest, o));
}

Value Interpreter::operator()(const Value& h) const {
  if (h.size() == 0) return object_.initial;
  {
    std::shared_lock lock(mu_);
    if (auto it = memo_.find(h); it != memo_.end()) return it->second;
  }
  const MessageSet ms = as_message_set(h);
  const auto i = peel_index(ms);
  MessageSet rest = ms;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
  Value result = object_.effect(ms[i].payload(), (*this)(message_set_value(rest)));
  std::unique_lock lock(mu_);
  memo_.emplace(h, result);
  return result;
}

std::size_t Interpreter::cache_size() const {
  std::shared_lock lock(mu_);
  return memo_.size();
}

LinearizationReport interp_all_linearizations(const MessageSet& h, const OpObject& o) {
  LinearizationReport rep;
  std::vector<bool> used(h.size(), false);
  std::function<void(std::size_t, const Value&)> go = [&](std::size_t placed, const Value& s) {
    if (placed == h.size()) {
      ++rep.extensions;
      auto it = std::lower_bound(rep.results.begin(), rep.results.end(), s);
      if (it == rep.results.end() || !(*it == s)) rep.results.insert(it, s);
      return;
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (used[i]) continue;
      bool ready = true;
      for (std::size_t j = 0; j < h.size(); ++j)
        if (!used[j] && j != i && happens_before(h[j], h[i])) {
          ready = false;
          break;
        }
      if (!ready) continue;
      used[i] = true;
      go(placed + 1, o.effect(h[i].payload(), s));
      used[i] = false;
    }
  };
  go(0, o.initial);
  return rep;
}

Message mint_message(ReplicaId r, const MessageSet& h, Value payload) {
  VectorClock clock;
  for (const auto& m : h) clock.merge(m.clock());
  clock.tick(r);
  return Message(MessageId{r, clock.get(r)}, clock, std::move(payload));
}

StObject op_to_st(std::shared_ptr<const Interpreter> interp) {
  StObject o;
  const OpObject& host = interp->object();
  o.name = "op-to-st(" + host.name + ")";
  o.initial = Value::set({});
  o.join = [](const Value& a, const Value& b) { return set_union(a, b); };
  o.update = [interp](ReplicaId r, const Operation& op, const Value& h) {
    const Value s = (*interp)(h);
    const Value payload = interp->object().prep(r, op, s);
    return set_insert(h, Value::message(mint_message(r, as_message_set(h), payload)));
  };
  o.query = [interp](const Query& q, const Value& h) { return interp->object().query(q, (*interp)(h)); };
  return o;
}

StObject op_to_st(const OpObject& host) { return op_to_st(std::make_shared<const Interpreter>(host)); }

OpObject st_to_op(const StObject& host) {
  OpObject o;
  o.name = "st-to-op(" + host.name + ")";
  o.initial = host.initial;
  o.prep = host.update;
  o.effect = [join = host.join](const Value& m, const Value& s) { return join(s, m); };
  o.query = host.query;
  return o;
}

StObject with_constant_query(StObject o, Value v) {
  o.name += "!const-query";
  o.query = [v](const Query&, const Value&) { return v; };
  return o;
}

OpObject with_constant_query(OpObject o, Value v) {
  o.name += "!const-query";
  o.query = [v](const Query&, const Value&) { return v; };
  return o;
}

}  // namespace crdt
