#include "crdt/op_semantics.hpp"

#include <algorithm>
#include <stdexcept>

namespace crdt {

namespace {

Value message_set_value(const MessageSet& ms) {
  std::vector<Value> vs;
  vs.reserve(ms.size());
  for (const auto& m : ms) vs.push_back(Value::message(m));
  return Value::set(std::move(vs));
}

}  // namespace

OpSystem::OpSystem(Roster roster, OpObject object, Universe universe, Limits limits,
                   Discipline discipline)
    : roster_(std::move(roster)),
      object_(std::move(object)),
      universe_(std::move(universe)),
      limits_(std::move(limits)),
      discipline_(discipline) {}

OpConfig OpSystem::init() const {
  if (roster_.empty()) throw std::invalid_argument("op system needs at least one replica");
  OpConfig c;
  const auto n = roster_.size();
  c.states.assign(n, object_.initial);
  c.clocks.assign(n, VectorClock{});
  c.seqs.assign(n, 0);
  c.delivered.assign(n, MessageSet{});
  return c;
}

std::optional<OpConfig> OpSystem::update(const OpConfig& c, ReplicaId r, const Operation& op,
                                         bool respect_limits) const {
  if (respect_limits) {
    const int cap = limits_.cap(r);
    if (cap >= 0 && c.seqs[r.index] >= static_cast<std::uint32_t>(cap)) return std::nullopt;
    if (limits_.unique_ops && std::binary_search(c.used_ops.begin(), c.used_ops.end(), op))
      return std::nullopt;
  }
  OpConfig n = c;
  const Value payload = object_.prep(r, op, c.states[r.index]);
  n.clocks[r.index].tick(r);
  n.seqs[r.index] += 1;
  const Message m(MessageId{r, n.seqs[r.index]}, n.clocks[r.index], payload);
  n.states[r.index] = object_.effect(payload, c.states[r.index]);
  n.buffer = bcast(r, m, std::move(n.buffer), roster_);
  n.trace = c.trace.append(Event{r, input::Upd{op}, output::Send{m}});
  insert(n.sent, m);
  insert(n.delivered[r.index], m);
  auto it = std::lower_bound(n.used_ops.begin(), n.used_ops.end(), op);
  if (it == n.used_ops.end() || !(*it == op)) n.used_ops.insert(it, op);
  return n;
}

bool OpSystem::can_deliver(const OpConfig& c, ReplicaId r, const Message& m) const {
  if (!c.buffer.contains(r, m)) return false;
  if (discipline_ == Discipline::Causal) return enabled_in(m, c.sent, c.delivered[r.index]);
  return !contains(c.delivered[r.index], m);
}

std::optional<OpConfig> OpSystem::deliver(const OpConfig& c, ReplicaId r, const Message& m) const {
  if (!can_deliver(c, r, m)) return std::nullopt;
  OpConfig n = c;
  n.states[r.index] = object_.effect(m.payload(), c.states[r.index]);
  n.clocks[r.index].merge(m.clock());
  n.buffer.erase(r, m);
  insert(n.delivered[r.index], m);
  n.trace = c.trace.append(Event{r, input::Dlvr{m}, output::None{}});
  return n;
}

Value OpSystem::query_value(const OpConfig& c, ReplicaId r, const Query& q) const {
  return object_.query(q, c.states[r.index]);
}

OpConfig OpSystem::query(const OpConfig& c, ReplicaId r, const Query& q) const {
  OpConfig n = c;
  n.trace = c.trace.append(Event{r, input::Qry{q}, output::Ret{query_value(c, r, q)}});
  return n;
}

std::vector<Step<OpConfig>> OpSystem::successors(const OpConfig& c) const {
  std::vector<Step<OpConfig>> out;
  const auto ids = roster_.ids();
  for (auto r : ids)
    for (const auto& op : universe_.ops)
      if (auto n = update(c, r, op)) out.push_back({Label::update(r, op), std::move(*n)});
  for (auto r : ids)
    for (const auto& q : universe_.queries)
      out.push_back({Label::query_result(r, q, query_value(c, r, q)), query(c, r, q)});
  for (const auto& e : c.buffer.entries())
    if (auto n = deliver(c, e.replica, e.message))
      out.push_back({Label::tau(e.replica, SilentKind::Deliver), std::move(*n)});
  return out;
}

Summary OpSystem::summary(const OpConfig& c) const {
  std::vector<Value> delivered;
  for (const auto& d : c.delivered) delivered.push_back(message_set_value(d));
  std::vector<Value> buffer;
  for (const auto& e : c.buffer.entries())
    buffer.push_back(Value::tuple({Value::integer(e.replica.index), Value::message(e.message)}));
  std::vector<Value> used;
  if (limits_.unique_ops)
    for (const auto& op : c.used_ops) used.push_back(Value::string(op.to_string()));
  return Summary{Value::tuple({Value::tuple(c.states), Value::set(std::move(buffer)),
                               Value::tuple(std::move(delivered)), message_set_value(c.sent),
                               Value::set(std::move(used))})};
}

std::optional<CommutationViolation> check_concurrent_commutation(const OpObject& o, const OpConfig& c) {
  for (std::size_t ri = 0; ri < c.states.size(); ++ri) {
    const ReplicaId r{static_cast<std::uint16_t>(ri)};
    const auto pending = c.buffer.for_replica(r);
    const Value& s = c.states[ri];
    for (std::size_t i = 0; i < pending.size(); ++i)
      for (std::size_t j = i + 1; j < pending.size(); ++j) {
        const auto& a = pending[i];
        const auto& b = pending[j];
        if (!concurrent(a, b)) continue;
        const Value ab = o.effect(b.payload(), o.effect(a.payload(), s));
        const Value ba = o.effect(a.payload(), o.effect(b.payload(), s));
        if (!(ab == ba)) return CommutationViolation{0, r, a, b};
      }
  }
  return std::nullopt;
}

std::optional<CommutationViolation> check_concurrent_commutation(const OpObject& o,
                                                                 const std::vector<OpConfig>& cfgs) {
  for (std::size_t i = 0; i < cfgs.size(); ++i)
    if (auto v = check_concurrent_commutation(o, cfgs[i])) {
      v->config_index = i;
      return v;
    }
  return std::nullopt;
}

}  // namespace crdt
