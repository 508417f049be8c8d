#include "crdt/st_semantics.hpp"

#include <algorithm>
#include <stdexcept>

namespace crdt {

StSystem::StSystem(Roster roster, StObject object, Universe universe, Limits limits,
                   BroadcastMode mode)
    : roster_(std::move(roster)),
      object_(std::move(object)),
      universe_(std::move(universe)),
      limits_(std::move(limits)),
      mode_(mode) {}

StConfig StSystem::init() const {
  if (roster_.empty()) throw std::invalid_argument("state system needs at least one replica");
  StConfig c;
  const auto n = roster_.size();
  c.states.assign(n, object_.initial);
  c.clocks.assign(n, VectorClock{});
  c.seqs.assign(n, 0);
  c.updates.assign(n, 0);
  c.delivered.assign(n, Value::set({}));
  return c;
}

StConfig StSystem::broadcast(StConfig c, ReplicaId r, const Input& in) const {
  c.clocks[r.index].tick(r);
  c.seqs[r.index] += 1;
  const Message m(MessageId{r, c.seqs[r.index]}, c.clocks[r.index], c.states[r.index]);
  c.buffer = bcast(r, m, std::move(c.buffer), roster_);
  c.sent = set_insert(c.sent, m.payload());
  c.trace = c.trace.append(Event{r, in, output::Send{m}});
  return c;
}

std::optional<StConfig> StSystem::update(const StConfig& c, ReplicaId r, const Operation& op,
                                         bool respect_limits) const {
  if (respect_limits) {
    const int cap = limits_.cap(r);
    if (cap >= 0 && c.updates[r.index] >= static_cast<std::uint32_t>(cap)) return std::nullopt;
    if (limits_.unique_ops && std::binary_search(c.used_ops.begin(), c.used_ops.end(), op))
      return std::nullopt;
  }
  StConfig n = c;
  n.states[r.index] = object_.update(r, op, c.states[r.index]);
  n.updates[r.index] += 1;
  auto it = std::lower_bound(n.used_ops.begin(), n.used_ops.end(), op);
  if (it == n.used_ops.end() || !(*it == op)) n.used_ops.insert(it, op);
  if (mode_ == BroadcastMode::AtomicBroadcast) return broadcast(std::move(n), r, input::Upd{op});
  n.trace = c.trace.append(Event{r, input::Upd{op}, output::None{}});
  return n;
}

std::optional<StConfig> StSystem::send(const StConfig& c, ReplicaId r) const {
  if (mode_ == BroadcastMode::AtomicBroadcast) return std::nullopt;
  return broadcast(c, r, input::None{});
}

bool StSystem::has_delivered(const StConfig& c, ReplicaId r, const Value& state) const {
  return c.delivered[r.index].contains(state);
}

bool StSystem::can_deliver(const StConfig& c, ReplicaId r, const Value& state) const {
  return c.buffer.contains_payload(r, state) && !has_delivered(c, r, state);
}

std::optional<StConfig> StSystem::deliver(const StConfig& c, ReplicaId r, const Value& state) const {
  if (has_delivered(c, r, state)) return std::nullopt;
  const BufferEntry* entry = nullptr;
  for (const auto& e : c.buffer.entries())
    if (e.replica == r && e.message.payload() == state) entry = &e;
  if (!entry) return std::nullopt;
  const Message m = entry->message;
  StConfig n = c;
  n.states[r.index] = object_.join(c.states[r.index], state);
  n.clocks[r.index].merge(m.clock());
  n.buffer.erase(r, m);
  n.delivered[r.index] = set_insert(c.delivered[r.index], state);
  n.trace = c.trace.append(Event{r, input::Dlvr{m}, output::None{}});
  return n;
}

Value StSystem::query_value(const StConfig& c, ReplicaId r, const Query& q) const {
  return object_.query(q, c.states[r.index]);
}

StConfig StSystem::query(const StConfig& c, ReplicaId r, const Query& q) const {
  StConfig n = c;
  n.trace = c.trace.append(Event{r, input::Qry{q}, output::Ret{query_value(c, r, q)}});
  return n;
}

std::vector<Step<StConfig>> StSystem::successors(const StConfig& c) const {
  std::vector<Step<StConfig>> out;
  const auto ids = roster_.ids();
  for (auto r : ids)
    for (const auto& op : universe_.ops)
      if (auto n = update(c, r, op)) out.push_back({Label::update(r, op), std::move(*n)});
  for (auto r : ids)
    for (const auto& q : universe_.queries)
      out.push_back({Label::query_result(r, q, query_value(c, r, q)), query(c, r, q)});
  if (mode_ == BroadcastMode::SeparateSend)
    for (auto r : ids) out.push_back({Label::tau(r, SilentKind::Send), *send(c, r)});
  for (const auto& e : c.buffer.entries())
    if (auto n = deliver(c, e.replica, e.message.payload()))
      out.push_back({Label::tau(e.replica, SilentKind::Deliver), std::move(*n)});
  return out;
}

Summary StSystem::summary(const StConfig& c) const {
  std::vector<Value> buffer;
  for (const auto& e : c.buffer.entries())
    buffer.push_back(Value::tuple({Value::integer(e.replica.index), e.message.payload()}));
  std::vector<Value> counts;
  if (limits_.updates_per_replica >= 0 || !limits_.per_replica.empty())
    for (auto u : c.updates) counts.push_back(Value::integer(u));
  std::vector<Value> used;
  if (limits_.unique_ops)
    for (const auto& op : c.used_ops) used.push_back(Value::string(op.to_string()));
  return Summary{Value::tuple({Value::tuple(c.states), Value::set(std::move(buffer)),
                               Value::tuple(c.delivered), c.sent, Value::tuple(std::move(counts)),
                               Value::set(std::move(used))})};
}

}  // namespace crdt
