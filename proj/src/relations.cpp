#include "crdt/relations.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace crdt {

PairedSystem make_op_to_st(const Roster& roster, const OpObject& host, const Universe& u,
                           const PairOptions& opts) {
  auto interp = std::make_shared<const Interpreter>(host);
  StObject guest = op_to_st(interp);
  if (opts.constant_query_guest) guest = with_constant_query(guest, Value::integer(0));
  return PairedSystem{Direction::OpToSt, OpSystem(roster, host, u, opts.limits, opts.discipline),
                      StSystem(roster, guest, u, opts.limits, opts.mode), interp};
}

PairedSystem make_st_to_op(const Roster& roster, const StObject& host, const Universe& u,
                           const PairOptions& opts) {
  OpObject guest = st_to_op(host);
  if (opts.constant_query_guest) guest = with_constant_query(guest, Value::integer(0));
  return PairedSystem{Direction::StToOp, OpSystem(roster, guest, u, opts.limits, opts.discipline),
                      StSystem(roster, host, u, opts.limits, opts.mode), nullptr};
}

std::optional<std::vector<Message>> deliverable_check(const MessageSet& u, ReplicaId r,
                                                      const EventTrace& t, const Buffer& b) {
  const MessageSet all_sent = sent(t);
  MessageSet done = delivered(r, t);
  std::vector<Message> order;
  MessageSet rest = u;
  while (!rest.empty()) {
    // Smallest (origin, seq) among members with no undelivered predecessor in u.
    auto it = std::find_if(rest.begin(), rest.end(), [&](const Message& m) {
      return std::none_of(rest.begin(), rest.end(), [&](const Message& x) { return happens_before(x, m); });
    });
    const Message m = *it;
    if (!b.contains(r, m) || !enabled_in(m, all_sent, done)) return std::nullopt;
    order.push_back(m);
    insert(done, m);
    rest.erase(it);
  }
  return order;
}

std::optional<std::vector<Message>> deliverable_check(const MessageSet& u, ReplicaId r,
                                                      const OpConfig& c) {
  MessageSet done = c.delivered[r.index];
  std::vector<Message> order;
  MessageSet rest = u;
  while (!rest.empty()) {
    auto it = std::find_if(rest.begin(), rest.end(), [&](const Message& m) {
      return std::none_of(rest.begin(), rest.end(), [&](const Message& x) { return happens_before(x, m); });
    });
    const Message m = *it;
    if (!c.buffer.contains(r, m) || !enabled_in(m, c.sent, done)) return std::nullopt;
    order.push_back(m);
    insert(done, m);
    rest.erase(it);
  }
  return order;
}

bool mergeable_check(const std::vector<Value>& states, ReplicaId r, const Buffer& b) {
  return std::all_of(states.begin(), states.end(),
                     [&](const Value& s) { return b.contains_payload(r, s); });
}

std::optional<std::vector<Message>> find_mergeable(const StObject& o, const OpConfig& op,
                                                   ReplicaId r, const Value& target) {
  const Value& mine = op.states[r.index];
  std::vector<Message> below;
  for (const auto& m : op.buffer.for_replica(r))
    if (leq(o, m.payload(), target)) below.push_back(m);
  Value all = mine;
  for (const auto& m : below) all = o.join(all, m.payload());
  if (!(all == target)) return std::nullopt;
  // Every workable C is contained in `below`; search it smallest-first.
  const std::size_t n = below.size();
  if (n > 16) return below;
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
    do {
      Value acc = mine;
      std::vector<Message> chosen;
      for (std::size_t i = 0; i < n; ++i)
        if (pick[i]) {
          acc = o.join(acc, below[i].payload());
          chosen.push_back(below[i]);
        }
      if (acc == target) return chosen;
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return below;
}

namespace {

RelationCheck fail(std::string clause, std::string detail) {
  return RelationCheck{false, std::move(clause), std::move(detail)};
}

void require_direction(const PairedSystem& sys, RelationId rel) {
  const bool op_to_st = rel == RelationId::R1 || rel == RelationId::R2 || rel == RelationId::Bowtie;
  if (op_to_st != (sys.direction == Direction::OpToSt))
    throw std::invalid_argument("relation " + to_string(rel) + " does not match the emulation direction");
}

MessageSet union_of_states(const std::vector<Value>& states) {
  MessageSet out;
  for (const auto& h : states) out = message_set_union(out, as_message_set(h));
  return out;
}

MessageSet union_of_sent(const StConfig& st) { return union_of_states(st.sent.items()); }

// Clauses shared by R1, R2 and ⋈: per-replica delivered sets and interpreted states agree.
RelationCheck local_agreement(const PairedSystem& sys, const OpConfig& op, const StConfig& st) {
  const auto& roster = sys.roster();
  for (auto r : roster.ids()) {
    if (!(op.delivered[r.index] == as_message_set(st.states[r.index])))
      return fail("delivered", "Delivered(" + roster.name(r) + ") differs from the state-side message set");
    const Value s = (*sys.interp)(st.states[r.index]);
    if (!(op.states[r.index] == s))
      return fail("state", "op state " + op.states[r.index].to_string() + " at " + roster.name(r) +
                               " differs from interp " + s.to_string());
  }
  return {};
}

RelationCheck pending_downsets_buffered(const PairedSystem& sys, const OpConfig& op, const StConfig& st) {
  for (const auto& e : op.buffer.entries()) {
    const Value h = message_set_value(downset_in(e.message, op.sent));
    if (!st.buffer.contains_payload(e.replica, h))
      return fail("buffer", "pending " + e.message.payload().to_string() + " for " +
                                sys.roster().name(e.replica) + " has no buffered downset " + h.to_string());
  }
  return {};
}

RelationCheck check_r1(const PairedSystem& sys, const OpConfig& op, const StConfig& st) {
  if (!(op.sent == union_of_sent(st))) return fail("sent", "op sent set differs from union of sent states");
  if (auto c = local_agreement(sys, op, st); !c) return c;
  return pending_downsets_buffered(sys, op, st);
}

RelationCheck check_r2(const PairedSystem& sys, const OpConfig& op, const StConfig& st, bool literal) {
  if (literal) {
    if (!(op.sent == union_of_sent(st))) return fail("sent", "op sent set differs from union of sent states");
  } else if (!(op.sent == union_of_states(st.states))) {
    return fail("sent", "op sent set differs from union of replica states");
  }
  if (auto c = local_agreement(sys, op, st); !c) return c;
  for (const auto& e : st.buffer.entries()) {
    const MessageSet h = as_message_set(e.message.payload());
    const ReplicaId r = e.replica;
    if (!literal) {
      MessageSet u;
      const MessageSet mine = as_message_set(st.states[r.index]);
      std::set_difference(h.begin(), h.end(), mine.begin(), mine.end(), std::back_inserter(u));
      if (!deliverable_check(u, r, op))
        return fail("buffer", "unmerged part of buffered state for " + sys.roster().name(r) +
                                  " is not deliverable");
      continue;
    }
    // ∃U ⊆ pending(r) deliverable with H = U↓, smallest-first.
    const auto pending = op.buffer.for_replica(r);
    const std::size_t n = pending.size();
    bool found = false;
    for (std::size_t k = 0; k <= n && !found; ++k) {
      std::vector<bool> pick(n, false);
      std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
      do {
        MessageSet u, down;
        for (std::size_t i = 0; i < n; ++i)
          if (pick[i]) {
            insert(u, pending[i]);
            down = message_set_union(down, downset_in(pending[i], op.sent));
          }
        if (down == h && deliverable_check(u, r, op)) {
          found = true;
          break;
        }
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    if (!found)
      return fail("buffer", "buffered state for " + sys.roster().name(r) + " is not the downset of a deliverable set");
  }
  return {};
}

RelationCheck check_bowtie(const PairedSystem& sys, const OpConfig& op, const StConfig& st, bool literal) {
  if (auto c = check_r1(sys, op, st); !c) return c;
  for (const auto& e : st.buffer.entries()) {
    const Value& h = e.message.payload();
    if (!literal && set_subset(h, st.states[e.replica.index])) continue;
    bool found = false;
    for (const auto& m : op.buffer.for_replica(e.replica))
      if (message_set_value(downset_in(m, op.sent)) == h) {
        found = true;
        break;
      }
    if (!found)
      return fail("buffer", "buffered state " + h.to_string() + " for " + sys.roster().name(e.replica) +
                                " is not the downset of a pending message");
  }
  return {};
}

RelationCheck states_equal(const PairedSystem& sys, const OpConfig& op, const StConfig& st) {
  for (auto r : sys.roster().ids())
    if (!(op.states[r.index] == st.states[r.index]))
      return fail("state", "states differ at " + sys.roster().name(r) + ": op " + op.states[r.index].to_string() +
                               " vs st " + st.states[r.index].to_string());
  return {};
}

RelationCheck check_q1(const PairedSystem& sys, const OpConfig& op, const StConfig& st) {
  if (auto c = states_equal(sys, op, st); !c) return c;
  const auto& o = sys.st.object();
  for (const auto& e : st.buffer.entries()) {
    const ReplicaId r = e.replica;
    const Value target = o.join(st.states[r.index], e.message.payload());
    if (!find_mergeable(o, op, r, target))
      return fail("buffer", "no mergeable set at " + sys.roster().name(r) + " reaches " + target.to_string());
  }
  return {};
}

std::set<std::pair<std::uint16_t, Value>> op_buffer_payloads(const OpConfig& op, bool live_only) {
  std::vector<Value> received(op.states.size(), Value::set({}));
  if (live_only)
    for (std::size_t i = 0; i < op.delivered.size(); ++i) {
      std::vector<Value> ps;
      for (const auto& m : op.delivered[i])
        if (m.id().origin.index != i) ps.push_back(m.payload());
      received[i] = Value::set(std::move(ps));
    }
  std::set<std::pair<std::uint16_t, Value>> out;
  for (const auto& e : op.buffer.entries())
    if (!live_only || !received[e.replica.index].contains(e.message.payload()))
      out.emplace(e.replica.index, e.message.payload());
  return out;
}

std::set<std::pair<std::uint16_t, Value>> st_buffer_payloads(const StConfig& st, bool live_only) {
  std::set<std::pair<std::uint16_t, Value>> out;
  for (const auto& e : st.buffer.entries())
    if (!live_only || !st.delivered[e.replica.index].contains(e.message.payload()))
      out.emplace(e.replica.index, e.message.payload());
  return out;
}

RelationCheck check_q2(const PairedSystem& sys, const OpConfig& op, const StConfig& st, bool literal) {
  if (auto c = states_equal(sys, op, st); !c) return c;
  if (op_buffer_payloads(op, !literal) != st_buffer_payloads(st, !literal))
    return fail("buffer", literal ? "buffers differ" : "live buffers differ");
  return {};
}

RelationCheck dispatch(const PairedSystem& sys, RelationId rel, const OpConfig& op, const StConfig& st,
                       bool literal) {
  require_direction(sys, rel);
  switch (rel) {
    case RelationId::R1:
      return check_r1(sys, op, st);
    case RelationId::R2:
      return check_r2(sys, op, st, literal);
    case RelationId::Bowtie:
      return check_bowtie(sys, op, st, literal);
    case RelationId::Q1:
      return check_q1(sys, op, st);
    case RelationId::Q2:
      return check_q2(sys, op, st, literal);
  }
  return {};
}

}  // namespace

RelationCheck in_relation(const PairedSystem& sys, RelationId rel, const OpConfig& op, const StConfig& st) {
  return dispatch(sys, rel, op, st, false);
}

RelationCheck relation_literal(const PairedSystem& sys, RelationId rel, const OpConfig& op,
                               const StConfig& st) {
  return dispatch(sys, rel, op, st, true);
}

std::string to_string(RelationId rel) {
  switch (rel) {
    case RelationId::R1:
      return "R1";
    case RelationId::R2:
      return "R2";
    case RelationId::Q1:
      return "Q1";
    case RelationId::Q2:
      return "Q2";
    case RelationId::Bowtie:
      return "bowtie";
  }
  return "?";
}

RelationId relation_from_string(const std::string& s) {
  if (s == "R1") return RelationId::R1;
  if (s == "R2") return RelationId::R2;
  if (s == "Q1") return RelationId::Q1;
  if (s == "Q2") return RelationId::Q2;
  if (s == "bowtie" || s == "Bowtie") return RelationId::Bowtie;
  throw std::invalid_argument("unknown relation: " + s);
}

}  // namespace crdt
