#include <gtest/gtest.h>

#include <set>

#include "crdt/checker.hpp"

using namespace crdt;

namespace {

const Roster kRoster = make_roster(3);
const ReplicaId r1 = kRoster.at(0), r2 = kRoster.at(1), r3 = kRoster.at(2);

VectorClock clock(std::initializer_list<std::pair<ReplicaId, std::uint32_t>> es) {
  VectorClock c;
  for (auto [r, v] : es) c.set(r, v);
  return c;
}

Message msg(ReplicaId origin, std::uint32_t seq, VectorClock c, std::int64_t payload) {
  return Message(MessageId{origin, seq}, std::move(c), Value::integer(payload));
}

Value ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Value> vs;
  for (auto x : xs) vs.push_back(Value::integer(x));
  return Value::set(vs);
}

const Message m1 = msg(r1, 1, clock({{r1, 1}}), 1);
const Message m2 = msg(r2, 1, clock({{r1, 1}, {r2, 1}}), 2);
const Message m3 = msg(r3, 1, clock({{r3, 1}}), 3);

}  // namespace

TEST(MaxSet, Examples) {
  EXPECT_TRUE(max_set({}).empty());
  EXPECT_EQ(max_set(make_message_set({m1, m2})), make_message_set({m2}));
  EXPECT_EQ(max_set(make_message_set({m1, m3})), make_message_set({m1, m3}));
}

TEST(Interp, Examples) {
  const OpObject o = gset_op();
  EXPECT_EQ(interp({}, o), o.initial);
  const Message m5 = msg(r1, 1, clock({{r1, 1}}), 5);
  const Message m42 = msg(r1, 2, clock({{r1, 2}}), 42);
  EXPECT_EQ(interp(make_message_set({m5, m42}), o), ints({5, 42}));
  EXPECT_EQ(o.query("sum", interp(make_message_set({m5, m42}), o)), Value::integer(47));
  EXPECT_EQ(o.query("sum", interp(make_message_set({m1}), o)), Value::integer(1));
}

TEST(Interp, MemoizedAgreesWithUncached) {
  auto cached = std::make_shared<const Interpreter>(gset_op());
  const MessageSet h = make_message_set({m1, m2, m3});
  EXPECT_EQ((*cached)(h), interp(h, gset_op()));
  EXPECT_EQ((*cached)(h), (*cached)(h));
  EXPECT_GE(cached->cache_size(), 1u);
}

TEST(Interp, AllLinearExtensionsAgree) {
  const auto rep = interp_all_linearizations(make_message_set({m1, m2, m3}), gset_op());
  EXPECT_EQ(rep.extensions, 3u);  // m3 anywhere around the chain m1 ≺ m2
  ASSERT_EQ(rep.results.size(), 1u);
  EXPECT_EQ(rep.results[0], ints({1, 2, 3}));
}

TEST(Interp, DetectsOrderDependentObjects) {
  OpObject reg;
  reg.name = "overwrite";
  reg.initial = Value::integer(0);
  reg.prep = [](ReplicaId, const Operation& op, const Value&) { return Value::integer(op.args.at(0)); };
  reg.effect = [](const Value& payload, const Value&) { return payload; };
  reg.query = [](const Query&, const Value& s) { return s; };
  const auto rep = interp_all_linearizations(make_message_set({m1, m3}), reg);
  EXPECT_EQ(rep.extensions, 2u);
  EXPECT_EQ(rep.results.size(), 2u);
}

TEST(OpToSt, UpdateMintsTheHostMessage) {
  const StObject g = op_to_st(gset_op());
  const Value h = g.update(r1, Operation::parse("add 5"), g.initial);
  const MessageSet ms = as_message_set(h);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].payload(), Value::integer(5));
  // Same identity the op host mints for its first update at r1.
  const OpSystem host(kRoster, gset_op(), {{Operation::parse("add 5")}, {"sum"}});
  const OpConfig c = *host.update(host.init(), r1, Operation::parse("add 5"));
  EXPECT_EQ(std::get<output::Send>(c.trace.back().output).m, ms[0]);
}

TEST(OpToSt, MergeIsUnionAndQueriesInterpret) {
  const StObject g = op_to_st(gset_op());
  const Value a = message_set_value(make_message_set({m1}));
  const Value b = message_set_value(make_message_set({m1, m2}));
  EXPECT_EQ(g.join(a, b), b);
  EXPECT_EQ(g.query("sum", g.join(a, b)), Value::integer(3));
  EXPECT_EQ(g.query("sum", a), Value::integer(1));
}

TEST(OpToSt, LatticeLawsAndInflationOnSamples) {
  const StObject g = op_to_st(gset_op());
  std::vector<Value> samples{g.initial};
  Value h = g.initial;
  for (const char* op : {"add 1", "add 2", "add 3"}) {
    h = g.update(r2, Operation::parse(op), h);
    samples.push_back(h);
    samples.push_back(g.update(r3, Operation::parse(op), g.initial));
  }
  for (const auto& a : samples) {
    EXPECT_TRUE(set_subset(a, g.update(r1, Operation::parse("add 9"), a)));
    EXPECT_EQ(g.join(a, a), a);
    for (const auto& b : samples) {
      EXPECT_EQ(g.join(a, b), g.join(b, a));  // merge' commutes
      for (const auto& c : samples) EXPECT_EQ(g.join(g.join(a, b), c), g.join(a, g.join(b, c)));
    }
  }
}

TEST(MintMessage, TicksJoinOfDeliveredClocks) {
  const Message m = mint_message(r3, make_message_set({m1, m2}), Value::integer(7));
  EXPECT_EQ(m.id(), (MessageId{r3, 1}));
  EXPECT_EQ(vc_compare(m2.clock(), m.clock()), ClockOrder::Less);
  EXPECT_EQ(m.clock().get(r1), 1u);
  EXPECT_EQ(m.clock().get(r2), 1u);
  EXPECT_EQ(m.clock().get(r3), 1u);
}

TEST(StToOp, CounterGuestExamples) {
  const StObject host = gcounter_st();
  const OpObject g = st_to_op(host);
  const Value p = g.prep(r1, Operation::parse("inc"), g.initial);
  EXPECT_EQ(p, host.update(r1, Operation::parse("inc"), host.initial));
  std::vector<Value> states{g.initial, p, host.update(r2, Operation::parse("inc"), host.initial)};
  states.push_back(host.join(states[1], states[2]));
  for (const auto& s : states) {
    EXPECT_EQ(g.effect(g.initial, s), s);  // bottom
    for (const auto& m : states)
      for (const auto& n : states) EXPECT_EQ(g.effect(m, g.effect(n, s)), g.effect(n, g.effect(m, s)));
  }
}

TEST(ConstantQuery, OverridesEveryQuery) {
  const StObject g = with_constant_query(op_to_st(gset_op()), Value::integer(0));
  const Value h = g.update(r1, Operation::parse("add 5"), g.initial);
  EXPECT_EQ(g.query("sum", h), Value::integer(0));
  const OpObject o = with_constant_query(gset_op(), Value::integer(9));
  EXPECT_EQ(o.query("sum", o.initial), Value::integer(9));
}

// Every reachable guest state with at most 6 messages interprets the same way
// along all linear extensions.
TEST(Interp, OrderIndependentOnReachableStates) {
  Limits lim;
  lim.updates_per_replica = 2;
  const StSystem sys(kRoster, op_to_st(gset_op()), {{Operation::parse("add 1"), Operation::parse("add 2")}, {"sum"}},
                     lim);
  std::set<Value> seen;
  for (const auto& n : explore(sys, 6).nodes)
    for (const auto& s : n.config.states) seen.insert(s);
  std::size_t checked = 0;
  for (const auto& s : seen) {
    const MessageSet h = as_message_set(s);
    if (h.size() > 6) continue;
    const auto rep = interp_all_linearizations(h, gset_op());
    EXPECT_EQ(rep.results.size(), 1u) << s.to_string();
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}
