#include <gtest/gtest.h>

#include <map>
#include <set>

#include "crdt/checker.hpp"

using namespace crdt;

namespace {

const Roster kRoster = make_roster(3);
const ReplicaId r1 = kRoster.at(0), r2 = kRoster.at(1), r3 = kRoster.at(2);

Value ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Value> vs;
  for (auto x : xs) vs.push_back(Value::integer(x));
  return Value::set(vs);
}

Universe adds_5_42() { return {{Operation::parse("add 5"), Operation::parse("add 42")}, {"sum"}}; }
Universe adds_1_2() { return {{Operation::parse("add 1"), Operation::parse("add 2")}, {"sum"}}; }

const Message& sent_message(const OpConfig& c) { return std::get<output::Send>(c.trace.back().output).m; }

// Relay prefix: r1 adds 1, r2 receives it and adds 2; r3 has received nothing.
OpConfig relayed_prefix(const OpSystem& sys, Message* m1, Message* m2) {
  OpConfig c = *sys.update(sys.init(), r1, Operation::parse("add 1"));
  *m1 = sent_message(c);
  c = *sys.deliver(c, r2, *m1);
  c = *sys.update(c, r2, Operation::parse("add 2"));
  *m2 = sent_message(c);
  return c;
}

bool has_delivery(const OpSystem& sys, const OpConfig& c, ReplicaId r, const Message& m) {
  for (const auto& s : sys.successors(c))
    if (s.label.is_tau() && s.label.replica == r && std::get<input::Dlvr>(s.target.trace.back().input).m == m)
      return true;
  return false;
}

}  // namespace

TEST(OpSystem, InitHasInitialStatesAndEmptyBuffer) {
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42());
  const OpConfig c = sys.init();
  EXPECT_EQ(c.states, (std::vector<Value>{ints({}), ints({})}));
  EXPECT_TRUE(c.buffer.entries().empty());
  EXPECT_EQ(c.trace.size(), 0u);
  EXPECT_THROW(OpSystem(Roster{}, gset_op(), adds_5_42()).init(), std::invalid_argument);
}

TEST(OpSystem, UpdateAppliesLocallyAndBroadcasts) {
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42());
  const OpConfig c = *sys.update(sys.init(), r1, Operation::parse("add 5"));
  EXPECT_EQ(c.states[0], ints({5}));
  const Message& m = sent_message(c);
  EXPECT_EQ(m.payload(), Value::integer(5));
  EXPECT_EQ(m.id(), (MessageId{r1, 1}));
  EXPECT_TRUE(c.buffer.contains(r2, m));
  EXPECT_FALSE(c.buffer.contains(r1, m));  // own effect already applied
}

TEST(OpSystem, DeliveryAppliesEffect) {
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42());
  OpConfig c = *sys.update(sys.init(), r1, Operation::parse("add 5"));
  const Message m5 = sent_message(c);
  c = *sys.update(c, r1, Operation::parse("add 42"));
  const Message m42 = sent_message(c);
  c = *sys.deliver(c, r2, m5);
  EXPECT_EQ(c.states[1], ints({5}));
  EXPECT_FALSE(sys.deliver(c, r2, m5).has_value());  // no longer buffered
  c = *sys.deliver(c, r2, m42);
  EXPECT_EQ(c.states[1], ints({5, 42}));
  EXPECT_EQ(sys.query_value(c, r2, "sum"), Value::integer(47));
}

TEST(OpSystem, CausalDisciplineBlocksOutOfOrderDelivery) {
  const OpSystem sys(kRoster, gset_op(), adds_1_2(), {}, Discipline::Causal);
  Message m1 = sent_message(*sys.update(sys.init(), r1, Operation::parse("add 1"))), m2 = m1;
  const OpConfig c = relayed_prefix(sys, &m1, &m2);
  EXPECT_TRUE(happens_before(m1, m2));
  EXPECT_FALSE(has_delivery(sys, c, r3, m2));
  EXPECT_TRUE(has_delivery(sys, c, r3, m1));
  EXPECT_FALSE(sys.can_deliver(c, r3, m2));
}

TEST(OpSystem, ReliableOnlyAllowsOutOfOrderDelivery) {
  const OpSystem sys(kRoster, gset_op(), adds_1_2(), {}, Discipline::ReliableOnly);
  Message m1 = sent_message(*sys.update(sys.init(), r1, Operation::parse("add 1"))), m2 = m1;
  const OpConfig c = relayed_prefix(sys, &m1, &m2);
  EXPECT_TRUE(has_delivery(sys, c, r3, m2));
  const OpConfig bad = *sys.deliver(c, r3, m2);
  EXPECT_EQ(sys.query_value(bad, r3, "sum"), Value::integer(2));
  EXPECT_TRUE(satisfies_causal_delivery(bad.trace));  // no inverted pair yet
  EXPECT_FALSE(satisfies_causal_delivery(sys.deliver(bad, r3, m1)->trace));
}

TEST(OpSystem, QueryIsAStutteringStep) {
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42());
  const OpConfig c = *sys.update(sys.init(), r1, Operation::parse("add 5"));
  const OpConfig q = sys.query(c, r1, "sum");
  EXPECT_EQ(q.states, c.states);
  EXPECT_EQ(q.trace.size(), c.trace.size() + 1);
  EXPECT_EQ(std::get<output::Ret>(q.trace.back().output).v, Value::integer(5));
  EXPECT_EQ(sys.summary(q), sys.summary(c));
}

TEST(OpSystem, LimitsCapUpdates) {
  Limits lim;
  lim.per_replica = {2, 0};
  lim.unique_ops = true;
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42(), lim);
  EXPECT_FALSE(sys.update(sys.init(), r2, Operation::parse("add 5")).has_value());
  OpConfig c = *sys.update(sys.init(), r1, Operation::parse("add 5"));
  EXPECT_FALSE(sys.update(c, r1, Operation::parse("add 5")).has_value());  // unique
  c = *sys.update(c, r1, Operation::parse("add 42"));
  for (const auto& s : sys.successors(c)) EXPECT_NE(s.label.kind, LabelKind::Update);
  // Client-driven updates bypass the scenario script.
  EXPECT_TRUE(sys.update(c, r2, Operation::parse("add 5"), false).has_value());
}

TEST(OpSystem, SuccessorOrderIsUpdatesQueriesDeliveries) {
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42());
  const OpConfig c = *sys.update(sys.init(), r1, Operation::parse("add 5"));
  const auto steps = sys.successors(c);
  int phase = 0;
  for (const auto& s : steps) {
    const int p = s.label.kind == LabelKind::Update ? 0 : s.label.kind == LabelKind::Query ? 1 : 2;
    EXPECT_GE(p, phase);
    phase = p;
  }
  EXPECT_EQ(steps.size(), 4u + 2u + 1u);
}

TEST(Explore, DepthZeroIsInitOnly) {
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42());
  const auto g = explore(sys, 0);
  EXPECT_EQ(g.nodes.size(), 1u);
  EXPECT_TRUE(g.edges.empty());
}

TEST(Explore, DepthOneEdgesMatchSuccessors) {
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42());
  CheckOptions o;
  o.prune = false;
  const auto g = explore(sys, 1, o);
  EXPECT_EQ(g.edges.size(), sys.successors(sys.init()).size());
}

TEST(Explore, ContainsSingleReplicaGrowthPrefix) {
  Limits lim;
  lim.per_replica = {2, 0};
  lim.unique_ops = true;
  const OpSystem sys(make_roster(2), gset_op(), adds_5_42(), lim);
  const auto g = explore(sys, 2);
  bool five = false, both = false;
  for (const auto& n : g.nodes) {
    five |= n.config.states[0] == ints({5});
    both |= n.config.states[0] == ints({5, 42});
  }
  EXPECT_TRUE(five);
  EXPECT_TRUE(both);
}

TEST(Explore, DeterministicAcrossRunsAndWorkers) {
  Limits lim;
  lim.updates_per_replica = 1;
  const OpSystem sys(kRoster, gset_op(), adds_1_2(), lim);
  CheckOptions a, b;
  b.workers = 3;
  const auto g1 = explore(sys, 5, a), g2 = explore(sys, 5, b);
  ASSERT_EQ(g1.nodes.size(), g2.nodes.size());
  ASSERT_EQ(g1.edges.size(), g2.edges.size());
  for (std::size_t i = 0; i < g1.nodes.size(); ++i)
    EXPECT_EQ(g1.nodes[i].config.trace.events(), g2.nodes[i].config.trace.events());
}

// The pruning summary determines behavior: configurations with equal
// summaries have the same labelled successors up to summary.
TEST(Summary, DeterminesSuccessors) {
  Limits lim;
  lim.updates_per_replica = 1;
  const OpSystem sys(kRoster, gset_op(), adds_1_2(), lim);
  CheckOptions o;
  o.prune = false;
  const auto g = explore(sys, 5, o);
  std::map<std::string, std::multiset<std::string>> behavior;
  std::size_t repeats = 0;
  for (const auto& n : g.nodes) {
    std::multiset<std::string> succ;
    for (const auto& s : sys.successors(n.config))
      succ.insert(s.label.to_string(kRoster) + "|" + encode(sys.summary(s.target).value));
    auto [it, fresh] = behavior.emplace(encode(sys.summary(n.config).value), succ);
    if (!fresh) {
      ++repeats;
      EXPECT_EQ(it->second, succ);
    }
  }
  EXPECT_GT(repeats, 0u);
}

TEST(Summary, PruningPreservesReachableSummaries) {
  Limits lim;
  lim.updates_per_replica = 1;
  const OpSystem sys(kRoster, gset_op(), adds_1_2(), lim);
  CheckOptions pruned, full;
  full.prune = false;
  std::set<std::string> a, b;
  for (const auto& n : explore(sys, 5, pruned).nodes) a.insert(encode(sys.summary(n.config).value));
  for (const auto& n : explore(sys, 5, full).nodes) b.insert(encode(sys.summary(n.config).value));
  EXPECT_EQ(a, b);
}

// Vector-clock order coincides with happens-before computed from the trace.
TEST(VectorClock, CharacterizesHappensBeforeOnExploredTraces) {
  Limits lim;
  lim.updates_per_replica = 2;
  const OpSystem sys(kRoster, gset_op(), adds_1_2(), lim);
  const auto g = explore(sys, 6);
  std::size_t pairs = 0;
  for (const auto& n : g.nodes) {
    std::vector<std::set<MessageId>> known(kRoster.size());
    std::map<MessageId, std::set<MessageId>> before;
    std::vector<Message> msgs;
    for (const auto& e : n.config.trace.events()) {
      auto& k = known[e.replica.index];
      if (auto* s = std::get_if<output::Send>(&e.output)) {
        before[s->m.id()] = k;
        k.insert(s->m.id());
        msgs.push_back(s->m);
      } else if (auto* d = std::get_if<input::Dlvr>(&e.input)) {
        k.insert(d->m.id());
        k.insert(before[d->m.id()].begin(), before[d->m.id()].end());
      }
    }
    for (const auto& a : msgs)
      for (const auto& b : msgs) {
        const bool hb = before[b.id()].count(a.id()) > 0;
        EXPECT_EQ(hb, vc_compare(a.clock(), b.clock()) == ClockOrder::Less);
        ++pairs;
      }
  }
  EXPECT_GT(pairs, 1000u);
}
