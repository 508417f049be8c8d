#include <gtest/gtest.h>

#include "crdt/checker.hpp"

using namespace crdt;

namespace {

const Roster kRoster2 = make_roster(2);
const Roster kRoster3 = make_roster(3);
const ReplicaId r1 = kRoster3.at(0), r2 = kRoster3.at(1), r3 = kRoster3.at(2);

Operation op(const char* s) { return Operation::parse(s); }

Universe adds_5_42() { return {{op("add 5"), op("add 42")}, {"sum"}}; }
Universe small_universe() { return {{op("add 1"), op("add 2"), op("add 3")}, {"sum"}}; }

const Message& sent_message(const OpConfig& c) { return std::get<output::Send>(c.trace.back().output).m; }

}  // namespace

TEST(Relations, InitialConfigurationsAreRelated) {
  const PairedSystem ots = make_op_to_st(kRoster2, gset_op(), adds_5_42());
  for (auto rel : {RelationId::R1, RelationId::R2, RelationId::Bowtie})
    EXPECT_TRUE(in_relation(ots, rel, ots.op.init(), ots.st.init())) << to_string(rel);
  const PairedSystem sto = make_st_to_op(kRoster2, gset_st(), adds_5_42());
  for (auto rel : {RelationId::Q1, RelationId::Q2})
    EXPECT_TRUE(in_relation(sto, rel, sto.op.init(), sto.st.init())) << to_string(rel);
}

TEST(Relations, RejectsMismatchedDirection) {
  const PairedSystem sto = make_st_to_op(kRoster2, gset_st(), adds_5_42());
  EXPECT_THROW(in_relation(sto, RelationId::R1, sto.op.init(), sto.st.init()), std::invalid_argument);
  const PairedSystem ots = make_op_to_st(kRoster2, gset_op(), adds_5_42());
  EXPECT_THROW(in_relation(ots, RelationId::Q2, ots.op.init(), ots.st.init()), std::invalid_argument);
  EXPECT_THROW(check_weak_simulation(ots, RelationId::R1, Which::GuestByHost), std::invalid_argument);
  EXPECT_THROW(check_weak_simulation(ots, RelationId::R2, Which::HostByGuest), std::invalid_argument);
}

TEST(Relations, NamesRoundTrip) {
  for (auto rel : {RelationId::R1, RelationId::R2, RelationId::Q1, RelationId::Q2, RelationId::Bowtie})
    EXPECT_EQ(relation_from_string(to_string(rel)), rel);
  EXPECT_THROW(relation_from_string("R7"), std::invalid_argument);
}

// Op side: r1 adds 5 and 42, r2 receives only 5. St side: r1 updates twice and
// sends its whole state once.
TEST(Relations, DivergentGranularityViolatesR1) {
  const PairedSystem sys = make_op_to_st(kRoster2, gset_op(), adds_5_42());
  OpConfig x = *sys.op.update(sys.op.init(), r1, op("add 5"));
  const Message m5 = sent_message(x);
  x = *sys.op.update(x, r1, op("add 42"));
  x = *sys.op.deliver(x, r2, m5);
  StConfig y = *sys.st.update(sys.st.init(), r1, op("add 5"));
  y = *sys.st.update(y, r1, op("add 42"));
  y = *sys.st.send(y, r1);
  const auto rc = in_relation(sys, RelationId::R1, x, y);
  EXPECT_FALSE(rc.holds);
  EXPECT_FALSE(rc.clause.empty());
  // No st configuration reachable by silent steps repairs it: the only delivery is the merged state.
  for (const auto& c : weak_successors(sys.st, y, Label::tau(r2, SilentKind::Deliver), 4))
    EXPECT_FALSE(in_relation(sys, RelationId::R1, x, c).holds);
}

TEST(Relations, MatchedUpdateThenDeliveryStaysInR1) {
  const PairedSystem sys = make_op_to_st(kRoster2, gset_op(), adds_5_42());
  OpConfig x = *sys.op.update(sys.op.init(), r1, op("add 5"));
  StConfig y = *sys.st.send(*sys.st.update(sys.st.init(), r1, op("add 5")), r1);
  EXPECT_TRUE(in_relation(sys, RelationId::R1, x, y));
  x = *sys.op.deliver(x, r2, sent_message(x));
  y = *sys.st.deliver(y, r2, y.states[0]);
  EXPECT_TRUE(in_relation(sys, RelationId::R1, x, y));
}

// Literal Sent clause compares op messages with st sends; right after the first
// update only the op side has sent.
TEST(LiteralRelations, R2SentClauseFailsAfterFirstUpdate) {
  const PairedSystem sys = make_op_to_st(kRoster2, gset_op(), adds_5_42());
  const OpConfig x = *sys.op.update(sys.op.init(), r1, op("add 5"));
  const StConfig y = *sys.st.update(sys.st.init(), r1, op("add 5"));
  const auto lit = relation_literal(sys, RelationId::R2, x, y);
  EXPECT_FALSE(lit.holds);
  EXPECT_EQ(lit.clause, "sent");
  EXPECT_TRUE(in_relation(sys, RelationId::R2, x, y));
}

// r1 adds 1 while r2 adds 3 concurrently; r1 merges r2's state and sends
// {m1, m3} to r2, which already has m3.
TEST(LiteralRelations, R2BufferClauseFailsOnMixedState) {
  const PairedSystem sys = make_op_to_st(kRoster2, gset_op(), small_universe());
  OpConfig x = *sys.op.update(sys.op.init(), r1, op("add 1"));
  x = *sys.op.update(x, r2, op("add 3"));
  const Message m3 = sent_message(x);
  x = *sys.op.deliver(x, r1, m3);
  StConfig y = *sys.st.update(sys.st.init(), r1, op("add 1"));
  y = *sys.st.update(y, r2, op("add 3"));
  y = *sys.st.send(y, r2);
  y = *sys.st.deliver(y, r1, y.states[1]);
  y = *sys.st.send(y, r1);
  EXPECT_EQ(y.trace.size(), 5u);
  const auto lit = relation_literal(sys, RelationId::R2, x, y);
  EXPECT_FALSE(lit.holds);
  EXPECT_EQ(lit.clause, "buffer");
  EXPECT_TRUE(in_relation(sys, RelationId::R2, x, y));
}

// With atomic broadcast r2 merges {m1, m2} directly; the earlier entry {m1}
// stays buffered though no op message is pending for it.
TEST(LiteralRelations, BowtieIffFailsOnStaleBufferedState) {
  PairOptions po;
  po.mode = BroadcastMode::AtomicBroadcast;
  const PairedSystem sys = make_op_to_st(kRoster2, gset_op(), small_universe(), po);
  OpConfig x = *sys.op.update(sys.op.init(), r1, op("add 1"));
  const Message m1 = sent_message(x);
  x = *sys.op.update(x, r1, op("add 2"));
  const Message m2 = sent_message(x);
  StConfig y = *sys.st.update(sys.st.init(), r1, op("add 1"));
  y = *sys.st.update(y, r1, op("add 2"));
  EXPECT_TRUE(in_relation(sys, RelationId::Bowtie, x, y));
  EXPECT_TRUE(relation_literal(sys, RelationId::Bowtie, x, y));
  x = *sys.op.deliver(*sys.op.deliver(x, r2, m1), r2, m2);
  y = *sys.st.deliver(y, r2, y.states[0]);
  EXPECT_EQ(y.buffer.for_replica(r2).size(), 1u);
  EXPECT_FALSE(relation_literal(sys, RelationId::Bowtie, x, y).holds);
  EXPECT_TRUE(in_relation(sys, RelationId::Bowtie, x, y));
}

// Two replicas both add 5; r3 receives one of the two identical states.
TEST(LiteralRelations, Q2BufferEqualityFailsOnDuplicatePayloads) {
  const PairedSystem sys = make_st_to_op(kRoster3, gset_st(), adds_5_42());
  OpConfig x = *sys.op.update(sys.op.init(), r1, op("add 5"));
  const Message from_r1 = sent_message(x);
  x = *sys.op.update(x, r2, op("add 5"));
  x = *sys.op.deliver(x, r3, from_r1);
  StConfig y = *sys.st.send(*sys.st.update(sys.st.init(), r1, op("add 5")), r1);
  y = *sys.st.send(*sys.st.update(y, r2, op("add 5")), r2);
  y = *sys.st.deliver(y, r3, y.states[0]);
  EXPECT_EQ(x.states, y.states);
  const auto lit = relation_literal(sys, RelationId::Q2, x, y);
  EXPECT_FALSE(lit.holds);
  EXPECT_EQ(lit.clause, "buffer");
  EXPECT_TRUE(in_relation(sys, RelationId::Q2, x, y));
}

TEST(DeliverableCheck, Examples) {
  const OpSystem sys(kRoster3, gset_op(), small_universe());
  OpConfig c = *sys.update(sys.init(), r1, op("add 1"));
  const Message m1 = sent_message(c);
  c = *sys.deliver(c, r2, m1);
  c = *sys.update(c, r2, op("add 2"));
  const Message m2 = sent_message(c);
  c = *sys.update(c, r1, op("add 3"));
  const Message m3 = sent_message(c);

  auto empty = deliverable_check({}, r3, c);
  ASSERT_TRUE(empty.has_value());
  EXPECT_TRUE(empty->empty());

  // Downset of m2 with every predecessor buffered: topological order.
  auto order = deliverable_check(make_message_set({m1, m2}), r3, c);
  ASSERT_TRUE(order.has_value());
  EXPECT_EQ(*order, (std::vector<Message>{m1, m2}));
  auto three = deliverable_check(make_message_set({m1, m2, m3}), r3, c);
  ASSERT_TRUE(three.has_value());
  for (std::size_t i = 0; i < three->size(); ++i)
    for (std::size_t j = i + 1; j < three->size(); ++j) EXPECT_FALSE(happens_before((*three)[j], (*three)[i]));

  // m2 alone: its undelivered predecessor m1 is outside U.
  EXPECT_FALSE(deliverable_check(make_message_set({m2}), r3, c).has_value());
}

TEST(MergeableCheck, Examples) {
  const StSystem sys(kRoster2, gset_st(), small_universe());
  StConfig y = *sys.send(*sys.update(sys.init(), r1, op("add 1")), r1);
  EXPECT_TRUE(mergeable_check({}, r2, y.buffer));
  EXPECT_TRUE(mergeable_check({y.states[0]}, r2, y.buffer));
  Value never = sys.object().update(r1, op("add 3"), y.states[0]);
  EXPECT_FALSE(mergeable_check({never}, r2, y.buffer));
}

TEST(FindMergeable, SmallestSetReachingTarget) {
  const PairedSystem sys = make_st_to_op(kRoster3, gset_st(), small_universe());
  OpConfig x = *sys.op.update(sys.op.init(), r1, op("add 1"));
  x = *sys.op.update(x, r2, op("add 2"));
  const StObject& o = sys.st.object();
  const Value target = o.join(x.states[0], x.states[1]);
  auto c = find_mergeable(o, x, r3, target);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->size(), 2u);
  auto one = find_mergeable(o, x, r3, x.states[0]);
  ASSERT_TRUE(one.has_value());
  EXPECT_EQ(one->size(), 1u);
  EXPECT_FALSE(find_mergeable(o, x, r3, o.update(r3, op("add 3"), o.initial)).has_value());
}
