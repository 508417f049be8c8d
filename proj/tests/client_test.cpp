#include <gtest/gtest.h>

#include "crdt/client.hpp"

using namespace crdt;
using namespace crdt::client;

namespace {

Operation op(const char* s) { return Operation::parse(s); }
Universe adds12() { return {{op("add 1"), op("add 2")}, {"sum"}}; }

PairedSystem pair(Direction d, bool broken = false) {
  PairOptions po;
  po.limits.updates_per_replica = 2;
  po.constant_query_guest = broken;
  return d == Direction::OpToSt ? make_op_to_st(make_roster(2), gset_op(), adds12(), po)
                                : make_st_to_op(make_roster(2), gset_st(), adds12(), po);
}

const char* kWaitForSum = "upd(add 1); x := qry(sum); while (x < 1) { x := qry(sum) }";

}  // namespace

TEST(Parse, StatementsAndPrecedence) {
  const ProgPtr p = parse_program("x := 1 + 2 * y; while (x < 3) { upd(add 1); x := qry(sum) }; skip");
  ASSERT_EQ(p->kind, Prog::Kind::Seq);
  EXPECT_EQ(p->first->kind, Prog::Kind::Asn);
  EXPECT_EQ(p->first->expr->kind, Expr::Kind::Add);
  EXPECT_EQ(p->first->expr->rhs->kind, Expr::Kind::Mul);
  // Sequences nest to the right.
  ASSERT_EQ(p->second->kind, Prog::Kind::Seq);
  EXPECT_EQ(p->second->first->kind, Prog::Kind::While);
  EXPECT_EQ(p->second->second->kind, Prog::Kind::Skip);
  const Prog& body = *p->second->first->first;
  ASSERT_EQ(body.kind, Prog::Kind::Seq);
  EXPECT_EQ(body.first->op, op("add 1"));
  EXPECT_EQ(body.second->kind, Prog::Kind::Qry);
  EXPECT_EQ(body.second->query, "sum");
}

TEST(Parse, PrintRoundTrips) {
  for (const char* text : {"skip", "x := 1", "x := 1 - 2 - 3", "x := 1 - (2 - 3)", "x := (a + b) * c",
                           "x := a < b = 1", "upd(add 5); x := qry(sum)",
                           "while (x < 3) { while (y = 0) { y := qry(sum) }; x := x + 1 }", kWaitForSum}) {
    const ProgPtr p = parse_program(text);
    EXPECT_EQ(print(*p), text);
    EXPECT_TRUE(same_program(p, parse_program(print(*p))));
  }
  EXPECT_EQ(print(*parse_program("x:=((1))+(y)")), "x := 1 + y");
}

TEST(Parse, SequencesNormalizeToTheRight) {
  const ProgPtr left = seq(seq(assign("a", lit(1)), assign("b", lit(2))), assign("c", lit(3)));
  EXPECT_EQ(left->first->kind, Prog::Kind::Asn);
  EXPECT_TRUE(same_program(left, parse_program("a := 1; b := 2; c := 3")));
}

TEST(Parse, SyntaxErrorsCarryPosition) {
  try {
    parse_program("x := qry(sum);\nwhile (x < ) { skip }");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line, 2);
    EXPECT_EQ(e.column, 12);
    EXPECT_EQ(std::string(e.what()), "2:12: expected expression, found ')'");
  }
  EXPECT_THROW(parse_program(""), SyntaxError);
  EXPECT_TRUE(same_program(parse_program("x := 1;"), parse_program("x := 1")));  // trailing terminator
  EXPECT_THROW(parse_program("while := 1"), SyntaxError);
  EXPECT_THROW(parse_program("x := $"), SyntaxError);
  EXPECT_THROW(parse_program("upd(add 1) skip"), SyntaxError);
}

TEST(Eval, ArithmeticOverNaturals) {
  const Store s{{"x", 4}, {"y", 7}};
  auto ev = [&](const char* e) { return eval_expr(*parse_program(std::string("r := ") + e)->expr, s); };
  EXPECT_EQ(ev("x + y * 2"), 18);
  EXPECT_EQ(ev("x - y"), 0);  // truncated
  EXPECT_EQ(ev("y - x"), 3);
  EXPECT_EQ(ev("x < y"), 1);
  EXPECT_EQ(ev("y < x"), 0);
  EXPECT_EQ(ev("x = 4"), 1);
  EXPECT_EQ(ev("unbound"), 0);
  EXPECT_EQ(store_to_string(s), "{x: 4, y: 7}");
  EXPECT_EQ(store_to_string({{"z", 0}}), "{}");
}

TEST(Terminal, Rules) {
  EXPECT_TRUE(terminal(*parse_program("skip"), {}));
  EXPECT_TRUE(terminal(*parse_program("while (x) { skip }"), {}));
  EXPECT_FALSE(terminal(*parse_program("while (x) { skip }"), {{"x", 1}}));
  EXPECT_TRUE(terminal(*parse_program("skip; while (0) { skip }"), {}));
  EXPECT_FALSE(terminal(*parse_program("skip; x := 1"), {}));
  EXPECT_FALSE(terminal(*parse_program("upd(add 1)"), {}));
  EXPECT_FALSE(terminal(*parse_program("x := qry(sum)"), {}));
}

TEST(Redexes, PureRulesAreDeterministic) {
  for (const char* text : {"x := 1 + 2; y := x", "while (x < 2) { x := x + 1 }", "skip; x := 3"}) {
    const ProgPtr p = parse_program(text);
    const auto a = detail::redexes(p, {});
    const auto b = detail::redexes(p, {});
    ASSERT_EQ(a.size(), 1u) << text;
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(a[0].kind, detail::Redex::Kind::Pure);
    EXPECT_EQ(a[0].store, b[0].store);
    EXPECT_TRUE(same_program(a[0].rest, b[0].rest));
  }
  const auto w = detail::redexes(parse_program("while (x < 2) { x := x + 1 }"), {});
  EXPECT_EQ(w[0].rule, "WStep");
  EXPECT_EQ(print(*w[0].rest), "x := x + 1; while (x < 2) { x := x + 1 }");
}

TEST(ClientSteps, QueryLeavesEnvironmentUnchanged) {
  const OpSystem sys(make_roster(2), gset_op(), adds12());
  const OpConfig c = *sys.update(sys.init(), ReplicaId{0}, op("add 2"));
  const ClientState<OpConfig> cs{c, {}, parse_program("x := qry(sum)")};
  const auto steps = client_steps(sys, cs);
  std::vector<std::int64_t> seen;
  for (const auto& s : steps) {
    if (s.record.rule != "Qry") continue;
    EXPECT_EQ(s.target.env.trace.events(), c.trace.events());
    EXPECT_EQ(s.target.env.states, c.states);
    EXPECT_FALSE(s.record.env_event.has_value());
    seen.push_back(s.target.store.at("x"));
  }
  // r1 has applied add 2, r2 has not.
  EXPECT_EQ(seen, (std::vector<std::int64_t>{2, 0}));
}

TEST(ClientSteps, UpdateAppendsOneEvent) {
  const OpSystem sys(make_roster(2), gset_op(), adds12());
  const ClientState<OpConfig> cs{sys.init(), {}, parse_program("upd(add 1)")};
  int updates = 0;
  for (const auto& s : client_steps(sys, cs))
    if (s.record.rule == "Upd") {
      ++updates;
      EXPECT_EQ(s.target.env.trace.size(), 1u);
      EXPECT_TRUE(terminal(*s.target.prog, s.target.store));
    }
  EXPECT_EQ(updates, 2);
}

TEST(CanTerminate, Examples) {
  const OpSystem sys(make_roster(2), gset_op(), adds12());
  auto run = [&](const char* text, int bound) {
    return can_terminate(sys, {sys.init(), {}, parse_program(text)}, bound);
  };
  EXPECT_TRUE(run("skip", 0).terminates);
  EXPECT_FALSE(run("while (1) { skip }", 12).terminates);
  const auto w = run(kWaitForSum, 10);
  ASSERT_TRUE(w.terminates);
  EXPECT_EQ(w.witness.front().rule, "Upd");
  // Waiting for 3 needs both updates; each replica sees its own add at once.
  const auto both = run("upd(add 1); upd(add 2); x := qry(sum); while (x < 3) { x := qry(sum) }", 12);
  EXPECT_TRUE(both.terminates);
  // Shortest run: update and query at the writer.
  EXPECT_EQ(run(kWaitForSum, 2).witness.size(), 2u);
  EXPECT_FALSE(run(kWaitForSum, 1).terminates);
}

TEST(CanTerminate, SeparateSendQueryReachesFortySeven) {
  PairOptions po;
  po.limits.per_replica = {2, 0};
  const PairedSystem sys = make_op_to_st(make_roster(2), gset_op(), {{op("add 5"), op("add 42")}, {"sum"}}, po);
  const char* text = "upd(add 5); upd(add 42); x := qry(sum); while (x < 47) { x := qry(sum) }";
  EXPECT_TRUE(can_terminate(sys.op, {sys.op.init(), {}, parse_program(text)}, 14).terminates);
  EXPECT_TRUE(can_terminate(sys.st, {sys.st.init(), {}, parse_program(text)}, 14).terminates);
  EXPECT_FALSE(can_terminate(sys.op, {sys.op.init(), {}, parse_program("x := qry(sum); while (x < 47) { x := qry(sum) }")}, 14)
                   .terminates);
}

TEST(Approximation, HoldsAcrossEmulations) {
  for (auto d : {Direction::OpToSt, Direction::StToOp}) {
    const PairedSystem sys = pair(d);
    const ProgPtr p = parse_program(kWaitForSum);
    EXPECT_EQ(check_approximation(sys.op, sys.st, {}, p, 10, 34).outcome, Outcome::Pass);
    EXPECT_EQ(check_approximation(sys.st, sys.op, {}, p, 10, 34).outcome, Outcome::Pass);
  }
}

TEST(Approximation, NonTerminatingProgramExhaustsBound) {
  const PairedSystem sys = pair(Direction::OpToSt);
  const Verdict v = check_approximation(sys.op, sys.st, {}, parse_program("while (1) { skip }"), 10, 34);
  EXPECT_EQ(v.outcome, Outcome::BoundExhausted);
}

TEST(Approximation, BrokenGuestIsCaught) {
  const PairedSystem sys = pair(Direction::OpToSt, true);
  const Verdict v = check_approximation(sys.op, sys.st, {}, parse_program(kWaitForSum), 10, 34);
  ASSERT_EQ(v.outcome, Outcome::Counterexample);
  ASSERT_TRUE(v.failure);
  EXPECT_EQ(v.failure->kind, "approximation");
  EXPECT_FALSE(v.witness.empty());
}

TEST(Approximation, StoreSeedsVariables) {
  const PairedSystem sys = pair(Direction::OpToSt);
  const ProgPtr p = parse_program("while (x < 1) { skip }");
  EXPECT_EQ(check_approximation(sys.op, sys.st, {}, p, 4, 16).outcome, Outcome::BoundExhausted);
  EXPECT_EQ(check_approximation(sys.op, sys.st, {{"x", 1}}, p, 4, 16).outcome, Outcome::Pass);
}

TEST(Corpus, SizeDepthAndDeterminism) {
  const auto a = generate_corpus(adds12(), 120, 4, 7);
  const auto b = generate_corpus(adds12(), 120, 4, 7);
  ASSERT_GE(a.size(), 100u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LE(depth(*a[i]), 4);
    EXPECT_TRUE(same_program(a[i], b[i]));
    EXPECT_TRUE(same_program(a[i], parse_program(print(*a[i])))) << print(*a[i]);
  }
  EXPECT_THROW(generate_corpus({{}, {"sum"}}, 1, 3, 0), std::invalid_argument);
}
