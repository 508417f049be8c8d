#ifndef CRDT_CLIENT_HPP
#define CRDT_CLIENT_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "crdt/checker.hpp"

namespace crdt::client {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Lit, Var, Add, Sub, Mul, Eq, Lt };
  Kind kind = Kind::Lit;
  std::int64_t value = 0;
  std::string name;
  ExprPtr lhs, rhs;
};

struct Prog;
using ProgPtr = std::shared_ptr<const Prog>;

struct Prog {
  enum class Kind { Skip, Asn, While, Seq, Upd, Qry };
  Kind kind = Kind::Skip;
  std::string var;    // Asn, Qry
  ExprPtr expr;       // Asn, While guard
  Operation op;       // Upd
  Query query;        // Qry
  ProgPtr first, second;  // Seq; While body in `first`
};

ExprPtr lit(std::int64_t v);
ExprPtr var(std::string name);
ExprPtr binary(Expr::Kind k, ExprPtr a, ExprPtr b);

ProgPtr skip();
ProgPtr assign(std::string x, ExprPtr e);
ProgPtr loop(ExprPtr guard, ProgPtr body);
ProgPtr seq(ProgPtr a, ProgPtr b);
ProgPtr upd(Operation op);
ProgPtr qry(std::string x, Query q);

struct SyntaxError : std::runtime_error {
  SyntaxError(const std::string& what, int line, int column);
  int line;
  int column;
};

// Statements separated by ';' build right-nested sequences.
ProgPtr parse_program(const std::string& text);
std::string print(const Expr& e);
std::string print(const Prog& p);
bool same_program(const ProgPtr& a, const ProgPtr& b);
int depth(const Prog& p);

// Absent variables read as 0; values stay in ℕ.
using Store = std::map<std::string, std::int64_t>;
std::int64_t eval_expr(const Expr& e, const Store& s);
std::string store_to_string(const Store& s);

// Program part of a client step, independent of the environment.
bool terminal(const Prog& p, const Store& s);

struct Record {
  std::string rule;  // CStep, Upd, Qry, Asn, WStep
  std::optional<Event> env_event;
  std::string detail;
};

template <typename Config>
struct ClientState {
  Config env;
  Store store;
  ProgPtr prog;
};

template <typename Config>
struct ClientStep {
  ClientState<Config> target;
  Record record;
};

namespace detail {

// Program-only successors ([Asn], [WStep]) and the environment-facing redex of p.
struct Redex {
  enum class Kind { None, Pure, Upd, Qry } kind = Kind::None;
  ProgPtr rest;       // program after the redex fires (Pure: already applied)
  Store store;        // Pure only
  std::string rule;
  const Prog* atom = nullptr;  // Upd / Qry statement
};

std::vector<Redex> redexes(const ProgPtr& p, const Store& s);

}  // namespace detail

// All client successors: environment τ steps, then the program's redexes
// ([Upd] and [Qry] at every replica, in roster order).
template <typename System>
auto client_steps(const System& sys, const ClientState<decltype(sys.init())>& cs) {
  using Config = decltype(sys.init());
  std::vector<ClientStep<Config>> out;
  for (auto& s : sys.successors(cs.env))
    if (s.label.is_tau()) {
      Event e = s.target.trace.back();
      out.push_back({{std::move(s.target), cs.store, cs.prog}, {"CStep", e, ""}});
    }
  for (auto& r : detail::redexes(cs.prog, cs.store)) {
    switch (r.kind) {
      case detail::Redex::Kind::Pure:
        out.push_back({{cs.env, r.store, r.rest}, {r.rule, std::nullopt, ""}});
        break;
      case detail::Redex::Kind::Upd:
        for (auto id : sys.roster().ids())
          if (auto n = sys.update(cs.env, id, r.atom->op, false)) {
            Event e = n->trace.back();
            out.push_back({{std::move(*n), cs.store, r.rest}, {"Upd", e, ""}});
          }
        break;
      case detail::Redex::Kind::Qry:
        for (auto id : sys.roster().ids()) {
          const Value v = sys.query_value(cs.env, id, r.atom->query);
          Store s = cs.store;
          s[r.atom->var] = v.is(Value::Kind::Int) ? std::max<std::int64_t>(0, v.as_int()) : 0;
          out.push_back({{cs.env, std::move(s), r.rest},
                         {"Qry", std::nullopt,
                          sys.roster().name(id) + " " + r.atom->query + " = " + v.to_string()}});
        }
        break;
      case detail::Redex::Kind::None:
        break;
    }
  }
  return out;
}

template <typename Config>
struct Termination {
  bool terminates = false;
  std::vector<Record> witness;
  std::size_t states = 0;
};

// Breadth-first search for an execution reaching a terminal client state
// within `step_bound` client steps.
template <typename System>
auto can_terminate(const System& sys, const ClientState<decltype(sys.init())>& start, int step_bound) {
  using Config = decltype(sys.init());
  Termination<Config> out;
  struct Node {
    ClientState<Config> cs;
    long parent;
    Record record;
  };
  std::vector<Node> nodes{{start, -1, {}}};
  auto key = [&](const ClientState<Config>& cs) {
    return encode(sys.summary(cs.env).value) + '\x1f' + store_to_string(cs.store) + '\x1f' + print(*cs.prog);
  };
  std::unordered_set<std::string> seen{key(start)};
  auto finish = [&](std::size_t idx) {
    out.terminates = true;
    for (long i = static_cast<long>(idx); nodes[i].parent >= 0; i = nodes[i].parent) out.witness.push_back(nodes[i].record);
    std::reverse(out.witness.begin(), out.witness.end());
  };
  std::vector<std::size_t> frontier{0};
  if (terminal(*start.prog, start.store)) {
    finish(0);
    out.states = 1;
    return out;
  }
  for (int d = 0; d < step_bound && !frontier.empty(); ++d) {
    std::vector<std::size_t> next;
    for (auto idx : frontier) {
      auto steps = client_steps(sys, nodes[idx].cs);
      for (auto& s : steps) {
        if (!seen.insert(key(s.target)).second) continue;
        const bool done = terminal(*s.target.prog, s.target.store);
        nodes.push_back({std::move(s.target), static_cast<long>(idx), std::move(s.record)});
        if (done) {
          finish(nodes.size() - 1);
          out.states = nodes.size();
          return out;
        }
        next.push_back(nodes.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  out.states = nodes.size();
  return out;
}

std::string records_to_string(const std::vector<Record>& rs, const Roster& roster);

// Approximation at bound: termination under K within bound_k implies
// termination under L within bound_l.
template <typename SysK, typename SysL>
Verdict check_approximation(const SysK& k, const SysL& l, const Store& store, const ProgPtr& prog, int bound_k,
                            int bound_l) {
  Verdict v;
  v.stats.step_bound = bound_k;
  auto tk = can_terminate(k, {k.init(), store, prog}, bound_k);
  v.stats.states = tk.states;
  if (!tk.terminates) {
    v.outcome = Outcome::BoundExhausted;
    return v;
  }
  auto tl = can_terminate(l, {l.init(), store, prog}, bound_l);
  v.stats.states += tl.states;
  if (tl.terminates) return v;
  v.outcome = Outcome::Counterexample;
  constexpr Side side_k = std::is_same_v<decltype(k.init()), OpConfig> ? Side::Op : Side::St;
  for (const auto& r : tk.witness)
    if (r.env_event) v.witness.push_back({side_k, *r.env_event, false});
  Failure f;
  f.kind = "approximation";
  f.side = side_k;
  f.clause = "termination-not-preserved";
  f.detail = "terminates via " + records_to_string(tk.witness, k.roster()) + " but not within " +
             std::to_string(bound_l) + " steps on the other side";
  v.failure = f;
  return v;
}

// Random programs over the universe, AST depth ≤ max_depth; deterministic for a seed.
std::vector<ProgPtr> generate_corpus(const Universe& u, std::size_t count, int max_depth, std::uint32_t seed);

}  // namespace crdt::client

#endif  // CRDT_CLIENT_HPP
