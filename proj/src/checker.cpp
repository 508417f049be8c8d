#include "crdt/checker.hpp"

#include <algorithm>
#include <stdexcept>

namespace crdt {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass:
      return "pass";
    case Outcome::Counterexample:
      return "counterexample";
    case Outcome::BoundExhausted:
      return "bound-exhausted";
  }
  return "?";
}

std::string to_string(Which w) { return w == Which::HostByGuest ? "host-by-guest" : "guest-by-host"; }
std::string to_string(Side s) { return s == Side::Op ? "op" : "st"; }

int exit_code(const std::vector<Verdict>& verdicts) {
  bool exhausted = false;
  for (const auto& v : verdicts) {
    if (v.outcome == Outcome::Counterexample) return 1;
    if (v.outcome == Outcome::BoundExhausted) exhausted = true;
  }
  return exhausted ? 2 : 0;
}

Value label_key(const Label& l) {
  switch (l.kind) {
    case LabelKind::Update:
      return Value::tuple({Value::string("upd"), Value::integer(l.replica.index), Value::string(l.op.to_string())});
    case LabelKind::Query:
      return Value::tuple({Value::string("qry"), Value::integer(l.replica.index), Value::string(l.query), l.value});
    case LabelKind::Silent:
      break;
  }
  return Value::tuple({Value::string("tau")});
}

std::string label_key_to_string(const Value& key, const Roster& roster) {
  const auto& xs = key.items();
  const auto& kind = xs[0].as_string();
  if (kind == "upd") return "upd(" + roster.name(roster.at(xs[1].as_int())) + ", " + xs[2].as_string() + ")";
  if (kind == "qry")
    return "qry(" + roster.name(roster.at(xs[1].as_int())) + ", " + xs[2].as_string() + ") = " + xs[3].to_string();
  return "tau";
}

std::string trace_to_string(const ObservableTrace& t, const Roster& roster) {
  if (t.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += " · ";
    out += label_key_to_string(t[i], roster);
  }
  return out;
}

namespace {

// --- constructive matchers ------------------------------------------------

const Message& delivered_message(const Event& e) { return std::get<input::Dlvr>(e.input).m; }

std::optional<StConfig> match_op_step_on_st(const PairedSystem& sys, const OpConfig& x, const Step<OpConfig>& s,
                                            const StConfig& y) {
  const ReplicaId r = s.label.replica;
  switch (s.label.kind) {
    case LabelKind::Update: {
      auto n = sys.st.update(y, r, s.label.op);
      if (n && sys.st.mode() == BroadcastMode::SeparateSend) n = sys.st.send(*n, r);
      return n;
    }
    case LabelKind::Query:
      if (!(sys.st.query_value(y, r, s.label.query) == s.label.value)) return std::nullopt;
      return sys.st.query(y, r, s.label.query);
    case LabelKind::Silent: {
      const Message& m = delivered_message(s.target.trace.back());
      const Value payload =
          sys.direction == Direction::OpToSt ? message_set_value(downset_in(m, x.sent)) : m.payload();
      if (sys.st.can_deliver(y, r, payload)) return sys.st.deliver(y, r, payload);
      if (sys.direction == Direction::StToOp && sys.st.has_delivered(y, r, payload)) return y;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<OpConfig> deliver_all(const PairedSystem& sys, OpConfig y, ReplicaId r,
                                    const std::optional<std::vector<Message>>& order) {
  if (!order) return std::nullopt;
  for (const auto& m : *order) {
    auto n = sys.op.deliver(y, r, m);
    if (!n) return std::nullopt;
    y = std::move(*n);
  }
  return y;
}

std::optional<OpConfig> match_st_step_on_op(const PairedSystem& sys, const StConfig& x, const Step<StConfig>& s,
                                            const OpConfig& y) {
  const ReplicaId r = s.label.replica;
  switch (s.label.kind) {
    case LabelKind::Update:
      return sys.op.update(y, r, s.label.op);
    case LabelKind::Query:
      if (!(sys.op.query_value(y, r, s.label.query) == s.label.value)) return std::nullopt;
      return sys.op.query(y, r, s.label.query);
    case LabelKind::Silent: {
      if (s.label.silent == SilentKind::Send) return y;
      const Value& h = delivered_message(s.target.trace.back()).payload();
      if (sys.direction == Direction::OpToSt) {
        MessageSet u;
        const MessageSet incoming = as_message_set(h);
        const MessageSet mine = as_message_set(x.states[r.index]);
        std::set_difference(incoming.begin(), incoming.end(), mine.begin(), mine.end(), std::back_inserter(u));
        return deliver_all(sys, y, r, deliverable_check(u, r, y));
      }
      const auto& o = sys.st.object();
      auto c = find_mergeable(o, y, r, o.join(x.states[r.index], h));
      if (!c) return std::nullopt;
      // Close under pending causal predecessors so the deliveries stay enabled.
      MessageSet closed;
      for (const auto& m : y.buffer.for_replica(r))
        for (const auto& picked : *c)
          if (m == picked || happens_before(m, picked)) {
            insert(closed, m);
            break;
          }
      return deliver_all(sys, y, r, deliverable_check(closed, r, y));
    }
  }
  return std::nullopt;
}

// --- co-exploration -------------------------------------------------------

struct PairState {
  OpConfig op;
  StConfig st;
};

struct Attack {
  bool ok = false;
  PairState next;
  bool via_matcher = false;
  bool cross_fail = false;
  WitnessStep step;
  Failure failure;
};

template <typename DSys, typename DConfig, typename AConfig>
std::optional<QueryProbe> make_probe(const PairedSystem& sys, const DSys& dsys, Side attacker,
                                     const Step<AConfig>& s, const DConfig& y, int budget) {
  const Label& l = s.label;
  const ReplicaId r = l.replica;
  auto attacker_value = [&](const Query& q) {
    if constexpr (std::is_same_v<AConfig, OpConfig>)
      return sys.op.query_value(s.target, r, q);
    else
      return sys.st.query_value(s.target, r, q);
  };
  if (l.kind == LabelKind::Query) {
    std::vector<Value> options;
    for (const auto& c : weak_successors(dsys, y, Label::tau(r, SilentKind::Deliver), budget))
      options.push_back(dsys.query_value(c, r, l.query));
    std::sort(options.begin(), options.end());
    options.erase(std::unique(options.begin(), options.end()), options.end());
    return QueryProbe{r, l.query, attacker, l.value, options};
  }
  if (l.kind == LabelKind::Silent && l.silent == SilentKind::Deliver) {
    const auto closure = weak_successors(dsys, y, Label::tau(r, SilentKind::Deliver), budget);
    for (const auto& q : sys.op.universe().queries) {
      const Value v = attacker_value(q);
      std::vector<Value> options;
      for (const auto& c : closure)
        if (!(c.states[r.index] == y.states[r.index])) options.push_back(dsys.query_value(c, r, q));
      std::sort(options.begin(), options.end());
      options.erase(std::unique(options.begin(), options.end()), options.end());
      if (!std::binary_search(options.begin(), options.end(), v)) return QueryProbe{r, q, attacker, v, options};
    }
  }
  return std::nullopt;
}

constexpr std::size_t kChunk = 2048;

class Engine {
 public:
  Engine(const PairedSystem& sys, RelationId rel, std::vector<Side> attackers, const CheckOptions& opts)
      : sys_(sys),
        rel_(rel),
        attackers_(std::move(attackers)),
        opts_(opts),
        budget_(opts.tau_budget >= 0 ? opts.tau_budget : sys.default_tau_budget()) {}

  RelationCheck related(const OpConfig& op, const StConfig& st) const { return in_relation(sys_, rel_, op, st); }

  std::vector<Attack> expand(const PairState& p) const {
    std::vector<Attack> out;
    for (Side side : attackers_) {
      if (side == Side::Op) {
        for (const auto& s : sys_.op.successors(p.op)) out.push_back(attack_op(p, s));
      } else {
        for (const auto& s : sys_.st.successors(p.st)) out.push_back(attack_st(p, s));
      }
    }
    return out;
  }

  Attack attack_op(const PairState& p, const Step<OpConfig>& s) const {
    Attack a;
    a.step = {Side::Op, s.target.trace.back(), false};
    std::optional<RelationCheck> why;
    if (opts_.use_matchers)
      if (auto y = match_op_step_on_st(sys_, p.op, s, p.st)) {
        auto rc = related(s.target, *y);
        if (rc) {
          a.ok = a.via_matcher = true;
          a.next = {s.target, std::move(*y)};
          if (opts_.cross_check_matchers) a.cross_fail = !fallback_st(s, p.st);
          return a;
        }
        why = rc;
      }
    const auto cands = weak_successors(sys_.st, p.st, s.label, budget_);
    for (const auto& c : cands)
      if (related(s.target, c)) {
        a.ok = true;
        a.next = {s.target, c};
        return a;
      }
    if (!why && !cands.empty()) why = related(s.target, cands.front());
    a.failure = failure(Side::Op, s.label, why, cands.empty());
    a.failure.probe = make_probe(sys_, sys_.st, Side::Op, s, p.st, budget_);
    return a;
  }

  Attack attack_st(const PairState& p, const Step<StConfig>& s) const {
    Attack a;
    a.step = {Side::St, s.target.trace.back(), false};
    std::optional<RelationCheck> why;
    if (opts_.use_matchers)
      if (auto y = match_st_step_on_op(sys_, p.st, s, p.op)) {
        auto rc = related(*y, s.target);
        if (rc) {
          a.ok = a.via_matcher = true;
          a.next = {std::move(*y), s.target};
          if (opts_.cross_check_matchers) a.cross_fail = !fallback_op(s, p.op);
          return a;
        }
        why = rc;
      }
    const auto cands = weak_successors(sys_.op, p.op, s.label, budget_);
    for (const auto& c : cands)
      if (related(c, s.target)) {
        a.ok = true;
        a.next = {c, s.target};
        return a;
      }
    if (!why && !cands.empty()) why = related(cands.front(), s.target);
    a.failure = failure(Side::St, s.label, why, cands.empty());
    a.failure.probe = make_probe(sys_, sys_.op, Side::St, s, p.op, budget_);
    return a;
  }

  Verdict run(const std::vector<WitnessStep>* replay = nullptr, ReplayResult* replay_out = nullptr) const {
    Verdict v;
    v.stats.step_bound = opts_.step_bound;
    v.stats.tau_budget = budget_;
    v.stats.pruned = opts_.prune;
    PairState init{sys_.op.init(), sys_.st.init()};
    if (auto rc = related(init.op, init.st); !rc) {
      v.outcome = Outcome::Counterexample;
      v.failure = Failure{"initial", std::nullopt, std::nullopt, rc.clause, rc.detail, std::nullopt, {}};
      return v;
    }
    if (replay) {
      run_replay(init, *replay, *replay_out);
      return v;
    }
    struct Link {
      long parent;
      WitnessStep step;
    };
    std::vector<Link> links{{-1, {}}};
    std::unordered_set<std::string> seen;
    if (opts_.prune) seen.insert(key(init));
    observe(init);
    std::vector<std::pair<std::size_t, PairState>> frontier;
    frontier.emplace_back(0, std::move(init));
    auto chain = [&](std::size_t idx) {
      std::vector<WitnessStep> out;
      for (long i = static_cast<long>(idx); links[i].parent >= 0; i = links[i].parent) out.push_back(links[i].step);
      return std::vector<WitnessStep>(out.rbegin(), out.rend());
    };
    for (int depth = 0; depth < opts_.step_bound && !frontier.empty(); ++depth) {
      std::vector<std::pair<std::size_t, PairState>> next;
      // Chunked so that unpruned successors of a whole level never coexist.
      for (std::size_t lo = 0; lo < frontier.size(); lo += kChunk) {
        const std::size_t hi = std::min(frontier.size(), lo + kChunk);
        std::vector<std::vector<Attack>> results(hi - lo);
        parallel_for(hi - lo, opts_.workers, [&](std::size_t i) { results[i] = expand(frontier[lo + i].second); });
        for (std::size_t i = lo; i < hi; ++i) {
          for (auto& a : results[i - lo]) {
            ++v.stats.edges;
            if (!a.ok) {
              v.outcome = Outcome::Counterexample;
              v.witness = chain(frontier[i].first);
              v.witness.push_back(a.step);
              v.failure = std::move(a.failure);
              v.stats.states = links.size();
              v.stats.max_depth = depth + 1;
              return v;
            }
            (a.via_matcher ? v.stats.matcher_hits : v.stats.fallback_hits) += 1;
            v.stats.cross_check_failures += a.cross_fail ? 1 : 0;
            if (opts_.prune && !seen.insert(key(a.next)).second) continue;
            links.push_back({static_cast<long>(frontier[i].first), a.step});
            observe(a.next);
            v.stats.max_depth = depth + 1;
            next.emplace_back(links.size() - 1, std::move(a.next));
            if (links.size() >= opts_.max_states) {
              v.outcome = Outcome::BoundExhausted;
              v.stats.states = links.size();
              return v;
            }
          }
          frontier[i].second = PairState{};
        }
      }
      frontier = std::move(next);
    }
    v.stats.states = links.size();
    return v;
  }

 private:
  std::string key(const PairState& p) const {
    std::string k = encode(sys_.op.summary(p.op).value);
    encode(sys_.st.summary(p.st).value, k);
    return k;
  }

  void observe(const PairState& p) const {
    if (opts_.op_observer) opts_.op_observer(p.op);
    if (opts_.st_observer) opts_.st_observer(p.st);
  }

  bool fallback_st(const Step<OpConfig>& s, const StConfig& y) const {
    for (const auto& c : weak_successors(sys_.st, y, s.label, budget_))
      if (related(s.target, c)) return true;
    return false;
  }

  bool fallback_op(const Step<StConfig>& s, const OpConfig& y) const {
    for (const auto& c : weak_successors(sys_.op, y, s.label, budget_))
      if (related(c, s.target)) return true;
    return false;
  }

  Failure failure(Side side, const Label& l, const std::optional<RelationCheck>& why, bool no_candidates) const {
    Failure f;
    f.kind = "unmatched-step";
    f.side = side;
    f.label = l;
    if (no_candidates) {
      f.clause = "no-weak-move";
      f.detail = "the other side has no weak move with this label";
    } else if (why) {
      f.clause = to_string(rel_) + ":" + why->clause;
      f.detail = why->detail;
    }
    return f;
  }

  void run_replay(PairState p, const std::vector<WitnessStep>& witness, ReplayResult& out) const {
    for (std::size_t i = 0; i < witness.size(); ++i) {
      const auto& w = witness[i];
      std::optional<Attack> a;
      if (w.side == Side::Op) {
        for (const auto& s : sys_.op.successors(p.op))
          if (s.target.trace.back() == w.event) {
            a = attack_op(p, s);
            break;
          }
      } else {
        for (const auto& s : sys_.st.successors(p.st))
          if (s.target.trace.back() == w.event) {
            a = attack_st(p, s);
            break;
          }
      }
      if (!a) {
        out.note = "witness step " + std::to_string(i) + " is not enabled";
        return;
      }
      if (!a->ok) {
        out.failure = a->failure;
        out.reproduced = i + 1 == witness.size();
        if (!out.reproduced) out.note = "failed early at step " + std::to_string(i);
        return;
      }
      p = std::move(a->next);
    }
    out.note = "witness replayed without failure";
  }

  const PairedSystem& sys_;
  RelationId rel_;
  std::vector<Side> attackers_;
  CheckOptions opts_;
  int budget_;
};

std::vector<Side> attackers_for(const PairedSystem& sys, RelationId rel, Which which) {
  const bool host_is_op = sys.direction == Direction::OpToSt;
  switch (rel) {
    case RelationId::R1:
    case RelationId::Q1:
      if (which != Which::HostByGuest)
        throw std::invalid_argument(to_string(rel) + " is checked host-by-guest");
      break;
    case RelationId::R2:
    case RelationId::Q2:
      if (which != Which::GuestByHost)
        throw std::invalid_argument(to_string(rel) + " is checked guest-by-host");
      break;
    case RelationId::Bowtie:
      break;
  }
  const bool op_attacks = (which == Which::HostByGuest) == host_is_op;
  return {op_attacks ? Side::Op : Side::St};
}

// --- sweeps ---------------------------------------------------------------

template <typename System, typename Visit>
Verdict sweep(const System& sys, const CheckOptions& opts, Side side, Visit visit) {
  using Config = decltype(sys.init());
  Verdict v;
  v.stats.step_bound = opts.step_bound;
  v.stats.pruned = opts.prune;
  auto fail_at = [&](const Config& c, Failure f, int depth) {
    v.outcome = Outcome::Counterexample;
    for (const auto& e : c.trace.events()) v.witness.push_back({side, e, false});
    v.failure = std::move(f);
    v.stats.max_depth = depth;
  };
  Config init = sys.init();
  v.stats.states = 1;
  if (auto f = visit(init)) {
    fail_at(init, std::move(*f), 0);
    return v;
  }
  std::unordered_set<std::string> seen;
  if (opts.prune) seen.insert(encode(sys.summary(init).value));
  std::vector<Config> frontier{std::move(init)};
  for (int depth = 0; depth < opts.step_bound && !frontier.empty(); ++depth) {
    std::vector<std::vector<Step<Config>>> succ(frontier.size());
    std::vector<std::optional<std::pair<std::size_t, Failure>>> found(frontier.size());
    parallel_for(frontier.size(), opts.workers, [&](std::size_t i) {
      succ[i] = sys.successors(frontier[i]);
      for (std::size_t j = 0; j < succ[i].size(); ++j)
        if (auto f = visit(succ[i][j].target)) {
          found[i] = std::make_pair(j, std::move(*f));
          break;
        }
    });
    std::vector<Config> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (found[i]) {
        fail_at(succ[i][found[i]->first].target, std::move(found[i]->second), depth + 1);
        return v;
      }
      for (auto& s : succ[i]) {
        ++v.stats.edges;
        if (opts.prune && !seen.insert(encode(sys.summary(s.target).value)).second) continue;
        ++v.stats.states;
        v.stats.max_depth = depth + 1;
        next.push_back(std::move(s.target));
        if (v.stats.states >= opts.max_states) {
          v.outcome = Outcome::BoundExhausted;
          return v;
        }
      }
    }
    frontier = std::move(next);
  }
  return v;
}

template <typename System, typename Config>
std::optional<Failure> convergence_violation(const System& sys, const Config& c) {
  const auto& roster = sys.roster();
  for (const auto& q : sys.universe().queries) {
    std::vector<std::pair<Value, Value>> results;
    for (auto r : roster.ids()) results.push_back(split_history_result(sys.query_value(c, r, q)));
    for (std::size_t i = 0; i < results.size(); ++i)
      for (std::size_t j = i + 1; j < results.size(); ++j)
        if (results[i].second == results[j].second && !(results[i].first == results[j].first)) {
          Failure f;
          f.kind = "convergence";
          f.clause = "equal-history-equal-value";
          f.detail = roster.name(roster.at(i)) + " and " + roster.name(roster.at(j)) + " share history " +
                     results[i].second.to_string() + " but answer " + results[i].first.to_string() + " vs " +
                     results[j].first.to_string();
          return f;
        }
  }
  return std::nullopt;
}

}  // namespace

Verdict check_weak_simulation(const PairedSystem& sys, RelationId rel, Which which, const CheckOptions& opts) {
  Engine engine(sys, rel, attackers_for(sys, rel, which), opts);
  return engine.run();
}

ReplayResult replay_simulation(const PairedSystem& sys, RelationId rel, Which which,
                               const std::vector<WitnessStep>& witness, const CheckOptions& opts) {
  Engine engine(sys, rel, attackers_for(sys, rel, which), opts);
  ReplayResult out;
  engine.run(&witness, &out);
  return out;
}

Verdict check_weak_bisimulation(const PairedSystem& sys, const CheckOptions& opts) {
  if (sys.direction != Direction::OpToSt)
    throw std::invalid_argument("bisimulation is checked on the op-to-st pair");
  Engine engine(sys, RelationId::Bowtie, {Side::Op, Side::St}, opts);
  Verdict v = engine.run();
  if (v.outcome != Outcome::Counterexample) return v;
  v.relation_witness = std::move(v.witness);
  v.relation_failure = std::move(v.failure);
  v.witness.clear();
  v.failure.reset();
  const int budget = opts.tau_budget >= 0 ? opts.tau_budget : sys.default_tau_budget();
  GameResult g = find_distinguishing_play(sys, opts.step_bound, budget);
  if (g.distinguished) {
    v.witness = std::move(g.play);
    v.failure = std::move(g.leaf);
  } else {
    // Systems agree at this bound; the relation itself is still not a bisimulation.
    v.witness = v.relation_witness;
    v.failure = v.relation_failure;
  }
  return v;
}

ReplayResult replay_bisimulation(const PairedSystem& sys, const std::vector<WitnessStep>& witness,
                                 const CheckOptions& opts) {
  Engine engine(sys, RelationId::Bowtie, {Side::Op, Side::St}, opts);
  ReplayResult out;
  engine.run(&witness, &out);
  return out;
}

Verdict check_trace_equivalence(const PairedSystem& sys, int max_len, int step_bound, const CheckOptions& opts) {
  Verdict v;
  v.stats.step_bound = step_bound;
  v.stats.pruned = opts.prune;
  const TraceSet op_traces = weak_traces(sys.op, max_len, step_bound, opts);
  const TraceSet st_traces = weak_traces(sys.st, max_len, step_bound, opts);
  v.stats.states = op_traces.size() + st_traces.size();
  std::vector<std::pair<ObservableTrace, Side>> diff;
  for (const auto& t : op_traces)
    if (!st_traces.count(t)) diff.emplace_back(t, Side::Op);
  for (const auto& t : st_traces)
    if (!op_traces.count(t)) diff.emplace_back(t, Side::St);
  if (diff.empty()) return v;
  std::stable_sort(diff.begin(), diff.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  const auto& [trace, side] = diff.front();
  v.outcome = Outcome::Counterexample;
  Failure f;
  f.kind = "trace";
  f.side = side;
  f.clause = "trace-only-on-" + to_string(side);
  f.detail = trace_to_string(trace, sys.roster());
  f.trace = trace;
  v.failure = f;
  auto events = side == Side::Op ? realize_trace(sys.op, trace, step_bound) : realize_trace(sys.st, trace, step_bound);
  if (events)
    for (const auto& e : *events) v.witness.push_back({side, e, false});
  return v;
}

Verdict check_strong_convergence(const OpSystem& sys, const CheckOptions& opts) {
  return sweep(sys, opts, Side::Op, [&](const OpConfig& c) { return convergence_violation(sys, c); });
}

Verdict check_strong_convergence(const StSystem& sys, const CheckOptions& opts) {
  return sweep(sys, opts, Side::St, [&](const StConfig& c) { return convergence_violation(sys, c); });
}

Verdict check_causal_safety(const OpSystem& sys, const CheckOptions& opts) {
  return sweep(sys, opts, Side::Op, [&](const OpConfig& c) -> std::optional<Failure> {
    if (satisfies_causal_delivery(c.trace)) return std::nullopt;
    Failure f;
    f.kind = "causal-order";
    f.clause = "causal-delivery";
    const Event& e = c.trace.back();
    f.detail = "replica " + sys.roster().name(e.replica) + " delivered " +
               std::get<input::Dlvr>(e.input).m.payload().to_string() + " after a causal successor";
    return f;
  });
}

Verdict check_commutation(const OpSystem& sys, const CheckOptions& opts) {
  return sweep(sys, opts, Side::Op, [&](const OpConfig& c) -> std::optional<Failure> {
    auto bad = check_concurrent_commutation(sys.object(), c);
    if (!bad) return std::nullopt;
    Failure f;
    f.kind = "commutation";
    f.clause = "concurrent-effects-commute";
    f.detail = "effects of " + bad->first.payload().to_string() + " and " + bad->second.payload().to_string() +
               " do not commute at " + sys.roster().name(bad->replica);
    return f;
  });
}

}  // namespace crdt
