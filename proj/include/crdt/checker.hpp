#ifndef CRDT_CHECKER_HPP
#define CRDT_CHECKER_HPP

#include <atomic>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "crdt/relations.hpp"

namespace crdt {

enum class Outcome { Pass, Counterexample, BoundExhausted };
enum class Which { HostByGuest, GuestByHost };
enum class Side { Op, St };

std::string to_string(Outcome o);
std::string to_string(Which w);
std::string to_string(Side s);

struct CheckOptions {
  int step_bound = 8;
  int tau_budget = -1;  // negative: 2·|RID|
  bool prune = true;
  int workers = 1;
  bool use_matchers = true;
  // Also run the fallback search where a matcher succeeded and count disagreements.
  bool cross_check_matchers = false;
  std::size_t max_states = 20'000'000;
  std::function<void(const OpConfig&)> op_observer;
  std::function<void(const StConfig&)> st_observer;
};

struct Stats {
  std::size_t states = 0;
  std::size_t edges = 0;  // transitions, or obligations for simulation checks
  int max_depth = 0;
  std::size_t matcher_hits = 0;
  std::size_t fallback_hits = 0;
  std::size_t cross_check_failures = 0;
  int step_bound = 0;
  int tau_budget = 0;
  bool pruned = true;
};

// Observable values a defender could produce for a query at one replica.
struct QueryProbe {
  ReplicaId replica;
  Query query;
  Side side;  // side that produced `value`
  Value value;
  std::vector<Value> options;  // what the other side can answer instead
};

struct WitnessStep {
  Side side;
  Event event;
  bool response = false;  // defender move in a bisimulation play
};

struct Failure {
  std::string kind;
  std::optional<Side> side;
  std::optional<Label> label;
  std::string clause;
  std::string detail;
  std::optional<QueryProbe> probe;
  std::vector<Value> trace;  // distinguishing observable trace (label keys)
};

struct Verdict {
  Outcome outcome = Outcome::Pass;
  Stats stats;
  std::vector<WitnessStep> witness;
  std::optional<Failure> failure;
  // Bisimulation only: the relation obligation that failed before the
  // distinguishing play was searched.
  std::vector<WitnessStep> relation_witness;
  std::optional<Failure> relation_failure;

  bool passed() const { return outcome == Outcome::Pass; }
};

// --- generic exploration -------------------------------------------------

template <typename F>
void parallel_for(std::size_t n, int workers, F&& f) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t w = 0; w < count; ++w)
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < n; i = next++) f(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <typename Config>
struct Graph {
  struct Node {
    Config config;
    int depth;
  };
  struct Edge {
    std::size_t from;
    std::size_t to;
    Label label;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  bool exhausted = false;  // node cap hit
};

// Breadth-first exploration up to `bound` steps. With pruning, successors
// whose summary was already seen become edges to the earlier node.
template <typename System>
auto explore(const System& sys, int bound, const CheckOptions& opts = {}) {
  using Config = decltype(sys.init());
  Graph<Config> g;
  std::unordered_map<std::string, std::size_t> seen;
  g.nodes.push_back({sys.init(), 0});
  if (opts.prune) seen.emplace(encode(sys.summary(g.nodes[0].config).value), 0);
  std::vector<std::size_t> frontier{0};
  for (int depth = 0; depth < bound && !frontier.empty(); ++depth) {
    std::vector<std::vector<Step<Config>>> succ(frontier.size());
    parallel_for(frontier.size(), opts.workers,
                 [&](std::size_t i) { succ[i] = sys.successors(g.nodes[frontier[i]].config); });
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < frontier.size(); ++i)
      for (auto& s : succ[i]) {
        std::size_t to;
        if (opts.prune) {
          auto [it, fresh] = seen.emplace(encode(sys.summary(s.target).value), g.nodes.size());
          to = it->second;
          if (fresh) {
            g.nodes.push_back({std::move(s.target), depth + 1});
            next.push_back(to);
          }
        } else {
          to = g.nodes.size();
          g.nodes.push_back({std::move(s.target), depth + 1});
          next.push_back(to);
        }
        g.edges.push_back({frontier[i], to, s.label});
        if (g.nodes.size() >= opts.max_states) {
          g.exhausted = true;
          return g;
        }
      }
    frontier = std::move(next);
  }
  return g;
}

// Weak successors: τ* for a silent label, τ*·label·τ* otherwise, using at most
// `tau_budget` silent steps in total. Order is breadth-first and deterministic.
template <typename System, typename Config>
std::vector<Config> weak_successors(const System& sys, const Config& c, const Label& label, int tau_budget) {
  auto closure = [&](const std::vector<std::pair<Config, int>>& seeds, std::unordered_set<Summary, SummaryHash>& seen,
                     std::vector<std::pair<Config, int>>& out) {
    std::deque<std::pair<Config, int>> queue;
    for (const auto& s : seeds)
      if (seen.insert(sys.summary(s.first)).second) {
        queue.push_back(s);
        out.push_back(s);
      }
    while (!queue.empty()) {
      auto [cfg, used] = queue.front();
      queue.pop_front();
      if (used >= tau_budget) continue;
      for (auto& st : sys.successors(cfg)) {
        if (!st.label.is_tau()) continue;
        if (!seen.insert(sys.summary(st.target)).second) continue;
        queue.emplace_back(st.target, used + 1);
        out.emplace_back(std::move(st.target), used + 1);
      }
    }
  };
  std::unordered_set<Summary, SummaryHash> seen_pre;
  std::vector<std::pair<Config, int>> pre;
  closure({{c, 0}}, seen_pre, pre);
  std::vector<Config> result;
  if (label.is_tau()) {
    for (auto& p : pre) result.push_back(std::move(p.first));
    return result;
  }
  std::unordered_set<Summary, SummaryHash> seen_post;
  std::vector<std::pair<Config, int>> post;
  for (const auto& [cfg, used] : pre)
    for (auto& st : sys.successors(cfg))
      if (same_observable(st.label, label)) closure({{st.target, used}}, seen_post, post);
  for (auto& p : post) result.push_back(std::move(p.first));
  return result;
}

// --- observable traces ---------------------------------------------------

using ObservableTrace = std::vector<Value>;
using TraceSet = std::set<ObservableTrace>;

Value label_key(const Label& l);
std::string label_key_to_string(const Value& key, const Roster& roster);
std::string trace_to_string(const ObservableTrace& t, const Roster& roster);

// Sequences of observable labels of length ≤ max_len realizable within
// step_bound raw steps.
template <typename System>
TraceSet weak_traces(const System& sys, int max_len, int step_bound, const CheckOptions& opts = {}) {
  using Config = decltype(sys.init());
  TraceSet traces{ObservableTrace{}};
  struct Item {
    Config config;
    ObservableTrace prefix;
  };
  auto key = [&](const Config& c, const ObservableTrace& p) {
    return encode(Value::tuple({sys.summary(c).value, Value::tuple(p)}));
  };
  std::unordered_set<std::string> seen;
  std::vector<Item> frontier{{sys.init(), {}}};
  seen.insert(key(frontier[0].config, {}));
  for (int depth = 0; depth < step_bound && !frontier.empty(); ++depth) {
    std::vector<std::vector<Step<Config>>> succ(frontier.size());
    parallel_for(frontier.size(), opts.workers, [&](std::size_t i) { succ[i] = sys.successors(frontier[i].config); });
    std::vector<Item> next;
    for (std::size_t i = 0; i < frontier.size(); ++i)
      for (auto& s : succ[i]) {
        ObservableTrace p = frontier[i].prefix;
        if (!s.label.is_tau()) {
          if (static_cast<int>(p.size()) >= max_len) continue;
          p.push_back(label_key(s.label));
          traces.insert(p);
        }
        if (static_cast<int>(p.size()) >= max_len) continue;  // nothing more to observe
        if (opts.prune && !seen.insert(key(s.target, p)).second) continue;
        next.push_back({std::move(s.target), std::move(p)});
      }
    frontier = std::move(next);
  }
  return traces;
}

// Shortest execution realizing an observable trace, as events.
template <typename System>
std::optional<std::vector<Event>> realize_trace(const System& sys, const ObservableTrace& trace, int step_bound) {
  using Config = decltype(sys.init());
  std::vector<std::pair<Config, std::size_t>> frontier{{sys.init(), 0}};
  std::unordered_set<std::string> seen;
  for (int depth = 0; depth <= step_bound; ++depth) {
    std::vector<std::pair<Config, std::size_t>> next;
    for (auto& [c, matched] : frontier) {
      if (matched == trace.size()) return c.trace.events();
      if (depth == step_bound) continue;
      for (auto& s : sys.successors(c)) {
        std::size_t m = matched;
        if (!s.label.is_tau()) {
          if (!(label_key(s.label) == trace[m])) continue;
          ++m;
        }
        if (!seen.insert(encode(Value::tuple({sys.summary(s.target).value, Value::integer(static_cast<std::int64_t>(m))}))).second)
          continue;
        next.emplace_back(std::move(s.target), m);
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

// --- checks --------------------------------------------------------------

Verdict check_weak_simulation(const PairedSystem& sys, RelationId rel, Which which, const CheckOptions& opts = {});
Verdict check_weak_bisimulation(const PairedSystem& sys, const CheckOptions& opts = {});
Verdict check_trace_equivalence(const PairedSystem& sys, int max_len, int step_bound, const CheckOptions& opts = {});
Verdict check_strong_convergence(const OpSystem& sys, const CheckOptions& opts = {});
Verdict check_strong_convergence(const StSystem& sys, const CheckOptions& opts = {});
Verdict check_causal_safety(const OpSystem& sys, const CheckOptions& opts = {});
Verdict check_commutation(const OpSystem& sys, const CheckOptions& opts = {});

// Searches for a bounded weak-bisimulation game in which the attacker wins;
// used to explain why two systems are not bisimilar.
struct GameResult {
  bool distinguished = false;
  int depth = 0;
  std::vector<WitnessStep> play;
  std::optional<Failure> leaf;
  std::size_t positions = 0;
};
GameResult find_distinguishing_play(const PairedSystem& sys, int max_depth, int tau_budget,
                                    std::size_t max_positions = 2'000'000);

struct ReplayResult {
  bool reproduced = false;
  std::optional<Failure> failure;
  std::string note;
};

// Re-runs the co-exploration along a witness; deterministic matching makes the
// final step fail exactly as reported.
ReplayResult replay_simulation(const PairedSystem& sys, RelationId rel, Which which,
                               const std::vector<WitnessStep>& witness, const CheckOptions& opts = {});
ReplayResult replay_bisimulation(const PairedSystem& sys, const std::vector<WitnessStep>& witness,
                                 const CheckOptions& opts = {});

// Exit-code contract: 0 all pass, 1 any counterexample, 2 bound exhausted only.
int exit_code(const std::vector<Verdict>& verdicts);

}  // namespace crdt

#endif  // CRDT_CHECKER_HPP
