#include <algorithm>
#include <climits>
#include <stdexcept>

#include "crdt/checker.hpp"

namespace crdt {
namespace {

struct BudgetExceeded {};

// k-bounded weak bisimulation game between the op and st sides of a pair.
// dist(x, y, k): the attacker wins within k attacker moves.
class Game {
 public:
  Game(const PairedSystem& sys, int budget, std::size_t max_positions)
      : sys_(sys), budget_(budget), max_positions_(max_positions) {}

  bool dist(const OpConfig& x, const StConfig& y, int k) {
    if (k <= 0) return false;
    const Value key = pair_key(x, y);
    Entry& e0 = memo_[key];
    if (k <= e0.safe) return false;
    if (k >= e0.lost) return true;
    if (++positions_ > max_positions_) throw BudgetExceeded{};
    bool won = false;
    for (const auto& s : sys_.op.successors(x)) {
      bool all = true;
      for (const auto& c : st_weak(y, s.label))
        if (!dist(s.target, c, k - 1)) {
          all = false;
          break;
        }
      if (all) {
        won = true;
        break;
      }
    }
    if (!won)
      for (const auto& s : sys_.st.successors(y)) {
        bool all = true;
        for (const auto& c : op_weak(x, s.label))
          if (!dist(c, s.target, k - 1)) {
            all = false;
            break;
          }
        if (all) {
          won = true;
          break;
        }
      }
    Entry& e = memo_[key];  // rehash-safe lookup
    if (won)
      e.lost = std::min(e.lost, k);
    else
      e.safe = std::max(e.safe, k);
    return won;
  }

  // Least d in [1, k] with dist(x, y, d), or k + 1 when the defender survives k.
  int survival(const OpConfig& x, const StConfig& y, int k) {
    for (int d = 1; d <= k; ++d)
      if (dist(x, y, d)) return d;
    return k + 1;
  }

  // Follows one winning strategy from a position lost at exactly depth k.
  void explain(OpConfig x, StConfig y, int k, GameResult& out) {
    for (;;) {
      bool moved = false;
      for (const auto& s : sys_.op.successors(x)) {
        auto cands = weak_successors(sys_.st, y, s.label, budget_);
        if (!all_lost(s.target, cands, k - 1)) continue;
        out.play.push_back({Side::Op, s.target.trace.back(), false});
        if (cands.empty()) {
          out.leaf = leaf(Side::Op, s, y);
          return;
        }
        const std::size_t pick = choose(s.label.replica, y, cands, [&](const StConfig& c, int d) {
          return survival(s.target, c, d);
        }, k - 1);
        const StConfig& c = cands[pick];
        for (std::size_t i = y.trace.size(); i < c.trace.size(); ++i)
          out.play.push_back({Side::St, c.trace.events()[i], true});
        const int next_k = survival(s.target, c, k - 1);
        x = s.target;
        y = c;
        k = next_k;
        moved = true;
        break;
      }
      if (moved) continue;
      for (const auto& s : sys_.st.successors(y)) {
        auto cands = weak_successors(sys_.op, x, s.label, budget_);
        bool all = true;
        for (const auto& c : cands)
          if (!dist(c, s.target, k - 1)) {
            all = false;
            break;
          }
        if (!all) continue;
        out.play.push_back({Side::St, s.target.trace.back(), false});
        if (cands.empty()) {
          out.leaf = leaf(Side::St, s, x);
          return;
        }
        const std::size_t pick = choose(s.label.replica, x, cands, [&](const OpConfig& c, int d) {
          return survival(c, s.target, d);
        }, k - 1);
        const OpConfig& c = cands[pick];
        for (std::size_t i = x.trace.size(); i < c.trace.size(); ++i)
          out.play.push_back({Side::Op, c.trace.events()[i], true});
        const int next_k = survival(c, s.target, k - 1);
        x = c;
        y = s.target;
        k = next_k;
        moved = true;
        break;
      }
      if (!moved) throw std::logic_error("distinguishing play lost its winning move");
    }
  }

  std::size_t positions() const { return positions_; }

 private:
  struct Entry {
    int safe = 0;
    int lost = INT_MAX;
  };

  Value pair_key(const OpConfig& x, const StConfig& y) const {
    return Value::tuple({sys_.op.summary(x).value, sys_.st.summary(y).value});
  }

  bool all_lost(const OpConfig& x, const std::vector<StConfig>& cands, int k) {
    for (const auto& c : cands)
      if (!dist(x, c, k)) return false;
    return true;
  }

  // Defender prefers the longest survival, then a response that moved the
  // attacker's replica, then breadth-first order.
  template <typename Config, typename Survive>
  std::size_t choose(ReplicaId r, const Config& before, const std::vector<Config>& cands, Survive survive, int k) {
    std::size_t best = 0;
    int best_d = -1;
    bool best_moved = false;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const int d = survive(cands[i], k);
      const bool moved = !(cands[i].states[r.index] == before.states[r.index]);
      if (d > best_d || (d == best_d && moved && !best_moved)) {
        best = i;
        best_d = d;
        best_moved = moved;
      }
    }
    return best;
  }

  template <typename AConfig, typename DConfig>
  Failure leaf(Side attacker, const Step<AConfig>& s, const DConfig& defender) {
    Failure f;
    f.kind = "distinguishing-move";
    f.side = attacker;
    f.label = s.label;
    f.clause = "no-weak-move";
    f.detail = "the other side has no weak move with this label";
    if (s.label.kind == LabelKind::Query) {
      const ReplicaId r = s.label.replica;
      std::vector<Value> options;
      for (const auto& c : weak_successors(defender_system<DConfig>(), defender, Label::tau(r, SilentKind::Deliver),
                                           budget_))
        options.push_back(defender_system<DConfig>().query_value(c, r, s.label.query));
      std::sort(options.begin(), options.end());
      options.erase(std::unique(options.begin(), options.end()), options.end());
      f.probe = QueryProbe{r, s.label.query, attacker, s.label.value, options};
      f.detail = to_string(attacker) + " answers " + s.label.query + " = " + s.label.value.to_string() + " at " +
                 sys_.roster().name(r) + "; the other side can only answer " + Value::set(options).to_string();
    }
    return f;
  }

  template <typename Config>
  const auto& defender_system() const {
    if constexpr (std::is_same_v<Config, OpConfig>)
      return sys_.op;
    else
      return sys_.st;
  }

  const std::vector<StConfig>& st_weak(const StConfig& y, const Label& l) {
    Value key = Value::tuple({sys_.st.summary(y).value, label_key(l), Value::integer(l.replica.index)});
    auto it = st_cache_.find(key);
    if (it == st_cache_.end()) it = st_cache_.emplace(key, weak_successors(sys_.st, y, l, budget_)).first;
    return it->second;
  }

  const std::vector<OpConfig>& op_weak(const OpConfig& x, const Label& l) {
    Value key = Value::tuple({sys_.op.summary(x).value, label_key(l), Value::integer(l.replica.index)});
    auto it = op_cache_.find(key);
    if (it == op_cache_.end()) it = op_cache_.emplace(key, weak_successors(sys_.op, x, l, budget_)).first;
    return it->second;
  }

  const PairedSystem& sys_;
  int budget_;
  std::size_t max_positions_;
  std::size_t positions_ = 0;
  std::unordered_map<Value, Entry, ValueHash> memo_;
  std::unordered_map<Value, std::vector<StConfig>, ValueHash> st_cache_;
  std::unordered_map<Value, std::vector<OpConfig>, ValueHash> op_cache_;
};

}  // namespace

GameResult find_distinguishing_play(const PairedSystem& sys, int max_depth, int tau_budget,
                                    std::size_t max_positions) {
  GameResult out;
  Game game(sys, tau_budget, max_positions);
  const OpConfig x = sys.op.init();
  const StConfig y = sys.st.init();
  try {
    for (int k = 1; k <= max_depth; ++k)
      if (game.dist(x, y, k)) {
        out.distinguished = true;
        out.depth = k;
        game.explain(x, y, k, out);
        break;
      }
  } catch (const BudgetExceeded&) {
    out.distinguished = false;
    out.play.clear();
    out.leaf.reset();
  }
  out.positions = game.positions();
  return out;
}

}  // namespace crdt
