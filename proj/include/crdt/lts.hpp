#ifndef CRDT_LTS_HPP
#define CRDT_LTS_HPP

#include <vector>

#include "crdt/event.hpp"

namespace crdt {

template <typename Config>
struct Step {
  Label label;
  Config target;
};

// Per-replica update budget of a bounded scenario.
struct Limits {
  int updates_per_replica = -1;     // negative: unlimited
  std::vector<int> per_replica;     // overrides by roster index; negative entries fall back
  bool unique_ops = false;          // each operation at most once per execution

  int cap(ReplicaId r) const {
    if (r.index < per_replica.size() && per_replica[r.index] >= 0) return per_replica[r.index];
    return updates_per_replica;
  }
};

// Quotient of a configuration used for search pruning; equal summaries have
// equal successor structure.
struct Summary {
  Value value;
  std::size_t hash() const { return value.hash(); }
  friend bool operator==(const Summary&, const Summary&) = default;
};

struct SummaryHash {
  std::size_t operator()(const Summary& s) const { return s.hash(); }
};

}  // namespace crdt

#endif  // CRDT_LTS_HPP
