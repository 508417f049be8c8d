#ifndef CRDT_OP_SEMANTICS_HPP
#define CRDT_OP_SEMANTICS_HPP

#include <optional>
#include <vector>

#include "crdt/causal.hpp"
#include "crdt/lts.hpp"
#include "crdt/objects.hpp"

namespace crdt {

enum class Discipline { Causal, ReliableOnly };

struct OpConfig {
  EventTrace trace;
  std::vector<Value> states;
  Buffer buffer{Buffer::Key::Message};
  std::vector<VectorClock> clocks;
  std::vector<std::uint32_t> seqs;

  // Caches of quantities derivable from trace.
  MessageSet sent;
  std::vector<MessageSet> delivered;
  std::vector<Operation> used_ops;  // sorted
};

class OpSystem {
 public:
  OpSystem(Roster roster, OpObject object, Universe universe, Limits limits = {},
           Discipline discipline = Discipline::Causal);

  // Throws std::invalid_argument for an empty roster.
  OpConfig init() const;
  // Order: updates, queries, deliveries; replica-major, then universe / (origin, seq) order.
  std::vector<Step<OpConfig>> successors(const OpConfig& c) const;

  // Single rule instances. update/deliver return nullopt when the premise fails.
  std::optional<OpConfig> update(const OpConfig& c, ReplicaId r, const Operation& op,
                                 bool respect_limits = true) const;
  std::optional<OpConfig> deliver(const OpConfig& c, ReplicaId r, const Message& m) const;
  OpConfig query(const OpConfig& c, ReplicaId r, const Query& q) const;
  Value query_value(const OpConfig& c, ReplicaId r, const Query& q) const;
  bool can_deliver(const OpConfig& c, ReplicaId r, const Message& m) const;

  Summary summary(const OpConfig& c) const;

  const Roster& roster() const { return roster_; }
  const OpObject& object() const { return object_; }
  const Universe& universe() const { return universe_; }
  const Limits& limits() const { return limits_; }
  Discipline discipline() const { return discipline_; }

 private:
  Roster roster_;
  OpObject object_;
  Universe universe_;
  Limits limits_;
  Discipline discipline_;
};

struct CommutationViolation {
  std::size_t config_index;
  ReplicaId replica;
  Message first;
  Message second;
};

// For every configuration, replica r and pair of concurrent messages pending
// at r, applying their effects to r's state in either order agrees.
std::optional<CommutationViolation> check_concurrent_commutation(const OpObject& o,
                                                                 const std::vector<OpConfig>& cfgs);
std::optional<CommutationViolation> check_concurrent_commutation(const OpObject& o, const OpConfig& c);

}  // namespace crdt

#endif  // CRDT_OP_SEMANTICS_HPP
