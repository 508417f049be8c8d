#ifndef CRDT_ST_SEMANTICS_HPP
#define CRDT_ST_SEMANTICS_HPP

#include <optional>
#include <vector>

#include "crdt/causal.hpp"
#include "crdt/lts.hpp"
#include "crdt/objects.hpp"

namespace crdt {

// SeparateSend: updates are local and any replica may broadcast its state at
// any time. AtomicBroadcast: every update broadcasts the new state in the same
// step and there is no separate send.
enum class BroadcastMode { SeparateSend, AtomicBroadcast };

struct StConfig {
  EventTrace trace;
  std::vector<Value> states;
  Buffer buffer{Buffer::Key::Payload};  // payloads are states
  std::vector<VectorClock> clocks;
  std::vector<std::uint32_t> seqs;  // sends per replica

  // Caches of quantities derivable from trace.
  std::vector<std::uint32_t> updates;
  std::vector<Value> delivered;  // per replica: set of delivered states
  Value sent = Value::set({});   // set of sent states
  std::vector<Operation> used_ops;
};

class StSystem {
 public:
  StSystem(Roster roster, StObject object, Universe universe, Limits limits = {},
           BroadcastMode mode = BroadcastMode::SeparateSend);

  StConfig init() const;
  // Order: updates, queries, sends, deliveries.
  std::vector<Step<StConfig>> successors(const StConfig& c) const;

  // The mode's update rule (local update, or update plus broadcast).
  std::optional<StConfig> update(const StConfig& c, ReplicaId r, const Operation& op,
                                 bool respect_limits = true) const;
  // Unavailable in AtomicBroadcast mode.
  std::optional<StConfig> send(const StConfig& c, ReplicaId r) const;
  std::optional<StConfig> deliver(const StConfig& c, ReplicaId r, const Value& state) const;
  StConfig query(const StConfig& c, ReplicaId r, const Query& q) const;
  Value query_value(const StConfig& c, ReplicaId r, const Query& q) const;
  bool can_deliver(const StConfig& c, ReplicaId r, const Value& state) const;
  // Whether r has already merged exactly this state via a delivery.
  bool has_delivered(const StConfig& c, ReplicaId r, const Value& state) const;

  Summary summary(const StConfig& c) const;

  const Roster& roster() const { return roster_; }
  const StObject& object() const { return object_; }
  const Universe& universe() const { return universe_; }
  const Limits& limits() const { return limits_; }
  BroadcastMode mode() const { return mode_; }

 private:
  StConfig broadcast(StConfig c, ReplicaId r, const Input& in) const;

  Roster roster_;
  StObject object_;
  Universe universe_;
  Limits limits_;
  BroadcastMode mode_;
};

}  // namespace crdt

#endif  // CRDT_ST_SEMANTICS_HPP
