#ifndef CRDT_EMULATION_HPP
#define CRDT_EMULATION_HPP

#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "crdt/causal.hpp"
#include "crdt/objects.hpp"

namespace crdt {

// Members of h with no ≺-successor in h.
MessageSet max_set(const MessageSet& h);

Value message_set_value(const MessageSet& h);
MessageSet as_message_set(const Value& h);

// Folds a message set into an op-based state by repeatedly peeling the
// maximal message with the smallest (origin, seq). Results are memoized per
// message set; the cache tolerates concurrent readers and duplicate fills.
class Interpreter {
 public:
  explicit Interpreter(OpObject object) : object_(std::move(object)) {}

  Value operator()(const Value& h) const;
  Value operator()(const MessageSet& h) const { return (*this)(message_set_value(h)); }
  const OpObject& object() const { return object_; }
  std::size_t cache_size() const;

 private:
  OpObject object_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<Value, Value, ValueHash> memo_;
};

// Uncached interpretation.
Value interp(const MessageSet& h, const OpObject& o);

struct LinearizationReport {
  std::size_t extensions = 0;
  std::vector<Value> results;  // distinct results, sorted
};

// Applies effects along every linear extension of ≺ restricted to h.
LinearizationReport interp_all_linearizations(const MessageSet& h, const OpObject& o);

// Mints the message replica r would send next given its delivered set h:
// clock is the join of h's clocks with r's entry ticked, seq is that entry.
Message mint_message(ReplicaId r, const MessageSet& h, Value payload);

// State-based guest of an op-based host: states are message sets, the join is
// union, and queries interpret the set.
StObject op_to_st(const OpObject& host);
StObject op_to_st(std::shared_ptr<const Interpreter> interp);

// Op-based guest of a state-based host: messages carry whole states and
// effect is the join.
OpObject st_to_op(const StObject& host);

// Fault injection for negative tests: every query answers v.
StObject with_constant_query(StObject o, Value v);
OpObject with_constant_query(OpObject o, Value v);

}  // namespace crdt

#endif  // CRDT_EMULATION_HPP
