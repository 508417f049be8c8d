#ifndef CRDT_OBJECTS_HPP
#define CRDT_OBJECTS_HPP

#include <functional>
#include <string>
#include <vector>

#include "crdt/event.hpp"

namespace crdt {

// Op-based object: prep runs at the source and yields a message payload;
// effect applies a payload to a state.
struct OpObject {
  std::string name;
  Value initial;
  std::function<Value(ReplicaId, const Operation&, const Value&)> prep;
  std::function<Value(const Value& payload, const Value& state)> effect;
  std::function<Value(const Query&, const Value&)> query;
};

// State-based object over a join-semilattice; update is inflationary.
struct StObject {
  std::string name;
  Value initial;
  std::function<Value(const Value&, const Value&)> join;
  std::function<Value(ReplicaId, const Operation&, const Value&)> update;
  std::function<Value(const Query&, const Value&)> query;
};

// a ⊑ b in the object's semilattice.
bool leq(const StObject& o, const Value& a, const Value& b);

// Operations and queries a scenario may exercise.
struct Universe {
  std::vector<Operation> ops;
  std::vector<Query> queries;
};

// Grow-only set of integers: "add k", query "sum" (sum of elements) or "size".
OpObject gset_op();
StObject gset_st();
// Grow-only counter: "inc", query "sum" (or "value").
StObject gcounter_st();

// Pairs every state with the set of operations it has seen; each operation
// is tagged (replica, per-replica counter, text) so repeats stay distinct.
// Queries return (value, history).
OpObject augment_history_op(const OpObject& o);
StObject augment_history_st(const StObject& o);

// Splits an augmented query result into (value, history).
std::pair<Value, Value> split_history_result(const Value& v);

// Lookup by scenario name; throws std::invalid_argument for unknown names.
OpObject make_op_object(const std::string& name);
StObject make_st_object(const std::string& name);
bool is_op_object_name(const std::string& name);
bool is_st_object_name(const std::string& name);

}  // namespace crdt

#endif  // CRDT_OBJECTS_HPP
