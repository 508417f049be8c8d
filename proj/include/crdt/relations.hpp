#ifndef CRDT_RELATIONS_HPP
#define CRDT_RELATIONS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crdt/emulation.hpp"
#include "crdt/op_semantics.hpp"
#include "crdt/st_semantics.hpp"

namespace crdt {

enum class Direction { OpToSt, StToOp };
enum class RelationId { R1, R2, Q1, Q2, Bowtie };

// A host system and its emulated guest over one roster and universe. In
// OpToSt the op side is the host; in StToOp the state side is.
struct PairedSystem {
  Direction direction;
  OpSystem op;
  StSystem st;
  std::shared_ptr<const Interpreter> interp;  // OpToSt only

  const Roster& roster() const { return op.roster(); }
  int default_tau_budget() const { return 2 * static_cast<int>(roster().size()); }
};

struct PairOptions {
  Limits limits;
  Discipline discipline = Discipline::Causal;
  BroadcastMode mode = BroadcastMode::SeparateSend;
  bool constant_query_guest = false;  // fault injection
};

PairedSystem make_op_to_st(const Roster& roster, const OpObject& host, const Universe& u,
                           const PairOptions& opts = {});
PairedSystem make_st_to_op(const Roster& roster, const StObject& host, const Universe& u,
                           const PairOptions& opts = {});

struct RelationCheck {
  bool holds = true;
  std::string clause;  // first failing clause
  std::string detail;

  explicit operator bool() const { return holds; }
};

RelationCheck in_relation(const PairedSystem& sys, RelationId rel, const OpConfig& op,
                          const StConfig& st);
// Clauses exactly as first stated, kept to document why the checked forms differ.
RelationCheck relation_literal(const PairedSystem& sys, RelationId rel, const OpConfig& op,
                               const StConfig& st);

// Linearization of u delivering each message at r while enabled; nullopt if none.
std::optional<std::vector<Message>> deliverable_check(const MessageSet& u, ReplicaId r,
                                                      const EventTrace& t, const Buffer& b);
std::optional<std::vector<Message>> deliverable_check(const MessageSet& u, ReplicaId r,
                                                      const OpConfig& c);
bool mergeable_check(const std::vector<Value>& states, ReplicaId r, const Buffer& b);

// Smallest C among r's buffered op payloads with s_r ⊔ ⊔C = target; nullopt if none.
std::optional<std::vector<Message>> find_mergeable(const StObject& o, const OpConfig& op,
                                                   ReplicaId r, const Value& target);

std::string to_string(RelationId rel);
RelationId relation_from_string(const std::string& s);

}  // namespace crdt

#endif  // CRDT_RELATIONS_HPP
