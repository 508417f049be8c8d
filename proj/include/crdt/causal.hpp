#ifndef CRDT_CAUSAL_HPP
#define CRDT_CAUSAL_HPP

#include <vector>

#include "crdt/event.hpp"

namespace crdt {

// Sorted, duplicate-free.
using MessageSet = std::vector<Message>;

MessageSet make_message_set(std::vector<Message> ms);
bool contains(const MessageSet& s, const Message& m);
MessageSet message_set_union(const MessageSet& a, const MessageSet& b);
void insert(MessageSet& s, const Message& m);

bool happens_before(const Message& a, const Message& b);
bool concurrent(const Message& a, const Message& b);

struct BufferEntry {
  ReplicaId replica;
  Message message;
};

// Set of (destination, message). Op buffers key entries by message; state
// buffers key them by payload, so re-sending an identical state is a no-op.
class Buffer {
 public:
  enum class Key { Message, Payload };

  explicit Buffer(Key key = Key::Message) : key_(key) {}

  bool insert(ReplicaId r, const Message& m);
  bool erase(ReplicaId r, const Message& m);
  bool contains(ReplicaId r, const Message& m) const;
  bool contains_payload(ReplicaId r, const Value& payload) const;
  std::vector<Message> for_replica(ReplicaId r) const;
  const std::vector<BufferEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Key key() const { return key_; }

  friend bool operator==(const Buffer& a, const Buffer& b);

 private:
  int compare(const BufferEntry& e, ReplicaId r, const Message& m) const;
  std::size_t lower(ReplicaId r, const Message& m) const;

  Key key_;
  std::vector<BufferEntry> entries_;
};

// b ∪ {(r', m) | r' ≠ r}
Buffer bcast(ReplicaId r, const Message& m, Buffer b, const Roster& roster);

MessageSet sent(const EventTrace& t);
// Messages r delivered plus the messages r's own updates sent.
MessageSet delivered(ReplicaId r, const EventTrace& t);
// Throws std::logic_error when m was never sent.
MessageSet downset(const Message& m, const EventTrace& t);
MessageSet downset_in(const Message& m, const MessageSet& sent_msgs);
bool enabled(ReplicaId r, const Message& m, const EventTrace& t);
// Same decision from precomputed sent/delivered sets.
bool enabled_in(const Message& m, const MessageSet& sent_msgs, const MessageSet& delivered_at_r);
bool satisfies_causal_delivery(const EventTrace& t);

}  // namespace crdt

#endif  // CRDT_CAUSAL_HPP
