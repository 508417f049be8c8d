#ifndef CRDT_VALUE_HPP
#define CRDT_VALUE_HPP

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crdt/ids.hpp"

namespace crdt {

class Value;

// Immutable, shared. Ordering and equality are structural (id, clock, payload);
// within one execution ids are unique, so this coincides with id equality.
class Message {
 public:
  Message(MessageId id, VectorClock clock, Value payload);

  const MessageId& id() const;
  const VectorClock& clock() const;
  const Value& payload() const;
  std::size_t hash() const;

  friend bool operator==(const Message& a, const Message& b);
  friend std::strong_ordering operator<=>(const Message& a, const Message& b);

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
};

// Recursive immutable value used for replica states, message payloads and
// query results. Sets and maps are kept sorted; hashes are cached.
class Value {
 public:
  enum class Kind : std::uint8_t { Int, Str, Set, Map, Tuple, Msg };

  Value();  // Int 0
  static Value integer(std::int64_t v);
  static Value string(std::string s);
  static Value set(std::vector<Value> elems);
  static Value tuple(std::vector<Value> elems);
  // Duplicate keys are rejected.
  static Value map(std::vector<std::pair<Value, Value>> entries);
  static Value message(Message m);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  std::int64_t as_int() const;
  const std::string& as_string() const;
  const std::vector<Value>& items() const;  // Set or Tuple
  const std::vector<std::pair<Value, Value>>& entries() const;
  const Message& as_message() const;

  bool contains(const Value& v) const;  // Set membership
  std::optional<Value> lookup(const Value& key) const;  // Map lookup
  std::size_t size() const;
  std::size_t hash() const;
  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  struct Node;
  explicit Value(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Value set_insert(const Value& s, const Value& v);
Value set_union(const Value& a, const Value& b);
Value set_difference(const Value& a, const Value& b);
bool set_subset(const Value& a, const Value& b);
Value map_assign(const Value& m, const Value& key, const Value& v);

// Compact injective byte encoding; used as an exact visited-set key.
void encode(const Value& v, std::string& out);
std::string encode(const Value& v);

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

}  // namespace crdt

#endif  // CRDT_VALUE_HPP
