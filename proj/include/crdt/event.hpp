#ifndef CRDT_EVENT_HPP
#define CRDT_EVENT_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "crdt/ids.hpp"
#include "crdt/value.hpp"

namespace crdt {

// An update operation such as "add 5" or "inc".
struct Operation {
  std::string name;
  std::vector<std::int64_t> args;

  std::string to_string() const;
  // Parses "name arg..." (whitespace separated, integer args).
  static Operation parse(const std::string& text);

  friend auto operator<=>(const Operation&, const Operation&) = default;
};

using Query = std::string;

namespace input {
struct None {
  friend bool operator==(const None&, const None&) = default;
};
struct Upd {
  Operation op;
  friend bool operator==(const Upd&, const Upd&) = default;
};
struct Qry {
  Query q;
  friend bool operator==(const Qry&, const Qry&) = default;
};
struct Dlvr {
  Message m;
  friend bool operator==(const Dlvr&, const Dlvr&) = default;
};
}  // namespace input

namespace output {
struct None {
  friend bool operator==(const None&, const None&) = default;
};
struct Ret {
  Value v;
  friend bool operator==(const Ret&, const Ret&) = default;
};
struct Send {
  Message m;
  friend bool operator==(const Send&, const Send&) = default;
};
}  // namespace output

using Input = std::variant<input::None, input::Upd, input::Qry, input::Dlvr>;
using Output = std::variant<output::None, output::Ret, output::Send>;

struct Event {
  ReplicaId replica;
  Input input;
  Output output;

  friend bool operator==(const Event&, const Event&) = default;
};

std::string to_string(const Event& e, const Roster& roster);

// Persistent append-only list; appending shares the prefix with the original.
class EventTrace {
 public:
  EventTrace() = default;

  EventTrace append(Event e) const;
  std::size_t size() const { return head_ ? head_->length : 0; }
  bool empty() const { return !head_; }
  // Materialized in program order.
  std::vector<Event> events() const;
  const Event& back() const { return head_->event; }

  template <typename F>
  void for_each_reverse(F&& f) const {
    for (const Node* n = head_.get(); n; n = n->parent.get()) f(n->event);
  }

  static EventTrace from(const std::vector<Event>& events);

 private:
  struct Node {
    Event event;
    std::shared_ptr<const Node> parent;
    std::size_t length;
  };
  std::shared_ptr<const Node> head_;
};

enum class LabelKind { Update, Query, Silent };
enum class SilentKind { Deliver, Send };

struct Label {
  LabelKind kind = LabelKind::Silent;
  ReplicaId replica;
  Operation op;     // Update
  Query query;      // Query
  Value value;      // Query result
  SilentKind silent = SilentKind::Deliver;

  static Label update(ReplicaId r, Operation op);
  static Label query_result(ReplicaId r, Query q, Value v);
  static Label tau(ReplicaId r, SilentKind k);

  bool is_tau() const { return kind == LabelKind::Silent; }
  std::string to_string(const Roster& roster) const;
};

// Observable equality: all silent labels are the same τ.
bool same_observable(const Label& a, const Label& b);

}  // namespace crdt

#endif  // CRDT_EVENT_HPP
