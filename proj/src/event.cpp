#include "crdt/event.hpp"

#include <sstream>
#include <stdexcept>

namespace crdt {

std::string Operation::to_string() const {
  std::string out = name;
  for (auto a : args) out += " " + std::to_string(a);
  return out;
}

Operation Operation::parse(const std::string& text) {
  std::istringstream in(text);
  Operation op;
  if (!(in >> op.name)) throw std::invalid_argument("empty operation");
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw std::invalid_argument("bad operation argument: " + tok);
    op.args.push_back(v);
  }
  return op;
}

std::string to_string(const Event& e, const Roster& roster) {
  std::string in = std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, input::None>) return "_";
        if constexpr (std::is_same_v<T, input::Upd>) return "upd[" + x.op.to_string() + "]";
        if constexpr (std::is_same_v<T, input::Qry>) return "qry[" + x.q + "]";
        if constexpr (std::is_same_v<T, input::Dlvr>) return "dlvr[" + x.m.payload().to_string() + "]";
      },
      e.input);
  std::string out = std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, output::None>) return "_";
        if constexpr (std::is_same_v<T, output::Ret>) return "ret[" + x.v.to_string() + "]";
        if constexpr (std::is_same_v<T, output::Send>) return "send[" + x.m.payload().to_string() + "]";
      },
      e.output);
  return "(" + roster.name(e.replica) + ", " + in + ", " + out + ")";
}

EventTrace EventTrace::append(Event e) const {
  EventTrace t;
  t.head_ = std::make_shared<const Node>(Node{std::move(e), head_, size() + 1});
  return t;
}

std::vector<Event> EventTrace::events() const {
  std::vector<Event> out;
  out.reserve(size());
  for_each_reverse([&](const Event& e) { out.push_back(e); });
  return {out.rbegin(), out.rend()};
}

EventTrace EventTrace::from(const std::vector<Event>& events) {
  EventTrace t;
  for (const auto& e : events) t = t.append(e);
  return t;
}

Label Label::update(ReplicaId r, Operation op) {
  Label l;
  l.kind = LabelKind::Update;
  l.replica = r;
  l.op = std::move(op);
  return l;
}

Label Label::query_result(ReplicaId r, Query q, Value v) {
  Label l;
  l.kind = LabelKind::Query;
  l.replica = r;
  l.query = std::move(q);
  l.value = std::move(v);
  return l;
}

Label Label::tau(ReplicaId r, SilentKind k) {
  Label l;
  l.kind = LabelKind::Silent;
  l.replica = r;
  l.silent = k;
  return l;
}

std::string Label::to_string(const Roster& roster) const {
  switch (kind) {
    case LabelKind::Update:
      return "upd(" + roster.name(replica) + ", " + op.to_string() + ")";
    case LabelKind::Query:
      return "qry(" + roster.name(replica) + ", " + query + ") = " + value.to_string();
    case LabelKind::Silent:
      return std::string("tau(") + (silent == SilentKind::Deliver ? "dlvr" : "send") + "@" +
             roster.name(replica) + ")";
  }
  return "?";
}

bool same_observable(const Label& a, const Label& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case LabelKind::Silent:
      return true;
    case LabelKind::Update:
      return a.replica == b.replica && a.op == b.op;
    case LabelKind::Query:
      return a.replica == b.replica && a.query == b.query && a.value == b.value;
  }
  return false;
}

}  // namespace crdt
