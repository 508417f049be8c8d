#include "crdt/value.hpp"

#include <algorithm>
#include <stdexcept>
#include <variant>

namespace crdt {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_clock(const VectorClock& c) {
  std::size_t h = 0x51ed27;
  for (auto e : c.raw()) h = mix(h, e);
  return h;
}

}  // namespace

struct Message::Data {
  MessageId id;
  VectorClock clock;
  Value payload;
  std::size_t hash;
};

Message::Message(MessageId id, VectorClock clock, Value payload) {
  std::size_t h = mix(mix(id.origin.index, id.seq), hash_clock(clock));
  h = mix(h, payload.hash());
  d_ = std::make_shared<const Data>(Data{id, std::move(clock), std::move(payload), h});
}

const MessageId& Message::id() const { return d_->id; }
const VectorClock& Message::clock() const { return d_->clock; }
const Value& Message::payload() const { return d_->payload; }
std::size_t Message::hash() const { return d_->hash; }

bool operator==(const Message& a, const Message& b) {
  if (a.d_ == b.d_) return true;
  return a.d_->hash == b.d_->hash && a.d_->id == b.d_->id && a.d_->clock == b.d_->clock &&
         a.d_->payload == b.d_->payload;
}

std::strong_ordering operator<=>(const Message& a, const Message& b) {
  if (a.d_ == b.d_) return std::strong_ordering::equal;
  if (auto c = a.d_->id <=> b.d_->id; c != 0) return c;
  if (auto c = a.d_->clock <=> b.d_->clock; c != 0) return c;
  return a.d_->payload <=> b.d_->payload;
}

struct Value::Node {
  Kind kind;
  std::size_t hash = 0;
  std::int64_t i = 0;
  std::string s;
  std::vector<Value> items;
  std::vector<std::pair<Value, Value>> entries;
  std::optional<Message> msg;
};

Value::Value() {
  static const Value zero = integer(0);
  node_ = zero.node_;
}

Value Value::integer(std::int64_t v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Int;
  n->i = v;
  n->hash = mix(1, std::hash<std::int64_t>{}(v));
  return Value(std::move(n));
}

Value Value::string(std::string s) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Str;
  n->hash = mix(2, std::hash<std::string>{}(s));
  n->s = std::move(s);
  return Value(std::move(n));
}

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Set;
  std::size_t h = 3;
  for (const auto& e : elems) h = mix(h, e.hash());
  n->hash = h;
  n->items = std::move(elems);
  return Value(std::move(n));
}

Value Value::tuple(std::vector<Value> elems) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Tuple;
  std::size_t h = 4;
  for (const auto& e : elems) h = mix(h, e.hash());
  n->hash = h;
  n->items = std::move(elems);
  return Value(std::move(n));
}

Value Value::map(std::vector<std::pair<Value, Value>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i - 1].first == entries[i].first)
      throw std::invalid_argument("duplicate map key " + entries[i].first.to_string());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Map;
  std::size_t h = 5;
  for (const auto& [k, v] : entries) h = mix(mix(h, k.hash()), v.hash());
  n->hash = h;
  n->entries = std::move(entries);
  return Value(std::move(n));
}

Value Value::message(Message m) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Msg;
  n->hash = mix(6, m.hash());
  n->msg = std::move(m);
  return Value(std::move(n));
}

Value::Kind Value::kind() const { return node_->kind; }

std::int64_t Value::as_int() const {
  if (node_->kind != Kind::Int) throw std::logic_error("value is not an integer: " + to_string());
  return node_->i;
}

const std::string& Value::as_string() const {
  if (node_->kind != Kind::Str) throw std::logic_error("value is not a string: " + to_string());
  return node_->s;
}

const std::vector<Value>& Value::items() const {
  if (node_->kind != Kind::Set && node_->kind != Kind::Tuple)
    throw std::logic_error("value has no items: " + to_string());
  return node_->items;
}

const std::vector<std::pair<Value, Value>>& Value::entries() const {
  if (node_->kind != Kind::Map) throw std::logic_error("value is not a map: " + to_string());
  return node_->entries;
}

const Message& Value::as_message() const {
  if (node_->kind != Kind::Msg) throw std::logic_error("value is not a message: " + to_string());
  return *node_->msg;
}

bool Value::contains(const Value& v) const {
  const auto& xs = items();
  return std::binary_search(xs.begin(), xs.end(), v);
}

std::optional<Value> Value::lookup(const Value& key) const {
  const auto& es = entries();
  auto it = std::lower_bound(es.begin(), es.end(), key,
                             [](const auto& e, const Value& k) { return e.first < k; });
  if (it != es.end() && it->first == key) return it->second;
  return std::nullopt;
}

std::size_t Value::size() const {
  switch (node_->kind) {
    case Kind::Set:
    case Kind::Tuple:
      return node_->items.size();
    case Kind::Map:
      return node_->entries.size();
    default:
      return 0;
  }
}

std::size_t Value::hash() const { return node_->hash; }

std::string Value::to_string() const {
  const auto join = [](const std::vector<Value>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += ", ";
      out += xs[i].to_string();
    }
    return out;
  };
  switch (node_->kind) {
    case Kind::Int:
      return std::to_string(node_->i);
    case Kind::Str:
      return node_->s;
    case Kind::Set:
      return "{" + join(node_->items) + "}";
    case Kind::Tuple:
      return "(" + join(node_->items) + ")";
    case Kind::Map: {
      std::string out = "[";
      for (std::size_t i = 0; i < node_->entries.size(); ++i) {
        if (i) out += ", ";
        out += node_->entries[i].first.to_string() + ":" + node_->entries[i].second.to_string();
      }
      return out + "]";
    }
    case Kind::Msg:
      return "m(" + node_->msg->payload().to_string() + ")";
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  using K = Value::Kind;
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return x.kind <=> y.kind;
  switch (x.kind) {
    case K::Int:
      return x.i <=> y.i;
    case K::Str:
      return x.s.compare(y.s) <=> 0;
    case K::Set:
    case K::Tuple:
      return std::lexicographical_compare_three_way(x.items.begin(), x.items.end(),
                                                    y.items.begin(), y.items.end());
    case K::Map:
      return std::lexicographical_compare_three_way(
          x.entries.begin(), x.entries.end(), y.entries.begin(), y.entries.end(),
          [](const auto& p, const auto& q) {
            if (auto c = p.first <=> q.first; c != 0) return c;
            return p.second <=> q.second;
          });
    case K::Msg:
      return *x.msg <=> *y.msg;
  }
  return std::strong_ordering::equal;
}

Value set_insert(const Value& s, const Value& v) {
  if (s.contains(v)) return s;
  auto xs = s.items();
  xs.insert(std::upper_bound(xs.begin(), xs.end(), v), v);
  return Value::set(std::move(xs));
}

Value set_union(const Value& a, const Value& b) {
  if (b.size() == 0 || a == b) return a;
  if (a.size() == 0) return b;
  std::vector<Value> out;
  std::set_union(a.items().begin(), a.items().end(), b.items().begin(), b.items().end(),
                 std::back_inserter(out));
  return Value::set(std::move(out));
}

Value set_difference(const Value& a, const Value& b) {
  std::vector<Value> out;
  std::set_difference(a.items().begin(), a.items().end(), b.items().begin(), b.items().end(),
                      std::back_inserter(out));
  return Value::set(std::move(out));
}

bool set_subset(const Value& a, const Value& b) {
  return std::includes(b.items().begin(), b.items().end(), a.items().begin(), a.items().end());
}

Value map_assign(const Value& m, const Value& key, const Value& v) {
  auto es = m.entries();
  auto it = std::lower_bound(es.begin(), es.end(), key,
                             [](const auto& e, const Value& k) { return e.first < k; });
  if (it != es.end() && it->first == key)
    it->second = v;
  else
    es.insert(it, {key, v});
  return Value::map(std::move(es));
}

namespace {

void put_varint(std::uint64_t x, std::string& out) {
  while (x >= 0x80) {
    out.push_back(static_cast<char>(x | 0x80));
    x >>= 7;
  }
  out.push_back(static_cast<char>(x));
}

}  // namespace

void encode(const Value& v, std::string& out) {
  out.push_back(static_cast<char>(v.kind()));
  switch (v.kind()) {
    case Value::Kind::Int: {
      const auto i = v.as_int();
      put_varint((static_cast<std::uint64_t>(i) << 1) ^ static_cast<std::uint64_t>(i >> 63), out);
      break;
    }
    case Value::Kind::Str:
      put_varint(v.as_string().size(), out);
      out += v.as_string();
      break;
    case Value::Kind::Set:
    case Value::Kind::Tuple:
      put_varint(v.items().size(), out);
      for (const auto& x : v.items()) encode(x, out);
      break;
    case Value::Kind::Map:
      put_varint(v.entries().size(), out);
      for (const auto& [k, x] : v.entries()) {
        encode(k, out);
        encode(x, out);
      }
      break;
    case Value::Kind::Msg: {
      const Message& m = v.as_message();
      put_varint(m.id().origin.index, out);
      put_varint(m.id().seq, out);
      put_varint(m.clock().raw().size(), out);
      for (auto e : m.clock().raw()) put_varint(e, out);
      encode(m.payload(), out);
      break;
    }
  }
}

std::string encode(const Value& v) {
  std::string out;
  encode(v, out);
  return out;
}

}  // namespace crdt
