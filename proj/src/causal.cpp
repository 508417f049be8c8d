#include "crdt/causal.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace crdt {

MessageSet make_message_set(std::vector<Message> ms) {
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  return ms;
}

bool contains(const MessageSet& s, const Message& m) {
  return std::binary_search(s.begin(), s.end(), m);
}

MessageSet message_set_union(const MessageSet& a, const MessageSet& b) {
  MessageSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void insert(MessageSet& s, const Message& m) {
  auto it = std::lower_bound(s.begin(), s.end(), m);
  if (it == s.end() || !(*it == m)) s.insert(it, m);
}

bool happens_before(const Message& a, const Message& b) {
  return vc_compare(a.clock(), b.clock()) == ClockOrder::Less;
}

bool concurrent(const Message& a, const Message& b) {
  return !happens_before(a, b) && !happens_before(b, a);
}

int Buffer::compare(const BufferEntry& e, ReplicaId r, const Message& m) const {
  if (e.replica != r) return e.replica < r ? -1 : 1;
  std::strong_ordering c = key_ == Key::Message ? (e.message <=> m) : (e.message.payload() <=> m.payload());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::size_t Buffer::lower(ReplicaId r, const Message& m) const {
  std::size_t lo = 0, hi = entries_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (compare(entries_[mid], r, m) < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

bool Buffer::insert(ReplicaId r, const Message& m) {
  auto i = lower(r, m);
  if (i < entries_.size() && compare(entries_[i], r, m) == 0) return false;
  entries_.insert(entries_.begin() + static_cast<std::ptrdiff_t>(i), BufferEntry{r, m});
  return true;
}

bool Buffer::erase(ReplicaId r, const Message& m) {
  auto i = lower(r, m);
  if (i < entries_.size() && compare(entries_[i], r, m) == 0) {
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
    return true;
  }
  return false;
}

bool Buffer::contains(ReplicaId r, const Message& m) const {
  auto i = lower(r, m);
  return i < entries_.size() && compare(entries_[i], r, m) == 0;
}

bool Buffer::contains_payload(ReplicaId r, const Value& payload) const {
  for (const auto& e : entries_)
    if (e.replica == r && e.message.payload() == payload) return true;
  return false;
}

std::vector<Message> Buffer::for_replica(ReplicaId r) const {
  std::vector<Message> out;
  for (const auto& e : entries_)
    if (e.replica == r) out.push_back(e.message);
  return out;
}

bool operator==(const Buffer& a, const Buffer& b) {
  if (a.key_ != b.key_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i)
    if (a.compare(a.entries_[i], b.entries_[i].replica, b.entries_[i].message) != 0) return false;
  return true;
}

Buffer bcast(ReplicaId r, const Message& m, Buffer b, const Roster& roster) {
  for (auto dest : roster.ids())
    if (dest != r) b.insert(dest, m);
  return b;
}

MessageSet sent(const EventTrace& t) {
  std::vector<Message> out;
  t.for_each_reverse([&](const Event& e) {
    if (auto* s = std::get_if<output::Send>(&e.output)) out.push_back(s->m);
  });
  return make_message_set(std::move(out));
}

MessageSet delivered(ReplicaId r, const EventTrace& t) {
  std::vector<Message> out;
  t.for_each_reverse([&](const Event& e) {
    if (e.replica != r) return;
    if (auto* d = std::get_if<input::Dlvr>(&e.input)) out.push_back(d->m);
    if (std::holds_alternative<input::Upd>(e.input))
      if (auto* s = std::get_if<output::Send>(&e.output)) out.push_back(s->m);
  });
  return make_message_set(std::move(out));
}

MessageSet downset_in(const Message& m, const MessageSet& sent_msgs) {
  if (!contains(sent_msgs, m)) throw std::logic_error("downset of a message that was never sent");
  MessageSet out;
  for (const auto& x : sent_msgs)
    if (x == m || happens_before(x, m)) out.push_back(x);
  return out;
}

MessageSet downset(const Message& m, const EventTrace& t) { return downset_in(m, sent(t)); }

bool enabled_in(const Message& m, const MessageSet& sent_msgs, const MessageSet& delivered_at_r) {
  if (contains(delivered_at_r, m)) return false;
  for (const auto& x : sent_msgs)
    if (happens_before(x, m) && !contains(delivered_at_r, x)) return false;
  return true;
}

bool enabled(ReplicaId r, const Message& m, const EventTrace& t) {
  return enabled_in(m, sent(t), delivered(r, t));
}

bool satisfies_causal_delivery(const EventTrace& t) {
  std::map<ReplicaId, std::vector<Message>> per_replica;
  for (const auto& e : t.events())
    if (auto* d = std::get_if<input::Dlvr>(&e.input)) per_replica[e.replica].push_back(d->m);
  for (const auto& [r, ms] : per_replica)
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t j = i + 1; j < ms.size(); ++j)
        if (happens_before(ms[j], ms[i])) return false;
  return true;
}

}  // namespace crdt
