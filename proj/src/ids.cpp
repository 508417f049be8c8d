#include "crdt/ids.hpp"

#include <algorithm>
#include <stdexcept>

namespace crdt {

Roster::Roster(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j])
        throw std::invalid_argument("duplicate replica name: " + names_[i]);
}

ReplicaId Roster::lookup(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::invalid_argument("unknown replica: " + name);
  return at(static_cast<std::size_t>(it - names_.begin()));
}

std::vector<ReplicaId> Roster::ids() const {
  std::vector<ReplicaId> out;
  out.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) out.push_back(at(i));
  return out;
}

Roster make_roster(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("r" + std::to_string(i));
  return Roster(std::move(names));
}

void VectorClock::set(ReplicaId r, std::uint32_t v) {
  if (r.index >= entries_.size()) {
    if (v == 0) return;
    entries_.resize(r.index + 1u, 0);
  }
  entries_[r.index] = v;
  trim();
}

void VectorClock::merge(const VectorClock& other) {
  if (other.entries_.size() > entries_.size()) entries_.resize(other.entries_.size(), 0);
  for (std::size_t i = 0; i < other.entries_.size(); ++i)
    entries_[i] = std::max(entries_[i], other.entries_[i]);
}

void VectorClock::trim() {
  while (!entries_.empty() && entries_.back() == 0) entries_.pop_back();
}

ClockOrder vc_compare(const VectorClock& a, const VectorClock& b) {
  bool a_le_b = true;
  bool b_le_a = true;
  const std::size_t n = std::max(a.raw().size(), b.raw().size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = ReplicaId{static_cast<std::uint16_t>(i)};
    const auto x = a.get(r);
    const auto y = b.get(r);
    if (x > y) a_le_b = false;
    if (y > x) b_le_a = false;
  }
  if (a_le_b && b_le_a) return ClockOrder::Equal;
  if (a_le_b) return ClockOrder::Less;
  if (b_le_a) return ClockOrder::Greater;
  return ClockOrder::Concurrent;
}

VectorClock vc_join(const VectorClock& a, const VectorClock& b) {
  VectorClock out = a;
  out.merge(b);
  return out;
}

}  // namespace crdt
