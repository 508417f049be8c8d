#ifndef CRDT_IDS_HPP
#define CRDT_IDS_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace crdt {

// Index into a fixed roster; roster order is the enumeration order everywhere.
struct ReplicaId {
  std::uint16_t index = 0;

  friend auto operator<=>(const ReplicaId&, const ReplicaId&) = default;
};

class Roster {
 public:
  Roster() = default;
  explicit Roster(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::string& name(ReplicaId r) const { return names_.at(r.index); }
  ReplicaId at(std::size_t i) const { return ReplicaId{static_cast<std::uint16_t>(i)}; }
  // Throws std::invalid_argument for unknown names.
  ReplicaId lookup(const std::string& name) const;
  std::vector<ReplicaId> ids() const;
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const Roster&, const Roster&) = default;

 private:
  std::vector<std::string> names_;
};

// Generic roster r1..rn.
Roster make_roster(std::size_t n);

struct MessageId {
  ReplicaId origin;
  std::uint32_t seq = 0;  // starts at 1 for real messages

  friend auto operator<=>(const MessageId&, const MessageId&) = default;
};

enum class ClockOrder { Equal, Less, Greater, Concurrent };

// Absent entries are 0; trailing zeros are trimmed so equality is structural.
class VectorClock {
 public:
  VectorClock() = default;

  std::uint32_t get(ReplicaId r) const {
    return r.index < entries_.size() ? entries_[r.index] : 0;
  }
  void set(ReplicaId r, std::uint32_t v);
  void tick(ReplicaId r) { set(r, get(r) + 1); }
  void merge(const VectorClock& other);
  bool empty() const { return entries_.empty(); }
  const std::vector<std::uint32_t>& raw() const { return entries_; }

  friend bool operator==(const VectorClock&, const VectorClock&) = default;
  friend auto operator<=>(const VectorClock&, const VectorClock&) = default;

 private:
  void trim();
  std::vector<std::uint32_t> entries_;
};

ClockOrder vc_compare(const VectorClock& a, const VectorClock& b);
VectorClock vc_join(const VectorClock& a, const VectorClock& b);

}  // namespace crdt

#endif  // CRDT_IDS_HPP
