#pragma once

// Per-snapshot unit-disk adjacency. This is the data-parallel kernel of the
// simulator: every snapshot is independent, so the OpenMP build splits the
// snapshot range across threads. build_contacts_serial() is the plain
// reference kept for tests and benchmarks.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "stealth/sim/mobility.hpp"

namespace stealth::sim {

class ContactTable {
 public:
  ContactTable() = default;

  std::size_t snapshot_count() const noexcept { return snapshot_base_.empty() ? 0 : snapshot_base_.size() - 1; }
  std::size_t node_count() const noexcept { return node_count_; }

  /// Sorted neighbor ids of `node` in snapshot `snap` (never includes node).
  std::span<const NodeId> neighbors(std::size_t snap, NodeId node) const;
  std::size_t degree(std::size_t snap, NodeId node) const { return neighbors(snap, node).size(); }
  bool adjacent(std::size_t snap, NodeId a, NodeId b) const;

  friend bool operator==(const ContactTable&, const ContactTable&) = default;

 private:
  friend ContactTable build_contacts(const MobilityTrace&, double);
  friend ContactTable build_contacts_serial(const MobilityTrace&, double);

  std::size_t node_count_ = 0;
  // offsets_[snap * (node_count_ + 1) + i] indexes into adjacency_ relative to
  // snapshot_base_[snap].
  std::vector<std::size_t> snapshot_base_;
  std::vector<std::uint32_t> offsets_;
  std::vector<NodeId> adjacency_;
};

ContactTable build_contacts(const MobilityTrace& trace, double radius);
ContactTable build_contacts_serial(const MobilityTrace& trace, double radius);

/// Unordered pairs (a < b) in range at the snapshot holding at time t.
/// Throws TimeOutOfRange.
std::vector<std::pair<NodeId, NodeId>> neighbors_at(const MobilityTrace& trace, SimTime t,
                                                    double radius);

}  // namespace stealth::sim
