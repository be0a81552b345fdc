#include "stealth/sim/contacts.hpp"

#include <algorithm>
#include <cmath>

#include "stealth/sim/radio.hpp"

namespace stealth::sim {
namespace {

struct SnapshotAdjacency {
  std::vector<std::uint32_t> offsets;  // node_count + 1
  std::vector<NodeId> adjacency;
};

// All-pairs scan. Reference path.
SnapshotAdjacency scan_all_pairs(const Snapshot& s, std::size_t n, double radius) {
  SnapshotAdjacency out;
  out.offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    out.offsets[i] = static_cast<std::uint32_t>(out.adjacency.size());
    if (!s.present[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !s.present[j]) continue;
      if (within_range(s.position[i], s.position[j], radius)) {
        out.adjacency.push_back(static_cast<NodeId>(j));
      }
    }
  }
  out.offsets[n] = static_cast<std::uint32_t>(out.adjacency.size());
  return out;
}

// Uniform grid with radius-sized cells: candidates come from the 3x3 block
// around each node's cell.
SnapshotAdjacency scan_grid(const Snapshot& s, std::size_t n, double radius, const Area& area) {
  SnapshotAdjacency out;
  out.offsets.assign(n + 1, 0);
  if (!(radius > 0.0)) return out;

  double max_x = area.width;
  double max_y = area.height;
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.present[i]) continue;
    max_x = std::max(max_x, s.position[i].x);
    max_y = std::max(max_y, s.position[i].y);
  }
  const auto cols = static_cast<std::size_t>(std::floor(max_x / radius)) + 1;
  const auto rows = static_cast<std::size_t>(std::floor(max_y / radius)) + 1;
  auto cell_of = [&](Vec2 p) {
    const auto cx = std::min(cols - 1, static_cast<std::size_t>(std::max(0.0, p.x) / radius));
    const auto cy = std::min(rows - 1, static_cast<std::size_t>(std::max(0.0, p.y) / radius));
    return std::pair{cx, cy};
  };

  // Counting sort of nodes into cells.
  std::vector<std::uint32_t> cell_start(cols * rows + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.present[i]) continue;
    auto [cx, cy] = cell_of(s.position[i]);
    ++cell_start[cy * cols + cx + 1];
  }
  for (std::size_t c = 1; c < cell_start.size(); ++c) cell_start[c] += cell_start[c - 1];
  std::vector<NodeId> members(cell_start.back());
  std::vector<std::uint32_t> fill(cell_start.begin(), cell_start.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.present[i]) continue;
    auto [cx, cy] = cell_of(s.position[i]);
    members[fill[cy * cols + cx]++] = static_cast<NodeId>(i);
  }

  std::vector<NodeId> local;
  for (std::size_t i = 0; i < n; ++i) {
    out.offsets[i] = static_cast<std::uint32_t>(out.adjacency.size());
    if (!s.present[i]) continue;
    local.clear();
    auto [cx, cy] = cell_of(s.position[i]);
    for (std::size_t y = cy ? cy - 1 : 0; y <= std::min(rows - 1, cy + 1); ++y) {
      for (std::size_t x = cx ? cx - 1 : 0; x <= std::min(cols - 1, cx + 1); ++x) {
        const auto c = y * cols + x;
        for (auto k = cell_start[c]; k < cell_start[c + 1]; ++k) {
          const NodeId j = members[k];
          if (j != i && within_range(s.position[i], s.position[j], radius)) local.push_back(j);
        }
      }
    }
    std::sort(local.begin(), local.end());
    out.adjacency.insert(out.adjacency.end(), local.begin(), local.end());
  }
  out.offsets[n] = static_cast<std::uint32_t>(out.adjacency.size());
  return out;
}

}  // namespace

std::span<const NodeId> ContactTable::neighbors(std::size_t snap, NodeId node) const {
  if (snap >= snapshot_count() || node >= node_count_) return {};
  const auto* off = &offsets_[snap * (node_count_ + 1)];
  const auto base = snapshot_base_[snap];
  return {adjacency_.data() + base + off[node], off[node + 1] - off[node]};
}

bool ContactTable::adjacent(std::size_t snap, NodeId a, NodeId b) const {
  auto list = neighbors(snap, a);
  return std::binary_search(list.begin(), list.end(), b);
}

ContactTable build_contacts_serial(const MobilityTrace& trace, double radius) {
  ContactTable table;
  const auto n = trace.node_count;
  table.node_count_ = n;
  table.snapshot_base_.push_back(0);
  for (const auto& s : trace.snapshots) {
    auto adj = scan_all_pairs(s, n, radius);
    table.offsets_.insert(table.offsets_.end(), adj.offsets.begin(), adj.offsets.end());
    table.adjacency_.insert(table.adjacency_.end(), adj.adjacency.begin(), adj.adjacency.end());
    table.snapshot_base_.push_back(table.adjacency_.size());
  }
  return table;
}

ContactTable build_contacts(const MobilityTrace& trace, double radius) {
  const auto n = trace.node_count;
  const auto snaps = static_cast<std::ptrdiff_t>(trace.snapshots.size());
  std::vector<SnapshotAdjacency> per(trace.snapshots.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < snaps; ++k) {
    per[k] = scan_grid(trace.snapshots[k], n, radius, trace.area);
  }

  ContactTable table;
  table.node_count_ = n;
  table.snapshot_base_.assign(per.size() + 1, 0);
  for (std::size_t k = 0; k < per.size(); ++k) {
    table.snapshot_base_[k + 1] = table.snapshot_base_[k] + per[k].adjacency.size();
  }
  table.offsets_.resize(per.size() * (n + 1));
  table.adjacency_.resize(table.snapshot_base_.back());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < snaps; ++k) {
    std::copy(per[k].offsets.begin(), per[k].offsets.end(), table.offsets_.begin() + k * (n + 1));
    std::copy(per[k].adjacency.begin(), per[k].adjacency.end(),
              table.adjacency_.begin() + static_cast<std::ptrdiff_t>(table.snapshot_base_[k]));
  }
  return table;
}

std::vector<std::pair<NodeId, NodeId>> neighbors_at(const MobilityTrace& trace, SimTime t,
                                                    double radius) {
  const auto& s = trace.snapshots[trace.snapshot_index(t)];
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId a = 0; a < trace.node_count; ++a) {
    if (!s.present[a]) continue;
    for (NodeId b = a + 1; b < trace.node_count; ++b) {
      if (s.present[b] && within_range(s.position[a], s.position[b], radius)) pairs.emplace_back(a, b);
    }
  }
  return pairs;
}

}  // namespace stealth::sim
