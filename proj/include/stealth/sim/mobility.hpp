#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "stealth/sim/rng.hpp"
#include "stealth/types.hpp"

namespace stealth::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Area {
  double width = 400.0;
  double height = 430.0;
  friend bool operator==(const Area&, const Area&) = default;
};

struct Snapshot {
  SimTime time{};
  std::vector<Vec2> position;        // indexed by node id
  std::vector<std::uint8_t> present;  // 0 when the node is absent

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

/// Time-ordered position snapshots. Positions hold from one snapshot until
/// the next (no interpolation).
struct MobilityTrace {
  Area area;
  SimTime snapshot_interval{};
  std::size_t node_count = 0;
  std::vector<Snapshot> snapshots;

  /// Index of the latest snapshot at or before t. Throws TimeOutOfRange when
  /// t precedes the first snapshot or lies past the last interval.
  std::size_t snapshot_index(SimTime t) const;
  SimTime end_time() const;

  friend bool operator==(const MobilityTrace&, const MobilityTrace&) = default;
};

/// CSV with header `t,node,x,y`. The snapshot interval is taken from the
/// first two distinct timestamps. Without an explicit area the bounding box
/// [0, max x] x [0, max y] is used. Throws ParseError, NonMonotonicTime,
/// OutOfBounds.
MobilityTrace parse_trace(std::istream& in, std::optional<Area> area = std::nullopt);
MobilityTrace load_trace(const std::filesystem::path& path,
                         std::optional<Area> area = std::nullopt);
/// Seconds with 3 decimals, metres with 2.
void write_trace(std::ostream& out, const MobilityTrace& trace);

/// Pins a node to a point at a given instant (used to stage encounters).
struct Rendezvous {
  NodeId node = 0;
  SimTime time{};
  Vec2 point;
};

struct SyntheticParams {
  std::size_t n_nodes = 100;
  Area area;
  double speed_min = 0.5;  // m/s
  double speed_max = 2.0;  // m/s
  SimTime duration = SimTime{900'000'000};
  SimTime snapshot_interval = SimTime{600'000};
  std::uint64_t seed = 1;
  std::vector<Rendezvous> rendezvous;
};

/// Random-waypoint walk: pick a uniform waypoint and a uniform speed, walk
/// there, repeat. Positions are evaluated at arbitrary elapsed times.
class RandomWaypointWalker {
 public:
  struct Leg {
    Vec2 from;
    Vec2 to;
    double speed = 0.0;
    double start = 0.0;  // elapsed seconds
    double end = 0.0;
  };

  RandomWaypointWalker(Vec2 start, const SyntheticParams& params, std::uint64_t seed);

  /// Position after `elapsed` seconds; elapsed must not decrease between calls.
  Vec2 position(double elapsed);
  const std::vector<Leg>& legs() const noexcept { return legs_; }

 private:
  void extend();

  Area area_;
  double speed_min_;
  double speed_max_;
  Rng rng_;
  std::vector<Leg> legs_;
  std::size_t cursor_ = 0;
};

/// Throws InvalidParams.
MobilityTrace generate_synthetic(const SyntheticParams& params);

}  // namespace stealth::sim
