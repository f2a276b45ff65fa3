#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swarmevo/rng.hpp"

namespace swarmevo {

enum class Heading : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline Heading turn_left(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}
inline Heading turn_right(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}

char heading_char(Heading h);
bool heading_from_char(char c, Heading& out);

/// Grid pose. Coordinates are always reduced modulo the grid side; x grows
/// East, y grows South, so North is -y.
struct Pose {
  int x = 0;
  int y = 0;
  Heading heading = Heading::North;

  bool operator==(const Pose&) const = default;
};

enum class Motion : std::uint8_t { Move = 0, Turn = 1 };
enum class TurnDir : std::uint8_t { Left = 0, Right = 1 };

/// One agent action per time step: either advance one cell or rotate +-90 deg.
/// The turn direction is carried even when the motion selector says Move.
struct Action {
  Motion motion = Motion::Move;
  TurnDir dir = TurnDir::Right;

  bool operator==(const Action&) const = default;
};

inline constexpr int kSensorCount = 14;

/// Binary proximity snapshot over the 14 sensed cells; 1 = occupied by
/// another agent.
struct SensorReading {
  std::array<std::uint8_t, kSensorCount> values{};

  bool operator==(const SensorReading&) const = default;
};

/// Body-frame cell offsets of the 14 sensors, (forward, sideways-right)
/// pairs. The table is the single place the sensor geometry lives.
///
/// Index layout of standard14():
///   0..2   row one cell ahead    (0 = straight ahead)
///   3..5   row two cells ahead   (3 = straight ahead)
///   6,7    immediate left / right
///   8..10  row one cell behind   (8 = straight behind)
///   11..13 row two cells behind  (11 = straight behind)
///
/// Indices 0, 3, 8, 11 are fixed contract: the straight-ahead and
/// straight-behind cells at distances one and two.
struct SensorLayout {
  struct Offset {
    std::int8_t forward;
    std::int8_t side;
  };
  struct CellDelta {
    std::int8_t dx;
    std::int8_t dy;
  };

  std::array<Offset, kSensorCount> offsets;
  // offsets rotated into each of the four headings, filled by make()
  std::array<std::array<CellDelta, kSensorCount>, 4> rotated{};

  static SensorLayout make(const std::array<Offset, kSensorCount>& offsets);
  static const SensorLayout& standard14();
};

/// N agents with discrete poses on an LxL torus. A cell holds at most one
/// agent; the occupancy index is kept consistent with the pose list at all
/// times. Instances are value types and may move between threads, but a
/// single instance must not be mutated concurrently.
class TorusWorld {
 public:
  explicit TorusWorld(int side_length);

  /// Places n agents on distinct uniformly drawn cells with uniform headings.
  /// Throws std::invalid_argument if n exceeds the cell count.
  static TorusWorld place_agents_uniform(int side_length, int n, Rng& rng);

  static TorusWorld from_poses(int side_length, std::span<const Pose> poses);

  int side_length() const { return side_; }
  int agent_count() const { return static_cast<int>(poses_.size()); }
  const Pose& pose(int agent) const { return poses_[static_cast<std::size_t>(agent)]; }
  const std::vector<Pose>& poses() const { return poses_; }

  int wrap(int v) const {
    int m = v % side_;
    return m < 0 ? m + side_ : m;
  }

  /// Agent index occupying (x, y) after wrapping, or -1.
  int occupant(int x, int y) const { return grid_[cell_index(wrap(x), wrap(y))]; }
  bool occupied(int x, int y) const { return occupant(x, y) >= 0; }

  /// Reads the 14 binary sensors of one agent: element r is 1 iff the cell at
  /// layout offset r, rotated into the agent's heading and wrapped, holds
  /// another agent.
  SensorReading read_sensors(int agent, const SensorLayout& layout) const;

  /// Applies one action. Turns always succeed; a Move is blocked when the
  /// target cell is occupied. Returns whether the agent's pose changed.
  bool step_agent(int agent, Action action);

  /// Applies one action per agent sequentially in index order 0..N-1, so two
  /// agents contending for a cell resolve in favor of the lower index.
  void step_world(std::span<const Action> actions);

  void set_heading(int agent, Heading h) { poses_[static_cast<std::size_t>(agent)].heading = h; }

  /// Removes every agent whose cell lies in the inclusive rectangle
  /// [x0,x1]x[y0,y1]; remaining agents are reindexed in their prior order.
  /// Returns the number removed.
  int remove_agents_in_region(int x0, int y0, int x1, int y1);

  /// Moves every agent inside the rectangle to a uniformly drawn free cell
  /// outside it, keeping headings. Returns the number moved.
  int reposition_agents_in_region(int x0, int y0, int x1, int y1, Rng& rng);

  /// The world rotated a quarter turn clockwise: cells and headings together.
  TorusWorld rotated90() const;

  /// Text snapshot: side_length lines of side_length chars, '.' for empty
  /// and '^', '>', 'v', '<' for agents by heading. Row y is line y.
  std::string to_snapshot() const;
  static TorusWorld from_snapshot(const std::string& text);

  /// True when the occupancy index exactly mirrors the pose list.
  bool consistent() const;

  bool operator==(const TorusWorld& other) const {
    return side_ == other.side_ && poses_ == other.poses_;
  }

 private:
  std::size_t cell_index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(side_) +
           static_cast<std::size_t>(x);
  }
  void rebuild_grid();

  int side_;
  std::vector<Pose> poses_;
  std::vector<std::int32_t> grid_;  // agent index per cell, -1 when empty
};

/// Rotates a body-frame offset into the world frame for a heading and returns
/// the (dx, dy) displacement.
inline std::pair<int, int> rotate_offset(SensorLayout::Offset off, Heading h) {
  const int f = off.forward;
  const int s = off.side;
  switch (h) {
    case Heading::North: return {s, -f};
    case Heading::East: return {f, s};
    case Heading::South: return {-s, f};
    case Heading::West: return {-f, -s};
  }
  return {0, 0};
}

/// Each of the 14 values is flipped independently with probability p.
/// p = 0 is the identity and draws nothing from the stream.
SensorReading apply_noise(const SensorReading& reading, double p, Rng& rng);

}  // namespace swarmevo
