#include "swarmevo/torus_world.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace swarmevo {

char heading_char(Heading h) {
  switch (h) {
    case Heading::North: return '^';
    case Heading::East: return '>';
    case Heading::South: return 'v';
    case Heading::West: return '<';
  }
  return '?';
}

bool heading_from_char(char c, Heading& out) {
  switch (c) {
    case '^': out = Heading::North; return true;
    case '>': out = Heading::East; return true;
    case 'v': out = Heading::South; return true;
    case '<': out = Heading::West; return true;
    default: return false;
  }
}

SensorLayout SensorLayout::make(const std::array<Offset, kSensorCount>& offsets) {
  SensorLayout layout;
  layout.offsets = offsets;
  for (int h = 0; h < 4; ++h) {
    for (int r = 0; r < kSensorCount; ++r) {
      const auto [dx, dy] =
          rotate_offset(offsets[static_cast<std::size_t>(r)], static_cast<Heading>(h));
      layout.rotated[static_cast<std::size_t>(h)][static_cast<std::size_t>(r)] = {
          static_cast<std::int8_t>(dx), static_cast<std::int8_t>(dy)};
    }
  }
  return layout;
}

const SensorLayout& SensorLayout::standard14() {
  static const SensorLayout layout = SensorLayout::make({{
      {1, 0},    // 0: ahead, distance 1
      {1, -1},   // 1: ahead-left
      {1, 1},    // 2: ahead-right
      {2, 0},    // 3: ahead, distance 2
      {2, -1},   // 4
      {2, 1},    // 5
      {0, -1},   // 6: immediate left
      {0, 1},    // 7: immediate right
      {-1, 0},   // 8: behind, distance 1
      {-1, -1},  // 9
      {-1, 1},   // 10
      {-2, 0},   // 11: behind, distance 2
      {-2, -1},  // 12
      {-2, 1},   // 13
  }});
  return layout;
}

TorusWorld::TorusWorld(int side_length) : side_(side_length) {
  if (side_length < 1) throw std::invalid_argument("grid side length must be >= 1");
  grid_.assign(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_), -1);
}

TorusWorld TorusWorld::place_agents_uniform(int side_length, int n, Rng& rng) {
  TorusWorld world(side_length);
  const int cells = side_length * side_length;
  if (n > cells) {
    throw std::invalid_argument("cannot place " + std::to_string(n) + " agents on " +
                                std::to_string(cells) + " cells");
  }
  // Partial Fisher-Yates over the cell indices gives distinct uniform cells
  // in O(n) regardless of density.
  std::vector<int> cells_left(static_cast<std::size_t>(cells));
  std::iota(cells_left.begin(), cells_left.end(), 0);
  world.poses_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int j = i + rng.below_int(cells - i);
    std::swap(cells_left[static_cast<std::size_t>(i)], cells_left[static_cast<std::size_t>(j)]);
    const int cell = cells_left[static_cast<std::size_t>(i)];
    Pose pose;
    pose.x = cell % side_length;
    pose.y = cell / side_length;
    pose.heading = static_cast<Heading>(rng.below_int(4));
    world.poses_.push_back(pose);
  }
  world.rebuild_grid();
  return world;
}

TorusWorld TorusWorld::from_poses(int side_length, std::span<const Pose> poses) {
  TorusWorld world(side_length);
  world.poses_.reserve(poses.size());
  for (Pose p : poses) {
    p.x = world.wrap(p.x);
    p.y = world.wrap(p.y);
    world.poses_.push_back(p);
  }
  world.rebuild_grid();
  return world;
}

void TorusWorld::rebuild_grid() {
  std::fill(grid_.begin(), grid_.end(), -1);
  for (std::size_t i = 0; i < poses_.size(); ++i) {
    const Pose& p = poses_[i];
    auto& cell = grid_[cell_index(p.x, p.y)];
    if (cell >= 0) throw std::invalid_argument("two agents share a cell");
    cell = static_cast<std::int32_t>(i);
  }
}

SensorReading TorusWorld::read_sensors(int agent, const SensorLayout& layout) const {
  const Pose& p = poses_[static_cast<std::size_t>(agent)];
  const auto& deltas = layout.rotated[static_cast<std::size_t>(p.heading)];
  SensorReading reading;
  if (side_ > 4) {  // sensor offsets reach at most two cells, one wrap fix suffices
    for (int r = 0; r < kSensorCount; ++r) {
      int x = p.x + deltas[static_cast<std::size_t>(r)].dx;
      int y = p.y + deltas[static_cast<std::size_t>(r)].dy;
      if (x < 0) x += side_;
      else if (x >= side_) x -= side_;
      if (y < 0) y += side_;
      else if (y >= side_) y -= side_;
      reading.values[static_cast<std::size_t>(r)] =
          grid_[cell_index(x, y)] >= 0 ? std::uint8_t{1} : std::uint8_t{0};
    }
  } else {
    for (int r = 0; r < kSensorCount; ++r) {
      reading.values[static_cast<std::size_t>(r)] =
          occupied(p.x + deltas[static_cast<std::size_t>(r)].dx,
                   p.y + deltas[static_cast<std::size_t>(r)].dy)
              ? std::uint8_t{1}
              : std::uint8_t{0};
    }
  }
  return reading;
}

bool TorusWorld::step_agent(int agent, Action action) {
  Pose& p = poses_[static_cast<std::size_t>(agent)];
  if (action.motion == Motion::Turn) {
    p.heading = action.dir == TurnDir::Left ? turn_left(p.heading) : turn_right(p.heading);
    return true;
  }
  const auto [dx, dy] = rotate_offset({1, 0}, p.heading);
  const int nx = wrap(p.x + dx);
  const int ny = wrap(p.y + dy);
  if (grid_[cell_index(nx, ny)] >= 0) return false;  // blocked
  grid_[cell_index(p.x, p.y)] = -1;
  p.x = nx;
  p.y = ny;
  grid_[cell_index(nx, ny)] = agent;
  return true;
}

void TorusWorld::step_world(std::span<const Action> actions) {
  if (actions.size() != poses_.size()) {
    throw std::invalid_argument("need exactly one action per agent");
  }
  for (int i = 0; i < agent_count(); ++i) {
    step_agent(i, actions[static_cast<std::size_t>(i)]);
  }
}

int TorusWorld::remove_agents_in_region(int x0, int y0, int x1, int y1) {
  std::vector<Pose> kept;
  kept.reserve(poses_.size());
  for (const Pose& p : poses_) {
    const bool inside = p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    if (!inside) kept.push_back(p);
  }
  const int removed = static_cast<int>(poses_.size() - kept.size());
  poses_ = std::move(kept);
  rebuild_grid();
  return removed;
}

int TorusWorld::reposition_agents_in_region(int x0, int y0, int x1, int y1, Rng& rng) {
  std::vector<int> inside;
  for (int i = 0; i < agent_count(); ++i) {
    const Pose& p = pose(i);
    if (p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1) inside.push_back(i);
  }
  if (inside.empty()) return 0;
  // Free cells outside the region, in row-major order for determinism.
  std::vector<int> free_cells;
  for (int y = 0; y < side_; ++y) {
    for (int x = 0; x < side_; ++x) {
      const bool in_region = x >= x0 && x <= x1 && y >= y0 && y <= y1;
      if (!in_region && grid_[cell_index(x, y)] < 0) {
        free_cells.push_back(y * side_ + x);
      }
    }
  }
  if (free_cells.size() < inside.size()) {
    throw std::invalid_argument("not enough free cells outside the damage region");
  }
  for (int agent : inside) {
    const std::size_t pick = rng.below(free_cells.size());
    const int cell = free_cells[pick];
    free_cells.erase(free_cells.begin() + static_cast<std::ptrdiff_t>(pick));
    Pose& p = poses_[static_cast<std::size_t>(agent)];
    grid_[cell_index(p.x, p.y)] = -1;
    p.x = cell % side_;
    p.y = cell / side_;
    grid_[cell_index(p.x, p.y)] = agent;
  }
  return static_cast<int>(inside.size());
}

TorusWorld TorusWorld::rotated90() const {
  std::vector<Pose> rotated;
  rotated.reserve(poses_.size());
  for (const Pose& p : poses_) {
    Pose q;
    q.x = side_ - 1 - p.y;
    q.y = p.x;
    q.heading = turn_right(p.heading);
    rotated.push_back(q);
  }
  return from_poses(side_, rotated);
}

std::string TorusWorld::to_snapshot() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_ + 1));
  for (int y = 0; y < side_; ++y) {
    for (int x = 0; x < side_; ++x) {
      const int who = grid_[cell_index(x, y)];
      out.push_back(who < 0 ? '.' : heading_char(poses_[static_cast<std::size_t>(who)].heading));
    }
    out.push_back('\n');
  }
  return out;
}

TorusWorld TorusWorld::from_snapshot(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw std::invalid_argument("empty snapshot");
  const int side = static_cast<int>(rows.size());
  std::vector<Pose> poses;
  for (int y = 0; y < side; ++y) {
    if (static_cast<int>(rows[static_cast<std::size_t>(y)].size()) != side) {
      throw std::invalid_argument("snapshot row " + std::to_string(y) + " is not " +
                                  std::to_string(side) + " chars wide");
    }
    for (int x = 0; x < side; ++x) {
      const char c = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      if (c == '.') continue;
      Heading h;
      if (!heading_from_char(c, h)) {
        throw std::invalid_argument(std::string("unexpected snapshot char '") + c + "'");
      }
      poses.push_back(Pose{x, y, h});
    }
  }
  return from_poses(side, poses);
}

bool TorusWorld::consistent() const {
  std::size_t on_grid = 0;
  for (int y = 0; y < side_; ++y) {
    for (int x = 0; x < side_; ++x) {
      const int who = grid_[cell_index(x, y)];
      if (who < 0) continue;
      ++on_grid;
      if (who >= agent_count()) return false;
      const Pose& p = poses_[static_cast<std::size_t>(who)];
      if (p.x != x || p.y != y) return false;
    }
  }
  return on_grid == poses_.size();
}

SensorReading apply_noise(const SensorReading& reading, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("flip probability must be in [0, 1]");
  if (p == 0.0) return reading;
  SensorReading noisy = reading;
  for (auto& v : noisy.values) {
    if (rng.bernoulli(p)) v ^= 1u;
  }
  return noisy;
}

}  // namespace swarmevo
