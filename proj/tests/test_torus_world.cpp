#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "swarmevo/torus_world.hpp"

using namespace swarmevo;

TEST_CASE("uniform placement fills distinct cells with valid headings") {
  Rng rng(123);
  const TorusWorld world = TorusWorld::place_agents_uniform(11, 100, rng);
  CHECK(world.agent_count() == 100);
  CHECK(world.consistent());
  std::set<std::pair<int, int>> cells;
  for (int i = 0; i < 100; ++i) {
    const Pose& p = world.pose(i);
    CHECK(p.x >= 0);
    CHECK(p.x < 11);
    CHECK(p.y >= 0);
    CHECK(p.y < 11);
    cells.insert({p.x, p.y});
  }
  CHECK(cells.size() == 100);
}

TEST_CASE("full-density placement occupies every cell") {
  Rng rng(5);
  const TorusWorld world = TorusWorld::place_agents_uniform(10, 100, rng);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) CHECK(world.occupied(x, y));
  }
}

TEST_CASE("placement beyond capacity fails") {
  Rng rng(7);
  CHECK_THROWS_AS(TorusWorld::place_agents_uniform(5, 26, rng), std::invalid_argument);
}

TEST_CASE("identical seeds reproduce identical placements") {
  Rng a(99);
  Rng b(99);
  const TorusWorld wa = TorusWorld::place_agents_uniform(16, 100, a);
  const TorusWorld wb = TorusWorld::place_agents_uniform(16, 100, b);
  CHECK(wa == wb);
}

TEST_CASE("placement headings cover all four directions") {
  Rng rng(21);
  const TorusWorld world = TorusWorld::place_agents_uniform(20, 100, rng);
  std::set<Heading> seen;
  for (int i = 0; i < world.agent_count(); ++i) seen.insert(world.pose(i).heading);
  CHECK(seen.size() == 4);
}

TEST_CASE("a lone agent senses nothing") {
  const TorusWorld world = TorusWorld::from_poses(9, std::vector<Pose>{{4, 4, Heading::East}});
  const SensorReading reading = world.read_sensors(0, SensorLayout::standard14());
  for (int r = 0; r < kSensorCount; ++r) CHECK(reading.values[r] == 0);
}

TEST_CASE("sensor index 0 sees the cell directly ahead") {
  for (auto [heading, dx, dy] :
       {std::tuple{Heading::North, 0, -1}, std::tuple{Heading::East, 1, 0},
        std::tuple{Heading::South, 0, 1}, std::tuple{Heading::West, -1, 0}}) {
    const TorusWorld world = TorusWorld::from_poses(
        11, std::vector<Pose>{{5, 5, heading}, {5 + dx, 5 + dy, Heading::North}});
    const SensorReading reading = world.read_sensors(0, SensorLayout::standard14());
    CHECK(reading.values[0] == 1);
    int ones = 0;
    for (int r = 0; r < kSensorCount; ++r) ones += reading.values[r];
    CHECK(ones == 1);
  }
}

TEST_CASE("contract indices 0/3/8/11 are straight ahead and behind") {
  // Agent at center heading North; occupy ahead 1, ahead 2, behind 1, behind 2.
  const TorusWorld world = TorusWorld::from_poses(
      11, std::vector<Pose>{{5, 5, Heading::North},
                            {5, 4, Heading::North},
                            {5, 3, Heading::North},
                            {5, 6, Heading::North},
                            {5, 7, Heading::North}});
  const SensorReading reading = world.read_sensors(0, SensorLayout::standard14());
  CHECK(reading.values[0] == 1);
  CHECK(reading.values[3] == 1);
  CHECK(reading.values[8] == 1);
  CHECK(reading.values[11] == 1);
  int ones = 0;
  for (int r = 0; r < kSensorCount; ++r) ones += reading.values[r];
  CHECK(ones == 4);
}

TEST_CASE("dense packing saturates every sensor") {
  // 3x3 torus fully packed: every offset lands on an occupied cell.
  std::vector<Pose> poses;
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) poses.push_back({x, y, Heading::North});
  }
  const TorusWorld world = TorusWorld::from_poses(3, poses);
  // Brute-force oracle: check occupancy of each rotated, wrapped offset.
  const SensorLayout& layout = SensorLayout::standard14();
  for (int agent = 0; agent < world.agent_count(); ++agent) {
    const SensorReading reading = world.read_sensors(agent, layout);
    const Pose& p = world.pose(agent);
    for (int r = 0; r < kSensorCount; ++r) {
      const auto [dx, dy] = rotate_offset(layout.offsets[r], p.heading);
      const bool expected = world.occupied(p.x + dx, p.y + dy);
      CHECK(reading.values[r] == (expected ? 1 : 0));
    }
  }
}

TEST_CASE("sensor frame is invariant under world rotation") {
  Rng rng(31);
  const TorusWorld world = TorusWorld::place_agents_uniform(13, 60, rng);
  const TorusWorld turned = world.rotated90();
  const SensorLayout& layout = SensorLayout::standard14();
  for (int agent = 0; agent < world.agent_count(); ++agent) {
    CHECK(world.read_sensors(agent, layout) == turned.read_sensors(agent, layout));
  }
}

TEST_CASE("rotated offsets match the precomputed tables") {
  const SensorLayout& layout = SensorLayout::standard14();
  for (int h = 0; h < 4; ++h) {
    for (int r = 0; r < kSensorCount; ++r) {
      const auto [dx, dy] = rotate_offset(layout.offsets[r], static_cast<Heading>(h));
      CHECK(layout.rotated[h][r].dx == dx);
      CHECK(layout.rotated[h][r].dy == dy);
    }
  }
}

TEST_CASE("move wraps around the torus") {
  TorusWorld world = TorusWorld::from_poses(8, std::vector<Pose>{{0, 0, Heading::North}});
  CHECK(world.step_agent(0, Action{Motion::Move, TurnDir::Right}));
  CHECK(world.pose(0).x == 0);
  CHECK(world.pose(0).y == 7);
  CHECK(world.consistent());
}

TEST_CASE("move into an occupied cell is blocked") {
  TorusWorld world = TorusWorld::from_poses(
      8, std::vector<Pose>{{2, 2, Heading::East}, {3, 2, Heading::North}});
  CHECK_FALSE(world.step_agent(0, Action{Motion::Move, TurnDir::Right}));
  CHECK(world.pose(0) == Pose{2, 2, Heading::East});
  CHECK(world.consistent());
}

TEST_CASE("turns rotate in place") {
  TorusWorld world = TorusWorld::from_poses(8, std::vector<Pose>{{2, 2, Heading::East}});
  CHECK(world.step_agent(0, Action{Motion::Turn, TurnDir::Left}));
  CHECK(world.pose(0).heading == Heading::North);
  CHECK(world.step_agent(0, Action{Motion::Turn, TurnDir::Right}));
  CHECK(world.pose(0).heading == Heading::East);
  CHECK(world.pose(0).x == 2);
  CHECK(world.pose(0).y == 2);
}

TEST_CASE("lower index wins a contended cell") {
  TorusWorld world = TorusWorld::from_poses(
      8, std::vector<Pose>{{1, 3, Heading::East}, {3, 3, Heading::West}});
  const std::vector<Action> actions(2, Action{Motion::Move, TurnDir::Right});
  world.step_world(actions);
  CHECK(world.pose(0) == Pose{2, 3, Heading::East});
  CHECK(world.pose(1) == Pose{3, 3, Heading::West});  // blocked by agent 0
  CHECK(world.consistent());
}

TEST_CASE("L unobstructed moves return an agent to its start cell") {
  for (Heading h : {Heading::North, Heading::East, Heading::South, Heading::West}) {
    const int side = 9;
    TorusWorld world = TorusWorld::from_poses(side, std::vector<Pose>{{4, 4, h}});
    for (int i = 0; i < side; ++i) {
      CHECK(world.step_agent(0, Action{Motion::Move, TurnDir::Right}));
    }
    CHECK(world.pose(0) == Pose{4, 4, h});
  }
}

TEST_CASE("occupancy stays exclusive under random stepping") {
  Rng rng(404);
  TorusWorld world = TorusWorld::place_agents_uniform(6, 30, rng);
  std::vector<Action> actions(30);
  for (int t = 0; t < 200; ++t) {
    for (auto& a : actions) {
      a.motion = rng.bernoulli(0.5) ? Motion::Move : Motion::Turn;
      a.dir = rng.bernoulli(0.5) ? TurnDir::Left : TurnDir::Right;
    }
    world.step_world(actions);
    REQUIRE(world.consistent());
  }
}

TEST_CASE("deterministic replay of random actions") {
  auto run = [] {
    Rng rng(777);
    TorusWorld world = TorusWorld::place_agents_uniform(16, 100, rng);
    std::vector<Action> actions(100);
    for (int t = 0; t < 100; ++t) {
      for (auto& a : actions) {
        a.motion = rng.bernoulli(0.5) ? Motion::Move : Motion::Turn;
        a.dir = rng.bernoulli(0.5) ? TurnDir::Left : TurnDir::Right;
      }
      world.step_world(actions);
    }
    return world;
  };
  CHECK(run() == run());
}

TEST_CASE("noise with p=0 is the identity and draws nothing") {
  SensorReading reading;
  for (int r = 0; r < kSensorCount; ++r) reading.values[r] = r % 2;
  Rng rng(1);
  const std::uint64_t before = rng.next_u64();
  Rng rng2(1);
  (void)rng2.next_u64();
  CHECK(apply_noise(reading, 0.0, rng2) == reading);
  CHECK(rng2.next_u64() != before);  // stream advanced only by our own draw
}

TEST_CASE("noise with p=1 flips every value") {
  SensorReading reading;
  for (int r = 0; r < kSensorCount; ++r) reading.values[r] = r % 2;
  Rng rng(2);
  const SensorReading flipped = apply_noise(reading, 1.0, rng);
  for (int r = 0; r < kSensorCount; ++r) CHECK(flipped.values[r] == 1 - r % 2);
}

TEST_CASE("noise flips the expected fraction") {
  Rng rng(3);
  SensorReading zeros;
  int flips = 0;
  const int trials = 80000;  // > 10^6 bits
  for (int i = 0; i < trials; ++i) {
    const SensorReading noisy = apply_noise(zeros, 0.1, rng);
    for (int r = 0; r < kSensorCount; ++r) flips += noisy.values[r];
  }
  const double fraction = static_cast<double>(flips) / (trials * kSensorCount);
  CHECK(fraction > 0.099);
  CHECK(fraction < 0.101);
}

TEST_CASE("noise probability outside [0,1] is rejected") {
  SensorReading reading;
  Rng rng(4);
  CHECK_THROWS_AS(apply_noise(reading, -0.1, rng), std::invalid_argument);
  CHECK_THROWS_AS(apply_noise(reading, 1.5, rng), std::invalid_argument);
}

TEST_CASE("snapshot round trip") {
  Rng rng(11);
  const TorusWorld world = TorusWorld::place_agents_uniform(12, 40, rng);
  const std::string snapshot = world.to_snapshot();
  const TorusWorld parsed = TorusWorld::from_snapshot(snapshot);
  CHECK(parsed.side_length() == 12);
  CHECK(parsed.agent_count() == 40);
  CHECK(parsed.to_snapshot() == snapshot);
}

TEST_CASE("snapshot parsing reports bad input") {
  CHECK_THROWS_AS(TorusWorld::from_snapshot(""), std::invalid_argument);
  CHECK_THROWS_AS(TorusWorld::from_snapshot("..\n.x\n"), std::invalid_argument);
  CHECK_THROWS_AS(TorusWorld::from_snapshot("..\n...\n"), std::invalid_argument);
}

TEST_CASE("region removal and repositioning") {
  std::vector<Pose> poses;
  for (int i = 0; i < 6; ++i) poses.push_back({i, 0, Heading::South});
  TorusWorld world = TorusWorld::from_poses(8, poses);

  SUBCASE("remove") {
    const int removed = world.remove_agents_in_region(0, 0, 2, 0);
    CHECK(removed == 3);
    CHECK(world.agent_count() == 3);
    CHECK(world.consistent());
  }
  SUBCASE("reposition keeps count and headings") {
    Rng rng(9);
    const int moved = world.reposition_agents_in_region(0, 0, 2, 0, rng);
    CHECK(moved == 3);
    CHECK(world.agent_count() == 6);
    CHECK(world.consistent());
    for (int i = 0; i < 6; ++i) {
      CHECK(world.pose(i).heading == Heading::South);
      const bool in_region = world.pose(i).x <= 2 && world.pose(i).y == 0;
      if (i < 3) CHECK_FALSE(in_region);
    }
  }
}
