#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "swarmevo/evaluate.hpp"

using namespace swarmevo;

namespace {

EvalConfig tiny_config() {
  EvalConfig cfg;
  cfg.grid_side = 7;
  cfg.swarm_size = 10;
  cfg.steps = 20;
  cfg.repetitions = 2;
  return cfg;
}

Genome zero_genome(const EvalConfig& cfg) {
  Genome g;
  g.actor = cfg.actor_net();
  g.predictor = cfg.predictor_net();
  g.weights.assign(static_cast<std::size_t>(g.actor.param_count() + g.predictor.param_count()),
                   0.0);
  return g;
}

Genome random_genome(const EvalConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return init_genome(cfg.actor_net(), cfg.predictor_net(), rng);
}

}  // namespace

TEST_CASE("perfectly matching fixed predictions give fitness one") {
  // A full-circle column on a 5x5 torus: every agent senses exactly the
  // straight-ahead and straight-behind cells, matching the fixed targets.
  // The all-zero genome always moves and every move is blocked, so the
  // structure is static for the whole run.
  std::vector<Pose> poses;
  for (int y = 0; y < 5; ++y) poses.push_back({2, y, Heading::North});
  TorusWorld world = TorusWorld::from_poses(5, poses);

  EvalConfig cfg;
  cfg.grid_side = 5;
  cfg.swarm_size = 5;
  cfg.steps = 50;
  cfg.repetitions = 1;
  cfg.predictor_removed = true;
  cfg.predefined.fill(0);
  for (int index : {0, 3, 8, 11}) cfg.predefined[index] = 1;

  Rng rng(1);
  const double fitness = simulate_run(zero_genome(cfg), cfg, world, rng, SimMode::Full);
  CHECK(fitness == 1.0);
}

TEST_CASE("complemented predictions give fitness zero") {
  // A lone agent reads all zeros forever; predicting all ones is maximally
  // wrong in every term.
  TorusWorld world = TorusWorld::from_poses(9, std::vector<Pose>{{4, 4, Heading::East}});
  EvalConfig cfg;
  cfg.grid_side = 9;
  cfg.swarm_size = 1;
  cfg.steps = 10;
  cfg.repetitions = 1;
  cfg.predictor_removed = true;
  cfg.predefined.fill(1);
  Rng rng(1);
  const double fitness = simulate_run(zero_genome(cfg), cfg, world, rng, SimMode::Full);
  CHECK(fitness == 0.0);
}

TEST_CASE("one wrong prediction out of fourteen gives 13/14") {
  TorusWorld world = TorusWorld::from_poses(9, std::vector<Pose>{{4, 4, Heading::East}});
  EvalConfig cfg;
  cfg.grid_side = 9;
  cfg.swarm_size = 1;
  cfg.steps = 1;
  cfg.repetitions = 1;
  cfg.predictor_removed = true;
  cfg.predefined.fill(0);
  cfg.predefined[5] = 1;  // the only wrong target
  Rng rng(1);
  const double fitness = simulate_run(zero_genome(cfg), cfg, world, rng, SimMode::Full);
  CHECK(fitness == doctest::Approx(13.0 / 14.0).epsilon(1e-15));
}

TEST_CASE("fitness stays in the unit interval for random genomes") {
  const EvalConfig cfg = tiny_config();
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto [fitness, record] = evaluate_fitness(random_genome(cfg, seed), cfg, seed);
    CHECK(fitness >= 0.0);
    CHECK(fitness <= 1.0);
    CHECK(record.fitness >= fitness);  // the minimum never exceeds any run
  }
}

TEST_CASE("evaluation returns the minimum over repetitions") {
  EvalConfig cfg = tiny_config();
  cfg.repetitions = 4;
  const Genome g = random_genome(cfg, 77);
  const auto [fitness, record] = evaluate_fitness(g, cfg, 1234);

  EvalConfig single = cfg;
  single.repetitions = 1;
  double min_fitness = 1.0e9;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    Rng rng(derive_seed(1234, 0x9e1u, rep));
    TorusWorld world = TorusWorld::place_agents_uniform(cfg.grid_side, cfg.swarm_size, rng);
    RunRecord r;
    const double f = simulate_run(g, cfg, world, rng, SimMode::Full, &r);
    min_fitness = std::min(min_fitness, f);
  }
  CHECK(fitness == min_fitness);
  CHECK(record.fitness == fitness);
}

TEST_CASE("identical seeds replay bit-exactly") {
  const EvalConfig cfg = tiny_config();
  const Genome g = random_genome(cfg, 5);
  const auto [f1, r1] = evaluate_fitness(g, cfg, 99);
  const auto [f2, r2] = evaluate_fitness(g, cfg, 99);
  CHECK(f1 == f2);
  CHECK(r1.final_poses == r2.final_poses);
  CHECK(r1.mean_predictions == r2.mean_predictions);
  CHECK(r1.final_sensor_means == r2.final_sensor_means);
}

TEST_CASE("noisy evaluations are reproducible too") {
  EvalConfig cfg = tiny_config();
  cfg.noise_p = 0.10;
  const Genome g = random_genome(cfg, 6);
  const auto [f1, r1] = evaluate_fitness(g, cfg, 42);
  const auto [f2, r2] = evaluate_fitness(g, cfg, 42);
  CHECK(f1 == f2);
  CHECK(r1.final_poses == r2.final_poses);
}

TEST_CASE("topology mismatch is a configuration error") {
  const EvalConfig cfg = tiny_config();
  EvalConfig other = cfg;
  other.actor_hidden = 6;
  const Genome g = random_genome(other, 7);
  CHECK_THROWS_AS(evaluate_fitness(g, cfg, 1), std::invalid_argument);
}

TEST_CASE("config validation lists every violation") {
  EvalConfig cfg;
  cfg.grid_side = 0;
  cfg.steps = 0;
  cfg.noise_p = 2.0;
  try {
    cfg.validate();
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("grid_side") != std::string::npos);
    CHECK(what.find("steps") != std::string::npos);
    CHECK(what.find("noise_p") != std::string::npos);
  }
}

TEST_CASE("predictor_removed requires full predefinition") {
  EvalConfig cfg = tiny_config();
  cfg.predictor_removed = true;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.predefined.fill(0);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("predictor-removed fitness matches a brute-force oracle") {
  // Independent scoring: re-simulate the trajectory with the actor network
  // alone and compare each post-step reading against the fixed targets.
  EvalConfig cfg;
  cfg.grid_side = 5;
  cfg.swarm_size = 8;
  cfg.steps = 30;
  cfg.repetitions = 1;
  cfg.predictor_removed = true;
  cfg.predefined.fill(0);
  for (int index : {0, 3, 8, 11}) cfg.predefined[index] = 1;

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Genome g = random_genome(cfg, seed + 100);
    const auto [fitness, record] = evaluate_fitness(g, cfg, seed);

    Rng rng(derive_seed(seed, 0x9e1u, 0));
    TorusWorld world = TorusWorld::place_agents_uniform(cfg.grid_side, cfg.swarm_size, rng);
    const ActorNet actor(g);
    const SensorLayout& layout = SensorLayout::standard14();
    std::vector<std::uint8_t> selectors(static_cast<std::size_t>(cfg.swarm_size), 0);
    std::vector<Action> actions(static_cast<std::size_t>(cfg.swarm_size));
    long matches = 0;
    for (int t = 0; t < cfg.steps; ++t) {
      for (int agent = 0; agent < cfg.swarm_size; ++agent) {
        const SensorReading reading = world.read_sensors(agent, layout);
        actions[static_cast<std::size_t>(agent)] =
            actor.forward(reading, selectors[static_cast<std::size_t>(agent)]);
        selectors[static_cast<std::size_t>(agent)] =
            actions[static_cast<std::size_t>(agent)].motion == Motion::Move ? 1 : 0;
      }
      world.step_world(actions);
      for (int agent = 0; agent < cfg.swarm_size; ++agent) {
        const SensorReading reading = world.read_sensors(agent, layout);
        for (int r = 0; r < kSensorCount; ++r) {
          const int target = cfg.predefined[static_cast<std::size_t>(r)];
          matches += reading.values[static_cast<std::size_t>(r)] == target ? 1 : 0;
        }
      }
    }
    const double expected =
        static_cast<double>(matches) /
        (static_cast<double>(cfg.steps) * cfg.swarm_size * kSensorCount);
    CHECK(fitness == doctest::Approx(expected).epsilon(1e-13));
    CHECK(record.final_poses == world.poses());
  }
}

TEST_CASE("behavior vector of a lone agent is zero") {
  EvalConfig cfg;
  cfg.grid_side = 9;
  cfg.swarm_size = 1;
  cfg.steps = 15;
  cfg.repetitions = 1;
  const auto vec = behavior_vector(random_genome(cfg, 3), cfg, 3, 17);
  for (double v : vec) CHECK(v == 0.0);
}

TEST_CASE("behavior vector of a packed torus is all ones") {
  EvalConfig cfg;
  cfg.grid_side = 10;
  cfg.swarm_size = 100;
  cfg.steps = 5;
  cfg.repetitions = 1;
  const auto vec = behavior_vector(random_genome(cfg, 4), cfg, 2, 18);
  for (double v : vec) CHECK(v == 1.0);
}

TEST_CASE("behavior vector averages the final readings of two blocked agents") {
  // Two agents facing each other block forever under the always-move genome,
  // so each one's final reading has exactly the straight-ahead bit set.
  EvalConfig cfg;
  cfg.grid_side = 7;
  cfg.swarm_size = 2;
  cfg.steps = 10;
  cfg.repetitions = 1;
  const Genome g = zero_genome(cfg);
  std::vector<Pose> poses{{2, 3, Heading::East}, {3, 3, Heading::West}};
  TorusWorld world = TorusWorld::from_poses(7, poses);
  RunRecord record;
  Rng rng(1);
  simulate_run(g, cfg, world, rng, SimMode::ActorOnly, &record);
  CHECK(record.final_sensor_means[0] == 1.0);
  for (int r = 1; r < kSensorCount; ++r) CHECK(record.final_sensor_means[r] == 0.0);
}

TEST_CASE("traced runs expose per-step data consistent with aggregates") {
  EvalConfig cfg = tiny_config();
  cfg.repetitions = 1;
  const Genome g = random_genome(cfg, 8);
  const auto [fitness, record] = evaluate_fitness(g, cfg, 55, /*want_trace=*/true);
  REQUIRE(record.trace.has_value());
  CHECK(static_cast<int>(record.trace->poses.size()) == cfg.steps);
  CHECK(static_cast<int>(record.trace->predictions.size()) == cfg.steps);

  std::array<double, kSensorCount> sums{};
  for (const auto& step : record.trace->predictions) {
    for (const auto& agent : step) {
      for (int r = 0; r < kSensorCount; ++r) sums[static_cast<std::size_t>(r)] += agent[static_cast<std::size_t>(r)];
    }
  }
  for (int r = 0; r < kSensorCount; ++r) {
    const double mean = sums[static_cast<std::size_t>(r)] / (cfg.steps * cfg.swarm_size);
    CHECK(mean == doctest::Approx(record.mean_predictions[static_cast<std::size_t>(r)]).epsilon(1e-12));
  }
}

TEST_CASE("threshold flag snaps predictions to binary") {
  EvalConfig cfg = tiny_config();
  cfg.repetitions = 1;
  cfg.threshold_predictions = true;
  const auto [fitness, record] = evaluate_fitness(random_genome(cfg, 9), cfg, 5, true);
  for (const auto& step : record.trace->predictions) {
    for (const auto& agent : step) {
      for (double p : agent) CHECK((p == 0.0 || p == 1.0));
    }
  }
  CHECK(fitness >= 0.0);
  CHECK(fitness <= 1.0);
}
