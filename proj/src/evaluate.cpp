#include "swarmevo/evaluate.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swarmevo {

void EvalConfig::validate() const {
  std::string errors;
  auto fail = [&errors](const std::string& msg) {
    if (!errors.empty()) errors += "; ";
    errors += msg;
  };
  if (grid_side < 1) fail("grid_side must be >= 1");
  if (swarm_size < 1) fail("swarm_size must be >= 1");
  if (grid_side >= 1 && swarm_size > grid_side * grid_side) {
    fail("swarm_size exceeds grid capacity " + std::to_string(grid_side * grid_side));
  }
  if (steps < 1) fail("steps must be >= 1");
  if (repetitions < 1) fail("repetitions must be >= 1");
  if (noise_p < 0.0 || noise_p > 1.0) fail("noise_p must be in [0, 1]");
  if (actor_hidden < 1) fail("actor_hidden must be >= 1");
  if (predictor_hidden < 1) fail("predictor_hidden must be >= 1");
  for (int v : predefined) {
    if (v < -1 || v > 1) fail("predefined targets must be -1, 0, or 1");
  }
  if (predictor_removed) {
    for (int r = 0; r < kSensorCount; ++r) {
      if (predefined[static_cast<std::size_t>(r)] < 0) {
        fail("predictor_removed requires all 14 predefined targets");
        break;
      }
    }
  }
  if (!errors.empty()) throw std::invalid_argument("invalid evaluation config: " + errors);
}

std::uint64_t EvalConfig::hash() const {
  std::uint64_t h = 0x5e77a9b1c3d2f041ULL;
  auto mix = [&h](std::uint64_t v) { h = splitmix64(h) ^ v; };
  mix(static_cast<std::uint64_t>(grid_side));
  mix(static_cast<std::uint64_t>(swarm_size));
  mix(static_cast<std::uint64_t>(steps));
  mix(static_cast<std::uint64_t>(repetitions));
  std::uint64_t noise_bits;
  static_assert(sizeof(noise_bits) == sizeof(noise_p));
  __builtin_memcpy(&noise_bits, &noise_p, sizeof(noise_bits));
  mix(noise_bits);
  for (int v : predefined) mix(static_cast<std::uint64_t>(v + 1));
  mix(predictor_removed ? 1u : 0u);
  mix(threshold_predictions ? 1u : 0u);
  mix(static_cast<std::uint64_t>(actor_hidden));
  mix(static_cast<std::uint64_t>(predictor_hidden));
  return splitmix64(h);
}

double simulate_run(const Genome& genome, const EvalConfig& cfg, TorusWorld& world, Rng& rng,
                    SimMode mode, RunRecord* record, bool want_trace) {
  const auto started = std::chrono::steady_clock::now();
  const int n = world.agent_count();
  const int steps = cfg.steps;
  const SensorLayout& layout = SensorLayout::standard14();
  const bool with_predictor = mode == SimMode::Full && !cfg.predictor_removed;
  const bool score = mode == SimMode::Full;

  ActorNet actor(genome);
  PredictorNet predictor(genome);
  const int po = predictor.padded_outputs();
  const int ph = predictor.padded_hidden();

  std::vector<SensorReading> readings(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> selectors(static_cast<std::size_t>(n), 0);
  std::vector<Action> actions(static_cast<std::size_t>(n));
  std::vector<double> states(static_cast<std::size_t>(n) * static_cast<std::size_t>(ph), 0.0);
  std::vector<double> predictions(static_cast<std::size_t>(n) * static_cast<std::size_t>(po), 0.0);

  // With the predictor removed the per-step predictions are the fixed
  // targets for every agent.
  std::array<double, kSensorCount> fixed{};
  for (int r = 0; r < kSensorCount; ++r) {
    const int target = cfg.predefined[static_cast<std::size_t>(r)];
    fixed[static_cast<std::size_t>(r)] = target > 0 ? 1.0 : 0.0;
  }
  bool any_predefined = false;
  for (int v : cfg.predefined) any_predefined = any_predefined || v >= 0;
  if (score && !with_predictor) {
    for (int agent = 0; agent < n; ++agent) {
      double* row = predictions.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(po);
      for (int r = 0; r < kSensorCount; ++r) row[r] = fixed[static_cast<std::size_t>(r)];
    }
  }

  double accuracy_sum = 0.0;
  std::array<double, kSensorCount> prediction_sum{};
  std::array<double, kSensorCount> final_sensor_sum{};

  StepTrace trace;
  if (want_trace && record) {
    trace.poses.reserve(static_cast<std::size_t>(steps));
    trace.readings.reserve(static_cast<std::size_t>(steps));
    trace.predictions.reserve(static_cast<std::size_t>(steps));
    trace.actions.reserve(static_cast<std::size_t>(steps));
  }

  auto score_against_readings = [&] {
    for (int agent = 0; agent < n; ++agent) {
      const double* predicted =
          predictions.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(po);
      const auto& values = readings[static_cast<std::size_t>(agent)].values;
      double acc = 0.0;
      for (int r = 0; r < kSensorCount; ++r) {
        acc += 1.0 - std::fabs(predicted[r] - static_cast<double>(values[static_cast<std::size_t>(r)]));
      }
      accuracy_sum += acc;
    }
  };

  for (int t = 0; t < steps; ++t) {
    for (int agent = 0; agent < n; ++agent) {
      SensorReading reading = world.read_sensors(agent, layout);
      if (cfg.noise_p > 0.0) reading = apply_noise(reading, cfg.noise_p, rng);
      readings[static_cast<std::size_t>(agent)] = reading;
    }
    // The prediction emitted at the previous step is scored against the
    // reading the agent sees now.
    if (score && t > 0) score_against_readings();

    if (want_trace && record) {
      trace.poses.push_back(world.poses());
      trace.readings.push_back(readings);
    }

    actor.forward_batch(readings.data(), selectors.data(), actions.data(), n);
    for (int agent = 0; agent < n; ++agent) {
      selectors[static_cast<std::size_t>(agent)] =
          actions[static_cast<std::size_t>(agent)].motion == Motion::Move ? 1 : 0;
    }

    if (score) {
      if (with_predictor) {
        predictor.forward_batch(readings.data(), selectors.data(), states.data(),
                                predictions.data(), n);
        if (cfg.threshold_predictions) {
          for (int agent = 0; agent < n; ++agent) {
            double* row =
                predictions.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(po);
            for (int r = 0; r < kSensorCount; ++r) row[r] = row[r] >= 0.5 ? 1.0 : 0.0;
          }
        }
        if (any_predefined) {
          for (int agent = 0; agent < n; ++agent) {
            double* row =
                predictions.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(po);
            for (int r = 0; r < kSensorCount; ++r) {
              if (cfg.predefined[static_cast<std::size_t>(r)] >= 0) {
                row[r] = fixed[static_cast<std::size_t>(r)];
              }
            }
          }
        }
      }
      for (int agent = 0; agent < n; ++agent) {
        const double* row =
            predictions.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(po);
        for (int r = 0; r < kSensorCount; ++r) prediction_sum[static_cast<std::size_t>(r)] += row[r];
      }
    }

    if (want_trace && record) {
      trace.predictions.emplace_back();
      trace.actions.emplace_back();
      for (int agent = 0; agent < n; ++agent) {
        const double* row =
            predictions.data() + static_cast<std::size_t>(agent) * static_cast<std::size_t>(po);
        std::array<double, kSensorCount> p{};
        for (int r = 0; r < kSensorCount; ++r) p[static_cast<std::size_t>(r)] = row[r];
        trace.predictions.back().push_back(p);
        trace.actions.back().push_back(actions[static_cast<std::size_t>(agent)]);
      }
    }

    world.step_world(actions);
  }

  // Final sensing: scores the predictions emitted in the last step and
  // provides the behavior-space coordinates.
  for (int agent = 0; agent < n; ++agent) {
    SensorReading reading = world.read_sensors(agent, layout);
    if (cfg.noise_p > 0.0) reading = apply_noise(reading, cfg.noise_p, rng);
    readings[static_cast<std::size_t>(agent)] = reading;
    for (int r = 0; r < kSensorCount; ++r) {
      final_sensor_sum[static_cast<std::size_t>(r)] +=
          static_cast<double>(reading.values[static_cast<std::size_t>(r)]);
    }
  }
  if (score) score_against_readings();

  const double normalizer = static_cast<double>(steps) * n * kSensorCount;
  const double fitness = score ? accuracy_sum / normalizer : 0.0;

  if (record) {
    record->grid_side = world.side_length();
    record->swarm_size = n;
    record->steps = steps;
    record->fitness = fitness;
    record->final_poses = world.poses();
    for (int r = 0; r < kSensorCount; ++r) {
      record->mean_predictions[static_cast<std::size_t>(r)] =
          score ? prediction_sum[static_cast<std::size_t>(r)] / (static_cast<double>(steps) * n)
                : 0.0;
      record->final_sensor_means[static_cast<std::size_t>(r)] =
          final_sensor_sum[static_cast<std::size_t>(r)] / n;
    }
    if (want_trace) record->trace = std::move(trace);
    record->wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  }
  return fitness;
}

std::pair<double, RunRecord> evaluate_fitness(const Genome& genome, const EvalConfig& cfg,
                                              std::uint64_t seed, bool want_trace) {
  cfg.validate();
  const NetTopology want_actor = cfg.actor_net();
  const NetTopology want_predictor = cfg.predictor_net();
  if (genome.actor != want_actor || genome.predictor != want_predictor) {
    throw std::invalid_argument("genome topology does not match evaluation config");
  }

  double min_fitness = 0.0;
  RunRecord best;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    Rng rng(derive_seed(seed, 0x9e1u, rep));
    TorusWorld world = TorusWorld::place_agents_uniform(cfg.grid_side, cfg.swarm_size, rng);
    RunRecord record;
    record.seed = seed;
    record.config_hash = cfg.hash();
    const double fitness = simulate_run(genome, cfg, world, rng, SimMode::Full, &record, want_trace);
    if (rep == 0 || fitness < min_fitness) {
      min_fitness = fitness;
      best = std::move(record);
    }
  }
  return {min_fitness, std::move(best)};
}

std::array<double, kSensorCount> behavior_vector(const Genome& genome, const EvalConfig& cfg,
                                                 int repetitions, std::uint64_t seed,
                                                 std::vector<Pose>* rep0_final_poses) {
  if (repetitions < 1) throw std::invalid_argument("behavior vector needs repetitions >= 1");
  std::array<double, kSensorCount> sum{};
  for (int rep = 0; rep < repetitions; ++rep) {
    Rng rng(derive_seed(seed, 0x9e1u, rep));
    TorusWorld world = TorusWorld::place_agents_uniform(cfg.grid_side, cfg.swarm_size, rng);
    RunRecord record;
    simulate_run(genome, cfg, world, rng, SimMode::ActorOnly, &record, false);
    for (int r = 0; r < kSensorCount; ++r) {
      sum[static_cast<std::size_t>(r)] += record.final_sensor_means[static_cast<std::size_t>(r)];
    }
    if (rep == 0 && rep0_final_poses) *rep0_final_poses = record.final_poses;
  }
  for (double& v : sum) v /= repetitions;
  return sum;
}

}  // namespace swarmevo
