#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "swarmevo/controllers.hpp"
#include "swarmevo/torus_world.hpp"

namespace swarmevo {

/// Per-sensor prediction targets fixed by configuration: -1 leaves the
/// predictor output in place, 0/1 replaces it.
using PredefinedTargets = std::array<std::int8_t, kSensorCount>;

inline PredefinedTargets no_predefined() {
  PredefinedTargets t;
  t.fill(-1);
  return t;
}

/// Everything one fitness evaluation depends on besides the genome and seed.
struct EvalConfig {
  int grid_side = 0;       // L; must be set explicitly
  int swarm_size = 100;    // N
  int steps = 500;         // T, world steps per simulation run
  int repetitions = 10;    // independent runs per evaluation; fitness is their minimum
  double noise_p = 0.0;    // per-sensor flip probability, applied to every reading
  PredefinedTargets predefined = no_predefined();
  bool predictor_removed = false;
  bool threshold_predictions = false;  // snap net predictions to {0,1} at 0.5
  int actor_hidden = 8;
  int predictor_hidden = 14;

  NetTopology actor_net() const { return actor_topology(actor_hidden); }
  NetTopology predictor_net() const { return predictor_topology(predictor_hidden); }

  /// Throws std::invalid_argument listing every violated field.
  void validate() const;

  /// Stable content hash used to tie persisted records to their config.
  std::uint64_t hash() const;
};

/// Optional per-step capture of one simulation run.
struct StepTrace {
  std::vector<std::vector<Pose>> poses;                   // pre-step, [t][agent]
  std::vector<std::vector<SensorReading>> readings;        // sensed at t (after noise)
  std::vector<std::vector<std::array<double, kSensorCount>>> predictions;  // emitted at t
  std::vector<std::vector<Action>> actions;
};

/// Outcome of one simulation run: the per-run fitness plus the aggregates
/// the analyses need. The full per-step trace is opt-in; without it the
/// record still carries the final poses and running means.
struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  int grid_side = 0;
  int swarm_size = 0;
  int steps = 0;
  double fitness = 0.0;
  std::vector<Pose> final_poses;
  std::array<double, kSensorCount> mean_predictions{};   // over all agents and steps
  std::array<double, kSensorCount> final_sensor_means{}; // swarm mean of last readings
  double wall_seconds = 0.0;
  std::optional<StepTrace> trace;

  TorusWorld final_world() const { return TorusWorld::from_poses(grid_side, final_poses); }
};

enum class SimMode {
  Full,       // actor + predictor, fitness accumulated
  ActorOnly,  // trajectory only; fitness reported as 0
};

/// Advances `world` by cfg.steps steps under one genome shared by all agents
/// and returns the run fitness: the mean over scored steps, agents, and
/// sensors of 1 - |prediction - observation|, where the prediction emitted at
/// step t-1 is scored against the (noisy) reading at step t. Exactly
/// cfg.steps prediction sets are scored, so the normalizer is T*N*R.
double simulate_run(const Genome& genome, const EvalConfig& cfg, TorusWorld& world, Rng& rng,
                    SimMode mode, RunRecord* record = nullptr, bool want_trace = false);

/// Runs cfg.repetitions independent simulations from fresh uniform
/// placements (sub-seeds derived from `seed`) and returns the minimum
/// fitness together with the record of the minimum run.
std::pair<double, RunRecord> evaluate_fitness(const Genome& genome, const EvalConfig& cfg,
                                              std::uint64_t seed, bool want_trace = false);

/// Mean over repetitions of the swarm-mean final sensor values; the
/// behavior-space coordinate used by novelty search. The optional out
/// parameter receives the final poses of repetition 0.
std::array<double, kSensorCount> behavior_vector(const Genome& genome, const EvalConfig& cfg,
                                                 int repetitions, std::uint64_t seed,
                                                 std::vector<Pose>* rep0_final_poses = nullptr);

}  // namespace swarmevo
