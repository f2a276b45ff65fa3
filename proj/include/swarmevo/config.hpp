#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "swarmevo/evaluate.hpp"
#include "swarmevo/evolution.hpp"

namespace swarmevo {

enum class ExperimentKind {
  Evolve,
  NoiseStudy,
  DamageRepair,
  RerunScalability,
  EngineeredSO,
  RandomBaseline,
  NoveltyCompare,
  HyperSweep,
};

const char* experiment_kind_name(ExperimentKind k);

enum class OptimizerKind { Generational, OnePlusOne };

enum class EngineeredMode { Partial, Full };
enum class DamageMode { RemoveArea, RepositionArea };

struct NoiseStudyParams {
  std::vector<int> grid_sides;
  std::vector<double> levels;
};

struct EngineeredParams {
  EngineeredMode mode = EngineeredMode::Partial;
  std::vector<int> grid_sides;
};

struct BaselineParams {
  BaselineMode mode = BaselineMode::Plain;
  int count = 50;
  int pool_size = 5000;
};

struct RerunParams {
  std::vector<int> grid_sides;
  int steps = 500;
  std::vector<std::string> genome_files;
};

struct DamageParams {
  DamageMode mode = DamageMode::RemoveArea;
  std::array<int, 4> region{0, 0, 0, 0};  // x0, y0, x1, y1 inclusive
  int repair_steps = 500;
  std::string record_file;
};

struct SweepParams {
  std::vector<int> population_sizes;
  std::vector<int> generation_counts;
  std::vector<int> eval_steps;
  std::vector<int> repetition_counts;
  std::vector<double> mutation_rates;
  int budget = 0;  // > 0 selects the fixed-budget mode: G = budget / P
};

struct OnePlusOneParams {
  int max_evaluations = 1000;
  double alpha = 0.2;
  double reeval_prob = 0.2;
};

/// A fully validated experiment description: the base configs, the seed
/// list, and the parameters of the selected protocol.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Evolve;
  OptimizerKind optimizer = OptimizerKind::Generational;
  EvalConfig eval;
  GAConfig ga;
  NoveltyConfig novelty;
  OnePlusOneParams one_plus_one;
  std::vector<std::uint64_t> seeds;

  NoiseStudyParams noise;
  EngineeredParams engineered;
  BaselineParams baseline;
  RerunParams rerun;
  DamageParams damage;
  SweepParams sweep;

  std::uint64_t hash() const;
};

/// Parses and validates a JSON experiment config. Missing hyperparameters
/// take the standard defaults; unknown keys and invariant violations are
/// reported together, naming every offending key.
ExperimentSpec parse_config(const std::string& json_text);
ExperimentSpec load_config(const std::string& path);

std::string eval_config_to_json(const EvalConfig& cfg);
EvalConfig eval_config_from_json(const std::string& json_text);

}  // namespace swarmevo
