#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swarmevo/analysis.hpp"
#include "swarmevo/config.hpp"
#include "swarmevo/evolution.hpp"

namespace swarmevo {

/// Optional progress sink; experiments call it once per finished cell.
using ProgressFn = std::function<void(const std::string&)>;

struct EvolveOutcome {
  std::uint64_t seed = 0;
  double best_fitness = 0.0;
  Genome best_genome;
  RunRecord best_record;
  BehaviorLabel label;
  EvolutionTrace trace;
};

/// One generational run per seed, with the best run classified.
std::vector<EvolveOutcome> run_evolve_suite(const EvalConfig& eval, const GAConfig& ga,
                                            std::span<const std::uint64_t> seeds,
                                            int n_threads = 0, const ProgressFn& progress = {});

struct NoiseStudyRow {
  int grid_side = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  double best_fitness = 0.0;
  PatternClass pattern = PatternClass::Unclassified;
  double quality = 0.0;
};

/// One full evolutionary run per (grid, noise level, seed).
std::vector<NoiseStudyRow> run_noise_study(const EvalConfig& base_eval, const GAConfig& ga,
                                           std::span<const int> grid_sides,
                                           std::span<const double> noise_levels,
                                           std::span<const std::uint64_t> seeds, int n_threads = 0,
                                           const ProgressFn& progress = {});

struct DamageSpec {
  DamageMode mode = DamageMode::RemoveArea;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive cell rectangle
  int repair_steps = 500;
};

struct DamageRepairOutcome {
  int affected_agents = 0;     // removed or repositioned; 0 flags degenerate damage
  PatternClass pattern = PatternClass::Unclassified;  // structure class under test
  double quality_before = 0.0;     // pre-damage
  double quality_start = 0.0;      // right after damage, before repair
  double similarity_start = 0.0;   // right after damage vs pre-damage poses
  double quality_end = 0.0;        // after the repair run
  double similarity = 0.0;         // after the repair run vs pre-damage poses
  double repair_fitness = 0.0;
  std::vector<Pose> final_poses;
};

/// Damages the final configuration of `initial` and re-evaluates the genome
/// for spec.repair_steps steps. The structure class under test is the
/// classification of the pre-damage world.
DamageRepairOutcome run_damage_repair(const Genome& genome, const RunRecord& initial,
                                      const EvalConfig& eval, const DamageSpec& spec,
                                      std::uint64_t repair_seed);

struct RerunRow {
  int genome_index = 0;
  int grid_side = 0;
  std::uint64_t seed = 0;
  bool capacity_error = false;
  double fitness = 0.0;
  PatternClass pattern = PatternClass::Unclassified;
  double quality = 0.0;
};

/// Re-evaluates frozen genomes once per target grid from fresh placements;
/// no evolution. Capacity violations are reported per cell, not thrown.
std::vector<RerunRow> run_rerun_scalability(std::span<const Genome> genomes,
                                            const EvalConfig& base_eval,
                                            std::span<const int> grid_sides, int steps,
                                            std::span<const std::uint64_t> seeds,
                                            int n_threads = 0, const ProgressFn& progress = {});

struct EngineeredRow {
  int grid_side = 0;
  std::uint64_t seed = 0;
  double best_fitness = 0.0;
  PatternClass pattern = PatternClass::Unclassified;
  double quality = 0.0;
};

/// Line-shaping protocol. Partial fixes the straight-ahead/straight-behind
/// predictions (indices 0, 3, 8, 11) to occupied and evolves the remaining
/// ten; on the 20x20 grid the mutation rate is raised to 0.3. Full fixes all
/// fourteen targets and drops the predictor entirely.
std::vector<EngineeredRow> run_engineered_so(const EvalConfig& base_eval, const GAConfig& base_ga,
                                             EngineeredMode mode, std::span<const int> grid_sides,
                                             std::span<const std::uint64_t> seeds,
                                             int n_threads = 0, const ProgressFn& progress = {});

/// Predefined targets of the line-shaping experiments.
PredefinedTargets line_partial_targets();
PredefinedTargets line_full_targets();

struct SweepRow {
  std::string parameter;  // swept parameter, or "budget" for the fixed-budget mode
  double value = 0.0;
  int population_size = 0;
  int generations = 0;
  int steps = 0;
  int repetitions = 0;
  double mutation_rate = 0.0;
  int grid_side = 0;
  std::uint64_t seed = 0;
  double best_fitness = 0.0;
  std::uint64_t evaluations = 0;
};

/// One-at-a-time parameter sweeps against the defaults and, when
/// sweep.budget > 0, the fixed-budget mode: population x generations =
/// budget, two runs of 200 steps per evaluation.
std::vector<SweepRow> run_hyper_sweep(const SweepParams& sweep, const EvalConfig& base_eval,
                                      const GAConfig& base_ga, std::span<const int> grid_sides,
                                      std::span<const std::uint64_t> seeds, int n_threads = 0,
                                      const ProgressFn& progress = {});

enum class NoveltySolutionMode { AllIndividuals, BestQuality };

struct NoveltySolution {
  std::size_t individual = 0;  // index into the novelty result's individual list
  PatternClass pattern = PatternClass::Unclassified;
  double quality = 0.0;
};

/// Classifies every individual's final configuration. AllIndividuals keeps
/// them all; BestQuality keeps the `count` with the highest solution quality,
/// ties broken by evaluation order.
std::vector<NoveltySolution> extract_novelty_solutions(
    std::span<const NoveltyIndividual> individuals, int grid_side, NoveltySolutionMode mode,
    std::size_t count);

}  // namespace swarmevo
