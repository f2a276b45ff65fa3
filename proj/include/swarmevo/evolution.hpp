#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swarmevo/evaluate.hpp"

namespace swarmevo {

struct GAConfig {
  int population_size = 50;
  int generations = 100;
  double mutation_rate = 0.1;
  double mutation_delta = 0.4;
  int elitism = 1;

  void validate() const;
  std::uint64_t hash() const;
};

/// One fitness evaluation as it happened, in deterministic order.
struct EvalRecord {
  int generation = 0;
  int individual = 0;
  std::uint64_t seed = 0;
  double fitness = 0.0;
  double wall_seconds = 0.0;
};

struct EvolutionTrace {
  std::vector<EvalRecord> evaluations;
  std::vector<double> best_per_generation;
  std::vector<double> mean_per_generation;
  Genome best_genome;
  double best_fitness = 0.0;
  RunRecord best_record;
  std::uint64_t total_world_steps = 0;
};

/// Index drawn with probability fitness / sum; uniform when every fitness
/// is zero. Fitnesses must be non-negative; the population must not be empty.
std::size_t proportionate_select(std::span<const double> fitnesses, Rng& rng);

/// World steps a generational run will spend: elites keep their stored
/// fitness, so after generation zero only the non-elite slots are evaluated.
std::uint64_t expected_ga_world_steps(const EvalConfig& eval, const GAConfig& ga);

/// Generational evolution: fitness-proportionate parent selection, age-based
/// replacement, elitism, mutation only. Fully reproducible from master_seed
/// for any thread count.
EvolutionTrace run_generational_ga(const EvalConfig& eval, const GAConfig& ga,
                                   std::uint64_t master_seed, int n_threads = 0);

/// Elitist online strategy: one champion, mutant challengers, and
/// re-evaluation smoothing F_t = alpha * f + (1 - alpha) * F_{t-1}.
/// The world is never reset between evaluations; agents continue from
/// their previous end poses.
struct OnePlusOneState {
  Genome champion;
  double champion_fitness = 0.0;
  bool champion_evaluated = false;
  std::uint64_t evaluation_count = 0;
  double alpha = 0.2;
  double reeval_prob = 0.2;
};

EvolutionTrace run_one_plus_one(const EvalConfig& eval, OnePlusOneState& state,
                                int max_evaluations, double mutation_rate, double mutation_delta,
                                Rng& rng);

enum class BaselineMode { Plain, Selected };

struct BaselineResult {
  Genome genome;
  double fitness = 0.0;
  RunRecord record;
};

/// Plain: `count` fresh random genomes, each evaluated once. Selected:
/// `count` repetitions of drawing pool_size random genomes and keeping the
/// best of each pool.
std::vector<BaselineResult> random_baseline(const EvalConfig& eval, int count, BaselineMode mode,
                                            int pool_size, std::uint64_t seed, int n_threads = 0);

struct NoveltyConfig {
  int k = 10;                 // nearest neighbors in behavior space
  double archive_prob = 0.02; // per-individual archive insertion chance
  int repetitions = 10;       // runs averaged into one behavior vector

  void validate() const;
};

using BehaviorVector = std::array<double, kSensorCount>;

/// Mean Euclidean distance from population[self] to its k nearest vectors
/// among the rest of the population and the archive. Throws when no other
/// vector exists.
double novelty_score(std::size_t self, std::span<const BehaviorVector> population,
                     std::span<const BehaviorVector> archive, int k);

struct NoveltyIndividual {
  Genome genome;
  BehaviorVector behavior{};
  double novelty = 0.0;
  int generation = 0;
  int index = 0;
  std::vector<Pose> final_poses;  // repetition-0 end state, for classification
};

struct NoveltySearchResult {
  std::vector<NoveltyIndividual> individuals;  // every individual ever evaluated
  std::vector<BehaviorVector> archive;
  std::uint64_t total_world_steps = 0;
};

/// The generational loop with selection proportionate to novelty instead of
/// fitness and no elitism. Every evaluated individual is returned.
NoveltySearchResult run_novelty_search(const EvalConfig& eval, const GAConfig& ga,
                                       const NoveltyConfig& novelty, std::uint64_t master_seed,
                                       int n_threads = 0);

}  // namespace swarmevo
