#include "swarmevo/evolution.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "swarmevo/parallel.hpp"

namespace swarmevo {

void GAConfig::validate() const {
  std::string errors;
  auto fail = [&errors](const char* msg) {
    if (!errors.empty()) errors += "; ";
    errors += msg;
  };
  if (population_size < 1) fail("population_size must be >= 1");
  if (generations < 1) fail("generations must be >= 1");
  if (mutation_rate < 0.0 || mutation_rate > 1.0) fail("mutation_rate must be in [0, 1]");
  if (mutation_delta <= 0.0) fail("mutation_delta must be > 0");
  if (elitism < 0) fail("elitism must be >= 0");
  if (elitism >= population_size) fail("elitism must be smaller than population_size");
  if (!errors.empty()) throw std::invalid_argument("invalid GA config: " + errors);
}

std::uint64_t GAConfig::hash() const {
  std::uint64_t h = 0x1f3a9d8c0b47e652ULL;
  auto mix = [&h](std::uint64_t v) { h = splitmix64(h) ^ v; };
  mix(static_cast<std::uint64_t>(population_size));
  mix(static_cast<std::uint64_t>(generations));
  std::uint64_t bits;
  __builtin_memcpy(&bits, &mutation_rate, sizeof(bits));
  mix(bits);
  __builtin_memcpy(&bits, &mutation_delta, sizeof(bits));
  mix(bits);
  mix(static_cast<std::uint64_t>(elitism));
  return splitmix64(h);
}

std::size_t proportionate_select(std::span<const double> fitnesses, Rng& rng) {
  if (fitnesses.empty()) throw std::invalid_argument("cannot select from an empty population");
  double sum = 0.0;
  for (double f : fitnesses) {
    if (f < 0.0) throw std::invalid_argument("proportionate selection needs fitness >= 0");
    sum += f;
  }
  if (sum <= 0.0) return rng.below(fitnesses.size());
  const double target = rng.uniform01() * sum;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    cumulative += fitnesses[i];
    if (cumulative > target) return i;
  }
  return fitnesses.size() - 1;  // guard against accumulated rounding
}

std::uint64_t expected_ga_world_steps(const EvalConfig& eval, const GAConfig& ga) {
  const std::uint64_t evals =
      static_cast<std::uint64_t>(ga.population_size) +
      static_cast<std::uint64_t>(ga.population_size - ga.elitism) *
          static_cast<std::uint64_t>(ga.generations - 1);
  return evals * static_cast<std::uint64_t>(eval.repetitions) *
         static_cast<std::uint64_t>(eval.steps);
}

namespace {

struct Individual {
  Genome genome;
  double fitness = 0.0;
  bool evaluated = false;
  RunRecord record;
};

constexpr std::uint64_t kGaInitTag = 0x6a51u;
constexpr std::uint64_t kGaEvalTag = 0xe7a1u;

}  // namespace

EvolutionTrace run_generational_ga(const EvalConfig& eval, const GAConfig& ga,
                                   std::uint64_t master_seed, int n_threads) {
  eval.validate();
  ga.validate();

  Rng master(derive_seed(master_seed, kGaInitTag));
  const NetTopology actor = eval.actor_net();
  const NetTopology predictor = eval.predictor_net();

  std::vector<Individual> population(static_cast<std::size_t>(ga.population_size));
  for (auto& ind : population) ind.genome = init_genome(actor, predictor, master);

  EvolutionTrace trace;
  trace.best_fitness = -1.0;

  for (int gen = 0; gen < ga.generations; ++gen) {
    std::vector<int> todo;
    for (int i = 0; i < ga.population_size; ++i) {
      if (!population[static_cast<std::size_t>(i)].evaluated) todo.push_back(i);
    }
    parallel_for(static_cast<int>(todo.size()), n_threads, [&](int k) {
      const int idx = todo[static_cast<std::size_t>(k)];
      auto& ind = population[static_cast<std::size_t>(idx)];
      const std::uint64_t seed = derive_seed(master_seed, kGaEvalTag, gen, idx);
      auto [fitness, record] = evaluate_fitness(ind.genome, eval, seed);
      ind.fitness = fitness;
      ind.record = std::move(record);
      ind.evaluated = true;
    });
    for (int idx : todo) {
      const auto& ind = population[static_cast<std::size_t>(idx)];
      trace.evaluations.push_back(EvalRecord{gen, idx, derive_seed(master_seed, kGaEvalTag, gen, idx),
                                             ind.fitness, ind.record.wall_seconds});
      trace.total_world_steps += static_cast<std::uint64_t>(eval.repetitions) *
                                 static_cast<std::uint64_t>(eval.steps);
    }

    double best = -1.0;
    double sum = 0.0;
    int best_idx = 0;
    for (int i = 0; i < ga.population_size; ++i) {
      const double f = population[static_cast<std::size_t>(i)].fitness;
      sum += f;
      if (f > best) {
        best = f;
        best_idx = i;
      }
    }
    trace.best_per_generation.push_back(best);
    trace.mean_per_generation.push_back(sum / ga.population_size);
    if (best > trace.best_fitness) {
      trace.best_fitness = best;
      trace.best_genome = population[static_cast<std::size_t>(best_idx)].genome;
      trace.best_record = population[static_cast<std::size_t>(best_idx)].record;
    }

    if (gen + 1 == ga.generations) break;

    // Age-based replacement: elites survive with their stored fitness, every
    // other slot is a fresh mutant of a fitness-proportionate parent.
    std::vector<int> order(static_cast<std::size_t>(ga.population_size));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return population[static_cast<std::size_t>(a)].fitness >
             population[static_cast<std::size_t>(b)].fitness;
    });
    std::vector<double> fitnesses(static_cast<std::size_t>(ga.population_size));
    for (int i = 0; i < ga.population_size; ++i) {
      fitnesses[static_cast<std::size_t>(i)] = population[static_cast<std::size_t>(i)].fitness;
    }

    std::vector<Individual> next;
    next.reserve(static_cast<std::size_t>(ga.population_size));
    for (int e = 0; e < ga.elitism; ++e) {
      next.push_back(population[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);
    }
    for (int slot = ga.elitism; slot < ga.population_size; ++slot) {
      const std::size_t parent = proportionate_select(fitnesses, master);
      Individual child;
      child.genome = mutate(population[parent].genome, ga.mutation_rate, ga.mutation_delta, master);
      next.push_back(std::move(child));
    }
    population = std::move(next);
  }

  assert(trace.total_world_steps == expected_ga_world_steps(eval, ga));
  return trace;
}

EvolutionTrace run_one_plus_one(const EvalConfig& eval, OnePlusOneState& state,
                                int max_evaluations, double mutation_rate, double mutation_delta,
                                Rng& rng) {
  eval.validate();
  if (state.alpha <= 0.0 || state.alpha > 1.0) {
    throw std::invalid_argument("re-evaluation weight alpha must be in (0, 1]");
  }
  if (state.reeval_prob < 0.0 || state.reeval_prob > 1.0) {
    throw std::invalid_argument("re-evaluation probability must be in [0, 1]");
  }

  EvolutionTrace trace;
  trace.best_fitness = -1.0;

  // One persistent world: evaluations continue from the previous end poses.
  TorusWorld world = TorusWorld::place_agents_uniform(eval.grid_side, eval.swarm_size, rng);

  auto evaluate_in_place = [&](const Genome& genome, RunRecord* record) {
    const double f = simulate_run(genome, eval, world, rng, SimMode::Full, record);
    trace.total_world_steps += static_cast<std::uint64_t>(eval.steps);
    return f;
  };

  int evaluations = 0;
  auto log_eval = [&](int individual, double fitness, double wall) {
    trace.evaluations.push_back(EvalRecord{evaluations, individual, 0, fitness, wall});
    trace.best_per_generation.push_back(state.champion_fitness);
    trace.mean_per_generation.push_back(state.champion_fitness);
  };

  if (!state.champion_evaluated && evaluations < max_evaluations) {
    RunRecord record;
    state.champion_fitness = evaluate_in_place(state.champion, &record);
    state.champion_evaluated = true;
    ++state.evaluation_count;
    ++evaluations;
    trace.best_record = record;
    log_eval(0, state.champion_fitness, record.wall_seconds);
  }

  while (evaluations < max_evaluations) {
    if (rng.bernoulli(state.reeval_prob)) {
      RunRecord record;
      const double f = evaluate_in_place(state.champion, &record);
      state.champion_fitness = state.alpha * f + (1.0 - state.alpha) * state.champion_fitness;
      trace.best_record = record;
      ++state.evaluation_count;
      ++evaluations;
      log_eval(0, f, record.wall_seconds);
    } else {
      const Genome mutant = mutate(state.champion, mutation_rate, mutation_delta, rng);
      RunRecord record;
      const double f = evaluate_in_place(mutant, &record);
      ++state.evaluation_count;
      ++evaluations;
      if (f > state.champion_fitness) {
        state.champion = mutant;
        state.champion_fitness = f;
        trace.best_record = record;
      }
      log_eval(1, f, record.wall_seconds);
    }
  }

  trace.best_genome = state.champion;
  trace.best_fitness = state.champion_fitness;
  return trace;
}

std::vector<BaselineResult> random_baseline(const EvalConfig& eval, int count, BaselineMode mode,
                                            int pool_size, std::uint64_t seed, int n_threads) {
  eval.validate();
  if (count < 1) throw std::invalid_argument("baseline count must be >= 1");
  if (mode == BaselineMode::Selected && pool_size < 1) {
    throw std::invalid_argument("selected baseline needs pool_size >= 1");
  }
  const int pool = mode == BaselineMode::Plain ? 1 : pool_size;
  const NetTopology actor = eval.actor_net();
  const NetTopology predictor = eval.predictor_net();

  const int total = count * pool;
  std::vector<double> fitnesses(static_cast<std::size_t>(total));
  std::vector<Genome> genomes(static_cast<std::size_t>(total));
  std::vector<RunRecord> records(static_cast<std::size_t>(total));
  parallel_for(total, n_threads, [&](int i) {
    Rng rng(derive_seed(seed, 0xba5eu, i));
    genomes[static_cast<std::size_t>(i)] = init_genome(actor, predictor, rng);
    auto [f, record] = evaluate_fitness(genomes[static_cast<std::size_t>(i)], eval,
                                        derive_seed(seed, 0xba5e2u, i));
    fitnesses[static_cast<std::size_t>(i)] = f;
    records[static_cast<std::size_t>(i)] = std::move(record);
  });

  std::vector<BaselineResult> results;
  results.reserve(static_cast<std::size_t>(count));
  for (int rep = 0; rep < count; ++rep) {
    int best = rep * pool;
    for (int j = rep * pool; j < (rep + 1) * pool; ++j) {
      if (fitnesses[static_cast<std::size_t>(j)] > fitnesses[static_cast<std::size_t>(best)]) {
        best = j;
      }
    }
    results.push_back(BaselineResult{std::move(genomes[static_cast<std::size_t>(best)]),
                                     fitnesses[static_cast<std::size_t>(best)],
                                     std::move(records[static_cast<std::size_t>(best)])});
  }
  return results;
}

void NoveltyConfig::validate() const {
  if (k < 1) throw std::invalid_argument("novelty k must be >= 1");
  if (archive_prob < 0.0 || archive_prob > 1.0) {
    throw std::invalid_argument("archive_prob must be in [0, 1]");
  }
  if (repetitions < 1) throw std::invalid_argument("novelty repetitions must be >= 1");
}

namespace {

double behavior_distance(const BehaviorVector& a, const BehaviorVector& b) {
  double sum = 0.0;
  for (int r = 0; r < kSensorCount; ++r) {
    const double d = a[static_cast<std::size_t>(r)] - b[static_cast<std::size_t>(r)];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace

double novelty_score(std::size_t self, std::span<const BehaviorVector> population,
                     std::span<const BehaviorVector> archive, int k) {
  if (k < 1) throw std::invalid_argument("novelty k must be >= 1");
  if (self >= population.size()) throw std::invalid_argument("self index out of range");
  std::vector<double> distances;
  distances.reserve(population.size() + archive.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (i == self) continue;
    distances.push_back(behavior_distance(population[self], population[i]));
  }
  for (const BehaviorVector& v : archive) {
    distances.push_back(behavior_distance(population[self], v));
  }
  if (distances.empty()) {
    throw std::invalid_argument("novelty needs at least one other behavior vector");
  }
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), distances.size());
  std::partial_sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(take),
                    distances.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += distances[i];
  return sum / static_cast<double>(take);
}

NoveltySearchResult run_novelty_search(const EvalConfig& eval, const GAConfig& ga,
                                       const NoveltyConfig& novelty, std::uint64_t master_seed,
                                       int n_threads) {
  eval.validate();
  ga.validate();
  novelty.validate();

  Rng master(derive_seed(master_seed, 0x0a71u));
  const NetTopology actor = eval.actor_net();
  const NetTopology predictor = eval.predictor_net();

  std::vector<Genome> population(static_cast<std::size_t>(ga.population_size));
  for (auto& g : population) g = init_genome(actor, predictor, master);

  NoveltySearchResult result;
  for (int gen = 0; gen < ga.generations; ++gen) {
    std::vector<BehaviorVector> vectors(static_cast<std::size_t>(ga.population_size));
    std::vector<std::vector<Pose>> final_poses(static_cast<std::size_t>(ga.population_size));
    parallel_for(ga.population_size, n_threads, [&](int i) {
      const std::uint64_t seed = derive_seed(master_seed, 0xbe7au, gen, i);
      vectors[static_cast<std::size_t>(i)] =
          behavior_vector(population[static_cast<std::size_t>(i)], eval, novelty.repetitions, seed,
                          &final_poses[static_cast<std::size_t>(i)]);
    });
    result.total_world_steps += static_cast<std::uint64_t>(ga.population_size) *
                                static_cast<std::uint64_t>(novelty.repetitions) *
                                static_cast<std::uint64_t>(eval.steps);

    std::vector<double> scores(static_cast<std::size_t>(ga.population_size));
    for (int i = 0; i < ga.population_size; ++i) {
      scores[static_cast<std::size_t>(i)] =
          novelty_score(static_cast<std::size_t>(i), vectors, result.archive, novelty.k);
    }

    for (int i = 0; i < ga.population_size; ++i) {
      NoveltyIndividual ind;
      ind.genome = population[static_cast<std::size_t>(i)];
      ind.behavior = vectors[static_cast<std::size_t>(i)];
      ind.novelty = scores[static_cast<std::size_t>(i)];
      ind.generation = gen;
      ind.index = i;
      ind.final_poses = std::move(final_poses[static_cast<std::size_t>(i)]);
      result.individuals.push_back(std::move(ind));
    }

    for (int i = 0; i < ga.population_size; ++i) {
      if (master.bernoulli(novelty.archive_prob)) {
        result.archive.push_back(vectors[static_cast<std::size_t>(i)]);
      }
    }

    if (gen + 1 == ga.generations) break;

    // No elitism: every slot of the next generation is a mutant of a
    // novelty-proportionate parent.
    std::vector<Genome> next;
    next.reserve(static_cast<std::size_t>(ga.population_size));
    for (int slot = 0; slot < ga.population_size; ++slot) {
      const std::size_t parent = proportionate_select(scores, master);
      next.push_back(mutate(population[parent], ga.mutation_rate, ga.mutation_delta, master));
    }
    population = std::move(next);
  }
  return result;
}

}  // namespace swarmevo
