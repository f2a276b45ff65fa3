#include "swarmevo/experiments.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "swarmevo/parallel.hpp"

namespace swarmevo {

namespace {

std::string cell_message(const char* what, int grid, double extra, std::uint64_t seed,
                         double fitness) {
  std::ostringstream out;
  out << what << " L=" << grid;
  if (extra >= 0.0) out << " x=" << extra;
  out << " seed=" << seed << " best_fitness=" << fitness;
  return out.str();
}

}  // namespace

std::vector<EvolveOutcome> run_evolve_suite(const EvalConfig& eval, const GAConfig& ga,
                                            std::span<const std::uint64_t> seeds, int n_threads,
                                            const ProgressFn& progress) {
  std::vector<EvolveOutcome> outcomes;
  outcomes.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    EvolveOutcome outcome;
    outcome.seed = seed;
    outcome.trace = run_generational_ga(eval, ga, seed, n_threads);
    outcome.best_fitness = outcome.trace.best_fitness;
    outcome.best_genome = outcome.trace.best_genome;
    outcome.best_record = outcome.trace.best_record;
    outcome.label = classify(outcome.best_record.final_world());
    if (progress) progress(cell_message("evolve", eval.grid_side, -1.0, seed, outcome.best_fitness));
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

std::vector<NoiseStudyRow> run_noise_study(const EvalConfig& base_eval, const GAConfig& ga,
                                           std::span<const int> grid_sides,
                                           std::span<const double> noise_levels,
                                           std::span<const std::uint64_t> seeds, int n_threads,
                                           const ProgressFn& progress) {
  std::vector<NoiseStudyRow> rows;
  for (int grid : grid_sides) {
    for (double level : noise_levels) {
      EvalConfig eval = base_eval;
      eval.grid_side = grid;
      eval.noise_p = level;
      for (std::uint64_t seed : seeds) {
        const EvolutionTrace trace = run_generational_ga(eval, ga, seed, n_threads);
        const BehaviorLabel label = classify(trace.best_record.final_world());
        rows.push_back(NoiseStudyRow{grid, level, seed, trace.best_fitness, label.pattern,
                                     label.quality});
        if (progress) progress(cell_message("noise", grid, level, seed, trace.best_fitness));
      }
    }
  }
  return rows;
}

DamageRepairOutcome run_damage_repair(const Genome& genome, const RunRecord& initial,
                                      const EvalConfig& eval, const DamageSpec& spec,
                                      std::uint64_t repair_seed) {
  if (spec.repair_steps < 1) throw std::invalid_argument("repair_steps must be >= 1");
  TorusWorld world = initial.final_world();
  const int side = world.side_length();
  if (spec.x0 < 0 || spec.y0 < 0 || spec.x1 >= side || spec.y1 >= side || spec.x0 > spec.x1 ||
      spec.y0 > spec.y1) {
    throw std::invalid_argument("damage region must be a rectangle inside the grid");
  }

  DamageRepairOutcome outcome;
  const BehaviorLabel before = classify(world);
  outcome.pattern = before.pattern;
  outcome.quality_before = before.quality;

  Rng rng(derive_seed(repair_seed, 0xda3au));
  if (spec.mode == DamageMode::RemoveArea) {
    outcome.affected_agents = world.remove_agents_in_region(spec.x0, spec.y0, spec.x1, spec.y1);
  } else {
    outcome.affected_agents =
        world.reposition_agents_in_region(spec.x0, spec.y0, spec.x1, spec.y1, rng);
  }

  const int initial_n = initial.swarm_size;
  outcome.quality_start = solution_quality(world, outcome.pattern);
  outcome.similarity_start = similarity(world.poses(), initial.final_poses, initial_n);

  EvalConfig repair_eval = eval;
  repair_eval.grid_side = side;
  repair_eval.swarm_size = world.agent_count();
  repair_eval.steps = spec.repair_steps;
  repair_eval.repetitions = 1;
  repair_eval.validate();

  RunRecord record;
  record.seed = repair_seed;
  record.config_hash = repair_eval.hash();
  outcome.repair_fitness =
      simulate_run(genome, repair_eval, world, rng, SimMode::Full, &record, false);
  outcome.quality_end = solution_quality(world, outcome.pattern);
  outcome.similarity = similarity(world.poses(), initial.final_poses, initial_n);
  outcome.final_poses = world.poses();
  return outcome;
}

std::vector<RerunRow> run_rerun_scalability(std::span<const Genome> genomes,
                                            const EvalConfig& base_eval,
                                            std::span<const int> grid_sides, int steps,
                                            std::span<const std::uint64_t> seeds, int n_threads,
                                            const ProgressFn& progress) {
  struct Cell {
    int genome_index;
    int grid;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int grid : grid_sides) {
    for (std::size_t g = 0; g < genomes.size(); ++g) {
      for (std::uint64_t seed : seeds) {
        cells.push_back(Cell{static_cast<int>(g), grid, seed});
      }
    }
  }
  std::vector<RerunRow> rows(cells.size());
  parallel_for(static_cast<int>(cells.size()), n_threads, [&](int i) {
    const Cell& cell = cells[static_cast<std::size_t>(i)];
    RerunRow row;
    row.genome_index = cell.genome_index;
    row.grid_side = cell.grid;
    row.seed = cell.seed;
    EvalConfig eval = base_eval;
    eval.grid_side = cell.grid;
    eval.steps = steps;
    eval.repetitions = 1;
    if (eval.swarm_size > cell.grid * cell.grid) {
      row.capacity_error = true;
    } else {
      const auto [fitness, record] = evaluate_fitness(
          genomes[static_cast<std::size_t>(cell.genome_index)], eval,
          derive_seed(cell.seed, 0x3e30u, cell.genome_index, cell.grid));
      row.fitness = fitness;
      const BehaviorLabel label = classify(record.final_world());
      row.pattern = label.pattern;
      row.quality = label.quality;
    }
    rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  if (progress) progress("rerun grid sweep finished: " + std::to_string(rows.size()) + " cells");
  return rows;
}

PredefinedTargets line_partial_targets() {
  PredefinedTargets targets = no_predefined();
  for (int index : {0, 3, 8, 11}) targets[static_cast<std::size_t>(index)] = 1;
  return targets;
}

PredefinedTargets line_full_targets() {
  PredefinedTargets targets;
  targets.fill(0);
  for (int index : {0, 3, 8, 11}) targets[static_cast<std::size_t>(index)] = 1;
  return targets;
}

std::vector<EngineeredRow> run_engineered_so(const EvalConfig& base_eval, const GAConfig& base_ga,
                                             EngineeredMode mode, std::span<const int> grid_sides,
                                             std::span<const std::uint64_t> seeds, int n_threads,
                                             const ProgressFn& progress) {
  std::vector<EngineeredRow> rows;
  for (int grid : grid_sides) {
    EvalConfig eval = base_eval;
    eval.grid_side = grid;
    GAConfig ga = base_ga;
    if (mode == EngineeredMode::Partial) {
      eval.predefined = line_partial_targets();
      eval.predictor_removed = false;
      if (grid == 20) ga.mutation_rate = 0.3;
    } else {
      eval.predefined = line_full_targets();
      eval.predictor_removed = true;
    }
    for (std::uint64_t seed : seeds) {
      const EvolutionTrace trace = run_generational_ga(eval, ga, seed, n_threads);
      const BehaviorLabel label = classify(trace.best_record.final_world());
      rows.push_back(EngineeredRow{grid, seed, trace.best_fitness, label.pattern, label.quality});
      if (progress) progress(cell_message("engineered", grid, -1.0, seed, trace.best_fitness));
    }
  }
  return rows;
}

namespace {

SweepRow sweep_cell(const char* parameter, double value, const EvalConfig& eval,
                    const GAConfig& ga, int grid, std::uint64_t seed, int n_threads) {
  const EvolutionTrace trace = run_generational_ga(eval, ga, seed, n_threads);
  SweepRow row;
  row.parameter = parameter;
  row.value = value;
  row.population_size = ga.population_size;
  row.generations = ga.generations;
  row.steps = eval.steps;
  row.repetitions = eval.repetitions;
  row.mutation_rate = ga.mutation_rate;
  row.grid_side = grid;
  row.seed = seed;
  row.best_fitness = trace.best_fitness;
  row.evaluations = trace.evaluations.size();
  return row;
}

}  // namespace

std::vector<SweepRow> run_hyper_sweep(const SweepParams& sweep, const EvalConfig& base_eval,
                                      const GAConfig& base_ga, std::span<const int> grid_sides,
                                      std::span<const std::uint64_t> seeds, int n_threads,
                                      const ProgressFn& progress) {
  std::vector<SweepRow> rows;
  auto emit = [&](SweepRow row) {
    if (progress) {
      progress("sweep " + row.parameter + "=" + std::to_string(row.value) + " L=" +
               std::to_string(row.grid_side) + " seed=" + std::to_string(row.seed) +
               " best_fitness=" + std::to_string(row.best_fitness));
    }
    rows.push_back(std::move(row));
  };

  for (int grid : grid_sides) {
    EvalConfig eval = base_eval;
    eval.grid_side = grid;

    if (sweep.budget == 0) {
      // One-at-a-time sweeps: vary a single hyperparameter, keep the rest at
      // the base values.
      for (int p : sweep.population_sizes) {
        GAConfig ga = base_ga;
        ga.population_size = p;
        ga.elitism = std::min(ga.elitism, p - 1);
        for (std::uint64_t seed : seeds) {
          emit(sweep_cell("population_size", p, eval, ga, grid, seed, n_threads));
        }
      }
      for (int g : sweep.generation_counts) {
        GAConfig ga = base_ga;
        ga.generations = g;
        for (std::uint64_t seed : seeds) {
          emit(sweep_cell("generations", g, eval, ga, grid, seed, n_threads));
        }
      }
      for (int steps : sweep.eval_steps) {
        EvalConfig cell_eval = eval;
        cell_eval.steps = steps;
        for (std::uint64_t seed : seeds) {
          emit(sweep_cell("steps", steps, cell_eval, base_ga, grid, seed, n_threads));
        }
      }
      for (int reps : sweep.repetition_counts) {
        EvalConfig cell_eval = eval;
        cell_eval.repetitions = reps;
        for (std::uint64_t seed : seeds) {
          emit(sweep_cell("repetitions", reps, cell_eval, base_ga, grid, seed, n_threads));
        }
      }
      for (double rate : sweep.mutation_rates) {
        GAConfig ga = base_ga;
        ga.mutation_rate = rate;
        for (std::uint64_t seed : seeds) {
          emit(sweep_cell("mutation_rate", rate, eval, ga, grid, seed, n_threads));
        }
      }
    } else {
      // Fixed evaluation budget: population x generations = budget, short
      // evaluations (two runs of 200 steps) across all mutation rates.
      EvalConfig cell_eval = eval;
      cell_eval.repetitions = 2;
      cell_eval.steps = 200;
      for (int p : sweep.population_sizes) {
        if (sweep.budget % p != 0) {
          throw std::invalid_argument("budget must be divisible by every population size");
        }
        GAConfig ga = base_ga;
        ga.population_size = p;
        ga.generations = sweep.budget / p;
        ga.elitism = std::min(ga.elitism, p - 1);
        for (double rate : sweep.mutation_rates) {
          ga.mutation_rate = rate;
          for (std::uint64_t seed : seeds) {
            emit(sweep_cell("budget", rate, cell_eval, ga, grid, seed, n_threads));
          }
        }
      }
    }
  }
  return rows;
}

std::vector<NoveltySolution> extract_novelty_solutions(
    std::span<const NoveltyIndividual> individuals, int grid_side, NoveltySolutionMode mode,
    std::size_t count) {
  std::vector<NoveltySolution> solutions;
  solutions.reserve(individuals.size());
  for (std::size_t i = 0; i < individuals.size(); ++i) {
    const TorusWorld world = TorusWorld::from_poses(grid_side, individuals[i].final_poses);
    const BehaviorLabel label = classify(world);
    solutions.push_back(NoveltySolution{i, label.pattern, label.quality});
  }
  if (mode == NoveltySolutionMode::AllIndividuals || count >= solutions.size()) return solutions;
  std::stable_sort(solutions.begin(), solutions.end(),
                   [](const NoveltySolution& a, const NoveltySolution& b) {
                     return a.quality > b.quality;
                   });
  solutions.resize(count);
  return solutions;
}

}  // namespace swarmevo
