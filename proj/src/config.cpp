#include "swarmevo/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace swarmevo {

using nlohmann::json;

namespace {

/// Collects violations so a bad config reports every problem at once.
struct Errors {
  std::vector<std::string> messages;

  void add(const std::string& m) { messages.push_back(m); }
  void raise_if_any() const {
    if (messages.empty()) return;
    std::string joined = "invalid config: ";
    for (std::size_t i = 0; i < messages.size(); ++i) {
      if (i) joined += "; ";
      joined += messages[i];
    }
    throw std::invalid_argument(joined);
  }
};

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where,
                Errors& errors) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) errors.add("unknown key '" + where + it.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where, Errors& errors) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    errors.add("key '" + where + key + "' has the wrong type");
  }
}

void parse_eval(const json& obj, EvalConfig& cfg, Errors& errors) {
  check_keys(obj,
             {"grid_side", "swarm_size", "steps", "repetitions", "noise_p", "predefined",
              "predictor_removed", "threshold_predictions", "actor_hidden", "predictor_hidden"},
             "eval.", errors);
  read(obj, "grid_side", cfg.grid_side, "eval.", errors);
  read(obj, "swarm_size", cfg.swarm_size, "eval.", errors);
  read(obj, "steps", cfg.steps, "eval.", errors);
  read(obj, "repetitions", cfg.repetitions, "eval.", errors);
  read(obj, "noise_p", cfg.noise_p, "eval.", errors);
  read(obj, "predictor_removed", cfg.predictor_removed, "eval.", errors);
  read(obj, "threshold_predictions", cfg.threshold_predictions, "eval.", errors);
  read(obj, "actor_hidden", cfg.actor_hidden, "eval.", errors);
  read(obj, "predictor_hidden", cfg.predictor_hidden, "eval.", errors);
  if (obj.contains("predefined")) {
    const json& pre = obj.at("predefined");
    if (!pre.is_object()) {
      errors.add("key 'eval.predefined' must map sensor indices to 0/1");
    } else {
      for (auto it = pre.begin(); it != pre.end(); ++it) {
        int index = -1;
        try {
          index = std::stoi(it.key());
        } catch (...) {
          errors.add("key 'eval.predefined." + it.key() + "' is not a sensor index");
          continue;
        }
        if (index < 0 || index >= kSensorCount) {
          errors.add("key 'eval.predefined." + it.key() + "' is out of range");
          continue;
        }
        const int value = it.value().is_number_integer() ? it.value().get<int>() : -2;
        if (value != 0 && value != 1) {
          errors.add("key 'eval.predefined." + it.key() + "' must be 0 or 1");
          continue;
        }
        cfg.predefined[static_cast<std::size_t>(index)] = static_cast<std::int8_t>(value);
      }
    }
  }

  if (cfg.swarm_size < 1) errors.add("key 'eval.swarm_size' must be >= 1");
  if (cfg.steps < 1) errors.add("key 'eval.steps' must be >= 1");
  if (cfg.repetitions < 1) errors.add("key 'eval.repetitions' must be >= 1");
  if (cfg.noise_p < 0.0 || cfg.noise_p > 1.0) errors.add("key 'eval.noise_p' must be in [0, 1]");
  if (cfg.actor_hidden < 1) errors.add("key 'eval.actor_hidden' must be >= 1");
  if (cfg.predictor_hidden < 1) errors.add("key 'eval.predictor_hidden' must be >= 1");
  if (cfg.predictor_removed) {
    for (int r = 0; r < kSensorCount; ++r) {
      if (cfg.predefined[static_cast<std::size_t>(r)] < 0) {
        errors.add("key 'eval.predictor_removed' requires all 14 predefined targets");
        break;
      }
    }
  }
}

void parse_ga(const json& obj, GAConfig& cfg, Errors& errors) {
  check_keys(obj, {"population_size", "generations", "mutation_rate", "mutation_delta", "elitism"},
             "ga.", errors);
  read(obj, "population_size", cfg.population_size, "ga.", errors);
  read(obj, "generations", cfg.generations, "ga.", errors);
  read(obj, "mutation_rate", cfg.mutation_rate, "ga.", errors);
  read(obj, "mutation_delta", cfg.mutation_delta, "ga.", errors);
  read(obj, "elitism", cfg.elitism, "ga.", errors);
  if (cfg.population_size < 1) errors.add("key 'ga.population_size' must be >= 1");
  if (cfg.generations < 1) errors.add("key 'ga.generations' must be >= 1");
  if (cfg.mutation_rate < 0.0 || cfg.mutation_rate > 1.0) {
    errors.add("key 'ga.mutation_rate' must be in [0, 1]");
  }
  if (cfg.mutation_delta <= 0.0) errors.add("key 'ga.mutation_delta' must be > 0");
  if (cfg.elitism < 0 || cfg.elitism >= cfg.population_size) {
    errors.add("key 'ga.elitism' must be in [0, population_size)");
  }
}

void parse_novelty(const json& obj, NoveltyConfig& cfg, Errors& errors) {
  check_keys(obj, {"k", "archive_prob", "repetitions"}, "novelty.", errors);
  read(obj, "k", cfg.k, "novelty.", errors);
  read(obj, "archive_prob", cfg.archive_prob, "novelty.", errors);
  read(obj, "repetitions", cfg.repetitions, "novelty.", errors);
  if (cfg.k < 1) errors.add("key 'novelty.k' must be >= 1");
  if (cfg.archive_prob < 0.0 || cfg.archive_prob > 1.0) {
    errors.add("key 'novelty.archive_prob' must be in [0, 1]");
  }
  if (cfg.repetitions < 1) errors.add("key 'novelty.repetitions' must be >= 1");
}

ExperimentKind kind_from_name(const std::string& name, Errors& errors) {
  if (name == "evolve") return ExperimentKind::Evolve;
  if (name == "noise") return ExperimentKind::NoiseStudy;
  if (name == "damage") return ExperimentKind::DamageRepair;
  if (name == "rerun") return ExperimentKind::RerunScalability;
  if (name == "engineered") return ExperimentKind::EngineeredSO;
  if (name == "random_baseline") return ExperimentKind::RandomBaseline;
  if (name == "novelty") return ExperimentKind::NoveltyCompare;
  if (name == "sweep") return ExperimentKind::HyperSweep;
  errors.add("unknown experiment kind '" + name + "'");
  return ExperimentKind::Evolve;
}

}  // namespace

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Evolve: return "evolve";
    case ExperimentKind::NoiseStudy: return "noise";
    case ExperimentKind::DamageRepair: return "damage";
    case ExperimentKind::RerunScalability: return "rerun";
    case ExperimentKind::EngineeredSO: return "engineered";
    case ExperimentKind::RandomBaseline: return "random_baseline";
    case ExperimentKind::NoveltyCompare: return "novelty";
    case ExperimentKind::HyperSweep: return "sweep";
  }
  return "evolve";
}

std::uint64_t ExperimentSpec::hash() const {
  std::uint64_t h = eval.hash();
  h = splitmix64(h) ^ ga.hash();
  h = splitmix64(h) ^ static_cast<std::uint64_t>(kind);
  for (std::uint64_t s : seeds) h = splitmix64(h) ^ s;
  return splitmix64(h);
}

ExperimentSpec parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");

  Errors errors;
  check_keys(root,
             {"experiment", "optimizer", "seeds", "eval", "ga", "novelty", "one_plus_one",
              "noise", "engineered", "baseline", "rerun", "damage", "sweep"},
             "", errors);

  ExperimentSpec spec;
  std::string kind_name = "evolve";
  read(root, "experiment", kind_name, "", errors);
  spec.kind = kind_from_name(kind_name, errors);

  std::string optimizer_name = "generational";
  read(root, "optimizer", optimizer_name, "", errors);
  if (optimizer_name == "generational") {
    spec.optimizer = OptimizerKind::Generational;
  } else if (optimizer_name == "one_plus_one") {
    spec.optimizer = OptimizerKind::OnePlusOne;
  } else {
    errors.add("unknown optimizer '" + optimizer_name + "'");
  }

  if (root.contains("seeds")) {
    try {
      spec.seeds = root.at("seeds").get<std::vector<std::uint64_t>>();
    } catch (const json::exception&) {
      errors.add("key 'seeds' must be a list of non-negative integers");
    }
  }
  if (spec.seeds.empty()) spec.seeds = {1};

  if (root.contains("eval")) parse_eval(root.at("eval"), spec.eval, errors);
  if (root.contains("ga")) parse_ga(root.at("ga"), spec.ga, errors);
  if (root.contains("novelty")) parse_novelty(root.at("novelty"), spec.novelty, errors);

  if (root.contains("one_plus_one")) {
    const json& obj = root.at("one_plus_one");
    check_keys(obj, {"max_evaluations", "alpha", "reeval_prob"}, "one_plus_one.", errors);
    read(obj, "max_evaluations", spec.one_plus_one.max_evaluations, "one_plus_one.", errors);
    read(obj, "alpha", spec.one_plus_one.alpha, "one_plus_one.", errors);
    read(obj, "reeval_prob", spec.one_plus_one.reeval_prob, "one_plus_one.", errors);
    if (spec.one_plus_one.max_evaluations < 1) {
      errors.add("key 'one_plus_one.max_evaluations' must be >= 1");
    }
    if (spec.one_plus_one.alpha <= 0.0 || spec.one_plus_one.alpha > 1.0) {
      errors.add("key 'one_plus_one.alpha' must be in (0, 1]");
    }
    if (spec.one_plus_one.reeval_prob < 0.0 || spec.one_plus_one.reeval_prob > 1.0) {
      errors.add("key 'one_plus_one.reeval_prob' must be in [0, 1]");
    }
  }

  if (root.contains("noise")) {
    const json& obj = root.at("noise");
    check_keys(obj, {"grid_sides", "levels"}, "noise.", errors);
    read(obj, "grid_sides", spec.noise.grid_sides, "noise.", errors);
    read(obj, "levels", spec.noise.levels, "noise.", errors);
    for (double level : spec.noise.levels) {
      if (level < 0.0 || level > 1.0) {
        errors.add("key 'noise.levels' entries must be in [0, 1]");
        break;
      }
    }
  }

  if (root.contains("engineered")) {
    const json& obj = root.at("engineered");
    check_keys(obj, {"mode", "grid_sides"}, "engineered.", errors);
    std::string mode = "partial";
    read(obj, "mode", mode, "engineered.", errors);
    if (mode == "partial") {
      spec.engineered.mode = EngineeredMode::Partial;
    } else if (mode == "full") {
      spec.engineered.mode = EngineeredMode::Full;
    } else {
      errors.add("key 'engineered.mode' must be 'partial' or 'full'");
    }
    read(obj, "grid_sides", spec.engineered.grid_sides, "engineered.", errors);
  }

  if (root.contains("baseline")) {
    const json& obj = root.at("baseline");
    check_keys(obj, {"mode", "count", "pool_size"}, "baseline.", errors);
    std::string mode = "plain";
    read(obj, "mode", mode, "baseline.", errors);
    if (mode == "plain") {
      spec.baseline.mode = BaselineMode::Plain;
    } else if (mode == "selected") {
      spec.baseline.mode = BaselineMode::Selected;
    } else {
      errors.add("key 'baseline.mode' must be 'plain' or 'selected'");
    }
    read(obj, "count", spec.baseline.count, "baseline.", errors);
    read(obj, "pool_size", spec.baseline.pool_size, "baseline.", errors);
    if (spec.baseline.count < 1) errors.add("key 'baseline.count' must be >= 1");
    if (spec.baseline.mode == BaselineMode::Selected && spec.baseline.pool_size < 1) {
      errors.add("key 'baseline.pool_size' must be >= 1");
    }
  }

  if (root.contains("rerun")) {
    const json& obj = root.at("rerun");
    check_keys(obj, {"grid_sides", "steps", "genome_files"}, "rerun.", errors);
    read(obj, "grid_sides", spec.rerun.grid_sides, "rerun.", errors);
    read(obj, "steps", spec.rerun.steps, "rerun.", errors);
    read(obj, "genome_files", spec.rerun.genome_files, "rerun.", errors);
    if (spec.rerun.steps < 1) errors.add("key 'rerun.steps' must be >= 1");
  }

  if (root.contains("damage")) {
    const json& obj = root.at("damage");
    check_keys(obj, {"mode", "region", "repair_steps", "record_file"}, "damage.", errors);
    std::string mode = "remove";
    read(obj, "mode", mode, "damage.", errors);
    if (mode == "remove") {
      spec.damage.mode = DamageMode::RemoveArea;
    } else if (mode == "reposition") {
      spec.damage.mode = DamageMode::RepositionArea;
    } else {
      errors.add("key 'damage.mode' must be 'remove' or 'reposition'");
    }
    read(obj, "region", spec.damage.region, "damage.", errors);
    read(obj, "repair_steps", spec.damage.repair_steps, "damage.", errors);
    read(obj, "record_file", spec.damage.record_file, "damage.", errors);
    if (spec.damage.repair_steps < 1) errors.add("key 'damage.repair_steps' must be >= 1");
  }

  if (root.contains("sweep")) {
    const json& obj = root.at("sweep");
    check_keys(obj,
               {"population_sizes", "generation_counts", "eval_steps", "repetition_counts",
                "mutation_rates", "budget"},
               "sweep.", errors);
    read(obj, "population_sizes", spec.sweep.population_sizes, "sweep.", errors);
    read(obj, "generation_counts", spec.sweep.generation_counts, "sweep.", errors);
    read(obj, "eval_steps", spec.sweep.eval_steps, "sweep.", errors);
    read(obj, "repetition_counts", spec.sweep.repetition_counts, "sweep.", errors);
    read(obj, "mutation_rates", spec.sweep.mutation_rates, "sweep.", errors);
    read(obj, "budget", spec.sweep.budget, "sweep.", errors);
    if (spec.sweep.budget < 0) errors.add("key 'sweep.budget' must be >= 0");
    for (double rate : spec.sweep.mutation_rates) {
      if (rate < 0.0 || rate > 1.0) {
        errors.add("key 'sweep.mutation_rates' entries must be in [0, 1]");
        break;
      }
    }
  }

  // Kinds that carry their own grid lists fill eval.grid_side per cell.
  const bool grid_from_list = spec.kind == ExperimentKind::NoiseStudy ||
                              spec.kind == ExperimentKind::EngineeredSO ||
                              spec.kind == ExperimentKind::RerunScalability;
  if (!grid_from_list && spec.kind != ExperimentKind::DamageRepair) {
    if (spec.eval.grid_side < 1) {
      errors.add("key 'eval.grid_side' is required");
    } else if (spec.eval.swarm_size > spec.eval.grid_side * spec.eval.grid_side) {
      errors.add("key 'eval.swarm_size' exceeds the grid capacity");
    }
  }
  if (spec.kind == ExperimentKind::NoiseStudy && spec.noise.grid_sides.empty()) {
    errors.add("key 'noise.grid_sides' is required");
  }
  if (spec.kind == ExperimentKind::NoiseStudy && spec.noise.levels.empty()) {
    errors.add("key 'noise.levels' is required");
  }
  if (spec.kind == ExperimentKind::EngineeredSO && spec.engineered.grid_sides.empty()) {
    errors.add("key 'engineered.grid_sides' is required");
  }
  if (spec.kind == ExperimentKind::RerunScalability && spec.rerun.grid_sides.empty()) {
    errors.add("key 'rerun.grid_sides' is required");
  }

  errors.raise_if_any();
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string eval_config_to_json(const EvalConfig& cfg) {
  json j;
  j["grid_side"] = cfg.grid_side;
  j["swarm_size"] = cfg.swarm_size;
  j["steps"] = cfg.steps;
  j["repetitions"] = cfg.repetitions;
  j["noise_p"] = cfg.noise_p;
  json pre = json::object();
  for (int r = 0; r < kSensorCount; ++r) {
    if (cfg.predefined[static_cast<std::size_t>(r)] >= 0) {
      pre[std::to_string(r)] = static_cast<int>(cfg.predefined[static_cast<std::size_t>(r)]);
    }
  }
  if (!pre.empty()) j["predefined"] = pre;
  j["predictor_removed"] = cfg.predictor_removed;
  j["threshold_predictions"] = cfg.threshold_predictions;
  j["actor_hidden"] = cfg.actor_hidden;
  j["predictor_hidden"] = cfg.predictor_hidden;
  return j.dump();
}

EvalConfig eval_config_from_json(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("eval config parse error: ") + e.what());
  }
  Errors errors;
  EvalConfig cfg;
  parse_eval(root, cfg, errors);
  errors.raise_if_any();
  return cfg;
}

}  // namespace swarmevo
