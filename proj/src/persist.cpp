#include "swarmevo/persist.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace swarmevo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json pose_to_json(const Pose& p) {
  return json::array({p.x, p.y, static_cast<int>(p.heading)});
}

Pose pose_from_json(const json& j) {
  Pose p;
  p.x = j.at(0).get<int>();
  p.y = j.at(1).get<int>();
  p.heading = static_cast<Heading>(j.at(2).get<int>());
  return p;
}

json poses_to_json(const std::vector<Pose>& poses) {
  json arr = json::array();
  for (const Pose& p : poses) arr.push_back(pose_to_json(p));
  return arr;
}

std::vector<Pose> poses_from_json(const json& arr) {
  std::vector<Pose> poses;
  poses.reserve(arr.size());
  for (const json& j : arr) poses.push_back(pose_from_json(j));
  return poses;
}

}  // namespace

std::string run_record_to_json(const RunRecord& record, const EvalConfig& cfg) {
  json j;
  j["format"] = "swarmevo-run";
  j["seed"] = record.seed;
  j["config_hash"] = record.config_hash;
  j["eval"] = json::parse(eval_config_to_json(cfg));
  j["grid_side"] = record.grid_side;
  j["swarm_size"] = record.swarm_size;
  j["steps"] = record.steps;
  j["fitness"] = record.fitness;
  j["final_poses"] = poses_to_json(record.final_poses);
  j["mean_predictions"] = record.mean_predictions;
  j["final_sensor_means"] = record.final_sensor_means;
  j["wall_seconds"] = record.wall_seconds;
  if (record.trace) {
    json trace;
    trace["poses"] = json::array();
    for (const auto& step : record.trace->poses) trace["poses"].push_back(poses_to_json(step));
    trace["readings"] = json::array();
    for (const auto& step : record.trace->readings) {
      json row = json::array();
      for (const SensorReading& r : step) row.push_back(r.values);
      trace["readings"].push_back(std::move(row));
    }
    trace["predictions"] = json::array();
    for (const auto& step : record.trace->predictions) {
      json row = json::array();
      for (const auto& p : step) row.push_back(p);
      trace["predictions"].push_back(std::move(row));
    }
    trace["actions"] = json::array();
    for (const auto& step : record.trace->actions) {
      json row = json::array();
      for (const Action& a : step) {
        row.push_back(json::array({static_cast<int>(a.motion), static_cast<int>(a.dir)}));
      }
      trace["actions"].push_back(std::move(row));
    }
    j["trace"] = std::move(trace);
  }
  return j.dump();
}

RunRecord run_record_from_json(const std::string& text, EvalConfig* cfg_out) {
  const json j = json::parse(text);
  if (j.value("format", "") != "swarmevo-run") throw std::invalid_argument("not a run record");
  RunRecord record;
  record.seed = j.at("seed").get<std::uint64_t>();
  record.config_hash = j.at("config_hash").get<std::uint64_t>();
  record.grid_side = j.at("grid_side").get<int>();
  record.swarm_size = j.at("swarm_size").get<int>();
  record.steps = j.at("steps").get<int>();
  record.fitness = j.at("fitness").get<double>();
  record.final_poses = poses_from_json(j.at("final_poses"));
  record.mean_predictions = j.at("mean_predictions").get<std::array<double, kSensorCount>>();
  record.final_sensor_means = j.at("final_sensor_means").get<std::array<double, kSensorCount>>();
  record.wall_seconds = j.at("wall_seconds").get<double>();
  if (j.contains("trace")) {
    StepTrace trace;
    for (const json& step : j.at("trace").at("poses")) trace.poses.push_back(poses_from_json(step));
    for (const json& step : j.at("trace").at("readings")) {
      std::vector<SensorReading> row;
      for (const json& r : step) {
        SensorReading reading;
        reading.values = r.get<std::array<std::uint8_t, kSensorCount>>();
        row.push_back(reading);
      }
      trace.readings.push_back(std::move(row));
    }
    for (const json& step : j.at("trace").at("predictions")) {
      std::vector<std::array<double, kSensorCount>> row;
      for (const json& p : step) row.push_back(p.get<std::array<double, kSensorCount>>());
      trace.predictions.push_back(std::move(row));
    }
    for (const json& step : j.at("trace").at("actions")) {
      std::vector<Action> row;
      for (const json& a : step) {
        Action action;
        action.motion = static_cast<Motion>(a.at(0).get<int>());
        action.dir = static_cast<TurnDir>(a.at(1).get<int>());
        row.push_back(action);
      }
      trace.actions.push_back(std::move(row));
    }
    record.trace = std::move(trace);
  }
  if (cfg_out) *cfg_out = eval_config_from_json(j.at("eval").dump());
  return record;
}

RunStore::RunStore(std::string directory) : directory_(std::move(directory)), next_id_(0) {
  fs::create_directories(fs::path(directory_) / "runs");
  for (const ManifestEntry& entry : load_manifest()) {
    next_id_ = std::max(next_id_, entry.id + 1);
  }
}

std::string RunStore::manifest_path() const {
  return (fs::path(directory_) / "manifest.jsonl").string();
}

int RunStore::persist_run(const RunRecord& record, const Genome& genome, const EvalConfig& cfg,
                          const BehaviorLabel& label,
                          const std::map<std::string, std::string>& keys) {
  const int id = next_id_++;
  const std::string stem = "run_" + std::to_string(id);
  const fs::path runs = fs::path(directory_) / "runs";
  const std::string record_file = (runs / (stem + ".json")).string();
  const std::string genome_file = (runs / (stem + ".genome.json")).string();
  const std::string snapshot_file = (runs / (stem + ".snapshot.txt")).string();

  write_text_file(record_file, run_record_to_json(record, cfg) + "\n");
  save_genome(genome, genome_file);
  write_text_file(snapshot_file, record.final_world().to_snapshot());

  json line;
  line["id"] = id;
  line["seed"] = record.seed;
  line["fitness"] = record.fitness;
  line["pattern"] = pattern_name(label.pattern);
  line["quality"] = label.quality;
  line["keys"] = keys;
  line["record_file"] = record_file;
  line["genome_file"] = genome_file;
  line["snapshot_file"] = snapshot_file;
  std::ofstream manifest(manifest_path(), std::ios::app);
  if (!manifest) throw std::runtime_error("cannot append to " + manifest_path());
  manifest << line.dump() << '\n';
  return id;
}

std::vector<ManifestEntry> RunStore::load_manifest() const {
  std::vector<ManifestEntry> entries;
  std::ifstream in(manifest_path());
  if (!in) return entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    ManifestEntry entry;
    entry.id = j.at("id").get<int>();
    entry.seed = j.at("seed").get<std::uint64_t>();
    entry.fitness = j.at("fitness").get<double>();
    entry.pattern = j.at("pattern").get<std::string>();
    entry.quality = j.at("quality").get<double>();
    entry.keys = j.at("keys").get<std::map<std::string, std::string>>();
    entry.record_file = j.at("record_file").get<std::string>();
    entry.genome_file = j.at("genome_file").get<std::string>();
    entry.snapshot_file = j.at("snapshot_file").get<std::string>();
    entries.push_back(std::move(entry));
  }
  return entries;
}

RunRecord RunStore::load_record(int id, EvalConfig* cfg_out) const {
  const std::string path =
      (fs::path(directory_) / "runs" / ("run_" + std::to_string(id) + ".json")).string();
  return run_record_from_json(read_text_file(path), cfg_out);
}

Genome RunStore::load_genome(int id) const {
  const std::string path =
      (fs::path(directory_) / "runs" / ("run_" + std::to_string(id) + ".genome.json")).string();
  return ::swarmevo::load_genome(path);
}

std::string replay_run(const RunStore& store, int id) {
  EvalConfig cfg;
  const RunRecord stored = store.load_record(id, &cfg);
  const Genome genome = store.load_genome(id);
  const auto [fitness, record] = evaluate_fitness(genome, cfg, stored.seed);
  if (fitness != stored.fitness) {
    return "fitness mismatch: stored " + std::to_string(stored.fitness) + ", replayed " +
           std::to_string(fitness);
  }
  if (record.final_poses != stored.final_poses) return "final poses mismatch";
  const BehaviorLabel replayed = classify(record.final_world());
  const BehaviorLabel original = classify(stored.final_world());
  if (replayed.pattern != original.pattern || replayed.quality != original.quality) {
    return "classification mismatch";
  }
  return "";
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quartile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quartile of empty set");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quartile fraction must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string report_summary(const std::vector<ManifestEntry>& entries,
                           const std::vector<std::string>& group_keys) {
  if (entries.empty()) throw std::invalid_argument("cannot summarize an empty manifest");

  auto group_of = [&group_keys](const ManifestEntry& e) {
    std::vector<std::string> values;
    for (const std::string& key : group_keys) {
      auto it = e.keys.find(key);
      values.push_back(it == e.keys.end() ? "" : it->second);
    }
    return values;
  };

  std::map<std::vector<std::string>, std::vector<const ManifestEntry*>> groups;
  for (const ManifestEntry& e : entries) groups[group_of(e)].push_back(&e);

  std::vector<std::string> patterns;
  for (const ManifestEntry& e : entries) {
    if (std::find(patterns.begin(), patterns.end(), e.pattern) == patterns.end()) {
      patterns.push_back(e.pattern);
    }
  }
  std::sort(patterns.begin(), patterns.end());

  std::ostringstream out;
  for (const std::string& key : group_keys) out << csv_escape(key) << ',';
  out << "runs,fitness_q1,fitness_median,fitness_q3,quality_q1,quality_median,quality_q3";
  for (const std::string& p : patterns) out << ',' << csv_escape("count_" + p);
  out << '\n';

  for (const auto& [group, members] : groups) {
    std::vector<double> fitness;
    std::vector<double> quality;
    std::map<std::string, int> histogram;
    for (const ManifestEntry* e : members) {
      fitness.push_back(e->fitness);
      quality.push_back(e->quality);
      ++histogram[e->pattern];
    }
    for (const std::string& v : group) out << csv_escape(v) << ',';
    out << members.size() << ',' << quartile(fitness, 0.25) << ',' << median(fitness) << ','
        << quartile(fitness, 0.75) << ',' << quartile(quality, 0.25) << ',' << median(quality)
        << ',' << quartile(quality, 0.75);
    for (const std::string& p : patterns) out << ',' << histogram[p];
    out << '\n';
  }
  return out.str();
}

void save_trace_jsonl(const EvolutionTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const EvalRecord& e : trace.evaluations) {
    json j;
    j["generation"] = e.generation;
    j["individual"] = e.individual;
    j["seed"] = e.seed;
    j["fitness"] = e.fitness;
    j["wall_seconds"] = e.wall_seconds;
    out << j.dump() << '\n';
  }
  json summary;
  summary["summary"] = true;
  summary["evaluations"] = trace.evaluations.size();
  summary["best_fitness"] = trace.best_fitness;
  summary["best_per_generation"] = trace.best_per_generation;
  summary["mean_per_generation"] = trace.mean_per_generation;
  summary["total_world_steps"] = trace.total_world_steps;
  out << summary.dump() << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace swarmevo
