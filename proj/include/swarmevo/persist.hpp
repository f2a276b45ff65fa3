#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmevo/analysis.hpp"
#include "swarmevo/config.hpp"
#include "swarmevo/evolution.hpp"

namespace swarmevo {

/// One line of the append-only run manifest.
struct ManifestEntry {
  int id = 0;
  std::uint64_t seed = 0;
  double fitness = 0.0;
  std::string pattern;
  double quality = 0.0;
  std::map<std::string, std::string> keys;  // free-form grouping columns
  std::string record_file;
  std::string genome_file;
  std::string snapshot_file;
};

std::string run_record_to_json(const RunRecord& record, const EvalConfig& cfg);
RunRecord run_record_from_json(const std::string& text, EvalConfig* cfg_out = nullptr);

/// Directory-backed store for evaluation runs. Every persisted run gets a
/// record file (JSON, embeds the producing eval config), a genome file, a
/// final snapshot, and one manifest line; ids are unique and monotone.
class RunStore {
 public:
  explicit RunStore(std::string directory);

  int persist_run(const RunRecord& record, const Genome& genome, const EvalConfig& cfg,
                  const BehaviorLabel& label,
                  const std::map<std::string, std::string>& keys = {});

  const std::string& directory() const { return directory_; }
  std::string manifest_path() const;

  std::vector<ManifestEntry> load_manifest() const;
  RunRecord load_record(int id, EvalConfig* cfg_out = nullptr) const;
  Genome load_genome(int id) const;

 private:
  std::string directory_;
  int next_id_;
};

/// Re-evaluates the persisted (config, seed) pair of one manifest entry and
/// checks fitness, final snapshot, and classification against the stored
/// values. Returns an empty string on success, otherwise the first mismatch.
std::string replay_run(const RunStore& store, int id);

/// Per-group median and quartiles of fitness and quality plus a pattern
/// histogram, grouped by the given manifest key columns. CSV text.
std::string report_summary(const std::vector<ManifestEntry>& entries,
                           const std::vector<std::string>& group_keys);

void save_trace_jsonl(const EvolutionTrace& trace, const std::string& path);

/// Minimal CSV assembly: values are quoted when they contain separators.
std::string csv_escape(const std::string& field);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

double median(std::vector<double> values);
double quartile(std::vector<double> values, double q);

}  // namespace swarmevo
