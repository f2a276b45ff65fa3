// Genome validation and file round trip. Kept out of controllers.cpp so the
// finite-value checks are compiled without fast-math.

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "swarmevo/controllers.hpp"

namespace swarmevo {

namespace {

nlohmann::json topology_to_json(const NetTopology& t) {
  return {{"inputs", t.inputs}, {"hidden", t.hidden}, {"outputs", t.outputs},
          {"recurrent", t.recurrent}};
}

NetTopology topology_from_json(const nlohmann::json& j) {
  NetTopology t;
  t.inputs = j.at("inputs").get<int>();
  t.hidden = j.at("hidden").get<int>();
  t.outputs = j.at("outputs").get<int>();
  t.recurrent = j.at("recurrent").get<bool>();
  if (t.inputs < 1 || t.hidden < 1 || t.outputs < 1) {
    throw std::invalid_argument("topology layer sizes must be >= 1");
  }
  return t;
}

}  // namespace

void validate_genome(const Genome& genome) {
  const int expected = genome.actor.param_count() + genome.predictor.param_count();
  if (static_cast<int>(genome.weights.size()) != expected) {
    throw std::invalid_argument("genome has " + std::to_string(genome.weights.size()) +
                                " weights, topologies require " + std::to_string(expected));
  }
  for (double w : genome.weights) {
    if (!std::isfinite(w)) throw std::invalid_argument("genome contains non-finite weight");
  }
}

std::string genome_to_json(const Genome& genome) {
  nlohmann::json j;
  j["format"] = "swarmevo-genome";
  j["actor"] = topology_to_json(genome.actor);
  j["predictor"] = topology_to_json(genome.predictor);
  j["weights"] = genome.weights;
  return j.dump();
}

Genome genome_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("format", "") != "swarmevo-genome") {
    throw std::invalid_argument("not a genome file");
  }
  Genome g;
  g.actor = topology_from_json(j.at("actor"));
  g.predictor = topology_from_json(j.at("predictor"));
  g.weights = j.at("weights").get<std::vector<double>>();
  validate_genome(g);
  return g;
}

void save_genome(const Genome& genome, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << genome_to_json(genome) << '\n';
}

Genome load_genome(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return genome_from_json(text);
}

}  // namespace swarmevo
