#include "swarmevo/controllers.hpp"

#include <stdexcept>

namespace swarmevo {

namespace {
constexpr int kNetInputs = kSensorCount + 1;
}

NetTopology actor_topology(int hidden) { return NetTopology{kNetInputs, hidden, 2, false}; }

NetTopology predictor_topology(int hidden) {
  return NetTopology{kNetInputs, hidden, kSensorCount, true};
}

Genome init_genome(const NetTopology& actor, const NetTopology& predictor, Rng& rng) {
  Genome g;
  g.actor = actor;
  g.predictor = predictor;
  const int total = actor.param_count() + predictor.param_count();
  g.weights.resize(static_cast<std::size_t>(total));
  for (double& w : g.weights) w = rng.uniform(-0.5, 0.5);
  return g;
}

Genome mutate(const Genome& parent, double rate, double delta, Rng& rng) {
  if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("mutation rate must be in [0, 1]");
  if (delta <= 0.0) throw std::invalid_argument("mutation delta must be > 0");
  Genome child = parent;
  for (double& w : child.weights) {
    if (rng.bernoulli(rate)) w += rng.uniform(-delta, delta);
  }
  return child;
}

}  // namespace swarmevo
