#pragma once

#include <span>
#include <string>
#include <vector>

#include "swarmevo/rng.hpp"
#include "swarmevo/torus_world.hpp"

namespace swarmevo {

/// Fixed layer sizes of one network. Parameters are laid out flat as
/// input weights (hidden x inputs, row per hidden unit), recurrent weights
/// (hidden x hidden, only when recurrent), hidden biases, output weights
/// (outputs x hidden), output biases.
struct NetTopology {
  int inputs = 0;
  int hidden = 0;
  int outputs = 0;
  bool recurrent = false;

  int param_count() const {
    return hidden * inputs + (recurrent ? hidden * hidden : 0) + hidden +
           outputs * hidden + outputs;
  }

  bool operator==(const NetTopology&) const = default;
};

/// 15 inputs (14 sensors + previous move/turn selector), tanh hidden and
/// output units; outputs are discretized at zero.
NetTopology actor_topology(int hidden = 8);

/// 15 inputs (14 sensors + next move/turn selector), tanh recurrent hidden
/// layer, sigmoid outputs, one per sensor.
NetTopology predictor_topology(int hidden = 14);

/// One actor-predictor weight pair as a flat vector: all actor parameters
/// followed by all predictor parameters. Immutable in practice; operators
/// return fresh genomes.
struct Genome {
  NetTopology actor;
  NetTopology predictor;
  std::vector<double> weights;

  int actor_param_count() const { return actor.param_count(); }
  std::span<const double> actor_weights() const {
    return {weights.data(), static_cast<std::size_t>(actor.param_count())};
  }
  std::span<const double> predictor_weights() const {
    return {weights.data() + actor.param_count(),
            static_cast<std::size_t>(predictor.param_count())};
  }

  bool operator==(const Genome&) const = default;
};

/// Every parameter drawn independently from uniform [-0.5, 0.5].
Genome init_genome(const NetTopology& actor, const NetTopology& predictor, Rng& rng);

/// Each gene independently, with probability rate, gets a uniform
/// [-delta, delta] offset added; the parent is left untouched.
Genome mutate(const Genome& parent, double rate, double delta, Rng& rng);

/// Recurrent hidden activations of one agent's predictor. Zeroed at the
/// start of every simulation run.
struct PredictorState {
  std::vector<double> hidden;

  explicit PredictorState(int size = 0) : hidden(static_cast<std::size_t>(size), 0.0) {}
  void reset() { std::fill(hidden.begin(), hidden.end(), 0.0); }
};

/// Evaluation form of the actor part of a genome (weights repacked for the
/// inner loops at construction). forward() is pure: the same (genome,
/// sensors, last action) always yields the same action.
class ActorNet {
 public:
  explicit ActorNet(const Genome& genome);

  Action forward(const SensorReading& sensors, int last_move_selector) const;

  /// Whole-swarm forward pass; one call per time step keeps the weights hot
  /// and lets the activations vectorize across agents. Result per agent is
  /// the same as forward().
  void forward_batch(const SensorReading* readings, const std::uint8_t* last_selectors,
                     Action* actions, int count) const;

 private:
  std::vector<double> wt_in_;   // [inputs][padded hidden]
  std::vector<double> b_h_;     // [padded hidden]
  std::vector<double> w_out_;   // [outputs][hidden]
  std::vector<double> b_out_;   // [outputs]
  int inputs_;
  int hidden_;
  int outputs_;
};

/// Evaluation form of the predictor part of a genome. Elman recurrence:
/// hidden(t) = tanh(W_in x + W_rec hidden(t-1) + b); outputs are logistic,
/// one probability per sensor.
class PredictorNet {
 public:
  explicit PredictorNet(const Genome& genome);

  void forward(const SensorReading& sensors, int next_move_selector, PredictorState& state,
               std::span<double> out) const;

  /// Whole-swarm forward pass over flat row-padded state and output
  /// matrices; per-agent results match forward(). states has count rows of
  /// padded_hidden() lanes, outs count rows of padded_outputs() lanes.
  void forward_batch(const SensorReading* readings, const std::uint8_t* next_selectors,
                     double* states, double* outs, int count) const;

  int hidden_size() const { return hidden_; }
  int padded_hidden() const;
  int padded_outputs() const;

 private:
  std::vector<double> wt_in_;   // [inputs][padded hidden]
  std::vector<double> wt_rec_;  // [hidden][padded hidden]
  std::vector<double> b_h_;     // [padded hidden]
  std::vector<double> wt_out_;  // [hidden][padded outputs]
  std::vector<double> b_out_;   // [padded outputs]
  int inputs_;
  int hidden_;
  int outputs_;
};

/// Throws std::invalid_argument when the weight count does not match the
/// topologies or any weight is non-finite.
void validate_genome(const Genome& genome);

/// Self-describing JSON round trip; weights survive bit-exactly.
std::string genome_to_json(const Genome& genome);
Genome genome_from_json(const std::string& text);
void save_genome(const Genome& genome, const std::string& path);
Genome load_genome(const std::string& path);

}  // namespace swarmevo
