#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "swarmevo/controllers.hpp"

using namespace swarmevo;

namespace {

// Independent forward-pass oracle: plain matrix arithmetic over the
// documented flat layout, no shared code with the library implementation.
struct OracleNets {
  const Genome& g;

  std::vector<double> inputs(const SensorReading& s, int selector) const {
    std::vector<double> x;
    for (int r = 0; r < kSensorCount; ++r) x.push_back(s.values[r]);
    x.push_back(selector);
    return x;
  }

  std::pair<double, double> actor_outputs(const SensorReading& s, int selector) const {
    const auto x = inputs(s, selector);
    const int in = g.actor.inputs;
    const int hid = g.actor.hidden;
    const double* w = g.weights.data();
    std::vector<double> h(hid);
    for (int j = 0; j < hid; ++j) {
      double acc = w[hid * in + j];  // bias block follows the input weights
      for (int i = 0; i < in; ++i) acc += w[j * in + i] * x[i];
      h[j] = std::tanh(acc);
    }
    const double* wo = w + hid * in + hid;
    const double* bo = wo + 2 * hid;
    double out[2];
    for (int o = 0; o < 2; ++o) {
      double acc = bo[o];
      for (int j = 0; j < hid; ++j) acc += wo[o * hid + j] * h[j];
      out[o] = std::tanh(acc);
    }
    return {out[0], out[1]};
  }

  std::vector<double> predictor_step(const SensorReading& s, int selector,
                                     std::vector<double>& hidden) const {
    const auto x = inputs(s, selector);
    const int in = g.predictor.inputs;
    const int hid = g.predictor.hidden;
    const int out_n = g.predictor.outputs;
    const double* w = g.weights.data() + g.actor.param_count();
    const double* w_rec = w + hid * in;
    const double* b_h = w_rec + hid * hid;
    const double* w_out = b_h + hid;
    const double* b_out = w_out + out_n * hid;
    std::vector<double> next(hid);
    for (int j = 0; j < hid; ++j) {
      double acc = b_h[j];
      for (int i = 0; i < in; ++i) acc += w[j * in + i] * x[i];
      for (int k = 0; k < hid; ++k) acc += w_rec[j * hid + k] * hidden[k];
      next[j] = std::tanh(acc);
    }
    std::vector<double> out(out_n);
    for (int o = 0; o < out_n; ++o) {
      double acc = b_out[o];
      for (int j = 0; j < hid; ++j) acc += w_out[o * hid + j] * next[j];
      out[o] = 1.0 / (1.0 + std::exp(-acc));
    }
    hidden = next;
    return out;
  }
};

SensorReading random_reading(Rng& rng) {
  SensorReading s;
  for (int r = 0; r < kSensorCount; ++r) s.values[r] = rng.bernoulli(0.4) ? 1 : 0;
  return s;
}

}  // namespace

TEST_CASE("genome layout sizes") {
  const NetTopology a = actor_topology();
  const NetTopology p = predictor_topology();
  CHECK(a.param_count() == 15 * 8 + 8 + 8 * 2 + 2);
  CHECK(p.param_count() == 15 * 14 + 14 * 14 + 14 + 14 * 14 + 14);
  Rng rng(1);
  const Genome g = init_genome(a, p, rng);
  CHECK(static_cast<int>(g.weights.size()) == a.param_count() + p.param_count());
}

TEST_CASE("initialization stays inside the half-unit box") {
  Rng rng(2);
  const Genome g = init_genome(actor_topology(), predictor_topology(), rng);
  for (double w : g.weights) {
    CHECK(w >= -0.5);
    CHECK(w <= 0.5);
  }
}

TEST_CASE("initialization is seed-reproducible") {
  Rng a(3);
  Rng b(3);
  CHECK(init_genome(actor_topology(), predictor_topology(), a) ==
        init_genome(actor_topology(), predictor_topology(), b));
}

TEST_CASE("initialization mean is near zero") {
  Rng rng(4);
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < 130; ++i) {  // > 10^5 samples total
    const Genome g = init_genome(actor_topology(), predictor_topology(), rng);
    for (double w : g.weights) sum += w;
    count += static_cast<int>(g.weights.size());
  }
  CHECK(count > 100000);
  CHECK(std::fabs(sum / count) < 0.01);
}

TEST_CASE("mutation with rate zero copies the parent") {
  Rng rng(5);
  const Genome parent = init_genome(actor_topology(), predictor_topology(), rng);
  CHECK(mutate(parent, 0.0, 0.4, rng) == parent);
}

TEST_CASE("mutation leaves the parent untouched and bounds offsets") {
  Rng rng(6);
  const Genome parent = init_genome(actor_topology(), predictor_topology(), rng);
  const Genome copy = parent;
  const Genome child = mutate(parent, 1.0, 0.4, rng);
  CHECK(parent == copy);
  for (std::size_t i = 0; i < parent.weights.size(); ++i) {
    CHECK(std::fabs(child.weights[i] - parent.weights[i]) <= 0.4);
  }
}

TEST_CASE("mutation touches the expected fraction of genes") {
  Rng rng(7);
  const Genome parent = init_genome(actor_topology(), predictor_topology(), rng);
  int changed = 0;
  int total = 0;
  for (int i = 0; i < 130; ++i) {
    const Genome child = mutate(parent, 0.1, 0.4, rng);
    for (std::size_t k = 0; k < parent.weights.size(); ++k) {
      changed += child.weights[k] != parent.weights[k] ? 1 : 0;
      ++total;
    }
  }
  const double fraction = static_cast<double>(changed) / total;
  CHECK(fraction > 0.095);
  CHECK(fraction < 0.105);
}

TEST_CASE("all-zero genome selects move-right and predicts one half") {
  Genome g;
  g.actor = actor_topology();
  g.predictor = predictor_topology();
  g.weights.assign(static_cast<std::size_t>(g.actor.param_count() + g.predictor.param_count()),
                   0.0);
  const ActorNet actor(g);
  SensorReading s;
  const Action a = actor.forward(s, 0);
  CHECK(a.motion == Motion::Move);
  CHECK(a.dir == TurnDir::Right);

  const PredictorNet predictor(g);
  PredictorState state(14);
  std::array<double, kSensorCount> out{};
  predictor.forward(s, 1, state, out);
  for (double p : out) CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("actor is deterministic in its inputs") {
  Rng rng(8);
  const Genome g = init_genome(actor_topology(), predictor_topology(), rng);
  const ActorNet actor(g);
  const SensorReading s = random_reading(rng);
  CHECK(actor.forward(s, 1) == actor.forward(s, 1));
}

TEST_CASE("actor matches the matrix-arithmetic oracle") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Genome g = init_genome(actor_topology(), predictor_topology(), rng);
    const ActorNet actor(g);
    const OracleNets oracle{g};
    const SensorReading s = random_reading(rng);
    const int selector = rng.bernoulli(0.5) ? 1 : 0;
    const auto [o0, o1] = oracle.actor_outputs(s, selector);
    const Action got = actor.forward(s, selector);
    const Action want{o0 >= 0.0 ? Motion::Move : Motion::Turn,
                      o1 >= 0.0 ? TurnDir::Right : TurnDir::Left};
    CHECK(got == want);
  }
}

TEST_CASE("predictor matches the recurrent oracle over a sequence") {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Genome g = init_genome(actor_topology(), predictor_topology(), rng);
    const PredictorNet predictor(g);
    const OracleNets oracle{g};
    PredictorState state(14);
    std::vector<double> oracle_hidden(14, 0.0);
    for (int t = 0; t < 3; ++t) {
      const SensorReading s = random_reading(rng);
      const int selector = rng.bernoulli(0.5) ? 1 : 0;
      std::array<double, kSensorCount> out{};
      predictor.forward(s, selector, state, out);
      const std::vector<double> expected = oracle.predictor_step(s, selector, oracle_hidden);
      for (int r = 0; r < kSensorCount; ++r) {
        CHECK(std::fabs(out[r] - expected[r]) < 1e-9);
      }
    }
  }
}

TEST_CASE("batched forward passes match the per-agent path") {
  Rng rng(11);
  const Genome g = init_genome(actor_topology(), predictor_topology(), rng);
  const ActorNet actor(g);
  const PredictorNet predictor(g);
  constexpr int kAgents = 17;
  std::vector<SensorReading> readings(kAgents);
  std::vector<std::uint8_t> selectors(kAgents);
  for (int n = 0; n < kAgents; ++n) {
    readings[n] = random_reading(rng);
    selectors[n] = rng.bernoulli(0.5) ? 1 : 0;
  }

  std::vector<Action> batch_actions(kAgents);
  actor.forward_batch(readings.data(), selectors.data(), batch_actions.data(), kAgents);
  for (int n = 0; n < kAgents; ++n) {
    CHECK(batch_actions[n] == actor.forward(readings[n], selectors[n]));
  }

  const int ph = predictor.padded_hidden();
  const int po = predictor.padded_outputs();
  std::vector<double> states(static_cast<std::size_t>(kAgents * ph), 0.0);
  std::vector<double> outs(static_cast<std::size_t>(kAgents * po), 0.0);
  predictor.forward_batch(readings.data(), selectors.data(), states.data(), outs.data(), kAgents);
  for (int n = 0; n < kAgents; ++n) {
    PredictorState state(14);
    std::array<double, kSensorCount> out{};
    predictor.forward(readings[n], selectors[n], state, out);
    for (int r = 0; r < kSensorCount; ++r) {
      CHECK(std::fabs(outs[n * po + r] - out[r]) < 1e-12);
    }
    for (int h = 0; h < 14; ++h) {
      CHECK(std::fabs(states[n * ph + h] - state.hidden[h]) < 1e-12);
    }
  }
}

TEST_CASE("predictor outputs stay strictly inside (0,1)") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Genome g = init_genome(actor_topology(), predictor_topology(), rng);
    for (double& w : g.weights) w *= 4.0;  // beyond the mutation drift range
    const PredictorNet predictor(g);
    PredictorState state(14);
    std::array<double, kSensorCount> out{};
    predictor.forward(random_reading(rng), 1, state, out);
    for (double p : out) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
}

TEST_CASE("saturated predictors still respect the closed unit interval") {
  Rng rng(16);
  Genome g = init_genome(actor_topology(), predictor_topology(), rng);
  for (double& w : g.weights) w *= 1000.0;
  const PredictorNet predictor(g);
  PredictorState state(14);
  std::array<double, kSensorCount> out{};
  predictor.forward(random_reading(rng), 1, state, out);
  for (double p : out) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("zero recurrent weights make the predictor memoryless") {
  Rng rng(13);
  Genome g = init_genome(actor_topology(), predictor_topology(), rng);
  const int hid = g.predictor.hidden;
  const int in = g.predictor.inputs;
  double* rec = g.weights.data() + g.actor.param_count() + hid * in;
  std::fill(rec, rec + hid * hid, 0.0);

  const PredictorNet predictor(g);
  const SensorReading s = random_reading(rng);
  PredictorState fresh(14);
  std::array<double, kSensorCount> out_fresh{};
  predictor.forward(s, 0, fresh, out_fresh);

  PredictorState warmed(14);
  std::array<double, kSensorCount> scratch{};
  predictor.forward(random_reading(rng), 1, warmed, scratch);
  predictor.forward(random_reading(rng), 0, warmed, scratch);
  std::array<double, kSensorCount> out_warmed{};
  predictor.forward(s, 0, warmed, out_warmed);

  for (int r = 0; r < kSensorCount; ++r) {
    CHECK(out_fresh[r] == doctest::Approx(out_warmed[r]).epsilon(1e-12));
  }
}

TEST_CASE("genome json round trip is bit exact") {
  Rng rng(14);
  const Genome g = init_genome(actor_topology(), predictor_topology(), rng);
  const std::string once = genome_to_json(g);
  const Genome parsed = genome_from_json(once);
  CHECK(parsed == g);
  CHECK(genome_to_json(parsed) == once);
}

TEST_CASE("genome validation flags bad weight vectors") {
  Rng rng(15);
  Genome g = init_genome(actor_topology(), predictor_topology(), rng);
  CHECK_NOTHROW(validate_genome(g));
  Genome short_genome = g;
  short_genome.weights.pop_back();
  CHECK_THROWS_AS(validate_genome(short_genome), std::invalid_argument);
  Genome bad = g;
  bad.weights[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate_genome(bad), std::invalid_argument);
}
