// Forward passes for the actor and predictor networks. This translation
// unit is compiled with fast-math so the activation loops vectorize.
//
// The weight matrices are copied into transposed, lane-padded buffers at
// construction: accumulating whole hidden-rows per input avoids horizontal
// reductions, and because every network input is binary the input-weight
// pass degenerates to summing the rows of the active inputs.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "swarmevo/controllers.hpp"

namespace swarmevo {

namespace {

constexpr int kNetInputs = kSensorCount + 1;
constexpr int kMaxHidden = 256;
constexpr int kMaxPadded = kMaxHidden + 8;

int padded(int n) { return (n + 7) & ~7; }

// dst[0..width) += src[0..width); the Width template argument pins the trip
// count so the common layer sizes compile to straight-line vector code.
template <int Width>
inline void add_row(double* dst, const double* src, int width) {
  if constexpr (Width > 0) {
    (void)width;
    for (int i = 0; i < Width; ++i) dst[i] += src[i];
  } else {
    for (int i = 0; i < width; ++i) dst[i] += src[i];
  }
}

// dst[0..width) += scale * src[0..width)
template <int Width>
inline void add_scaled_row(double* dst, const double* src, double scale, int width) {
  if constexpr (Width > 0) {
    (void)width;
    for (int i = 0; i < Width; ++i) dst[i] += scale * src[i];
  } else {
    for (int i = 0; i < width; ++i) dst[i] += scale * src[i];
  }
}

// Transposes a row-major [rows x cols] matrix into [cols x padded(rows)],
// zero-filling the padding lanes.
std::vector<double> transpose_padded(const double* w, int rows, int cols) {
  const int pad = padded(rows);
  std::vector<double> out(static_cast<std::size_t>(cols) * static_cast<std::size_t>(pad), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      out[static_cast<std::size_t>(c) * static_cast<std::size_t>(pad) +
          static_cast<std::size_t>(r)] = w[r * cols + c];
    }
  }
  return out;
}

std::vector<double> padded_copy(const double* v, int n) {
  std::vector<double> out(static_cast<std::size_t>(padded(n)), 0.0);
  std::copy(v, v + n, out.begin());
  return out;
}

}  // namespace

ActorNet::ActorNet(const Genome& genome)
    : inputs_(genome.actor.inputs), hidden_(genome.actor.hidden), outputs_(genome.actor.outputs) {
  if (genome.actor.recurrent) throw std::invalid_argument("actor topology must not be recurrent");
  if (hidden_ > kMaxHidden) throw std::invalid_argument("actor hidden layer too large");
  if (outputs_ != 2) throw std::invalid_argument("actor must have exactly two outputs");
  if (inputs_ != kNetInputs) throw std::invalid_argument("actor must have 15 inputs");
  const double* p = genome.weights.data();
  wt_in_ = transpose_padded(p, hidden_, inputs_);
  p += hidden_ * inputs_;
  b_h_ = padded_copy(p, hidden_);
  p += hidden_;
  w_out_.assign(p, p + outputs_ * hidden_);
  p += outputs_ * hidden_;
  b_out_.assign(p, p + outputs_);
}

Action ActorNet::forward(const SensorReading& sensors, int last_move_selector) const {
  Action action;
  const std::uint8_t selector = last_move_selector ? 1 : 0;
  forward_batch(&sensors, &selector, &action, 1);
  return action;
}

namespace {

struct ActorView {
  const double* wt_in;
  const double* b_h;
  const double* w_out;
  const double* b_out;
  int hidden;
};

template <int Ph>
void actor_batch(const ActorView& net, const SensorReading* readings,
                 const std::uint8_t* last_selectors, Action* actions, int count, int ph) {
  std::vector<double> pre(static_cast<std::size_t>(count) * static_cast<std::size_t>(ph));
  for (int n = 0; n < count; ++n) {
    double* row = pre.data() + static_cast<std::size_t>(n) * static_cast<std::size_t>(ph);
    std::copy(net.b_h, net.b_h + ph, row);
    const SensorReading& sensors = readings[n];
    for (int r = 0; r < kSensorCount; ++r) {
      if (sensors.values[static_cast<std::size_t>(r)]) {
        add_row<Ph>(row, net.wt_in + r * ph, ph);
      }
    }
    if (last_selectors[n]) add_row<Ph>(row, net.wt_in + kSensorCount * ph, ph);
  }

  double* act = pre.data();
  const std::size_t total = pre.size();
  for (std::size_t i = 0; i < total; ++i) act[i] = std::tanh(act[i]);

  for (int n = 0; n < count; ++n) {
    const double* row = act + static_cast<std::size_t>(n) * static_cast<std::size_t>(ph);
    double out[2];
    for (int o = 0; o < 2; ++o) {
      const double* w = net.w_out + o * net.hidden;
      double acc = net.b_out[o];
      for (int h = 0; h < net.hidden; ++h) acc += w[h] * row[h];
      out[o] = acc;
    }
    // tanh is monotone with tanh(0) = 0, so thresholding the output
    // activation at zero equals thresholding its preactivation.
    actions[n].motion = out[0] >= 0.0 ? Motion::Move : Motion::Turn;
    actions[n].dir = out[1] >= 0.0 ? TurnDir::Right : TurnDir::Left;
  }
}

}  // namespace

void ActorNet::forward_batch(const SensorReading* readings, const std::uint8_t* last_selectors,
                             Action* actions, int count) const {
  const int ph = padded(hidden_);
  const ActorView view{wt_in_.data(), b_h_.data(), w_out_.data(), b_out_.data(), hidden_};
  if (ph == 8) {
    actor_batch<8>(view, readings, last_selectors, actions, count, ph);
  } else if (ph == 16) {
    actor_batch<16>(view, readings, last_selectors, actions, count, ph);
  } else {
    actor_batch<0>(view, readings, last_selectors, actions, count, ph);
  }
}

PredictorNet::PredictorNet(const Genome& genome)
    : inputs_(genome.predictor.inputs),
      hidden_(genome.predictor.hidden),
      outputs_(genome.predictor.outputs) {
  if (!genome.predictor.recurrent) {
    throw std::invalid_argument("predictor topology must be recurrent");
  }
  if (hidden_ > kMaxHidden) throw std::invalid_argument("predictor hidden layer too large");
  if (outputs_ != kSensorCount) {
    throw std::invalid_argument("predictor must output one prediction per sensor");
  }
  if (inputs_ != kNetInputs) throw std::invalid_argument("predictor must have 15 inputs");
  const double* p = genome.weights.data() + genome.actor.param_count();
  wt_in_ = transpose_padded(p, hidden_, inputs_);
  p += hidden_ * inputs_;
  wt_rec_ = transpose_padded(p, hidden_, hidden_);
  p += hidden_ * hidden_;
  b_h_ = padded_copy(p, hidden_);
  p += hidden_;
  wt_out_ = transpose_padded(p, outputs_, hidden_);
  p += outputs_ * hidden_;
  b_out_ = padded_copy(p, outputs_);
}

int PredictorNet::padded_hidden() const { return padded(hidden_); }
int PredictorNet::padded_outputs() const { return padded(outputs_); }

void PredictorNet::forward(const SensorReading& sensors, int next_move_selector,
                           PredictorState& state, std::span<double> out) const {
  if (static_cast<int>(state.hidden.size()) != hidden_) {
    throw std::invalid_argument("predictor state size does not match the hidden layer");
  }
  double state_row[kMaxPadded] = {0.0};
  std::copy(state.hidden.begin(), state.hidden.end(), state_row);
  double out_row[kMaxPadded];
  const std::uint8_t selector = next_move_selector ? 1 : 0;
  forward_batch(&sensors, &selector, state_row, out_row, 1);
  for (int o = 0; o < outputs_; ++o) out[static_cast<std::size_t>(o)] = out_row[o];
  std::copy(state_row, state_row + hidden_, state.hidden.begin());
}

namespace {

struct PredictorView {
  const double* wt_in;
  const double* wt_rec;
  const double* b_h;
  const double* wt_out;
  const double* b_out;
  int hidden;
  int outputs;
};

template <int Ph, int Po>
void predictor_batch(const PredictorView& net, const SensorReading* readings,
                     const std::uint8_t* next_selectors, double* states, double* outs, int count,
                     int ph, int po) {
  std::vector<double> pre(static_cast<std::size_t>(count) * static_cast<std::size_t>(ph));
  for (int n = 0; n < count; ++n) {
    double* row = pre.data() + static_cast<std::size_t>(n) * static_cast<std::size_t>(ph);
    std::copy(net.b_h, net.b_h + ph, row);
    const SensorReading& sensors = readings[n];
    for (int r = 0; r < kSensorCount; ++r) {
      if (sensors.values[static_cast<std::size_t>(r)]) {
        add_row<Ph>(row, net.wt_in + r * ph, ph);
      }
    }
    if (next_selectors[n]) add_row<Ph>(row, net.wt_in + kSensorCount * ph, ph);
    const double* prev = states + static_cast<std::size_t>(n) * static_cast<std::size_t>(ph);
    for (int j = 0; j < net.hidden; ++j) {
      add_scaled_row<Ph>(row, net.wt_rec + j * ph, prev[j], ph);
    }
  }

  double* act = pre.data();
  const std::size_t total = pre.size();
  for (std::size_t i = 0; i < total; ++i) act[i] = std::tanh(act[i]);

  for (int n = 0; n < count; ++n) {
    const double* act_row = act + static_cast<std::size_t>(n) * static_cast<std::size_t>(ph);
    double* out_row = outs + static_cast<std::size_t>(n) * static_cast<std::size_t>(po);
    std::copy(net.b_out, net.b_out + po, out_row);
    for (int h = 0; h < net.hidden; ++h) {
      add_scaled_row<Po>(out_row, net.wt_out + h * po, act_row[h], po);
    }
  }
  const std::size_t out_total = static_cast<std::size_t>(count) * static_cast<std::size_t>(po);
  for (std::size_t i = 0; i < out_total; ++i) outs[i] = 1.0 / (1.0 + std::exp(-outs[i]));

  // New hidden activations become the recurrent context.
  std::copy(pre.begin(), pre.end(), states);
}

}  // namespace

void PredictorNet::forward_batch(const SensorReading* readings, const std::uint8_t* next_selectors,
                                 double* states, double* outs, int count) const {
  const int ph = padded(hidden_);
  const int po = padded(outputs_);
  const PredictorView view{wt_in_.data(),  wt_rec_.data(), b_h_.data(), wt_out_.data(),
                           b_out_.data(), hidden_,        outputs_};
  if (ph == 16 && po == 16) {
    predictor_batch<16, 16>(view, readings, next_selectors, states, outs, count, ph, po);
  } else {
    predictor_batch<0, 0>(view, readings, next_selectors, states, outs, count, ph, po);
  }
}

}  // namespace swarmevo
