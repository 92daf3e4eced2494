#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndpc/adam.hpp"
#include "ndpc/channel.hpp"
#include "ndpc/checkpoint.hpp"
#include "ndpc/neural.hpp"

namespace ndpc {

/// Non-finite loss during training.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(int epoch, int step, const std::string& what);
  int epoch() const { return epoch_; }
  int step() const { return step_; }

 private:
  int epoch_;
  int step_;
};

struct TrainConfig {
  int epochs = 500;
  int steps_per_epoch = 200;
  int batch_size = 512;
  double lr = 1e-3;
  /// The learning rate halves at each of these fractions of `epochs`.
  std::vector<double> lr_halving_at = {0.6, 0.8};
  Activation activation = Activation::sinusoidal();
  /// First-layer frequency scale of sinusoidal networks. At 1 the first layer
  /// only spans periods far longer than a useful modulo cell for s ~ N(0, 30)
  /// and training settles on partial linear cancellation of s.
  double omega0 = 5.0;
  std::vector<int> hidden = {128, 128, 128};
  std::uint64_t seed = 0;

  void validate() const;
  /// Learning rate in effect during `epoch` (0-based).
  double lr_at_epoch(int epoch) const;
  /// Stable `key=value` lines.
  std::string echo() const;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<double> epoch_losses;
};

/// Freshly initialized model for the given setup.
NeuralDpcModel init_model(const Constellation& constellation, double lambda, const TrainConfig& cfg);

/// Fresh batch for step `global_step`, drawn from its own RNG substream.
TrainingBatch sample_batch(const Constellation& constellation, const ChannelConfig& channel, int batch_size,
                           const RngStream& training_stream, std::uint64_t global_step);

/// Keeps large temporaries on the heap instead of fresh mmap'd pages (glibc
/// only; a no-op elsewhere). Process-wide, so executables call it once at
/// startup. Roughly halves the cost of a training step.
void tune_allocator();

/// End-to-end Adam training of encoder and decoder on fresh samples each step.
/// `on_epoch(epoch, mean_loss)` is called after every epoch when provided.
TrainResult train(const Constellation& constellation, const ChannelConfig& channel, double lambda,
                  const TrainConfig& cfg, const std::function<void(int, double)>& on_epoch = {});

}  // namespace ndpc
