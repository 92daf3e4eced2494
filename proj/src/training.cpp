#include "ndpc/training.hpp"

#include <cmath>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace ndpc {

TrainingError::TrainingError(int epoch, int step, const std::string& what)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ", step " + std::to_string(step) +
                         ": " + what),
      epoch_(epoch),
      step_(step) {}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be nonnegative");
  if (steps_per_epoch < 1) throw ConfigError("steps_per_epoch must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(omega0 > 0.0)) throw ConfigError("omega0 must be positive");
  for (int h : hidden)
    if (h < 1) throw ConfigError("hidden layer widths must be positive");
}

double TrainConfig::lr_at_epoch(int epoch) const {
  double rate = lr;
  for (double f : lr_halving_at)
    if (epoch >= static_cast<int>(std::lround(f * epochs))) rate *= 0.5;
  return rate;
}

std::string TrainConfig::echo() const {
  std::ostringstream os;
  os.precision(17);
  os << "epochs=" << epochs << "\nsteps_per_epoch=" << steps_per_epoch << "\nbatch_size=" << batch_size
     << "\nlr=" << lr << "\nactivation=" << activation.name() << "\nleaky_slope=" << activation.slope
     << "\nomega0=" << omega0 << "\nhidden=";
  for (std::size_t i = 0; i < hidden.size(); ++i) os << (i ? "," : "") << hidden[i];
  os << "\nseed=" << seed << "\n";
  return os.str();
}

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 64 << 20);
#endif
}

NeuralDpcModel init_model(const Constellation& constellation, double lambda, const TrainConfig& cfg) {
  RngStream enc_rng(cfg.seed, streams::kEncoderInit);
  RngStream dec_rng(cfg.seed, streams::kDecoderInit);
  const auto enc = encoder_dims(constellation, cfg.hidden);
  const auto dec = decoder_dims(constellation, cfg.hidden);
  NeuralDpcModel model{init_mlp(enc, cfg.activation, enc_rng, cfg.omega0),
                       init_mlp(dec, cfg.activation, dec_rng, cfg.omega0), constellation, lambda};
  model.validate();
  return model;
}

TrainingBatch sample_batch(const Constellation& constellation, const ChannelConfig& channel, int batch_size,
                           const RngStream& training_stream, std::uint64_t global_step) {
  RngStream rng = training_stream.substream(global_step);
  TrainingBatch b;
  b.messages.resize(static_cast<std::size_t>(batch_size));
  b.interference.resize(channel.k, batch_size);
  b.noise.resize(channel.k, batch_size);
  for (int j = 0; j < batch_size; ++j) {
    b.messages[static_cast<std::size_t>(j)] = sample_message(constellation, rng);
    b.interference.col(j) = sample_interference(channel, rng);
    b.noise.col(j) = sample_noise(channel, rng);
  }
  return b;
}

TrainResult train(const Constellation& constellation, const ChannelConfig& channel, double lambda,
                  const TrainConfig& cfg, const std::function<void(int, double)>& on_epoch) {
  cfg.validate();
  channel.validate();
  if (channel.k != constellation.dim()) throw ConfigError("channel and constellation dimensions differ");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");

  NeuralDpcModel model = init_model(constellation, lambda, cfg);
  AdamState enc_state = AdamState::for_params(model.encoder, {cfg.lr});
  AdamState dec_state = AdamState::for_params(model.decoder, {cfg.lr});
  const RngStream training_stream(cfg.seed, streams::kTraining);

  std::vector<double> losses;
  double last_loss = std::nan("");
  std::uint64_t global_step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    enc_state.hyper.lr = dec_state.hyper.lr = cfg.lr_at_epoch(epoch);
    double epoch_sum = 0.0;
    for (int step = 0; step < cfg.steps_per_epoch; ++step, ++global_step) {
      const TrainingBatch batch = sample_batch(constellation, channel, cfg.batch_size, training_stream, global_step);
      LossAndGrads lg = loss_and_grads(model, batch, lambda);
      if (!std::isfinite(lg.loss)) throw TrainingError(epoch, step, "non-finite loss");
      adam_step(model.encoder, lg.encoder, enc_state);
      adam_step(model.decoder, lg.decoder, dec_state);
      if (!model.encoder.all_finite() || !model.decoder.all_finite())
        throw TrainingError(epoch, step, "non-finite parameters");
      epoch_sum += lg.loss;
    }
    last_loss = epoch_sum / cfg.steps_per_epoch;
    losses.push_back(last_loss);
    if (on_epoch) on_epoch(epoch, last_loss);
  }

  std::string echo = "constellation=" + constellation.name() + "\ninterference=" + channel.interference.to_string();
  {
    std::ostringstream os;
    os.precision(17);
    os << "\nnoise_var=" << channel.noise_var << "\nlambda=" << lambda << "\n";
    echo += os.str();
  }
  echo += cfg.echo();
  return TrainResult{Checkpoint{kCheckpointVersion, std::move(model), channel, std::move(echo), last_loss, cfg.seed},
                     std::move(losses)};
}

}  // namespace ndpc
