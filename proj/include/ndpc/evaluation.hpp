#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ndpc/channel.hpp"
#include "ndpc/checkpoint.hpp"
#include "ndpc/classical.hpp"
#include "ndpc/neural.hpp"
#include "ndpc/training.hpp"

namespace ndpc {

inline constexpr const char* kToolkitVersion = "ndpc 0.1.0";

/// Samples per evaluation chunk. Chunks are the unit of parallel work, so
/// results do not depend on the worker count.
inline constexpr std::size_t kEvalChunk = 4096;

/// One Monte Carlo trial: message, interference and noise drawn from the
/// trial's own substream. `aux` continues that substream for scheme-specific
/// randomness such as a shared dither.
struct SampleDraw {
  std::size_t message = 0;
  Point s;
  Point n;
  RngStream aux{0, 0};
};

SampleDraw draw_sample(const Constellation& messages, const ChannelConfig& cfg, const RngStream& stream,
                       std::uint64_t index);

/// An encoder/detector pair evaluated over y = x + s + n.
class Scheme {
 public:
  virtual ~Scheme() = default;
  virtual std::string label() const = 0;
  /// Message index space; only its size and dimension matter to the harness.
  virtual const Constellation& messages() const = 0;
  virtual void encode(std::span<const SampleDraw> draws, std::vector<Point>& x) const = 0;
  virtual void detect(std::span<const SampleDraw> draws, std::span<const Point> y,
                      std::vector<std::size_t>& decided) const = 0;
};

/// Modulo-lattice precoding with a dither shared through the trial stream.
class LatticeScheme final : public Scheme {
 public:
  LatticeScheme(LatticeDpcConfig cfg, std::string label);
  std::string label() const override { return label_; }
  const Constellation& messages() const override { return cfg_.constellation(); }
  const LatticeDpcConfig& config() const { return cfg_; }
  void encode(std::span<const SampleDraw> draws, std::vector<Point>& x) const override;
  void detect(std::span<const SampleDraw> draws, std::span<const Point> y,
              std::vector<std::size_t>& decided) const override;

 private:
  LatticeDpcConfig cfg_;
  std::string label_;
};

/// Sends constellation points as-is and detects by minimum distance on the
/// raw output: interference treated as noise, or the AWGN reference when the
/// channel has no interference.
class DirectScheme final : public Scheme {
 public:
  DirectScheme(Constellation points, std::string label);
  std::string label() const override { return label_; }
  const Constellation& messages() const override { return points_; }
  void encode(std::span<const SampleDraw> draws, std::vector<Point>& x) const override;
  void detect(std::span<const SampleDraw> draws, std::span<const Point> y,
              std::vector<std::size_t>& decided) const override;

 private:
  Constellation points_;
  std::string label_;
};

/// Learned encoder/decoder, evaluated in batches.
class NeuralScheme final : public Scheme {
 public:
  explicit NeuralScheme(NeuralDpcModel model, std::string label = "neural");
  std::string label() const override { return label_; }
  const Constellation& messages() const override { return model_.constellation; }
  const NeuralDpcModel& model() const { return model_; }
  void encode(std::span<const SampleDraw> draws, std::vector<Point>& x) const override;
  void detect(std::span<const SampleDraw> draws, std::span<const Point> y,
              std::vector<std::size_t>& decided) const override;

 private:
  NeuralDpcModel model_;
  std::string label_;
};

/// THP: scalar (k = 1) or per-component (k = 2) modulo with alpha = 1, the
/// modulo base set from the dithered-uniform power rule, and messages at the
/// centres of the detection cells (+-delta/4 per dimension).
LatticeScheme make_thp_scheme(int k, double tx_power);

/// Modulo-lattice scheme on `preset` resized to total power `tx_power`, with
/// `num_messages` points from lattice_constellation. alpha <= 0 selects
/// mmse_alpha(tx_power, noise_var).
LatticeScheme make_lattice_scheme(const LatticePreset& preset, std::size_t num_messages, double tx_power,
                                  double noise_var, double alpha);

/// Error fraction with a normal-approximation 95% interval.
struct SerEstimate {
  double ser = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t errors = 0;
  double ci95_halfwidth = 0.0;

  static SerEstimate from_counts(std::uint64_t errors, std::uint64_t n_samples);
};

struct EvalResult {
  SerEstimate ser;
  double power = 0.0;  // mean ||x||^2 over the same trials
};

/// Runs n_samples trials of encode -> channel -> detect. Trial i uses
/// substream i of `stream`; work is split into kEvalChunk blocks.
EvalResult evaluate(const Scheme& scheme, const ChannelConfig& cfg, std::size_t n_samples, const RngStream& stream,
                    unsigned workers = 1);

SerEstimate estimate_ser(const Scheme& scheme, const ChannelConfig& cfg, std::size_t n_samples,
                         const RngStream& stream, unsigned workers = 1);

double estimate_power(const Scheme& scheme, const ChannelConfig& cfg, std::size_t n_samples, const RngStream& stream,
                      unsigned workers = 1);

/// Evaluation stream for a given training / experiment seed.
RngStream evaluation_stream(std::uint64_t seed);

struct CurvePoint {
  std::string scheme;
  double lambda = 0.0;  // NaN for schemes without a penalty weight
  double power = 0.0;
  double snr_db = 0.0;
  SerEstimate ser;
  std::string interference;
  std::uint64_t seed = 0;
  bool analytic = false;
};

/// Point for a measured (power, SER) pair.
CurvePoint make_curve_point(std::string scheme, double lambda, const EvalResult& r, const ChannelConfig& cfg,
                            std::uint64_t seed);

struct SweepConfig {
  Constellation constellation;
  ChannelConfig channel;
  TrainConfig train;
  std::size_t n_eval = std::size_t{1} << 20;
  unsigned workers = 1;
};

/// Error raised while training one point of a sweep.
class SweepError : public std::runtime_error {
 public:
  SweepError(double lambda, const std::string& what);
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

/// Trains one model per lambda (model i uses seed train.seed + i), measures
/// power and SER, and returns the points sorted by SNR. `on_model` receives
/// each trained checkpoint.
std::vector<CurvePoint> lambda_sweep(std::span<const double> lambdas, const SweepConfig& cfg,
                                     const std::function<void(const Checkpoint&, const CurvePoint&)>& on_model = {});

/// Re-evaluates a Gaussian-trained checkpoint under other interference
/// variances without retraining.
std::vector<CurvePoint> mismatch_eval(const Checkpoint& ckpt, std::span<const double> test_vars, std::size_t n_eval,
                                      std::uint64_t seed, unsigned workers = 1);

struct DecisionGrid {
  int resolution = 0;
  std::vector<double> y1, y2;       // per cell
  std::vector<std::size_t> labels;  // per cell, row-major over (y1, y2)
};

/// Hard decisions of the decoder over a regular grid on [lo, hi]^2 (k = 2).
DecisionGrid decision_region_grid(const NeuralDpcModel& model, double lo, double hi, int resolution);

struct EncoderMap {
  std::vector<double> s;
  Eigen::MatrixXd x;  // s.size() x |V|
};

/// Encoder output for every message over a regular grid of s (k = 1).
EncoderMap encoder_map_grid(const NeuralDpcModel& model, double lo, double hi, int resolution);

/// `# <version> | <config>` comment line written at the top of every CSV.
std::string csv_comment(const std::string& config_echo);
std::string format_double(double v);

void write_curve_header(std::ostream& os, const std::string& config_echo, bool with_analytic_column = false);
void write_curve_rows(std::ostream& os, std::span<const CurvePoint> points, bool with_analytic_column = false);
void write_curve_csv(std::ostream& os, const std::string& config_echo, std::span<const CurvePoint> points,
                     bool with_analytic_column = false);
void write_decision_grid_csv(std::ostream& os, const std::string& config_echo, const DecisionGrid& grid);
void write_encoder_map_csv(std::ostream& os, const std::string& config_echo, const EncoderMap& map);

}  // namespace ndpc
