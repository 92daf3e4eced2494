#include "ndpc/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

namespace ndpc {

SampleDraw draw_sample(const Constellation& messages, const ChannelConfig& cfg, const RngStream& stream,
                       std::uint64_t index) {
  SampleDraw d;
  d.aux = stream.substream(index);
  d.message = sample_message(messages, d.aux);
  d.s = sample_interference(cfg, d.aux);
  d.n = sample_noise(cfg, d.aux);
  return d;
}

LatticeScheme::LatticeScheme(LatticeDpcConfig cfg, std::string label) : cfg_(std::move(cfg)), label_(std::move(label)) {}

// The dither for a trial is the first draw after (v, s, n) on its substream;
// encoder and receiver take private copies of `aux` so both see the same u.
void LatticeScheme::encode(std::span<const SampleDraw> draws, std::vector<Point>& x) const {
  x.resize(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    RngStream aux = draws[i].aux;
    const Point u = sample_dither(cfg_.lattice(), aux);
    x[i] = lattice_dpc_encode(cfg_, draws[i].message, draws[i].s, u);
  }
}

void LatticeScheme::detect(std::span<const SampleDraw> draws, std::span<const Point> y,
                           std::vector<std::size_t>& decided) const {
  decided.resize(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    RngStream aux = draws[i].aux;
    const Point u = sample_dither(cfg_.lattice(), aux);
    decided[i] = min_distance_detect(cfg_, lattice_dpc_receive(cfg_, y[i], u));
  }
}

DirectScheme::DirectScheme(Constellation points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {}

void DirectScheme::encode(std::span<const SampleDraw> draws, std::vector<Point>& x) const {
  x.resize(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) x[i] = points_.point(draws[i].message);
}

void DirectScheme::detect(std::span<const SampleDraw> draws, std::span<const Point> y,
                          std::vector<std::size_t>& decided) const {
  decided.resize(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) decided[i] = nearest_message(points_, y[i]);
}

NeuralScheme::NeuralScheme(NeuralDpcModel model, std::string label)
    : model_(std::move(model)), label_(std::move(label)) {
  model_.validate();
}

void NeuralScheme::encode(std::span<const SampleDraw> draws, std::vector<Point>& x) const {
  const int k = model_.dim();
  std::vector<std::size_t> msgs(draws.size());
  Eigen::MatrixXd s(k, static_cast<Eigen::Index>(draws.size()));
  for (std::size_t i = 0; i < draws.size(); ++i) {
    msgs[i] = draws[i].message;
    s.col(static_cast<Eigen::Index>(i)) = draws[i].s;
  }
  const Eigen::MatrixXd out = encode_batch(model_, msgs, s);
  x.resize(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) x[i] = out.col(static_cast<Eigen::Index>(i));
}

void NeuralScheme::detect(std::span<const SampleDraw> draws, std::span<const Point> y,
                          std::vector<std::size_t>& decided) const {
  Eigen::MatrixXd ym(model_.dim(), static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) ym.col(static_cast<Eigen::Index>(i)) = y[i];
  const Eigen::MatrixXd logits = decode_logits_batch(model_, ym);
  decided.resize(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) decided[i] = hard_decision(logits.col(static_cast<Eigen::Index>(i)));
}

LatticeScheme make_thp_scheme(int k, double tx_power) {
  if (k != 1 && k != 2) throw ConfigError("THP is defined for k = 1 or 2");
  if (!(tx_power > 0.0)) throw ConfigError("THP power must be positive");
  const double delta = thp_delta_for_power(tx_power, k);
  Lattice lat = k == 1 ? scalar_lattice(delta) : cubic_lattice_2d(delta);
  Constellation c = lattice_constellation(lat, k == 1 ? 2 : 4);
  return LatticeScheme(LatticeDpcConfig(std::move(lat), 1.0, std::move(c)), "thp");
}

LatticeScheme make_lattice_scheme(const LatticePreset& preset, std::size_t num_messages, double tx_power,
                                  double noise_var, double alpha) {
  if (!(tx_power > 0.0)) throw ConfigError("lattice power must be positive");
  const LatticePreset sized = preset.with_per_dim_power(tx_power / preset.dim());
  Lattice lat = sized.build();
  Constellation c = lattice_constellation(lat, num_messages);
  const double a = alpha > 0.0 ? alpha : mmse_alpha(tx_power, noise_var);
  return LatticeScheme(LatticeDpcConfig(std::move(lat), a, std::move(c)), "lattice:" + preset.to_string());
}

SerEstimate SerEstimate::from_counts(std::uint64_t errors, std::uint64_t n_samples) {
  SerEstimate e;
  e.errors = errors;
  e.n_samples = n_samples;
  if (n_samples == 0) return e;
  const double n = static_cast<double>(n_samples);
  e.ser = static_cast<double>(errors) / n;
  e.ci95_halfwidth = 1.96 * std::sqrt(e.ser * (1.0 - e.ser) / n);
  return e;
}

EvalResult evaluate(const Scheme& scheme, const ChannelConfig& cfg, std::size_t n_samples, const RngStream& stream,
                    unsigned workers) {
  if (n_samples < 1) throw std::invalid_argument("evaluate: n_samples must be positive");
  cfg.validate();
  if (cfg.k != scheme.messages().dim()) throw ConfigError("scheme and channel dimensions differ");

  const std::size_t n_chunks = (n_samples + kEvalChunk - 1) / kEvalChunk;
  std::vector<std::uint64_t> chunk_errors(n_chunks, 0);
  std::vector<double> chunk_power(n_chunks, 0.0);
  std::atomic<std::size_t> next{0};

  auto run = [&] {
    std::vector<SampleDraw> draws;
    std::vector<Point> x, y;
    std::vector<std::size_t> decided;
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      const std::size_t begin = c * kEvalChunk;
      const std::size_t end = std::min(n_samples, begin + kEvalChunk);
      draws.resize(end - begin);
      for (std::size_t i = begin; i < end; ++i) draws[i - begin] = draw_sample(scheme.messages(), cfg, stream, i);
      scheme.encode(draws, x);
      y.resize(draws.size());
      double power = 0.0;
      for (std::size_t i = 0; i < draws.size(); ++i) {
        y[i] = x[i] + draws[i].s + draws[i].n;
        power += x[i].squaredNorm();
      }
      scheme.detect(draws, y, decided);
      std::uint64_t errors = 0;
      for (std::size_t i = 0; i < draws.size(); ++i) errors += decided[i] != draws[i].message;
      chunk_errors[c] = errors;
      chunk_power[c] = power;
    }
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));
  if (n_threads == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }

  std::uint64_t errors = 0;
  double power = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    errors += chunk_errors[c];
    power += chunk_power[c];
  }
  return {SerEstimate::from_counts(errors, n_samples), power / static_cast<double>(n_samples)};
}

SerEstimate estimate_ser(const Scheme& scheme, const ChannelConfig& cfg, std::size_t n_samples,
                         const RngStream& stream, unsigned workers) {
  return evaluate(scheme, cfg, n_samples, stream, workers).ser;
}

double estimate_power(const Scheme& scheme, const ChannelConfig& cfg, std::size_t n_samples, const RngStream& stream,
                      unsigned workers) {
  return evaluate(scheme, cfg, n_samples, stream, workers).power;
}

RngStream evaluation_stream(std::uint64_t seed) { return RngStream(seed + kEvalSeedOffset, streams::kEvaluation); }

CurvePoint make_curve_point(std::string scheme, double lambda, const EvalResult& r, const ChannelConfig& cfg,
                            std::uint64_t seed) {
  CurvePoint p;
  p.scheme = std::move(scheme);
  p.lambda = lambda;
  p.power = r.power;
  p.snr_db = (r.power > 0.0 && cfg.noise_var > 0.0) ? snr_db(r.power, cfg.noise_var)
             : r.power > 0.0                       ? std::numeric_limits<double>::infinity()
                                                   : -std::numeric_limits<double>::infinity();
  p.ser = r.ser;
  p.interference = cfg.interference.to_string();
  p.seed = seed;
  return p;
}

SweepError::SweepError(double lambda, const std::string& what)
    : std::runtime_error("lambda=" + format_double(lambda) + ": " + what), lambda_(lambda) {}

std::vector<CurvePoint> lambda_sweep(std::span<const double> lambdas, const SweepConfig& cfg,
                                     const std::function<void(const Checkpoint&, const CurvePoint&)>& on_model) {
  if (lambdas.empty()) throw ConfigError("lambda list is empty");
  std::vector<CurvePoint> points;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    TrainConfig tc = cfg.train;
    tc.seed = cfg.train.seed + i;
    std::optional<TrainResult> trained;
    try {
      trained.emplace(train(cfg.constellation, cfg.channel, lambdas[i], tc));
    } catch (const TrainingError& e) {
      throw SweepError(lambdas[i], e.what());
    }
    const NeuralScheme scheme(trained->checkpoint.model);
    const EvalResult r = evaluate(scheme, cfg.channel, cfg.n_eval, evaluation_stream(tc.seed), cfg.workers);
    CurvePoint p = make_curve_point("neural", lambdas[i], r, cfg.channel, tc.seed);
    if (on_model) on_model(trained->checkpoint, p);
    points.push_back(std::move(p));
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const CurvePoint& a, const CurvePoint& b) { return a.snr_db < b.snr_db; });
  return points;
}

std::vector<CurvePoint> mismatch_eval(const Checkpoint& ckpt, std::span<const double> test_vars, std::size_t n_eval,
                                      std::uint64_t seed, unsigned workers) {
  if (!ckpt.channel.interference.is_gaussian())
    throw ConfigError("mismatch evaluation supports Gaussian-interference checkpoints only");
  const NeuralScheme scheme(ckpt.model);
  std::vector<CurvePoint> points;
  for (double var : test_vars) {
    if (!(var >= 0.0)) throw ConfigError("test interference variance must be nonnegative");
    ChannelConfig ch = ckpt.channel;
    ch.interference = GaussianInterference{var};
    const EvalResult r = evaluate(scheme, ch, n_eval, evaluation_stream(seed), workers);
    points.push_back(make_curve_point("neural", ckpt.model.lambda, r, ch, seed));
  }
  return points;
}

namespace {

std::vector<double> grid_axis(double lo, double hi, int resolution) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
  if (!(lo < hi)) throw std::invalid_argument("grid bounds must satisfy lo < hi");
  std::vector<double> axis(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) axis[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (resolution - 1);
  return axis;
}

}  // namespace

DecisionGrid decision_region_grid(const NeuralDpcModel& model, double lo, double hi, int resolution) {
  if (model.dim() != 2)
    throw std::invalid_argument("decision regions need k = 2; use encoder_map_grid for k = 1 models");
  const auto axis = grid_axis(lo, hi, resolution);
  DecisionGrid g;
  g.resolution = resolution;
  const std::size_t cells = axis.size() * axis.size();
  g.y1.reserve(cells);
  g.y2.reserve(cells);
  for (double a : axis)
    for (double b : axis) {
      g.y1.push_back(a);
      g.y2.push_back(b);
    }
  g.labels.resize(cells);
  for (std::size_t begin = 0; begin < cells; begin += kEvalChunk) {
    const std::size_t end = std::min(cells, begin + kEvalChunk);
    Eigen::MatrixXd y(2, static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      y(0, static_cast<Eigen::Index>(i - begin)) = g.y1[i];
      y(1, static_cast<Eigen::Index>(i - begin)) = g.y2[i];
    }
    const Eigen::MatrixXd logits = decode_logits_batch(model, y);
    for (std::size_t i = begin; i < end; ++i) g.labels[i] = hard_decision(logits.col(static_cast<Eigen::Index>(i - begin)));
  }
  return g;
}

EncoderMap encoder_map_grid(const NeuralDpcModel& model, double lo, double hi, int resolution) {
  if (model.dim() != 1) throw std::invalid_argument("encoder maps need k = 1; use decision_region_grid for k = 2");
  EncoderMap m;
  m.s = grid_axis(lo, hi, resolution);
  const auto n = static_cast<Eigen::Index>(m.s.size());
  const std::size_t nv = model.num_messages();
  m.x.resize(n, static_cast<Eigen::Index>(nv));
  const Eigen::MatrixXd s = Eigen::Map<const Eigen::RowVectorXd>(m.s.data(), n);
  for (std::size_t v = 0; v < nv; ++v) {
    const std::vector<std::size_t> msgs(m.s.size(), v);
    m.x.col(static_cast<Eigen::Index>(v)) = encode_batch(model, msgs, s).row(0).transpose();
  }
  return m;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_comment(const std::string& config_echo) {
  std::string flat;
  for (char ch : config_echo) {
    if (ch == '\n') {
      if (!flat.empty() && flat.back() != ' ') flat += "; ";
    } else {
      flat += ch;
    }
  }
  while (!flat.empty() && (flat.back() == ' ' || flat.back() == ';')) flat.pop_back();
  return std::string("# ") + kToolkitVersion + " | " + flat + "\n";
}

void write_curve_header(std::ostream& os, const std::string& config_echo, bool with_analytic_column) {
  os << csv_comment(config_echo) << "scheme,lambda,snr_db,ser,ci95,n_samples,interference,seed";
  if (with_analytic_column) os << ",analytic";
  os << "\n";
}

void write_curve_rows(std::ostream& os, std::span<const CurvePoint> points, bool with_analytic_column) {
  for (const auto& p : points) {
    os << p.scheme << ',' << format_double(p.lambda) << ',' << format_double(p.snr_db) << ','
       << format_double(p.ser.ser) << ',' << format_double(p.ser.ci95_halfwidth) << ',' << p.ser.n_samples << ','
       << p.interference << ',' << p.seed;
    if (with_analytic_column) os << ',' << (p.analytic ? 1 : 0);
    os << "\n";
  }
}

void write_curve_csv(std::ostream& os, const std::string& config_echo, std::span<const CurvePoint> points,
                     bool with_analytic_column) {
  write_curve_header(os, config_echo, with_analytic_column);
  write_curve_rows(os, points, with_analytic_column);
}

void write_decision_grid_csv(std::ostream& os, const std::string& config_echo, const DecisionGrid& grid) {
  os << csv_comment(config_echo) << "y1,y2,label\n";
  for (std::size_t i = 0; i < grid.labels.size(); ++i)
    os << format_double(grid.y1[i]) << ',' << format_double(grid.y2[i]) << ',' << grid.labels[i] << "\n";
}

void write_encoder_map_csv(std::ostream& os, const std::string& config_echo, const EncoderMap& map) {
  os << csv_comment(config_echo) << "s";
  for (Eigen::Index v = 0; v < map.x.cols(); ++v) os << ",x_v" << v;
  os << "\n";
  for (std::size_t i = 0; i < map.s.size(); ++i) {
    os << format_double(map.s[i]);
    for (Eigen::Index v = 0; v < map.x.cols(); ++v) os << ',' << format_double(map.x(static_cast<Eigen::Index>(i), v));
    os << "\n";
  }
}

}  // namespace ndpc
