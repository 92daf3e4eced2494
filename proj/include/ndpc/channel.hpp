#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "ndpc/numeric.hpp"
#include "ndpc/rng.hpp"

namespace ndpc {

/// Invalid experiment configuration (as opposed to a bad function argument).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GaussianInterference {
  double var = 0.0;
};

/// Uniform over sqrt(power/2) (+-1, +-1); two-dimensional only.
struct QpskInterference {
  double power = 0.0;
};

/// Interference known to the encoder only.
class InterferenceModel {
 public:
  InterferenceModel() = default;
  InterferenceModel(GaussianInterference g);
  InterferenceModel(QpskInterference q);

  /// `gaussian:<var>` or `qpsk:<power>`.
  static InterferenceModel parse(std::string_view text);
  std::string to_string() const;

  bool is_gaussian() const { return std::holds_alternative<GaussianInterference>(model_); }
  /// Gaussian variance or QPSK power.
  double power() const;
  const std::variant<GaussianInterference, QpskInterference>& model() const { return model_; }

 private:
  std::variant<GaussianInterference, QpskInterference> model_;
};

/// Y = X + S + N with N i.i.d. Normal(0, noise_var) per real dimension.
struct ChannelConfig {
  int k = 1;
  double noise_var = 1.0;
  InterferenceModel interference;

  void validate() const;
};

Point sample_interference(const ChannelConfig& cfg, RngStream& rng);

Point sample_noise(const ChannelConfig& cfg, RngStream& rng);

Point transmit(const Point& x, const Point& s, const ChannelConfig& cfg, RngStream& rng);

/// 10 log10(P_X / sigma_n^2) with P_X the total mean squared norm.
double snr_db(double tx_power, double noise_var);

/// 1/2 log2(1 + P_X / sigma_n^2) bits per real dimension.
double dpc_capacity_bits(double tx_power, double noise_var);

}  // namespace ndpc
