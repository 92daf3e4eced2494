#include "ndpc/channel.hpp"

#include <charconv>
#include <cmath>

namespace ndpc {

InterferenceModel::InterferenceModel(GaussianInterference g) : model_(g) {
  if (!(g.var >= 0.0)) throw std::invalid_argument("interference variance must be nonnegative");
}

InterferenceModel::InterferenceModel(QpskInterference q) : model_(q) {
  if (!(q.power >= 0.0)) throw std::invalid_argument("interference power must be nonnegative");
}

InterferenceModel InterferenceModel::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ConfigError("interference must be gaussian:<var> or qpsk:<power>, got '" + std::string(text) + "'");
  const auto kind = text.substr(0, colon);
  const auto arg = text.substr(colon + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
  if (ec != std::errc() || ptr != arg.data() + arg.size() || !(v >= 0.0))
    throw ConfigError("invalid interference parameter in '" + std::string(text) + "'");
  if (kind == "gaussian") return GaussianInterference{v};
  if (kind == "qpsk") return QpskInterference{v};
  throw ConfigError("unknown interference model '" + std::string(kind) + "'");
}

std::string InterferenceModel::to_string() const {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, power());
  return (is_gaussian() ? "gaussian:" : "qpsk:") + std::string(buf, res.ptr);
}

double InterferenceModel::power() const {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, GaussianInterference>)
          return m.var;
        else
          return m.power;
      },
      model_);
}

void ChannelConfig::validate() const {
  if (k != 1 && k != 2) throw ConfigError("channel dimension must be 1 or 2");
  if (!(noise_var >= 0.0)) throw ConfigError("noise variance must be nonnegative");
  if (!interference.is_gaussian() && k != 2)
    throw ConfigError("QPSK interference requires a two-dimensional channel");
}

Point sample_interference(const ChannelConfig& cfg, RngStream& rng) {
  Point s(cfg.k);
  if (const auto* g = std::get_if<GaussianInterference>(&cfg.interference.model())) {
    const double sd = std::sqrt(g->var);
    for (int i = 0; i < cfg.k; ++i) s(i) = sd * rng.next_gaussian();
    return s;
  }
  if (cfg.k != 2) throw ConfigError("QPSK interference requires a two-dimensional channel");
  const double a = std::sqrt(cfg.interference.power() / 2.0);
  const auto symbol = rng.next_below(4);
  s(0) = (symbol & 2) ? -a : a;
  s(1) = (symbol & 1) ? -a : a;
  return s;
}

Point sample_noise(const ChannelConfig& cfg, RngStream& rng) {
  Point n(cfg.k);
  const double sd = std::sqrt(cfg.noise_var);
  for (int i = 0; i < cfg.k; ++i) n(i) = sd * rng.next_gaussian();
  return n;
}

Point transmit(const Point& x, const Point& s, const ChannelConfig& cfg, RngStream& rng) {
  if (x.size() != cfg.k || s.size() != cfg.k) throw std::invalid_argument("transmit: dimension mismatch");
  return x + s + sample_noise(cfg, rng);
}

double snr_db(double tx_power, double noise_var) {
  if (!(tx_power > 0.0) || !(noise_var > 0.0))
    throw std::invalid_argument("snr_db: power and noise variance must be positive");
  return to_db(tx_power / noise_var);
}

double dpc_capacity_bits(double tx_power, double noise_var) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("dpc_capacity_bits: noise variance must be positive");
  return 0.5 * std::log2(1.0 + tx_power / noise_var);
}

}  // namespace ndpc
