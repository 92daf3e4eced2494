#include "ndpc/classical.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ndpc {

double mod_interval(double z, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("modulo base must be positive");
  const double half = delta / 2.0;
  double r = z - delta * std::floor(z / delta + 0.5);
  if (r >= half) r -= delta;
  if (r < -half) r += delta;
  return r;
}

double thp_encode(double v_point, double s, double u, double delta) {
  return mod_interval(v_point - s - u, delta);
}

double thp_receive(double y, double u, double delta) { return mod_interval(y + u, delta); }

LatticeDpcConfig::LatticeDpcConfig(Lattice lattice, double alpha, Constellation constellation)
    : lattice_(std::move(lattice)), alpha_(alpha), constellation_(std::move(constellation)) {
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) throw std::invalid_argument("LatticeDpcConfig: alpha must lie in (0, 1]");
  if (constellation_.dim() != lattice_.dim())
    throw std::invalid_argument("LatticeDpcConfig: constellation and lattice dimensions differ");
  for (const auto& p : constellation_.points())
    if (!lattice_.nearest_point(p).isZero(0.0))
      throw std::invalid_argument("LatticeDpcConfig: message point outside the Voronoi region");
}

Point lattice_dpc_encode(const LatticeDpcConfig& cfg, std::size_t v_index, const Point& s, const Point& u) {
  const Point& v = cfg.constellation().point(v_index);
  if (s.size() != v.size() || u.size() != v.size()) throw std::invalid_argument("lattice_dpc_encode: dimension mismatch");
  return cfg.lattice().mod(v - cfg.alpha() * s - u);
}

Point lattice_dpc_receive(const LatticeDpcConfig& cfg, const Point& y, const Point& u) {
  if (y.size() != cfg.lattice().dim() || u.size() != y.size())
    throw std::invalid_argument("lattice_dpc_receive: dimension mismatch");
  return cfg.lattice().mod(cfg.alpha() * y + u);
}

double mmse_alpha(double tx_power, double noise_var) {
  if (!(tx_power > 0.0) || !(noise_var > 0.0))
    throw std::invalid_argument("mmse_alpha: power and noise variance must be positive");
  return tx_power / (tx_power + noise_var);
}

std::size_t min_distance_detect(const LatticeDpcConfig& cfg, const Point& y_tilde) {
  const auto& pts = cfg.constellation().points();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = cfg.lattice().mod(y_tilde - pts[i]).squaredNorm();
    if (d < best_d) best_d = d, best = i;
  }
  return best;
}

std::size_t nearest_message(const Constellation& c, const Point& y) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double d = (y - c.points()[i]).squaredNorm();
    if (d < best_d) best_d = d, best = i;
  }
  return best;
}

std::pair<std::size_t, std::size_t> naive_transmit_detect(const Constellation& constellation,
                                                          const ChannelConfig& cfg, double power,
                                                          RngStream& rng) {
  if (!(power > 0.0)) throw std::invalid_argument("naive_transmit_detect: power must be positive");
  if (constellation.dim() != cfg.k) throw std::invalid_argument("naive_transmit_detect: dimension mismatch");
  const Constellation sent_set = constellation.scaled(std::sqrt(power / constellation.average_power()));
  const std::size_t v = sample_message(sent_set, rng);
  const Point s = sample_interference(cfg, rng);
  const Point y = transmit(sent_set.point(v), s, cfg, rng);
  return {v, nearest_message(sent_set, y)};
}

namespace {

bool is_antipodal_pair(const Constellation& c) {
  return c.dim() == 1 && c.size() == 2 && c.points()[0](0) == -c.points()[1](0);
}

bool is_square_qpsk(const Constellation& c) {
  if (c.dim() != 2 || c.size() != 4) return false;
  const double a = std::abs(c.points()[0](0));
  if (a == 0.0) return false;
  for (const auto& p : c.points())
    if (std::abs(std::abs(p(0)) - a) > 1e-12 * a || std::abs(std::abs(p(1)) - a) > 1e-12 * a) return false;
  return true;
}

}  // namespace

double awgn_reference_ser(const Constellation& constellation, double snr_db) {
  const double snr = from_db(snr_db);
  if (is_antipodal_pair(constellation)) return q_function(std::sqrt(2.0 * snr));
  if (is_square_qpsk(constellation)) {
    const double p = q_function(std::sqrt(snr));
    return 1.0 - (1.0 - p) * (1.0 - p);
  }
  throw std::invalid_argument("awgn_reference_ser: only BPSK and QPSK constellations are supported");
}

double awgn_reference_noise_var(double power, double snr_db) {
  if (!(power > 0.0)) throw std::invalid_argument("awgn_reference_noise_var: power must be positive");
  return power / (2.0 * from_db(snr_db));
}

double thp_delta_for_power(double tx_power, int k) {
  if (!(tx_power > 0.0)) throw std::invalid_argument("thp_delta_for_power: power must be positive");
  if (k != 1 && k != 2) throw std::invalid_argument("thp_delta_for_power: dimension must be 1 or 2");
  return std::sqrt(12.0 * tx_power / k);
}

}  // namespace ndpc
