#pragma once

#include <cstddef>
#include <utility>

#include "ndpc/channel.hpp"
#include "ndpc/constellation.hpp"
#include "ndpc/lattice.hpp"

namespace ndpc {

/// Scalar fold into [-delta/2, delta/2).
double mod_interval(double z, double delta);

/// Tomlinson-Harashima precoder: X = (v - s - u) mod delta.
double thp_encode(double v_point, double s, double u, double delta);

/// Receiver fold: (y + u) mod delta, which equals (v + n) mod delta.
double thp_receive(double y, double u, double delta);

/// Modulo-lattice precoding parameters. Message points must already lie in
/// the fundamental Voronoi region of the lattice.
class LatticeDpcConfig {
 public:
  LatticeDpcConfig(Lattice lattice, double alpha, Constellation constellation);

  const Lattice& lattice() const { return lattice_; }
  double alpha() const { return alpha_; }
  const Constellation& constellation() const { return constellation_; }

 private:
  Lattice lattice_;
  double alpha_;
  Constellation constellation_;
};

/// X = (v - alpha s - u) mod lattice.
Point lattice_dpc_encode(const LatticeDpcConfig& cfg, std::size_t v_index, const Point& s, const Point& u);

/// Y~ = (alpha y + u) mod lattice.
Point lattice_dpc_receive(const LatticeDpcConfig& cfg, const Point& y, const Point& u);

/// alpha = P_X / (P_X + sigma_n^2).
double mmse_alpha(double tx_power, double noise_var);

/// Index minimizing the wrapped distance ||(y~ - v_i) mod lattice||; ties go
/// to the smallest index.
std::size_t min_distance_detect(const LatticeDpcConfig& cfg, const Point& y_tilde);

/// Index of the closest point by plain Euclidean distance; ties go to the
/// smallest index.
std::size_t nearest_message(const Constellation& c, const Point& y);

/// One use of the interference-as-noise scheme: the constellation is scaled
/// to average power `power`, sent without looking at s, and detected by
/// minimum distance on the raw channel output. Returns (sent, detected).
std::pair<std::size_t, std::size_t> naive_transmit_detect(const Constellation& constellation,
                                                          const ChannelConfig& cfg, double power,
                                                          RngStream& rng);

/// Closed-form SER of BPSK / QPSK on an interference-free AWGN channel:
/// BPSK Q(sqrt(2 snr)), QPSK 1 - (1 - Q(sqrt(snr)))^2, with snr the linear
/// symbol-energy to N0 ratio and N0 / 2 the noise variance per real dimension.
double awgn_reference_ser(const Constellation& constellation, double snr_db);

/// Per-real-dimension noise variance that realizes `snr_db` for the AWGN
/// reference at total symbol power `power`: power / (2 snr).
double awgn_reference_noise_var(double power, double snr_db);

/// Modulo base whose dithered-uniform power per dimension (delta^2 / 12)
/// spreads a total power `tx_power` evenly over k dimensions.
double thp_delta_for_power(double tx_power, int k);

}  // namespace ndpc
