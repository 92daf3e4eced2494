#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndpc/channel.hpp"
#include "ndpc/neural.hpp"

namespace ndpc {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Trained model plus what is needed to reproduce and re-evaluate it.
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  NeuralDpcModel model;
  ChannelConfig channel;    // training channel
  std::string config_echo;  // `key=value` lines of the training config
  double final_loss = 0.0;
  std::uint64_t seed = 0;
};

/// Binary layout (all integers and doubles little-endian):
///
///   "NDPC" | u32 version | payload | u32 crc32(payload)
///
/// payload:
///   u32 k, u32 |V|, u32 activation id, f64 leaky slope, f64 omega0,
///   f64 lambda, u64 seed, f64 final loss,
///   u32 interference kind (0 gaussian, 1 qpsk), f64 interference power,
///   f64 noise variance,
///   u32 n, n x u32 encoder dims, u32 n, n x u32 decoder dims,
///   |V| * k x f64 constellation points,
///   u32 length, bytes of the config echo,
///   encoder then decoder parameters as f64 (per layer: weights row-major,
///   then bias).
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Parses `key=value` lines.
std::map<std::string, std::string> parse_echo(const std::string& echo);

}  // namespace ndpc
