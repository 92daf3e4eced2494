#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ndpc/channel.hpp"
#include "ndpc/constellation.hpp"
#include "ndpc/training.hpp"

namespace ndpc::cli {

enum class Command { Train, Eval, Sweep, Baseline, ExportMaps };

std::string command_name(Command c);

using KeyValues = std::map<std::string, std::string>;

/// `--noise-var` and `noise-var` both become `noise_var`.
std::string canonical_key(std::string_view name);

/// `key = value` lines; blank lines and `#` comments are skipped. Duplicate
/// keys and lines without '=' are config errors that name the line.
KeyValues parse_config_text(std::string_view text, const std::string& source = "config");
KeyValues load_config_file(const std::filesystem::path& path);

/// Keys accepted by a subcommand, in echo order.
const std::vector<std::string>& allowed_keys(Command c);

/// Keys that only choose where results go. They are left out of the echo so
/// that identical experiments write identical files.
bool is_destination_key(const std::string& key);

struct RunConfig {
  Command command = Command::Train;
  /// Defaults, then file, then flags; values as written.
  KeyValues values;

  Constellation constellation = bpsk();
  ChannelConfig channel;
  TrainConfig train;
  double lambda = 0.0;
  std::vector<double> lambdas;
  std::string scheme;
  std::vector<double> snr_list;
  std::optional<LatticePreset> lattice;  // unset: scalar for k = 1, hex for k = 2
  double alpha = 0.0;                    // <= 0 selects the MMSE value
  std::size_t n_eval = std::size_t{1} << 20;
  unsigned workers = 0;                  // 0: one per hardware thread
  std::filesystem::path checkpoint;
  std::optional<InterferenceModel> test_interference;
  double lo = -15.0;
  double hi = 15.0;
  int resolution = 301;
  std::filesystem::path out;
  std::filesystem::path log;
  std::filesystem::path checkpoint_dir;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  /// Sorted `key=value` lines of every non-destination key.
  std::string echo() const;
  unsigned resolved_workers() const;
};

/// Merges the layers, rejects unknown keys and parses every value. Throws
/// ConfigError naming the offending key.
RunConfig resolve(Command c, const KeyValues& file, const KeyValues& flags);

}  // namespace ndpc::cli
