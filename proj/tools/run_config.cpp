#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace ndpc::cli {

namespace {

const std::vector<std::string> kTrainKeys = {
    "constellation", "interference", "noise_var", "lambda",      "activation", "leaky_slope", "omega0",
    "hidden",        "epochs",       "steps_per_epoch", "batch_size", "lr",  "seed",        "out",
    "log"};

const std::vector<std::string> kEvalKeys = {"checkpoint", "test_interference", "n_eval", "seed", "workers", "out"};

const std::vector<std::string> kSweepKeys = {
    "scheme",     "constellation", "interference", "noise_var", "lambdas",        "snr_list", "lattice",
    "alpha",      "activation",    "leaky_slope",  "omega0",    "hidden",         "epochs",   "steps_per_epoch",
    "batch_size", "lr",            "seed",         "n_eval",    "workers",        "out",      "checkpoint_dir"};

const std::vector<std::string> kBaselineKeys = {"scheme", "constellation", "interference", "noise_var", "snr_list",
                                                "lattice", "alpha", "n_eval", "seed", "workers", "out"};

const std::vector<std::string> kExportKeys = {"checkpoint", "lo", "hi", "resolution", "out"};

const KeyValues& defaults(Command c) {
  static const KeyValues train = {{"constellation", "bpsk"},
                                  {"interference", "gaussian:30"},
                                  {"noise_var", "1"},
                                  {"activation", "sin"},
                                  {"leaky_slope", "0.01"},
                                  {"omega0", "5"},
                                  {"hidden", "128,128,128"},
                                  {"epochs", "500"},
                                  {"steps_per_epoch", "200"},
                                  {"batch_size", "512"},
                                  {"lr", "0.001"},
                                  {"seed", "1"},
                                  {"out", "model.ndpc"}};
  static const KeyValues eval = {{"n_eval", "1048576"}, {"workers", "0"}, {"out", "eval.csv"}};
  static const KeyValues sweep = [] {
    KeyValues d = train;
    d.erase("out");
    d.insert({{"scheme", "neural"}, {"alpha", "mmse"}, {"n_eval", "1048576"}, {"workers", "0"}, {"out", "sweep.csv"}});
    return d;
  }();
  static const KeyValues baseline = {{"constellation", "bpsk"}, {"interference", "gaussian:30"}, {"noise_var", "1"},
                                     {"alpha", "mmse"},         {"n_eval", "1048576"},          {"seed", "1"},
                                     {"workers", "0"},          {"out", "baseline.csv"}};
  static const KeyValues exports = {{"lo", "-15"}, {"hi", "15"}, {"resolution", "301"}, {"out", "maps.csv"}};
  switch (c) {
    case Command::Train: return train;
    case Command::Eval: return eval;
    case Command::Sweep: return sweep;
    case Command::Baseline: return baseline;
    case Command::ExportMaps: return exports;
  }
  return train;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": list is empty");
  return out;
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::Train: return "train";
    case Command::Eval: return "eval";
    case Command::Sweep: return "sweep";
    case Command::Baseline: return "baseline";
    case Command::ExportMaps: return "export-maps";
  }
  return "?";
}

std::string canonical_key(std::string_view name) {
  while (!name.empty() && name.front() == '-') name.remove_prefix(1);
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

KeyValues parse_config_text(std::string_view text, const std::string& source) {
  KeyValues out;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto where = source + ":" + std::to_string(lineno);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = canonical_key(trim(std::string_view(body).substr(0, eq)));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    if (!out.emplace(key, value).second) throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return out;
}

KeyValues load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

const std::vector<std::string>& allowed_keys(Command c) {
  switch (c) {
    case Command::Train: return kTrainKeys;
    case Command::Eval: return kEvalKeys;
    case Command::Sweep: return kSweepKeys;
    case Command::Baseline: return kBaselineKeys;
    case Command::ExportMaps: return kExportKeys;
  }
  return kTrainKeys;
}

bool is_destination_key(const std::string& key) {
  return key == "out" || key == "log" || key == "checkpoint_dir" || key == "workers";
}

std::string RunConfig::echo() const {
  std::string s = "command=" + command_name(command) + "\n";
  for (const auto& [k, v] : values)
    if (!is_destination_key(k)) s += k + "=" + v + "\n";
  return s;
}

unsigned RunConfig::resolved_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

RunConfig resolve(Command c, const KeyValues& file, const KeyValues& flags) {
  const auto& allowed = allowed_keys(c);
  const std::set<std::string> allowed_set(allowed.begin(), allowed.end());
  for (const auto* layer : {&file, &flags})
    for (const auto& [k, v] : *layer)
      if (!allowed_set.count(k)) throw ConfigError("unknown key '" + k + "' for " + command_name(c));

  RunConfig cfg;
  cfg.command = c;
  cfg.values = defaults(c);
  for (const auto* layer : {&file, &flags})
    for (const auto& [k, v] : *layer) cfg.values[k] = v;

  const auto& v = cfg.values;
  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = v.find(key);
    return it == v.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string& key) -> const std::string& {
    const auto* s = get(key);
    if (!s) throw ConfigError(command_name(c) + " requires '" + key + "'");
    return *s;
  };
  // Library parsers report bad values as invalid_argument; attach the key.
  auto with_key = [](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what());
    }
  };

  if (const auto* s = get("constellation"))
    with_key("constellation", [&] { cfg.constellation = constellation_by_name(*s); });
  cfg.channel.k = cfg.constellation.dim();
  if (const auto* s = get("interference"))
    with_key("interference", [&] { cfg.channel.interference = InterferenceModel::parse(*s); });
  if (const auto* s = get("noise_var")) cfg.channel.noise_var = parse_number<double>("noise_var", *s);

  if (const auto* s = get("activation")) {
    const double slope = get("leaky_slope") ? parse_number<double>("leaky_slope", *get("leaky_slope")) : 0.01;
    with_key("activation", [&] {
      cfg.train.activation = Activation::parse(*s);
      if (cfg.train.activation.kind == ActivationKind::LeakyRelu) cfg.train.activation = Activation::leaky_relu(slope);
    });
  }
  if (const auto* s = get("omega0")) cfg.train.omega0 = parse_number<double>("omega0", *s);
  if (const auto* s = get("hidden")) {
    cfg.train.hidden.clear();
    for (double w : parse_list("hidden", *s)) {
      if (w != static_cast<int>(w)) throw ConfigError("hidden: widths must be integers");
      cfg.train.hidden.push_back(static_cast<int>(w));
    }
  }
  if (const auto* s = get("epochs")) cfg.train.epochs = parse_number<int>("epochs", *s);
  if (const auto* s = get("steps_per_epoch")) cfg.train.steps_per_epoch = parse_number<int>("steps_per_epoch", *s);
  if (const auto* s = get("batch_size")) cfg.train.batch_size = parse_number<int>("batch_size", *s);
  if (const auto* s = get("lr")) cfg.train.lr = parse_number<double>("lr", *s);
  if (const auto* s = get("seed")) cfg.train.seed = parse_number<std::uint64_t>("seed", *s);

  if (const auto* s = get("scheme")) {
    cfg.scheme = *s;
    static const std::set<std::string> schemes = {"neural", "thp", "lattice", "naive", "awgn"};
    if (!schemes.count(cfg.scheme) || (c == Command::Baseline && cfg.scheme == "neural"))
      throw ConfigError("scheme: unknown scheme '" + cfg.scheme + "'");
  }
  if (c == Command::Baseline) require("scheme");
  const bool neural = c == Command::Train || (c == Command::Sweep && cfg.scheme == "neural");

  if (c == Command::Train) cfg.lambda = parse_number<double>("lambda", require("lambda"));
  if (c == Command::Sweep && neural) cfg.lambdas = parse_list("lambdas", require("lambdas"));
  if (c == Command::Sweep && !neural && get("lambdas")) throw ConfigError("lambdas: only used with scheme neural");
  if ((c == Command::Sweep && !neural) || c == Command::Baseline)
    cfg.snr_list = parse_list("snr_list", require("snr_list"));
  if (neural && get("snr_list")) throw ConfigError("snr_list: only used with classical schemes");

  if (const auto* s = get("lattice")) {
    with_key("lattice", [&] { cfg.lattice = LatticePreset::parse(*s); });
    if (cfg.lattice->dim() != cfg.channel.k)
      throw ConfigError("lattice: preset '" + *s + "' has dimension " + std::to_string(cfg.lattice->dim()) +
                        " but the constellation has dimension " + std::to_string(cfg.channel.k));
  }
  if (const auto* s = get("alpha")) {
    cfg.alpha = *s == "mmse" ? 0.0 : parse_number<double>("alpha", *s);
    if (*s != "mmse" && !(cfg.alpha > 0.0)) throw ConfigError("alpha: must be positive or 'mmse'");
  }
  if (const auto* s = get("n_eval")) {
    cfg.n_eval = parse_number<std::size_t>("n_eval", *s);
    if (cfg.n_eval < 1) throw ConfigError("n_eval: must be positive");
  }
  if (const auto* s = get("workers")) cfg.workers = parse_number<unsigned>("workers", *s);

  if (c == Command::Eval || c == Command::ExportMaps) cfg.checkpoint = require("checkpoint");
  if (const auto* s = get("test_interference"))
    with_key("test_interference", [&] { cfg.test_interference = InterferenceModel::parse(*s); });
  if (const auto* s = get("lo")) cfg.lo = parse_number<double>("lo", *s);
  if (const auto* s = get("hi")) cfg.hi = parse_number<double>("hi", *s);
  if (const auto* s = get("resolution")) cfg.resolution = parse_number<int>("resolution", *s);
  if (c == Command::ExportMaps && !(cfg.lo < cfg.hi)) throw ConfigError("lo must be below hi");
  if (c == Command::ExportMaps && cfg.resolution < 2) throw ConfigError("resolution: must be at least 2");

  cfg.out = require("out");
  if (const auto* s = get("log")) cfg.log = *s;
  else if (c == Command::Train) cfg.log = cfg.out.string() + ".loss.csv";
  if (const auto* s = get("checkpoint_dir")) cfg.checkpoint_dir = *s;

  if (neural) with_key("train", [&] { cfg.train.validate(); });
  if (c != Command::Eval && c != Command::ExportMaps) with_key("channel", [&] { cfg.channel.validate(); });
  if (neural && !(cfg.lambda >= 0.0)) throw ConfigError("lambda: must be nonnegative");
  for (double l : cfg.lambdas)
    if (!(l >= 0.0)) throw ConfigError("lambdas: values must be nonnegative");
  return cfg;
}

}  // namespace ndpc::cli
