#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>

#include <CLI11.hpp>

#include "ndpc/evaluation.hpp"
#include "run_config.hpp"

namespace ndpc::cli {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::trunc) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::out | mode);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.close();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

Checkpoint load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw CheckpointError("checkpoint '" + path.string() + "' does not exist");
  return load_checkpoint(path);
}

int cmd_train(const RunConfig& cfg, std::ostream& log) {
  const int every = std::max(1, cfg.train.epochs / 20);
  auto result = train(cfg.constellation, cfg.channel, cfg.lambda, cfg.train, [&](int epoch, double loss) {
    if ((epoch + 1) % every == 0 || epoch + 1 == cfg.train.epochs)
      log << "epoch " << epoch + 1 << "/" << cfg.train.epochs << " loss " << format_double(loss) << "\n";
  });
  save_checkpoint(result.checkpoint, cfg.out);

  auto os = open_out(cfg.log);
  os << csv_comment(cfg.echo()) << "epoch,loss\n";
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) os << e << ',' << format_double(result.epoch_losses[e]) << "\n";
  finish(os, cfg.log);
  log << "wrote " << cfg.out.string() << " and " << cfg.log.string() << "\n";
  return kExitOk;
}

int cmd_eval(RunConfig cfg, std::ostream& log) {
  const Checkpoint ckpt = load(cfg.checkpoint);
  ChannelConfig channel = ckpt.channel;
  if (cfg.test_interference) channel.interference = *cfg.test_interference;
  channel.validate();
  const std::uint64_t seed = cfg.has("seed") ? cfg.train.seed : ckpt.seed;
  cfg.values["seed"] = std::to_string(seed);

  const NeuralScheme scheme(ckpt.model);
  const auto r = evaluate(scheme, channel, cfg.n_eval, evaluation_stream(seed), cfg.resolved_workers());
  const CurvePoint p = make_curve_point("neural", ckpt.model.lambda, r, channel, seed);

  std::error_code ec;
  const bool fresh = !std::filesystem::exists(cfg.out) || std::filesystem::file_size(cfg.out, ec) == 0;
  auto os = open_out(cfg.out, std::ios::app);
  if (fresh) write_curve_header(os, cfg.echo());
  write_curve_rows(os, std::span(&p, 1));
  finish(os, cfg.out);
  log << "snr_db " << format_double(p.snr_db) << " ser " << format_double(p.ser.ser) << " -> " << cfg.out.string()
      << "\n";
  return kExitOk;
}

std::vector<CurvePoint> classical_points(const RunConfig& cfg, std::ostream& log) {
  const auto& c = cfg.constellation;
  const double nv = cfg.channel.noise_var;
  std::vector<CurvePoint> points;
  for (std::size_t i = 0; i < cfg.snr_list.size(); ++i) {
    const double snr = cfg.snr_list[i];
    const std::uint64_t seed = cfg.train.seed + i;
    if (cfg.scheme == "awgn") {
      CurvePoint p;
      p.scheme = "awgn";
      p.lambda = std::numeric_limits<double>::quiet_NaN();
      p.snr_db = snr;
      p.ser.ser = awgn_reference_ser(c, snr);
      p.interference = "none";
      p.seed = seed;
      p.analytic = true;
      points.push_back(p);
      continue;
    }
    if (!(nv > 0.0)) throw ConfigError("noise_var must be positive for an SNR sweep");
    const double power = nv * from_db(snr);
    std::unique_ptr<Scheme> scheme;
    if (cfg.scheme == "thp") {
      scheme = std::make_unique<LatticeScheme>(make_thp_scheme(c.dim(), power));
    } else if (cfg.scheme == "lattice") {
      const LatticePreset preset = cfg.lattice ? *cfg.lattice : LatticePreset::parse(c.dim() == 1 ? "scalar:1" : "hex:1");
      scheme = std::make_unique<LatticeScheme>(make_lattice_scheme(preset, c.size(), power, nv, cfg.alpha));
    } else {
      scheme = std::make_unique<DirectScheme>(c.scaled(std::sqrt(power / c.average_power())), "naive");
    }
    const auto r = evaluate(*scheme, cfg.channel, cfg.n_eval, evaluation_stream(seed), cfg.resolved_workers());
    points.push_back(make_curve_point(scheme->label(), std::numeric_limits<double>::quiet_NaN(), r, cfg.channel, seed));
    log << scheme->label() << " snr " << format_double(snr) << " ser " << format_double(r.ser.ser) << "\n";
  }
  return points;
}

int cmd_baseline(const RunConfig& cfg, std::ostream& log) {
  const auto points = classical_points(cfg, log);
  auto os = open_out(cfg.out);
  write_curve_csv(os, cfg.echo(), points, true);
  finish(os, cfg.out);
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  if (cfg.scheme != "neural") return cmd_baseline(cfg, log);
  const SweepConfig sc{cfg.constellation, cfg.channel, cfg.train, cfg.n_eval, cfg.resolved_workers()};
  if (!cfg.checkpoint_dir.empty()) std::filesystem::create_directories(cfg.checkpoint_dir);
  const auto points = lambda_sweep(cfg.lambdas, sc, [&](const Checkpoint& ckpt, const CurvePoint& p) {
    log << "lambda " << format_double(p.lambda) << " snr_db " << format_double(p.snr_db) << " ser "
        << format_double(p.ser.ser) << "\n";
    if (!cfg.checkpoint_dir.empty())
      save_checkpoint(ckpt, cfg.checkpoint_dir / ("lambda_" + format_double(p.lambda) + "_seed_" +
                                                  std::to_string(ckpt.seed) + ".ndpc"));
  });
  auto os = open_out(cfg.out);
  write_curve_csv(os, cfg.echo(), points);
  finish(os, cfg.out);
  return kExitOk;
}

int cmd_export_maps(const RunConfig& cfg, std::ostream& log) {
  const Checkpoint ckpt = load(cfg.checkpoint);
  auto os = open_out(cfg.out);
  if (ckpt.model.dim() == 2) {
    write_decision_grid_csv(os, cfg.echo(), decision_region_grid(ckpt.model, cfg.lo, cfg.hi, cfg.resolution));
  } else {
    write_encoder_map_csv(os, cfg.echo(), encoder_map_grid(ckpt.model, cfg.lo, cfg.hi, cfg.resolution));
  }
  finish(os, cfg.out);
  log << (ckpt.model.dim() == 2 ? "decision regions" : "encoder map") << " -> " << cfg.out.string() << "\n";
  return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& log) {
  switch (cfg.command) {
    case Command::Train: return cmd_train(cfg, log);
    case Command::Eval: return cmd_eval(cfg, log);
    case Command::Sweep: return cmd_sweep(cfg, log);
    case Command::Baseline: return cmd_baseline(cfg, log);
    case Command::ExportMaps: return cmd_export_maps(cfg, log);
  }
  return kExitConfig;
}

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  CLI::App app{"Dirty paper coding toolkit: THP, lattice precoding and learned encoders", "ndpc"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);

  struct Sub {
    Command command;
    CLI::App* app;
    std::string config_path;
    std::map<std::string, std::string> given;
  };
  const std::vector<std::pair<Command, std::string>> commands = {
      {Command::Train, "train one model and write a checkpoint plus per-epoch loss CSV"},
      {Command::Eval, "evaluate a checkpoint and append one curve row"},
      {Command::Sweep, "train one model per lambda, or sweep a classical scheme over --snr-list"},
      {Command::Baseline, "classical baselines (thp, lattice, naive, awgn) over --snr-list"},
      {Command::ExportMaps, "decision regions (k = 2) or encoder map (k = 1) of a checkpoint"}};
  std::vector<std::unique_ptr<Sub>> subs;
  for (const auto& [command, help] : commands) {
    auto sub = std::make_unique<Sub>();
    sub->command = command;
    sub->app = app.add_subcommand(command_name(command), help);
    sub->app->add_option("--config", sub->config_path, "key = value file; flags override it");
    for (const auto& key : allowed_keys(command)) sub->app->add_option(flag_name(key), sub->given[key]);
    subs.push_back(std::move(sub));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, log, err);
    err << "ndpc: " << e.what() << "\n";
    return kExitConfig;
  }

  for (const auto& sub : subs) {
    if (!sub->app->parsed()) continue;
    try {
      KeyValues flags;
      for (const auto& key : allowed_keys(sub->command))
        if (sub->app->get_option(flag_name(key))->count() > 0) flags[key] = sub->given[key];
      const KeyValues file = sub->config_path.empty() ? KeyValues{} : load_config_file(sub->config_path);
      return dispatch(resolve(sub->command, file, flags), log);
    } catch (const ConfigError& e) {
      err << "ndpc: config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const TrainingError& e) {
      err << "ndpc: " << e.what() << "\n";
      return kExitDivergence;
    } catch (const SweepError& e) {
      err << "ndpc: " << e.what() << "\n";
      return kExitDivergence;
    } catch (const CheckpointError& e) {
      err << "ndpc: " << e.what() << "\n";
      return kExitIo;
    } catch (const IoError& e) {
      err << "ndpc: " << e.what() << "\n";
      return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
      err << "ndpc: " << e.what() << "\n";
      return kExitIo;
    } catch (const std::invalid_argument& e) {
      err << "ndpc: invalid argument: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  return kExitConfig;
}

}  // namespace ndpc::cli
