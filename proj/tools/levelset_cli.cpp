// levelset: train RevNet level-set transforms and report sensitivities/RMSE.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "levelset/error.hpp"
#include "levelset/experiment.hpp"

namespace ls = levelset;

namespace {

struct Overrides {
  std::string preset;
  std::string config;
  std::string function;
  std::string dataset;
  std::string out_dir;
  std::optional<std::uint64_t> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<double> learning_rate;
  std::optional<std::size_t> batch_size;
  std::optional<std::uint64_t> checkpoint_every;
  std::optional<int> n_blocks;
  std::optional<double> step_size;
  std::optional<std::size_t> n_train;
  std::optional<std::size_t> n_valid;
  std::vector<int> active_dims;
  bool no_as = false;
  bool no_sir = false;
};

void add_config_options(CLI::App* cmd, Overrides& o) {
  auto* p = cmd->add_option("--preset", o.preset, "Built-in preset (f1..f5)");
  auto* c = cmd->add_option("--config", o.config, "JSON config or run manifest")->check(CLI::ExistingFile);
  p->excludes(c);
  cmd->add_option("--function", o.function, "Test function id (f1..f5)");
  cmd->add_option("--dataset", o.dataset, "Tabulated dataset x_1..x_d,y,g_1..g_d");
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
  cmd->add_option("--epochs", o.epochs, "Training epochs (total)");
  cmd->add_option("--seed", o.seed, "Global seed");
  cmd->add_option("--lr", o.learning_rate, "SGD learning rate");
  cmd->add_option("--batch-size", o.batch_size, "Minibatch size (default: full batch)");
  cmd->add_option("--checkpoint-every", o.checkpoint_every, "Checkpoint period in epochs");
  cmd->add_option("--n-blocks", o.n_blocks, "Number of coupling blocks");
  cmd->add_option("--step-size", o.step_size, "Coupling step size h");
  cmd->add_option("--n-train", o.n_train, "Training samples");
  cmd->add_option("--n-valid", o.n_valid, "Validation samples");
  cmd->add_option("--active-dims", o.active_dims, "0-based active coordinates (omega = 0 there)");
  cmd->add_flag("--no-as", o.no_as, "Skip the active-subspace baseline");
  cmd->add_flag("--no-sir", o.no_sir, "Skip the sliced-inverse-regression baseline");
}

ls::ExperimentConfig resolve(const Overrides& o) {
  ls::ExperimentConfig cfg;
  if (!o.config.empty()) {
    cfg = ls::load_experiment_config(o.config);
  } else if (!o.preset.empty()) {
    auto p = ls::preset(o.preset);
    if (!p) throw ls::ConfigError("unknown preset '" + o.preset + "'");
    cfg = *p;
  } else if (o.function.empty() && o.dataset.empty()) {
    throw ls::ConfigError("one of --preset, --config, --function or --dataset is required");
  }
  if (!o.function.empty()) {
    const auto id = ls::function_id_from_string(o.function);
    if (!id) throw ls::ConfigError("unknown function '" + o.function + "'");
    if (o.preset.empty() && o.config.empty()) {
      if (auto p = ls::preset(o.function)) cfg = *p;
    }
    cfg.function = id;
    cfg.dataset_path.clear();
  }
  if (!o.dataset.empty()) {
    cfg.dataset_path = o.dataset;
    cfg.function.reset();
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.epochs) cfg.train.n_epochs = *o.epochs;
  if (o.seed) cfg.seed = *o.seed;
  if (o.learning_rate) cfg.train.learning_rate = *o.learning_rate;
  if (o.batch_size) cfg.train.batch_size = *o.batch_size;
  if (o.checkpoint_every) cfg.train.checkpoint_every = *o.checkpoint_every;
  if (o.n_blocks) cfg.revnet.n_blocks = *o.n_blocks;
  if (o.step_size) cfg.revnet.step_size = *o.step_size;
  if (o.n_train) cfg.n_train = *o.n_train;
  if (o.n_valid) cfg.n_valid = *o.n_valid;
  if (!o.active_dims.empty()) {
    cfg.active_dims = o.active_dims;
    cfg.train.weights = ls::AnisotropyWeights::from_active(cfg.dim(), cfg.active_dims);
  }
  if (o.no_as) cfg.baselines.active_subspace = false;
  if (o.no_sir) cfg.baselines.sliced_inverse_regression = false;
  if (cfg.train.weights.omega.size() == 0 && !cfg.active_dims.empty()) {
    cfg.train.weights = ls::AnisotropyWeights::from_active(cfg.dim(), cfg.active_dims);
  }
  return cfg;
}

int report_train(const ls::TrainOutcome& out) {
  const auto& r = out.report;
  if (!r.loss_history.empty()) {
    const auto& last = r.loss_history.back();
    std::printf("epoch %llu  l1 %.6g  l2 %.3g  total %.6g\n",
                static_cast<unsigned long long>(last.epoch), last.loss.l1, last.loss.l2,
                last.loss.total);
  }
  std::printf("epochs completed: %llu (%.1f s)\ncheckpoint: %s\n",
              static_cast<unsigned long long>(r.epochs_completed), r.wall_time,
              out.paths.checkpoint.string().c_str());
  if (r.status == ls::TrainStatus::kAborted) {
    std::fprintf(stderr, "training aborted: %s\n", r.message.c_str());
    return ls::kExitTrainingAborted;
  }
  return ls::kExitOk;
}

std::optional<std::filesystem::path> checkpoint_arg(const std::string& arg,
                                                    const ls::ExperimentConfig& cfg,
                                                    bool required) {
  if (!arg.empty()) return std::filesystem::path(arg);
  auto p = ls::output_paths(cfg.out_dir).checkpoint;
  if (std::filesystem::exists(p)) return p;
  if (required) throw ls::ConfigError("no checkpoint given and none found at " + p.string());
  return std::nullopt;
}

int run(int argc, char** argv) {
  CLI::App app{"Level-set learning with reversible networks"};
  app.set_version_flag("--version", ls::version_string());
  app.require_subcommand(1);

  Overrides o;
  std::string checkpoint;
  std::string show;

  auto* presets = app.add_subcommand("presets", "List built-in presets");
  presets->add_option("--show", show, "Print one preset as a JSON config");

  auto* train = app.add_subcommand("train", "Train a RevNet transform");
  add_config_options(train, o);

  auto* resume = app.add_subcommand("resume", "Continue training from a checkpoint");
  add_config_options(resume, o);
  resume->add_option("--checkpoint", checkpoint, "Checkpoint (default: <out-dir>/checkpoint.json)");

  auto* sens = app.add_subcommand("sensitivity", "Sensitivity table on validation data");
  add_config_options(sens, o);
  sens->add_option("--checkpoint", checkpoint, "Trained RevNet (default: <out-dir>/checkpoint.json if present)");

  auto* rmse = app.add_subcommand("rmse", "Relative RMSE of downstream regressors");
  add_config_options(rmse, o);
  rmse->add_option("--checkpoint", checkpoint, "Trained RevNet (default: <out-dir>/checkpoint.json if present)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ls::kExitOk : ls::kExitConfig;
  }

  if (presets->parsed()) {
    if (!show.empty()) {
      auto p = ls::preset(show);
      if (!p) throw ls::ConfigError("unknown preset '" + show + "'");
      std::cout << ls::experiment_config_to_json_text(*p) << '\n';
      return ls::kExitOk;
    }
    std::printf("%-4s %-4s %4s %6s %6s %9s %7s %7s %7s  %s\n", "name", "fn", "dim", "blocks", "h",
                "lr", "n_train", "n_valid", "epochs", "active");
    for (const auto& p : ls::presets()) {
      std::string active;
      for (int a : p.active_dims) active += (active.empty() ? "" : ",") + std::to_string(a + 1);
      std::printf("%-4s %-4s %4d %6d %6g %9g %7zu %7zu %7llu  x%s%s\n", p.name.c_str(),
                  std::string(ls::to_string(*p.function)).c_str(), p.dim(), p.revnet.n_blocks,
                  p.revnet.step_size, p.train.learning_rate, p.n_train, p.n_valid,
                  static_cast<unsigned long long>(p.train.n_epochs), active.c_str(),
                  p.layout == ls::SampleLayout::kGrid ? "  (grid)" : "");
    }
    return ls::kExitOk;
  }

  const ls::ExperimentConfig cfg = resolve(o);
  if (train->parsed()) return report_train(ls::run_train(cfg));
  if (resume->parsed()) return report_train(ls::run_resume(cfg, *checkpoint_arg(checkpoint, cfg, true)));
  if (sens->parsed()) {
    const auto reports = ls::run_sensitivity(cfg, checkpoint_arg(checkpoint, cfg, false));
    for (const auto& r : reports) {
      std::printf("%-8s", r.method.c_str());
      for (Eigen::Index i = 0; i < r.normalized.size(); ++i) std::printf(" %.3g", r.normalized[i]);
      std::printf("%s\n", r.degenerate ? "  (constant)" : "");
    }
    std::printf("wrote %s\n", ls::output_paths(cfg.out_dir).sensitivity.string().c_str());
    return ls::kExitOk;
  }
  if (rmse->parsed()) {
    const auto rows = ls::run_rmse(cfg, checkpoint_arg(checkpoint, cfg, false));
    std::printf("%-8s %-8s %7s %10s %10s\n", "method", "arch", "n_train", "train %", "valid %");
    for (const auto& r : rows) {
      std::printf("%-8s %-8s %7zu %10.2f %10.2f\n", r.method.c_str(), r.architecture.c_str(),
                  r.n_train, 100 * r.train_rrmse, 100 * r.valid_rrmse);
    }
    std::printf("wrote %s\n", ls::output_paths(cfg.out_dir).rmse.string().c_str());
    return ls::kExitOk;
  }
  return ls::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ls::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return ls::kExitConfig;
  } catch (const ls::DimensionError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return ls::kExitConfig;
  } catch (const ls::DegenerateError& e) {
    std::fprintf(stderr, "degenerate input: %s\n", e.what());
    return ls::kExitConfig;
  } catch (const ls::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return ls::kExitTrainingAborted;
  } catch (const ls::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return ls::kExitIo;
  } catch (const ls::Error& e) {
    // Malformed checkpoint or dataset files.
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return ls::kExitIo;
  }
}
