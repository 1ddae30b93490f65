#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "levelset/analysis.hpp"
#include "levelset/functions.hpp"
#include "levelset/regressor.hpp"
#include "levelset/revnet.hpp"
#include "levelset/trainer.hpp"

namespace levelset {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr int kConfigSchemaVersion = 1;

// Downstream regressor grid: every architecture is fitted for every n_train.
struct RegressorGrid {
  std::vector<std::vector<int>> hidden_layers{{20, 20}, {10}};
  std::vector<std::size_t> n_train{100, 500};
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t epochs = 20000;
};

struct ExperimentConfig {
  std::string name = "custom";
  // Exactly one of function / dataset_path is set.
  std::optional<FunctionId> function;
  std::filesystem::path dataset_path;
  std::optional<DomainBox> domain;  // overrides the function's own domain

  SampleLayout layout = SampleLayout::kUniformRandom;  // training samples
  std::size_t n_train = 0;
  std::size_t n_valid = 0;  // validation samples are always uniform random

  // dim and seed are filled in from the data and the global seed.
  RevNetConfig revnet;
  double init_scale = 0.1;
  TrainConfig train;
  BaselineToggles baselines;
  RegressorGrid regressor;
  std::vector<int> active_dims;

  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;

  // Problem dimension (from the function, or from the dataset file).
  int dim() const;
  void validate() const;
};

// Built-in presets f1..f5.
std::vector<ExperimentConfig> presets();
std::optional<ExperimentConfig> preset(std::string_view name);

// JSON round trip. Accepts either a bare config or a run manifest (whose
// "config" field is used). Unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig experiment_config_from_json_text(const std::string& text);
std::string experiment_config_to_json_text(const ExperimentConfig& cfg);

// Seeds of the individual random streams, all derived from cfg.seed.
struct SeedPlan {
  std::uint64_t train_data;
  std::uint64_t valid_data;
  std::uint64_t init;
  std::uint64_t shuffle;
  std::uint64_t regressor;
  std::uint64_t regressor_data;
};
SeedPlan seed_plan(std::uint64_t seed);

struct ExperimentData {
  Dataset train;
  Dataset valid;
};
ExperimentData build_data(const ExperimentConfig& cfg);

// Training data for the regressor grid: at least max(n_train grid) samples,
// the first of which coincide with the transform's training set when the
// layouts allow it.
Dataset build_regressor_pool(const ExperimentConfig& cfg, const ExperimentData& data);

struct OutputPaths {
  std::filesystem::path manifest, checkpoint, loss_history, sensitivity, rmse;
};
OutputPaths output_paths(const std::filesystem::path& out_dir);

// Outcome of a command; exit_code follows the CLI convention.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTrainingAborted = 3;
inline constexpr int kExitIo = 4;

struct TrainOutcome {
  TrainReport report;
  OutputPaths paths;
};

// Trains the RevNet and writes checkpoint, loss history and manifest. An
// aborted run still writes the artifacts for the last good state.
TrainOutcome run_train(const ExperimentConfig& cfg);

// Continues training from `checkpoint` until cfg.train.n_epochs epochs are
// completed in total, appending to the loss history.
TrainOutcome run_resume(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint);

// Sensitivity rows for identity, NLL (when a checkpoint is given) and the
// enabled baselines, on the validation set.
std::vector<SensitivityReport> run_sensitivity(const ExperimentConfig& cfg,
                                               const std::optional<std::filesystem::path>& checkpoint);

// Relative RMSE rows per (method, architecture, n_train).
std::vector<RmseRow> run_rmse(const ExperimentConfig& cfg,
                              const std::optional<std::filesystem::path>& checkpoint);

// Rewrites out_dir/manifest.json: config echo, seeds, version, and SHA-256 of
// every artifact present in out_dir.
void write_manifest(const ExperimentConfig& cfg, const std::string& command);

std::string sha256_file(const std::filesystem::path& path);

std::string version_string();

}  // namespace levelset
