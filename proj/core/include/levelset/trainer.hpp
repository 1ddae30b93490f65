#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levelset/loss.hpp"
#include "levelset/revnet.hpp"
#include "levelset/sample.hpp"

namespace levelset {

enum class Optimizer { kSgd };

struct TrainConfig {
  double learning_rate = 0.01;
  std::uint64_t n_epochs = 3000;
  std::optional<std::size_t> batch_size;  // nullopt = full batch
  double lambda = kDefaultLambda;
  AnisotropyWeights weights;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> checkpoint_every;
  std::filesystem::path checkpoint_path;  // used when checkpoint_every is set
  LossReduction reduction = LossReduction::kMean;
  Optimizer optimizer = Optimizer::kSgd;

  void validate(std::size_t dataset_size, int dim) const;
};

struct EpochLoss {
  std::uint64_t epoch = 0;  // epochs completed when the loss was measured
  LossBreakdown loss;
};

enum class TrainStatus { kCompleted, kAborted };

struct TrainReport {
  std::vector<EpochLoss> loss_history;  // one entry per epoch, full dataset
  std::optional<LossBreakdown> initial_loss;
  RevNetParams final_params;            // last parameters with a finite loss
  std::uint64_t epochs_completed = 0;   // absolute, including resumed epochs
  TrainStatus status = TrainStatus::kCompleted;
  std::string message;
  double wall_time = 0.0;  // seconds
};

// Plain SGD on the total loss. Minibatches are reshuffled each epoch from a
// generator seeded by (cfg.seed, absolute epoch index), so a run split into
// train + resume follows the same schedule as one uninterrupted run.
// `first_epoch` is the absolute index of the first epoch to run.
TrainReport train(const RevNetParams& params0, std::span<const GradientSample> dataset,
                  const TrainConfig& cfg, std::uint64_t first_epoch = 0);

// Continues from a checkpoint written by save_checkpoint or by train().
TrainReport resume(const std::filesystem::path& checkpoint_path,
                   std::span<const GradientSample> dataset, const TrainConfig& cfg);

// CSV with header epoch,l1,l2,total.
void write_loss_history_csv(std::span<const EpochLoss> history, const std::filesystem::path& path,
                            bool append = false);

}  // namespace levelset
