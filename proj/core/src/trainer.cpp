#include "levelset/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "csv_util.hpp"
#include "levelset/error.hpp"
#include "levelset/rng.hpp"

namespace levelset {

void TrainConfig::validate(std::size_t dataset_size, int dim) const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be nonnegative");
  if (batch_size && (*batch_size == 0 || *batch_size > dataset_size)) {
    throw ConfigError("batch_size must be between 1 and the dataset size");
  }
  if (checkpoint_every && *checkpoint_every == 0) {
    throw ConfigError("checkpoint_every must be positive");
  }
  if (weights.omega.size() != dim) {
    throw DimensionError("anisotropy weights have length " + std::to_string(weights.omega.size()) +
                         ", network dimension is " + std::to_string(dim));
  }
  weights.validate();
}

namespace {

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.l1) && std::isfinite(l.l2) && std::isfinite(l.total);
}

bool finite(const RevNetParams& p) {
  for (const auto& b : p.blocks) {
    if (!b.k1.allFinite() || !b.k2.allFinite() || !b.b1.allFinite() || !b.b2.allFinite()) {
      return false;
    }
  }
  return true;
}

// Minibatch training: several steps per epoch, then a full-dataset evaluation.
// Full-batch training folds the evaluation into the next epoch's gradient pass.
class Loop {
 public:
  Loop(std::span<const GradientSample> data, const TrainConfig& cfg, TrainReport& report)
      : data_(data), cfg_(cfg), report_(report) {}

  void run(RevNetParams params, std::uint64_t first_epoch) {
    const std::uint64_t last = first_epoch + cfg_.n_epochs;
    good_ = params;
    good_epoch_ = first_epoch;
    try {
      for (std::uint64_t e = first_epoch; e < last; ++e) {
        if (!cfg_.batch_size) {
          const LossGradient lg =
              loss_gradient(params, data_, cfg_.weights, cfg_.lambda, cfg_.reduction);
          if (!finite(lg.loss)) return abort("non-finite loss");
          good_ = params;
          good_epoch_ = e;
          if (e == first_epoch) {
            report_.initial_loss = lg.loss;
          } else {
            report_.loss_history.push_back({e, lg.loss});
          }
          axpy(-cfg_.learning_rate, lg.grad, params);
          if (!finite(params)) return abort("non-finite parameters after update");
        } else {
          minibatch_epoch(params, e);
          if (!finite(params)) return abort("non-finite parameters after update");
          const LossBreakdown l = total_loss(params, data_, cfg_.weights, cfg_.lambda);
          if (!finite(l)) return abort("non-finite loss");
          report_.loss_history.push_back({e + 1, l});
          good_ = params;
          good_epoch_ = e + 1;
        }
        maybe_checkpoint(params, e + 1);
      }
      if (!cfg_.batch_size) {
        const LossBreakdown l = total_loss(params, data_, cfg_.weights, cfg_.lambda);
        if (!finite(l)) return abort("non-finite loss");
        if (cfg_.n_epochs == 0) {
          report_.initial_loss = l;
        } else {
          report_.loss_history.push_back({last, l});
        }
        good_ = std::move(params);
        good_epoch_ = last;
      }
      report_.final_params = std::move(good_);
      report_.epochs_completed = good_epoch_;
    } catch (const NumericalError& e) {
      abort(e.what());
    } catch (const DegenerateError& e) {
      abort(e.what());
    }
  }

 private:
  void minibatch_epoch(RevNetParams& params, std::uint64_t epoch) {
    std::vector<std::size_t> order(data_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(cfg_.seed, epoch));
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<GradientSample> batch;
    for (std::size_t begin = 0; begin < order.size(); begin += *cfg_.batch_size) {
      const std::size_t end = std::min(order.size(), begin + *cfg_.batch_size);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(data_[order[i]]);
      const LossGradient lg =
          loss_gradient(params, batch, cfg_.weights, cfg_.lambda, cfg_.reduction);
      axpy(-cfg_.learning_rate, lg.grad, params);
    }
  }

  void maybe_checkpoint(const RevNetParams& params, std::uint64_t completed) {
    if (cfg_.checkpoint_every && !cfg_.checkpoint_path.empty() &&
        completed % *cfg_.checkpoint_every == 0) {
      save_checkpoint(params, cfg_.checkpoint_path, completed);
    }
  }

  void abort(const std::string& why) {
    report_.status = TrainStatus::kAborted;
    report_.message = "training aborted after epoch " + std::to_string(good_epoch_) + ": " + why;
    while (!report_.loss_history.empty() && report_.loss_history.back().epoch > good_epoch_) {
      report_.loss_history.pop_back();
    }
    report_.final_params = good_;
    report_.epochs_completed = good_epoch_;
  }

  std::span<const GradientSample> data_;
  const TrainConfig& cfg_;
  TrainReport& report_;
  RevNetParams good_;
  std::uint64_t good_epoch_ = 0;
};

}  // namespace

TrainReport train(const RevNetParams& params0, std::span<const GradientSample> dataset,
                  const TrainConfig& cfg, std::uint64_t first_epoch) {
  params0.validate();
  if (dataset.empty()) throw ConfigError("training dataset is empty");
  for (const auto& s : dataset) {
    if (s.x.size() != params0.config.dim || s.grad.size() != params0.config.dim) {
      throw DimensionError("dataset dimension does not match the network dimension " +
                           std::to_string(params0.config.dim));
    }
  }
  cfg.validate(dataset.size(), params0.config.dim);

  const auto t0 = std::chrono::steady_clock::now();
  TrainReport report;
  report.final_params = params0;
  report.loss_history.reserve(cfg.n_epochs);
  Loop(dataset, cfg, report).run(params0, first_epoch);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

TrainReport resume(const std::filesystem::path& checkpoint_path,
                   std::span<const GradientSample> dataset, const TrainConfig& cfg) {
  const Checkpoint ck = load_checkpoint_state(checkpoint_path);
  return train(ck.params, dataset, cfg, ck.epochs_completed);
}

void write_loss_history_csv(std::span<const EpochLoss> history, const std::filesystem::path& path,
                            bool append) {
  const bool header = !append || !std::filesystem::exists(path) ||
                      std::filesystem::file_size(path) == 0;
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  if (header) out << "epoch,l1,l2,total\n";
  for (const auto& h : history) {
    out << h.epoch << ',' << detail::format_double(h.loss.l1) << ','
        << detail::format_double(h.loss.l2) << ',' << detail::format_double(h.loss.total) << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace levelset
