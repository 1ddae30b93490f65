#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levelset/transform.hpp"

namespace levelset {

// Fully connected network: tanh hidden layers, linear scalar output.
struct MLPConfig {
  std::vector<int> layer_widths{1, 10, 1};  // input width first, 1 last
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t epochs = 20000;
  std::uint64_t seed = 0;

  void validate() const;
  // "20-20" style label of the hidden layers.
  std::string architecture() const;
};

class Mlp {
 public:
  Mlp() = default;

  double predict(const Eigen::VectorXd& input) const;
  Eigen::VectorXd predict(std::span<const Eigen::VectorXd> inputs) const;

  const MLPConfig& config() const { return config_; }

 private:
  friend class MlpTrainer;

  MLPConfig config_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  // Inputs are standardized with training-split statistics; the output is
  // mapped back through target_mean + target_scale * raw.
  Eigen::VectorXd input_mean_;
  Eigen::VectorXd input_scale_;
  double target_mean_ = 0.0;
  double target_scale_ = 1.0;
};

struct FitReport {
  double train_rrmse = 0.0;
  std::optional<double> valid_rrmse;
  Mlp model;
};

// Full-batch gradient descent with momentum on the mean squared error.
// Deterministic for a fixed cfg.seed. Throws NumericalError if the loss
// becomes non-finite.
FitReport fit(const MLPConfig& cfg, std::span<const Eigen::VectorXd> inputs,
              std::span<const double> targets,
              std::span<const Eigen::VectorXd> valid_inputs = {},
              std::span<const double> valid_targets = {});

double predict(const Mlp& model, const Eigen::VectorXd& input);

// sqrt(mean((p - y)^2)) / sqrt(mean(y^2)).
double relative_rmse(std::span<const double> predictions, std::span<const double> truths);

// T(x) restricted to the listed coordinates.
std::vector<Eigen::VectorXd> reduce_inputs(const Transform& transform,
                                           std::span<const Eigen::VectorXd> xs,
                                           std::span<const int> active_dims);

struct RmseRow {
  std::string method;
  std::string architecture;
  std::size_t n_train = 0;
  double train_rrmse = 0.0;
  double valid_rrmse = 0.0;
};

// CSV with header method,architecture,n_train,train_rrmse,valid_rrmse.
void write_rmse_csv(std::span<const RmseRow> rows, const std::filesystem::path& path);

}  // namespace levelset
