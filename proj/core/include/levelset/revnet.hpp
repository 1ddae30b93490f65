#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace levelset {

enum class Activation { kTanh };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

struct RevNetConfig {
  int dim = 2;           // total input dimension, even
  int n_blocks = 10;     // number of coupling blocks
  double step_size = 0.25;
  int hidden_width = 2;  // rows of each K matrix; conventionally equal to dim
  Activation activation = Activation::kTanh;
  std::uint64_t seed = 0;

  int half() const { return dim / 2; }

  // Throws ConfigError on odd or non-positive sizes.
  void validate() const;

  // Config with hidden_width = dim.
  static RevNetConfig with_dim(int dim, int n_blocks, double step_size, std::uint64_t seed = 0);
};

bool operator==(const RevNetConfig& a, const RevNetConfig& b);

// Weights of one coupling block. k1/k2 are hidden_width x (dim/2).
struct RevNetBlock {
  Eigen::MatrixXd k1;
  Eigen::MatrixXd k2;
  Eigen::VectorXd b1;
  Eigen::VectorXd b2;

  static RevNetBlock zeros(int hidden_width, int half);
};

bool operator==(const RevNetBlock& a, const RevNetBlock& b);

// Additive-coupling reversible network x -> z.
//
//   u <- u + h K1^T tanh(K1 v + b1)
//   v <- v - h K2^T tanh(K2 u + b2)
//
// applied for every block, with u the first dim/2 coordinates of x and v the
// rest. Each half-step is a shear, so the map is exactly invertible and
// volume preserving.
struct RevNetParams {
  RevNetConfig config;
  std::vector<RevNetBlock> blocks;

  // Throws ShapeError if any block disagrees with config, NumericalError on
  // non-finite entries.
  void validate() const;

  std::size_t parameter_count() const;
};

bool operator==(const RevNetParams& a, const RevNetParams& b);

// Gradient with respect to every block parameter; same layout as the blocks
// of RevNetParams.
struct RevNetGradient {
  std::vector<RevNetBlock> blocks;

  static RevNetGradient zeros_like(const RevNetParams& params);

  RevNetGradient& operator+=(const RevNetGradient& other);
  RevNetGradient& operator*=(double s);
};

struct SplitState {
  Eigen::VectorXd u;
  Eigen::VectorXd v;

  static SplitState split(const Eigen::VectorXd& x);
  Eigen::VectorXd join() const;
};

// Entries i.i.d. uniform on [-scale, scale] from config.seed. scale = 0 is the
// identity map.
RevNetParams init_params(const RevNetConfig& config, double scale = 0.1);

Eigen::VectorXd forward(const RevNetParams& params, const Eigen::VectorXd& x);
Eigen::VectorXd inverse(const RevNetParams& params, const Eigen::VectorXd& z);

// Flat parameter vector, block by block: K1 row-major, K2 row-major, b1, b2.
Eigen::VectorXd flatten(const RevNetParams& params);
Eigen::VectorXd flatten(const RevNetGradient& grad);
void unflatten(const Eigen::VectorXd& flat, RevNetParams& params);

// In-place params += scale * grad.
void axpy(double scale, const RevNetGradient& grad, RevNetParams& params);

// Checkpoint files: JSON with schema_version 1. epochs_completed records how
// far training progressed so resumed runs can continue the epoch schedule.
struct Checkpoint {
  RevNetParams params;
  std::uint64_t epochs_completed = 0;
};

inline constexpr int kCheckpointSchemaVersion = 1;

void save_checkpoint(const RevNetParams& params, const std::filesystem::path& path,
                     std::uint64_t epochs_completed = 0);
Checkpoint load_checkpoint_state(const std::filesystem::path& path);
RevNetParams load_checkpoint(const std::filesystem::path& path);

}  // namespace levelset
