#include "levelset/regressor.hpp"

#include <cmath>
#include <fstream>

#include "csv_util.hpp"
#include "levelset/error.hpp"
#include "levelset/rng.hpp"

namespace levelset {

void MLPConfig::validate() const {
  if (layer_widths.size() < 2) throw ConfigError("an MLP needs at least an input and an output layer");
  for (int w : layer_widths) {
    if (w < 1) throw ConfigError("layer widths must be positive");
  }
  if (layer_widths.back() != 1) throw ConfigError("the output layer must have width 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
}

std::string MLPConfig::architecture() const {
  std::string out;
  for (std::size_t i = 1; i + 1 < layer_widths.size(); ++i) {
    if (!out.empty()) out += '-';
    out += std::to_string(layer_widths[i]);
  }
  return out.empty() ? "linear" : out;
}

namespace {

Eigen::MatrixXd stack_columns(std::span<const Eigen::VectorXd> xs, Eigen::Index rows) {
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].size() != rows) throw DimensionError("input length does not match the first layer");
    m.col(static_cast<Eigen::Index>(i)) = xs[i];
  }
  return m;
}

}  // namespace

class MlpTrainer {
 public:
  static Mlp init(const MLPConfig& cfg, const Eigen::MatrixXd& x, std::span<const double> y) {
    Mlp m;
    m.config_ = cfg;
    const auto n = static_cast<double>(x.cols());
    m.input_mean_ = x.rowwise().mean();
    m.input_scale_ =
        ((x.colwise() - m.input_mean_).array().square().rowwise().sum() / n).sqrt().matrix();
    for (Eigen::Index i = 0; i < m.input_scale_.size(); ++i) {
      if (!(m.input_scale_[i] > 0.0)) m.input_scale_[i] = 1.0;
    }
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    m.target_mean_ = mean;
    // Constant targets: the network output is multiplied by zero, so the
    // prediction is exactly the constant.
    m.target_scale_ = std::sqrt(var / n);

    Rng rng(cfg.seed);
    for (std::size_t l = 1; l < cfg.layer_widths.size(); ++l) {
      const int fan_in = cfg.layer_widths[l - 1];
      const int fan_out = cfg.layer_widths[l];
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      Eigen::MatrixXd w(fan_out, fan_in);
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
      }
      m.weights_.push_back(std::move(w));
      m.biases_.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return m;
  }

  static Eigen::RowVectorXd standardize_targets(const Mlp& m, std::span<const double> y) {
    Eigen::RowVectorXd t(static_cast<Eigen::Index>(y.size()));
    const double scale = m.target_scale_ > 0.0 ? m.target_scale_ : 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      t[static_cast<Eigen::Index>(i)] = (y[i] - m.target_mean_) / scale;
    }
    return t;
  }

  static Eigen::MatrixXd standardize(const Mlp& m, const Eigen::MatrixXd& x) {
    return (x.colwise() - m.input_mean_).array().colwise() / m.input_scale_.array();
  }

  // Raw network output (before the target de-standardization), one column
  // per sample. Keeps the layer activations when `acts` is given.
  static Eigen::RowVectorXd network(const Mlp& m, const Eigen::MatrixXd& xs,
                                    std::vector<Eigen::MatrixXd>* acts) {
    Eigen::MatrixXd a = xs;
    const std::size_t layers = m.weights_.size();
    for (std::size_t l = 0; l < layers; ++l) {
      Eigen::MatrixXd z = m.weights_[l] * a;
      z.colwise() += m.biases_[l];
      if (acts) acts->push_back(std::move(a));
      a = (l + 1 < layers) ? Eigen::MatrixXd(z.array().tanh()) : z;
    }
    return a.row(0);
  }

  static void train(Mlp& m, const Eigen::MatrixXd& xs, const Eigen::RowVectorXd& target) {
    const auto& cfg = m.config_;
    const std::size_t layers = m.weights_.size();
    const auto n = static_cast<double>(xs.cols());
    std::vector<Eigen::MatrixXd> vw;
    std::vector<Eigen::VectorXd> vb;
    for (std::size_t l = 0; l < layers; ++l) {
      vw.push_back(Eigen::MatrixXd::Zero(m.weights_[l].rows(), m.weights_[l].cols()));
      vb.push_back(Eigen::VectorXd::Zero(m.biases_[l].size()));
    }
    std::vector<Eigen::MatrixXd> acts;
    for (std::uint64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      acts.clear();
      const Eigen::RowVectorXd out = network(m, xs, &acts);
      Eigen::MatrixXd delta = (out - target) / n;
      if (!delta.allFinite()) {
        throw NumericalError("regressor loss became non-finite at epoch " + std::to_string(epoch));
      }
      for (std::size_t l = layers; l-- > 0;) {
        const Eigen::MatrixXd gw = delta * acts[l].transpose();
        const Eigen::VectorXd gb = delta.rowwise().sum();
        if (l > 0) {
          delta = (m.weights_[l].transpose() * delta).array() * (1.0 - acts[l].array().square());
        }
        vw[l] = cfg.momentum * vw[l] - cfg.learning_rate * gw;
        vb[l] = cfg.momentum * vb[l] - cfg.learning_rate * gb;
        m.weights_[l] += vw[l];
        m.biases_[l] += vb[l];
      }
    }
  }

  static Eigen::VectorXd predict(const Mlp& m, const Eigen::MatrixXd& raw_inputs) {
    const Eigen::RowVectorXd out = network(m, standardize(m, raw_inputs), nullptr);
    return (m.target_mean_ + m.target_scale_ * out.array()).transpose();
  }
};

double Mlp::predict(const Eigen::VectorXd& input) const {
  if (weights_.empty()) throw ConfigError("model has not been fitted");
  return MlpTrainer::predict(*this, stack_columns({&input, 1}, input_mean_.size()))[0];
}

Eigen::VectorXd Mlp::predict(std::span<const Eigen::VectorXd> inputs) const {
  if (weights_.empty()) throw ConfigError("model has not been fitted");
  return MlpTrainer::predict(*this, stack_columns(inputs, input_mean_.size()));
}

double predict(const Mlp& model, const Eigen::VectorXd& input) { return model.predict(input); }

FitReport fit(const MLPConfig& cfg, std::span<const Eigen::VectorXd> inputs,
              std::span<const double> targets, std::span<const Eigen::VectorXd> valid_inputs,
              std::span<const double> valid_targets) {
  cfg.validate();
  if (inputs.empty()) throw ConfigError("regressor needs at least one training sample");
  if (inputs.size() != targets.size()) throw DimensionError("inputs and targets differ in length");
  if (valid_inputs.size() != valid_targets.size()) {
    throw DimensionError("validation inputs and targets differ in length");
  }
  const Eigen::MatrixXd x = stack_columns(inputs, cfg.layer_widths.front());

  FitReport report;
  report.model = MlpTrainer::init(cfg, x, targets);
  Mlp& m = report.model;
  MlpTrainer::train(m, MlpTrainer::standardize(m, x), MlpTrainer::standardize_targets(m, targets));

  const Eigen::VectorXd train_pred = MlpTrainer::predict(m, x);
  report.train_rrmse = relative_rmse({train_pred.data(), targets.size()}, targets);
  if (!valid_inputs.empty()) {
    const Eigen::VectorXd valid_pred = m.predict(valid_inputs);
    report.valid_rrmse = relative_rmse({valid_pred.data(), valid_targets.size()}, valid_targets);
  }
  return report;
}

double relative_rmse(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) {
    throw DimensionError("predictions and truths differ in length");
  }
  if (truths.empty()) throw ConfigError("relative RMSE of an empty set");
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double e = predictions[i] - truths[i];
    err += e * e;
    ref += truths[i] * truths[i];
  }
  if (!(ref > 0.0)) throw DegenerateError("relative RMSE is undefined for all-zero truths");
  return std::sqrt(err / ref);
}

std::vector<Eigen::VectorXd> reduce_inputs(const Transform& transform,
                                           std::span<const Eigen::VectorXd> xs,
                                           std::span<const int> active_dims) {
  const int d = transform_dim(transform);
  if (active_dims.empty()) throw ConfigError("no active dimensions selected");
  for (int a : active_dims) {
    if (a < 0 || a >= d) throw DimensionError("active dimension index out of range");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    const Eigen::VectorXd z = apply_transform(transform, x);
    Eigen::VectorXd r(static_cast<Eigen::Index>(active_dims.size()));
    for (std::size_t k = 0; k < active_dims.size(); ++k) r[static_cast<Eigen::Index>(k)] = z[active_dims[k]];
    out.push_back(std::move(r));
  }
  return out;
}

void write_rmse_csv(std::span<const RmseRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "method,architecture,n_train,train_rrmse,valid_rrmse\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.architecture << ',' << r.n_train << ','
        << detail::format_double(r.train_rrmse) << ',' << detail::format_double(r.valid_rrmse)
        << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace levelset
