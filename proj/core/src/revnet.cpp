#include "levelset/revnet.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "json_util.hpp"
#include "levelset/error.hpp"
#include "levelset/rng.hpp"

namespace levelset {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kTanh:
      return "tanh";
  }
  return "unknown";
}

Activation activation_from_string(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

void RevNetConfig::validate() const {
  if (dim < 2) throw ConfigError("dim must be at least 2, got " + std::to_string(dim));
  if (dim % 2 != 0) {
    throw ConfigError("dim must be even, got " + std::to_string(dim) +
                      "; pad the input with a constant coordinate");
  }
  if (n_blocks < 1) throw ConfigError("n_blocks must be positive");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("step_size must be positive and finite");
  }
  if (hidden_width < 1) throw ConfigError("hidden_width must be positive");
}

RevNetConfig RevNetConfig::with_dim(int dim, int n_blocks, double step_size, std::uint64_t seed) {
  RevNetConfig c;
  c.dim = dim;
  c.n_blocks = n_blocks;
  c.step_size = step_size;
  c.hidden_width = dim;
  c.seed = seed;
  return c;
}

bool operator==(const RevNetConfig& a, const RevNetConfig& b) {
  return a.dim == b.dim && a.n_blocks == b.n_blocks && a.step_size == b.step_size &&
         a.hidden_width == b.hidden_width && a.activation == b.activation && a.seed == b.seed;
}

RevNetBlock RevNetBlock::zeros(int hidden_width, int half) {
  return {Eigen::MatrixXd::Zero(hidden_width, half), Eigen::MatrixXd::Zero(hidden_width, half),
          Eigen::VectorXd::Zero(hidden_width), Eigen::VectorXd::Zero(hidden_width)};
}

bool operator==(const RevNetBlock& a, const RevNetBlock& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x.array() == y.array()).all();
  };
  return same(a.k1, b.k1) && same(a.k2, b.k2) && same(a.b1, b.b1) && same(a.b2, b.b2);
}

void RevNetParams::validate() const {
  config.validate();
  if (blocks.size() != static_cast<std::size_t>(config.n_blocks)) {
    throw ShapeError("expected " + std::to_string(config.n_blocks) + " blocks, found " +
                     std::to_string(blocks.size()));
  }
  const int w = config.hidden_width;
  const int m = config.half();
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    const auto& b = blocks[n];
    if (b.k1.rows() != w || b.k1.cols() != m || b.k2.rows() != w || b.k2.cols() != m ||
        b.b1.size() != w || b.b2.size() != w) {
      throw ShapeError("block " + std::to_string(n) + " has inconsistent shapes");
    }
    if (!b.k1.allFinite() || !b.k2.allFinite() || !b.b1.allFinite() || !b.b2.allFinite()) {
      throw NumericalError("block " + std::to_string(n) + " has non-finite entries",
                           static_cast<std::ptrdiff_t>(n));
    }
  }
}

std::size_t RevNetParams::parameter_count() const {
  const auto w = static_cast<std::size_t>(config.hidden_width);
  const auto m = static_cast<std::size_t>(config.half());
  return blocks.size() * (2 * w * m + 2 * w);
}

bool operator==(const RevNetParams& a, const RevNetParams& b) {
  return a.config == b.config && a.blocks == b.blocks;
}

RevNetGradient RevNetGradient::zeros_like(const RevNetParams& params) {
  RevNetGradient g;
  g.blocks.assign(params.blocks.size(),
                  RevNetBlock::zeros(params.config.hidden_width, params.config.half()));
  return g;
}

RevNetGradient& RevNetGradient::operator+=(const RevNetGradient& other) {
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    blocks[n].k1 += other.blocks[n].k1;
    blocks[n].k2 += other.blocks[n].k2;
    blocks[n].b1 += other.blocks[n].b1;
    blocks[n].b2 += other.blocks[n].b2;
  }
  return *this;
}

RevNetGradient& RevNetGradient::operator*=(double s) {
  for (auto& b : blocks) {
    b.k1 *= s;
    b.k2 *= s;
    b.b1 *= s;
    b.b2 *= s;
  }
  return *this;
}

SplitState SplitState::split(const Eigen::VectorXd& x) {
  const Eigen::Index m = x.size() / 2;
  return {x.head(m), x.tail(x.size() - m)};
}

Eigen::VectorXd SplitState::join() const {
  Eigen::VectorXd x(u.size() + v.size());
  x << u, v;
  return x;
}

RevNetParams init_params(const RevNetConfig& config, double scale) {
  config.validate();
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw ConfigError("initialization scale must be nonnegative and finite");
  }
  RevNetParams p;
  p.config = config;
  Rng rng(config.seed);
  auto draw = [&](auto& mat) {
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      for (Eigen::Index c = 0; c < mat.cols(); ++c) mat(r, c) = rng.uniform(-scale, scale);
    }
  };
  p.blocks.reserve(static_cast<std::size_t>(config.n_blocks));
  for (int n = 0; n < config.n_blocks; ++n) {
    auto b = RevNetBlock::zeros(config.hidden_width, config.half());
    draw(b.k1);
    draw(b.b1);
    draw(b.k2);
    draw(b.b2);
    p.blocks.push_back(std::move(b));
  }
  return p;
}

namespace {

void check_dim(const RevNetParams& params, const Eigen::VectorXd& x, const char* what) {
  if (x.size() != params.config.dim) {
    std::ostringstream msg;
    msg << what << " has length " << x.size() << ", network dimension is " << params.config.dim;
    throw DimensionError(msg.str());
  }
}

}  // namespace

Eigen::VectorXd forward(const RevNetParams& params, const Eigen::VectorXd& x) {
  check_dim(params, x, "input");
  const double h = params.config.step_size;
  auto s = SplitState::split(x);
  for (const auto& b : params.blocks) {
    s.u.noalias() += h * (b.k1.transpose() * (b.k1 * s.v + b.b1).array().tanh().matrix());
    s.v.noalias() -= h * (b.k2.transpose() * (b.k2 * s.u + b.b2).array().tanh().matrix());
  }
  return s.join();
}

Eigen::VectorXd inverse(const RevNetParams& params, const Eigen::VectorXd& z) {
  check_dim(params, z, "input");
  const double h = params.config.step_size;
  auto s = SplitState::split(z);
  for (auto it = params.blocks.rbegin(); it != params.blocks.rend(); ++it) {
    const auto& b = *it;
    s.v.noalias() += h * (b.k2.transpose() * (b.k2 * s.u + b.b2).array().tanh().matrix());
    s.u.noalias() -= h * (b.k1.transpose() * (b.k1 * s.v + b.b1).array().tanh().matrix());
  }
  return s.join();
}

namespace {

template <typename Blocks>
Eigen::VectorXd flatten_blocks(const Blocks& blocks) {
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.k1.size() + b.k2.size() + b.b1.size() + b.b2.size();
  Eigen::VectorXd flat(total);
  Eigen::Index k = 0;
  for (const auto& b : blocks) {
    for (const auto* mat : {&b.k1, &b.k2}) {
      for (Eigen::Index r = 0; r < mat->rows(); ++r) {
        for (Eigen::Index c = 0; c < mat->cols(); ++c) flat[k++] = (*mat)(r, c);
      }
    }
    flat.segment(k, b.b1.size()) = b.b1;
    k += b.b1.size();
    flat.segment(k, b.b2.size()) = b.b2;
    k += b.b2.size();
  }
  return flat;
}

}  // namespace

Eigen::VectorXd flatten(const RevNetParams& params) { return flatten_blocks(params.blocks); }
Eigen::VectorXd flatten(const RevNetGradient& grad) { return flatten_blocks(grad.blocks); }

void unflatten(const Eigen::VectorXd& flat, RevNetParams& params) {
  if (static_cast<std::size_t>(flat.size()) != params.parameter_count()) {
    throw DimensionError("flat parameter vector has wrong length");
  }
  Eigen::Index k = 0;
  for (auto& b : params.blocks) {
    for (auto* mat : {&b.k1, &b.k2}) {
      for (Eigen::Index r = 0; r < mat->rows(); ++r) {
        for (Eigen::Index c = 0; c < mat->cols(); ++c) (*mat)(r, c) = flat[k++];
      }
    }
    b.b1 = flat.segment(k, b.b1.size());
    k += b.b1.size();
    b.b2 = flat.segment(k, b.b2.size());
    k += b.b2.size();
  }
}

void axpy(double scale, const RevNetGradient& grad, RevNetParams& params) {
  for (std::size_t n = 0; n < params.blocks.size(); ++n) {
    auto& b = params.blocks[n];
    const auto& g = grad.blocks[n];
    b.k1.noalias() += scale * g.k1;
    b.k2.noalias() += scale * g.k2;
    b.b1.noalias() += scale * g.b1;
    b.b2.noalias() += scale * g.b2;
  }
}

void save_checkpoint(const RevNetParams& params, const std::filesystem::path& path,
                     std::uint64_t epochs_completed) {
  params.validate();
  using detail::json;
  json doc;
  const auto& c = params.config;
  doc["schema_version"] = kCheckpointSchemaVersion;
  doc["dim"] = c.dim;
  doc["n_blocks"] = c.n_blocks;
  doc["step_size"] = c.step_size;
  doc["hidden_width"] = c.hidden_width;
  doc["activation"] = std::string(to_string(c.activation));
  doc["seed"] = c.seed;
  doc["epochs_completed"] = epochs_completed;
  json blocks = json::array();
  for (const auto& b : params.blocks) {
    blocks.push_back({{"K1", detail::to_json_row_major(b.k1)},
                      {"K2", detail::to_json_row_major(b.k2)},
                      {"b1", detail::to_json(b.b1)},
                      {"b2", detail::to_json(b.b2)}});
  }
  doc["blocks"] = std::move(blocks);
  detail::write_json_file(doc, path);
}

Checkpoint load_checkpoint_state(const std::filesystem::path& path) {
  using detail::json;
  using detail::require_field;
  const json doc = detail::read_json_file(path);
  detail::require_schema(doc, kCheckpointSchemaVersion, path);

  Checkpoint ck;
  auto& c = ck.params.config;
  c.dim = require_field<int>(doc, "dim");
  c.n_blocks = require_field<int>(doc, "n_blocks");
  c.step_size = require_field<double>(doc, "step_size");
  c.hidden_width = require_field<int>(doc, "hidden_width");
  c.activation = activation_from_string(require_field<std::string>(doc, "activation"));
  c.seed = require_field<std::uint64_t>(doc, "seed");
  ck.epochs_completed = doc.value("epochs_completed", std::uint64_t{0});
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ShapeError("'" + path.string() + "': " + e.what());
  }

  const auto& blocks = doc.contains("blocks") ? doc.at("blocks") : json();
  if (!blocks.is_array()) throw SchemaError("'" + path.string() + "' has no blocks array");
  if (blocks.size() != static_cast<std::size_t>(c.n_blocks)) {
    throw ShapeError("'" + path.string() + "' declares " + std::to_string(c.n_blocks) +
                     " blocks but contains " + std::to_string(blocks.size()));
  }
  const int w = c.hidden_width;
  const int m = c.half();
  for (const auto& jb : blocks) {
    if (!jb.is_object() || !jb.contains("K1") || !jb.contains("K2") || !jb.contains("b1") ||
        !jb.contains("b2")) {
      throw SchemaError("'" + path.string() + "' has a block missing K1/K2/b1/b2");
    }
    ck.params.blocks.push_back({detail::matrix_from_json(jb.at("K1"), w, m, "K1"),
                                detail::matrix_from_json(jb.at("K2"), w, m, "K2"),
                                detail::vector_from_json(jb.at("b1"), w, "b1"),
                                detail::vector_from_json(jb.at("b2"), w, "b2")});
  }
  ck.params.validate();
  return ck;
}

RevNetParams load_checkpoint(const std::filesystem::path& path) {
  return load_checkpoint_state(path).params;
}

}  // namespace levelset
