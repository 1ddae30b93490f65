#include "levelset/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "csv_util.hpp"
#include "json_util.hpp"
#include "levelset/error.hpp"
#include "levelset/rng.hpp"

#ifndef LEVELSET_VERSION
#define LEVELSET_VERSION "unknown"
#endif

namespace levelset {

using detail::json;

std::string version_string() { return LEVELSET_VERSION; }

// --- config -----------------------------------------------------------------

int ExperimentConfig::dim() const {
  if (function) return make_function(*function).dim;
  std::ifstream in(dataset_path);
  if (!in) throw IoError("cannot open dataset '" + dataset_path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("dataset '" + dataset_path.string() + "' is empty");
  const auto cols = detail::split_csv_line(line).size();
  if (cols < 3 || (cols - 1) % 2 != 0) throw SchemaError("dataset header must be x_1..x_d,y,g_1..g_d");
  return static_cast<int>((cols - 1) / 2);
}

namespace {

RevNetConfig resolved_revnet(const ExperimentConfig& cfg, int d) {
  RevNetConfig r = cfg.revnet;
  r.dim = d;
  if (r.hidden_width <= 0) r.hidden_width = d;
  r.seed = seed_plan(cfg.seed).init;
  return r;
}

TestFunction resolved_function(const ExperimentConfig& cfg) {
  TestFunction fn = make_function(*cfg.function);
  if (cfg.domain) {
    if (cfg.domain->dim() != fn.dim) throw ConfigError("domain override has the wrong dimension");
    fn.domain = *cfg.domain;
  }
  return fn;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (function.has_value() == !dataset_path.empty()) {
    throw ConfigError("exactly one of 'function' and 'dataset' must be given");
  }
  if (!function && !std::filesystem::exists(dataset_path)) {
    throw ConfigError("dataset '" + dataset_path.string() + "' does not exist");
  }
  if (n_train == 0 || n_valid == 0) throw ConfigError("sample budgets must be positive");
  if (domain) domain->validate();
  const int d = dim();
  resolved_revnet(*this, d).validate();
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be non-negative");
  train.validate(n_train, d);
  if (baselines.n_slices < 1) throw ConfigError("n_slices must be positive");
  if (active_dims.empty()) throw ConfigError("active_dims must not be empty");
  for (int a : active_dims) {
    if (a < 0 || a >= d) throw ConfigError("active dimension " + std::to_string(a) + " out of range");
  }
  std::vector<int> sorted = active_dims;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("active_dims contains duplicates");
  }
  if (sorted != train.weights.active_dims()) {
    throw ConfigError("active_dims must be exactly the coordinates with omega = 0");
  }
  for (const auto& layers : regressor.hidden_layers) {
    for (int w : layers) {
      if (w < 1) throw ConfigError("regressor layer widths must be positive");
    }
  }
  for (std::size_t n : regressor.n_train) {
    if (n == 0) throw ConfigError("regressor n_train entries must be positive");
    if (!function && n > n_train) {
      throw ConfigError("regressor n_train exceeds the training rows of a tabulated dataset");
    }
  }
  if (!(regressor.learning_rate > 0.0)) throw ConfigError("regressor learning_rate must be positive");
  if (!(regressor.momentum >= 0.0 && regressor.momentum < 1.0)) {
    throw ConfigError("regressor momentum must lie in [0, 1)");
  }
}

namespace {

ExperimentConfig base_preset(std::string name, FunctionId id) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.function = id;
  c.out_dir = "runs/" + c.name;
  return c;
}

ExperimentConfig preset_2d(std::string name, FunctionId id) {
  ExperimentConfig c = base_preset(std::move(name), id);
  c.layout = SampleLayout::kGrid;
  c.n_train = 121;
  c.n_valid = 2000;
  c.revnet = RevNetConfig::with_dim(2, 10, 0.25);
  c.revnet.hidden_width = 0;
  c.train.learning_rate = 0.01;
  c.train.n_epochs = 3000;
  c.active_dims = {0};
  c.train.weights = AnisotropyWeights::from_active(2, c.active_dims);
  c.regressor.hidden_layers = {{10}};
  c.regressor.n_train = {121};
  return c;
}

ExperimentConfig preset_20d(std::string name, FunctionId id, std::vector<int> active) {
  ExperimentConfig c = base_preset(std::move(name), id);
  c.n_train = 500;
  c.n_valid = 10000;
  c.revnet = RevNetConfig::with_dim(20, 30, 0.25);
  c.revnet.hidden_width = 0;
  c.train.learning_rate = 0.05;
  c.train.n_epochs = 5000;
  c.active_dims = std::move(active);
  c.train.weights = AnisotropyWeights::from_active(20, c.active_dims);
  return c;
}

}  // namespace

std::vector<ExperimentConfig> presets() {
  // f5 training gradients are ~5x larger than f4's in RMS (L1 ~27x). At lr
  // 0.05 the first full-batch step saturates the couplings and training
  // stalls at zero gradient.
  ExperimentConfig f5 = preset_20d("f5", FunctionId::kF5, {0, 1});
  f5.train.learning_rate = 0.002;
  return {
      preset_2d("f1", FunctionId::kF1),
      preset_2d("f2", FunctionId::kF2),
      preset_2d("f3", FunctionId::kF3),
      preset_20d("f4", FunctionId::kF4, {0}),
      f5,
  };
}

std::optional<ExperimentConfig> preset(std::string_view name) {
  for (auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

namespace {

// Reads an object field by field and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  template <typename T>
  T get(const char* key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json& at(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key '" + where_ + "." + k + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string_view reduction_name(LossReduction r) { return r == LossReduction::kSum ? "sum" : "mean"; }

LossReduction reduction_from_string(const std::string& s) {
  if (s == "sum") return LossReduction::kSum;
  if (s == "mean") return LossReduction::kMean;
  throw ConfigError("unknown reduction '" + s + "' (expected sum or mean)");
}

ExperimentConfig config_from_json(const json& doc) {
  Fields top(doc, "config");
  const int version = top.get<int>("schema_version", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported config schema_version " + std::to_string(version));
  }

  ExperimentConfig c;
  if (top.has("preset")) {
    const auto name = top.get<std::string>("preset", "");
    auto p = preset(name);
    if (!p) throw ConfigError("unknown preset '" + name + "'");
    c = *p;
  }
  c.name = top.get<std::string>("name", c.name);
  if (top.has("function")) {
    const auto name = top.get<std::string>("function", "");
    const auto id = function_id_from_string(name);
    if (!id) throw ConfigError("unknown function '" + name + "'");
    c.function = id;
    c.dataset_path.clear();
  }
  if (top.has("dataset")) {
    c.dataset_path = top.get<std::string>("dataset", "");
    c.function.reset();
  }
  if (top.has("domain")) {
    Fields f(top.at("domain"), "domain");
    const auto lo = f.get<std::vector<double>>("lower", {});
    const auto hi = f.get<std::vector<double>>("upper", {});
    const auto density = f.get<std::string>("density", "uniform");
    f.finish();
    if (density != "uniform") throw ConfigError("only the uniform density is supported");
    c.domain = DomainBox{to_vector(lo), to_vector(hi), Density::kUniform};
  }
  if (top.has("sampling")) {
    Fields f(top.at("sampling"), "sampling");
    c.n_train = f.get<std::size_t>("n_train", c.n_train);
    c.n_valid = f.get<std::size_t>("n_valid", c.n_valid);
    if (f.has("layout")) {
      try {
        c.layout = sample_layout_from_string(f.get<std::string>("layout", ""));
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    f.finish();
  }
  if (top.has("revnet")) {
    Fields f(top.at("revnet"), "revnet");
    c.revnet.n_blocks = f.get<int>("n_blocks", c.revnet.n_blocks);
    c.revnet.step_size = f.get<double>("step_size", c.revnet.step_size);
    c.revnet.hidden_width = f.get<int>("hidden_width", c.revnet.hidden_width);
    if (f.has("activation")) {
      try {
        c.revnet.activation = activation_from_string(f.get<std::string>("activation", ""));
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    c.init_scale = f.get<double>("init_scale", c.init_scale);
    f.finish();
  }
  if (top.has("train")) {
    Fields f(top.at("train"), "train");
    auto& t = c.train;
    t.learning_rate = f.get<double>("learning_rate", t.learning_rate);
    t.n_epochs = f.get<std::uint64_t>("n_epochs", t.n_epochs);
    if (f.has("batch_size")) {
      t.batch_size = f.get<std::size_t>("batch_size", 0);
    } else if (doc.at("train").contains("batch_size")) {
      t.batch_size.reset();
    }
    t.lambda = f.get<double>("lambda", t.lambda);
    if (f.has("omega")) t.weights.omega = to_vector(f.get<std::vector<double>>("omega", {}));
    t.reduction = reduction_from_string(f.get<std::string>("reduction", std::string(reduction_name(t.reduction))));
    if (f.has("checkpoint_every")) {
      t.checkpoint_every = f.get<std::uint64_t>("checkpoint_every", 0);
    } else if (doc.at("train").contains("checkpoint_every")) {
      t.checkpoint_every.reset();
    }
    const auto opt = f.get<std::string>("optimizer", "sgd");
    if (opt != "sgd") throw ConfigError("unknown optimizer '" + opt + "'");
    f.finish();
  }
  if (top.has("baselines")) {
    Fields f(top.at("baselines"), "baselines");
    c.baselines.active_subspace = f.get<bool>("as", c.baselines.active_subspace);
    c.baselines.sliced_inverse_regression = f.get<bool>("sir", c.baselines.sliced_inverse_regression);
    c.baselines.n_slices = f.get<int>("n_slices", c.baselines.n_slices);
    f.finish();
  }
  if (top.has("regressor")) {
    Fields f(top.at("regressor"), "regressor");
    auto& r = c.regressor;
    r.hidden_layers = f.get<std::vector<std::vector<int>>>("hidden_layers", r.hidden_layers);
    r.n_train = f.get<std::vector<std::size_t>>("n_train", r.n_train);
    r.learning_rate = f.get<double>("learning_rate", r.learning_rate);
    r.momentum = f.get<double>("momentum", r.momentum);
    r.epochs = f.get<std::uint64_t>("epochs", r.epochs);
    f.finish();
  }
  c.active_dims = top.get<std::vector<int>>("active_dims", c.active_dims);
  c.out_dir = top.get<std::string>("out_dir", c.out_dir.string());
  c.seed = top.get<std::uint64_t>("seed", c.seed);
  top.finish();

  // omega defaults to 0 on active_dims and 1 elsewhere.
  if (c.train.weights.omega.size() == 0 && !c.active_dims.empty()) {
    c.train.weights = AnisotropyWeights::from_active(c.dim(), c.active_dims);
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["name"] = c.name;
  if (c.function) {
    j["function"] = std::string(to_string(*c.function));
  } else {
    j["dataset"] = c.dataset_path.string();
  }
  if (c.domain) {
    j["domain"] = {{"lower", to_std(c.domain->lower)},
                   {"upper", to_std(c.domain->upper)},
                   {"density", "uniform"}};
  }
  j["sampling"] = {{"n_train", c.n_train},
                   {"n_valid", c.n_valid},
                   {"layout", std::string(to_string(c.layout))}};
  j["revnet"] = {{"n_blocks", c.revnet.n_blocks},
                 {"step_size", c.revnet.step_size},
                 {"hidden_width", c.revnet.hidden_width},
                 {"activation", std::string(to_string(c.revnet.activation))},
                 {"init_scale", c.init_scale}};
  const auto& t = c.train;
  j["train"] = {{"learning_rate", t.learning_rate},
                {"n_epochs", t.n_epochs},
                {"batch_size", t.batch_size ? json(*t.batch_size) : json(nullptr)},
                {"lambda", t.lambda},
                {"omega", to_std(t.weights.omega)},
                {"reduction", std::string(reduction_name(t.reduction))},
                {"checkpoint_every", t.checkpoint_every ? json(*t.checkpoint_every) : json(nullptr)},
                {"optimizer", "sgd"}};
  j["baselines"] = {{"as", c.baselines.active_subspace},
                    {"sir", c.baselines.sliced_inverse_regression},
                    {"n_slices", c.baselines.n_slices}};
  j["regressor"] = {{"hidden_layers", c.regressor.hidden_layers},
                    {"n_train", c.regressor.n_train},
                    {"learning_rate", c.regressor.learning_rate},
                    {"momentum", c.regressor.momentum},
                    {"epochs", c.regressor.epochs}};
  j["active_dims"] = c.active_dims;
  j["out_dir"] = c.out_dir.string();
  j["seed"] = c.seed;
  return j;
}

}  // namespace

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  // A run manifest carries the config it was produced from.
  if (doc.is_object() && doc.contains("artifacts") && doc.contains("config")) {
    return config_from_json(doc.at("config"));
  }
  return config_from_json(doc);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return experiment_config_from_json_text(ss.str());
}

std::string experiment_config_to_json_text(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

// --- data -------------------------------------------------------------------

SeedPlan seed_plan(std::uint64_t seed) {
  return {mix_seed(seed, 1), mix_seed(seed, 2), mix_seed(seed, 3),
          mix_seed(seed, 4), mix_seed(seed, 5), mix_seed(seed, 6)};
}

ExperimentData build_data(const ExperimentConfig& cfg) {
  const SeedPlan seeds = seed_plan(cfg.seed);
  ExperimentData data;
  if (cfg.function) {
    const TestFunction fn = resolved_function(cfg);
    data.train = sample_dataset(fn, cfg.n_train, seeds.train_data, cfg.layout);
    data.valid = sample_dataset(fn, cfg.n_valid, seeds.valid_data, SampleLayout::kUniformRandom);
    return data;
  }
  // Tabulated rows: the first n_train train, the next n_valid validate.
  Dataset all = read_tabulated_dataset(cfg.dataset_path);
  if (all.size() < cfg.n_train + cfg.n_valid) {
    throw ConfigError("dataset '" + cfg.dataset_path.string() + "' has " +
                      std::to_string(all.size()) + " rows, fewer than n_train + n_valid");
  }
  data.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cfg.n_train));
  data.valid.assign(all.begin() + static_cast<std::ptrdiff_t>(cfg.n_train),
                    all.begin() + static_cast<std::ptrdiff_t>(cfg.n_train + cfg.n_valid));
  return data;
}

Dataset build_regressor_pool(const ExperimentConfig& cfg, const ExperimentData& data) {
  std::size_t need = 0;
  for (std::size_t n : cfg.regressor.n_train) need = std::max(need, n);
  if (need <= data.train.size()) return data.train;
  if (!cfg.function) {
    throw ConfigError("regressor n_train exceeds the training rows of a tabulated dataset");
  }
  const TestFunction fn = resolved_function(cfg);
  const SeedPlan seeds = seed_plan(cfg.seed);
  // Uniform draws are sequential, so the first n_train points repeat the
  // training set.
  if (cfg.layout == SampleLayout::kUniformRandom) {
    return sample_dataset(fn, need, seeds.train_data, SampleLayout::kUniformRandom);
  }
  return sample_dataset(fn, need, seeds.regressor_data, SampleLayout::kUniformRandom);
}

OutputPaths output_paths(const std::filesystem::path& out_dir) {
  return {out_dir / "manifest.json", out_dir / "checkpoint.json", out_dir / "loss_history.csv",
          out_dir / "sensitivity.csv", out_dir / "rmse.csv"};
}

// --- commands ---------------------------------------------------------------

namespace {

void ensure_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

TrainConfig resolved_train(const ExperimentConfig& cfg, const OutputPaths& paths) {
  TrainConfig t = cfg.train;
  t.seed = seed_plan(cfg.seed).shuffle;
  t.checkpoint_path = paths.checkpoint;
  return t;
}

RevNetParams checked_checkpoint(const std::filesystem::path& path, int d) {
  RevNetParams p = load_checkpoint(path);
  if (p.config.dim != d) {
    throw DimensionError("checkpoint dimension " + std::to_string(p.config.dim) +
                         " does not match the problem dimension " + std::to_string(d));
  }
  return p;
}

}  // namespace

TrainOutcome run_train(const ExperimentConfig& cfg) {
  cfg.validate();
  const OutputPaths paths = output_paths(cfg.out_dir);
  ensure_out_dir(cfg.out_dir);
  const ExperimentData data = build_data(cfg);
  const RevNetParams params0 = init_params(resolved_revnet(cfg, cfg.dim()), cfg.init_scale);

  TrainOutcome out{train(params0, data.train, resolved_train(cfg, paths)), paths};
  save_checkpoint(out.report.final_params, paths.checkpoint, out.report.epochs_completed);
  write_loss_history_csv(out.report.loss_history, paths.loss_history);
  write_manifest(cfg, "train");
  return out;
}

TrainOutcome run_resume(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint) {
  cfg.validate();
  const OutputPaths paths = output_paths(cfg.out_dir);
  ensure_out_dir(cfg.out_dir);
  const Checkpoint state = load_checkpoint_state(checkpoint);
  const int d = cfg.dim();
  if (state.params.config.dim != d) {
    throw DimensionError("checkpoint dimension does not match the problem dimension");
  }
  TrainConfig t = resolved_train(cfg, paths);
  t.n_epochs = cfg.train.n_epochs > state.epochs_completed ? cfg.train.n_epochs - state.epochs_completed : 0;

  const ExperimentData data = build_data(cfg);
  TrainOutcome out{train(state.params, data.train, t, state.epochs_completed), paths};
  save_checkpoint(out.report.final_params, paths.checkpoint, out.report.epochs_completed);
  if (t.n_epochs > 0) {
    const bool append = std::filesystem::exists(paths.loss_history);
    write_loss_history_csv(out.report.loss_history, paths.loss_history, append);
  }
  write_manifest(cfg, "resume");
  return out;
}

std::vector<SensitivityReport> run_sensitivity(
    const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& checkpoint) {
  cfg.validate();
  const OutputPaths paths = output_paths(cfg.out_dir);
  ensure_out_dir(cfg.out_dir);
  const ExperimentData data = build_data(cfg);
  MethodSet methods = fit_baselines(data.train, cfg.baselines);
  if (checkpoint) methods.nll = checked_checkpoint(*checkpoint, cfg.dim());
  auto reports = compare_methods(methods, data.valid);
  write_sensitivity_csv(reports, paths.sensitivity);
  write_manifest(cfg, "sensitivity");
  return reports;
}

std::vector<RmseRow> run_rmse(const ExperimentConfig& cfg,
                              const std::optional<std::filesystem::path>& checkpoint) {
  cfg.validate();
  const OutputPaths paths = output_paths(cfg.out_dir);
  ensure_out_dir(cfg.out_dir);
  const int d = cfg.dim();
  const ExperimentData data = build_data(cfg);
  const Dataset pool = build_regressor_pool(cfg, data);
  const MethodSet baselines = fit_baselines(data.train, cfg.baselines);

  std::vector<int> all_dims(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) all_dims[static_cast<std::size_t>(i)] = i;

  struct Method {
    std::string name;
    Transform transform;
    std::vector<int> dims;
  };
  std::vector<Method> methods{{"identity", IdentityTransform{d}, all_dims}};
  if (checkpoint) methods.push_back({"NLL", checked_checkpoint(*checkpoint, d), cfg.active_dims});
  if (baselines.as) methods.push_back({"AS", *baselines.as, cfg.active_dims});
  if (baselines.sir) methods.push_back({"SIR", *baselines.sir, cfg.active_dims});

  std::vector<Eigen::VectorXd> pool_x, valid_x;
  std::vector<double> pool_y, valid_y;
  for (const auto& s : pool) {
    pool_x.push_back(s.x);
    pool_y.push_back(s.y);
  }
  for (const auto& s : data.valid) {
    valid_x.push_back(s.x);
    valid_y.push_back(s.y);
  }

  const std::uint64_t seed = seed_plan(cfg.seed).regressor;
  std::vector<RmseRow> rows;
  for (const auto& m : methods) {
    const auto pool_z = reduce_inputs(m.transform, pool_x, m.dims);
    const auto valid_z = reduce_inputs(m.transform, valid_x, m.dims);
    for (const auto& hidden : cfg.regressor.hidden_layers) {
      MLPConfig mc;
      mc.layer_widths = {static_cast<int>(m.dims.size())};
      mc.layer_widths.insert(mc.layer_widths.end(), hidden.begin(), hidden.end());
      mc.layer_widths.push_back(1);
      mc.learning_rate = cfg.regressor.learning_rate;
      mc.momentum = cfg.regressor.momentum;
      mc.epochs = cfg.regressor.epochs;
      mc.seed = seed;
      for (std::size_t n : cfg.regressor.n_train) {
        const auto r = fit(mc, std::span(pool_z).first(n), std::span(pool_y).first(n), valid_z, valid_y);
        rows.push_back({m.name, mc.architecture(), n, r.train_rrmse, *r.valid_rrmse});
      }
    }
  }
  write_rmse_csv(rows, paths.rmse);
  write_manifest(cfg, "rmse");
  return rows;
}

// --- manifest ---------------------------------------------------------------

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command) {
  const OutputPaths paths = output_paths(cfg.out_dir);
  const SeedPlan s = seed_plan(cfg.seed);
  json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  doc["tool"] = "levelset";
  doc["version"] = version_string();
  doc["command"] = command;
  doc["config"] = config_to_json(cfg);
  doc["seeds"] = {{"global", cfg.seed},           {"train_data", s.train_data},
                  {"valid_data", s.valid_data},   {"init", s.init},
                  {"shuffle", s.shuffle},         {"regressor", s.regressor},
                  {"regressor_data", s.regressor_data}};
  json artifacts = json::object();
  for (const auto& p : {paths.checkpoint, paths.loss_history, paths.sensitivity, paths.rmse}) {
    if (std::filesystem::exists(p)) artifacts[p.filename().string()] = sha256_file(p);
  }
  doc["artifacts"] = artifacts;
  detail::write_json_file(doc, paths.manifest);
}

}  // namespace levelset
