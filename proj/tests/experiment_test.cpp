#include <gtest/gtest.h>

#include <fstream>

#include "levelset/error.hpp"
#include "levelset/experiment.hpp"
#include "support.hpp"

namespace levelset {
namespace {

using testing::TempDir;

// f1 preset trimmed to a few epochs and a small regressor grid.
ExperimentConfig quick_f1(const std::filesystem::path& out) {
  ExperimentConfig c = *preset("f1");
  c.train.n_epochs = 20;
  c.n_valid = 200;
  c.regressor.epochs = 200;
  c.regressor.n_train = {50, 121};
  c.out_dir = out;
  return c;
}

TEST(Presets, Hyperparameters) {
  const auto f1 = preset("f1");
  ASSERT_TRUE(f1);
  EXPECT_EQ(f1->train.learning_rate, 0.01);
  EXPECT_EQ(f1->revnet.step_size, 0.25);
  EXPECT_EQ(f1->revnet.n_blocks, 10);
  EXPECT_EQ(f1->n_train, 121u);
  EXPECT_EQ(f1->layout, SampleLayout::kGrid);
  EXPECT_EQ(f1->train.weights.omega, Eigen::VectorXd(Eigen::Vector2d(0, 1)));
  EXPECT_EQ(f1->train.lambda, 1.0);

  const auto f4 = preset("f4");
  ASSERT_TRUE(f4);
  EXPECT_EQ(f4->revnet.n_blocks, 30);
  EXPECT_EQ(f4->train.learning_rate, 0.05);
  EXPECT_EQ(f4->n_train, 500u);
  EXPECT_EQ(f4->n_valid, 10000u);
  EXPECT_EQ(f4->train.weights.omega[0], 0.0);
  EXPECT_EQ(f4->train.weights.omega.tail(19).minCoeff(), 1.0);

  const auto f5 = preset("f5");
  ASSERT_TRUE(f5);
  EXPECT_EQ(f5->active_dims, (std::vector<int>{0, 1}));
  EXPECT_EQ(f5->train.weights.omega.head(2), Eigen::VectorXd::Zero(2));
  EXPECT_EQ(f5->revnet.n_blocks, 30);
  EXPECT_EQ(f5->train.learning_rate, 0.002);

  EXPECT_EQ(presets().size(), 5u);
  EXPECT_FALSE(preset("f9"));
  for (const auto& p : presets()) EXPECT_NO_THROW(p.validate()) << p.name;
}

TEST(Config, JsonRoundTrip) {
  for (const auto& p : presets()) {
    const std::string text = experiment_config_to_json_text(p);
    const ExperimentConfig back = experiment_config_from_json_text(text);
    EXPECT_EQ(experiment_config_to_json_text(back), text) << p.name;
  }
}

TEST(Config, PresetWithOverrides) {
  const ExperimentConfig c = experiment_config_from_json_text(
      R"({"preset": "f4", "seed": 9, "train": {"n_epochs": 12, "batch_size": 50},
          "sampling": {"n_train": 100}})");
  EXPECT_EQ(c.revnet.n_blocks, 30);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.train.n_epochs, 12u);
  EXPECT_EQ(c.train.batch_size, 50u);
  EXPECT_EQ(c.n_train, 100u);
  EXPECT_EQ(c.n_valid, 10000u);
}

TEST(Config, OmegaDefaultsFromActiveDims) {
  const ExperimentConfig c = experiment_config_from_json_text(
      R"({"function": "f2", "sampling": {"n_train": 16, "n_valid": 10}, "active_dims": [1]})");
  EXPECT_EQ(c.train.weights.omega, Eigen::VectorXd(Eigen::Vector2d(1, 0)));
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, Rejections) {
  EXPECT_THROW(experiment_config_from_json_text(R"({"preset": "f1", "bogus": 1})"), ConfigError);
  EXPECT_THROW(experiment_config_from_json_text(R"({"preset": "f1", "train": {"lr": 1}})"), ConfigError);
  EXPECT_THROW(experiment_config_from_json_text("{not json"), ConfigError);
  EXPECT_THROW(experiment_config_from_json_text(R"({"preset": "nope"})"), ConfigError);
  EXPECT_THROW(experiment_config_from_json_text(R"({"schema_version": 2})"), ConfigError);
  EXPECT_THROW(experiment_config_from_json_text(R"({"preset": "f1", "train": {"n_epochs": "x"}})"),
               ConfigError);

  ExperimentConfig c = *preset("f1");
  c.active_dims = {1};  // omega is (0, 1)
  EXPECT_THROW(c.validate(), ConfigError);
  c = *preset("f1");
  c.n_valid = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = *preset("f1");
  c.function.reset();
  c.dataset_path = "/nonexistent/data.csv";
  EXPECT_THROW(c.validate(), ConfigError);
  c = *preset("f1");
  c.revnet.n_blocks = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(load_experiment_config("/nonexistent/cfg.json"), ConfigError);
}

TEST(Seeds, StreamsAreDistinctAndStable) {
  const SeedPlan a = seed_plan(0);
  const SeedPlan b = seed_plan(0);
  EXPECT_EQ(a.train_data, b.train_data);
  EXPECT_NE(a.train_data, a.valid_data);
  EXPECT_NE(a.init, a.shuffle);
  EXPECT_NE(seed_plan(1).train_data, a.train_data);
}

TEST(Data, RegressorPoolExtendsTrainingSet) {
  ExperimentConfig c = *preset("f4");
  c.n_train = 40;
  c.n_valid = 10;
  c.regressor.n_train = {100};
  const ExperimentData data = build_data(c);
  const Dataset pool = build_regressor_pool(c, data);
  ASSERT_EQ(pool.size(), 100u);
  for (std::size_t i = 0; i < data.train.size(); ++i) EXPECT_EQ(pool[i].x, data.train[i].x);
}

TEST(Data, TabulatedSplit) {
  TempDir dir("tab_exp");
  const Dataset rows = sample_dataset(make_function(FunctionId::kF3), 30, 1, SampleLayout::kUniformRandom);
  write_tabulated_dataset(rows, dir / "d.csv");
  ExperimentConfig c;
  c.dataset_path = dir / "d.csv";
  c.n_train = 20;
  c.n_valid = 10;
  c.active_dims = {0};
  c.train.weights = AnisotropyWeights::from_active(2, {0});
  c.regressor.n_train = {20};
  EXPECT_EQ(c.dim(), 2);
  EXPECT_NO_THROW(c.validate());
  const ExperimentData data = build_data(c);
  EXPECT_EQ(data.train.front().x, rows.front().x);
  EXPECT_EQ(data.valid.front().x, rows[20].x);
  c.n_valid = 11;
  EXPECT_THROW(build_data(c), ConfigError);
}

TEST(Commands, TrainWritesArtifacts) {
  TempDir dir("cmd_train");
  const ExperimentConfig c = quick_f1(dir.path());
  const TrainOutcome out = run_train(c);
  EXPECT_EQ(out.report.status, TrainStatus::kCompleted);
  const OutputPaths p = output_paths(dir.path());
  EXPECT_TRUE(std::filesystem::exists(p.checkpoint));
  EXPECT_TRUE(std::filesystem::exists(p.manifest));
  std::ifstream hist(p.loss_history);
  int lines = 0;
  for (std::string line; std::getline(hist, line);) ++lines;
  EXPECT_EQ(lines, 21);  // header + one row per epoch
  EXPECT_EQ(load_checkpoint_state(p.checkpoint).epochs_completed, 20u);

  const std::string manifest = testing::slurp(p.manifest);
  EXPECT_NE(manifest.find(sha256_file(p.checkpoint)), std::string::npos);
  EXPECT_NE(manifest.find("\"version\""), std::string::npos);
}

TEST(Commands, RerunFromManifestIsByteIdentical) {
  TempDir a("cmd_a");
  TempDir b("cmd_b");
  const ExperimentConfig c = quick_f1(a.path());
  run_train(c);
  run_sensitivity(c, output_paths(a.path()).checkpoint);
  run_rmse(c, output_paths(a.path()).checkpoint);

  ExperimentConfig again = load_experiment_config(output_paths(a.path()).manifest);
  again.out_dir = b.path();
  run_train(again);
  run_sensitivity(again, output_paths(b.path()).checkpoint);
  run_rmse(again, output_paths(b.path()).checkpoint);

  for (const char* f : {"checkpoint.json", "loss_history.csv", "sensitivity.csv", "rmse.csv"}) {
    EXPECT_EQ(testing::slurp(a / f), testing::slurp(b / f)) << f;
  }
}

TEST(Commands, SensitivityRowsFollowToggles) {
  TempDir dir("cmd_sens");
  ExperimentConfig c = quick_f1(dir.path());
  c.baselines.active_subspace = false;
  c.baselines.sliced_inverse_regression = false;
  auto rows = run_sensitivity(c, std::nullopt);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].method, "identity");

  c.baselines.active_subspace = true;
  rows = run_sensitivity(c, std::nullopt);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].method, "AS");
}

TEST(Commands, DimensionMismatchedCheckpoint) {
  TempDir dir("cmd_dim");
  const ExperimentConfig c = quick_f1(dir.path());
  save_checkpoint(init_params(RevNetConfig::with_dim(4, 1, 0.25)), dir / "c4.json");
  EXPECT_THROW(run_sensitivity(c, dir / "c4.json"), DimensionError);
  EXPECT_THROW(run_resume(c, dir / "c4.json"), DimensionError);
}

TEST(Commands, ResumeCompletesBudget) {
  TempDir dir("cmd_resume");
  ExperimentConfig c = quick_f1(dir.path());
  c.train.n_epochs = 8;
  run_train(c);
  const std::string whole = testing::slurp(output_paths(dir.path()).loss_history);
  const std::string whole_ckpt = testing::slurp(output_paths(dir.path()).checkpoint);

  TempDir split("cmd_resume_split");
  ExperimentConfig first = c;
  first.out_dir = split.path();
  first.train.n_epochs = 3;
  run_train(first);
  ExperimentConfig rest = c;
  rest.out_dir = split.path();
  const TrainOutcome out = run_resume(rest, output_paths(split.path()).checkpoint);
  EXPECT_EQ(out.report.epochs_completed, 8u);
  EXPECT_EQ(testing::slurp(output_paths(split.path()).loss_history), whole);
  EXPECT_EQ(testing::slurp(output_paths(split.path()).checkpoint), whole_ckpt);
}

TEST(Commands, RmseRowsPerMethodArchitectureAndSize) {
  TempDir dir("cmd_rmse");
  ExperimentConfig c = quick_f1(dir.path());
  c.regressor.hidden_layers = {{10}, {4, 4}};
  run_train(c);
  const auto rows = run_rmse(c, output_paths(dir.path()).checkpoint);
  EXPECT_EQ(rows.size(), 4u * 2u * 2u);
  EXPECT_EQ(rows.front().method, "identity");
  EXPECT_EQ(rows.front().architecture, "10");
  EXPECT_EQ(rows.front().n_train, 50u);
  for (const auto& r : rows) {
    EXPECT_TRUE(std::isfinite(r.valid_rrmse));
    EXPECT_GE(r.train_rrmse, 0.0);
  }
}

}  // namespace
}  // namespace levelset
