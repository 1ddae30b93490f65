#include <gtest/gtest.h>

#include <sstream>

#include "levelset/error.hpp"
#include "levelset/functions.hpp"
#include "levelset/trainer.hpp"
#include "support.hpp"

namespace levelset {
namespace {

using testing::TempDir;

Dataset f1_grid() {
  return sample_dataset(make_function(FunctionId::kF1), 121, 0, SampleLayout::kGrid);
}

TrainConfig f1_config(std::uint64_t epochs) {
  TrainConfig c;
  c.learning_rate = 0.01;
  c.n_epochs = epochs;
  c.weights = AnisotropyWeights::from_active(2, {0});
  return c;
}

RevNetParams f1_params() { return init_params(RevNetConfig::with_dim(2, 10, 0.25, 1), 0.1); }

TEST(Train, ZeroEpochsReturnsInput) {
  const RevNetParams p0 = f1_params();
  const TrainReport r = train(p0, f1_grid(), f1_config(0));
  EXPECT_EQ(r.final_params, p0);
  EXPECT_TRUE(r.loss_history.empty());
  EXPECT_EQ(r.epochs_completed, 0u);
  EXPECT_EQ(r.status, TrainStatus::kCompleted);
}

TEST(Train, ConstantFunctionLeavesParamsUnchanged) {
  Dataset data = f1_grid();
  for (auto& s : data) s.grad.setZero();
  TrainConfig cfg = f1_config(20);
  cfg.lambda = 0.0;
  const RevNetParams p0 = f1_params();
  const TrainReport r = train(p0, data, cfg);
  EXPECT_EQ(r.final_params, p0);
  EXPECT_EQ(r.loss_history.size(), 20u);
}

TEST(Train, HistoryHasOneFiniteEntryPerEpoch) {
  for (std::optional<std::size_t> bs : {std::optional<std::size_t>{}, std::optional<std::size_t>{32}}) {
    TrainConfig cfg = f1_config(15);
    cfg.batch_size = bs;
    const TrainReport r = train(f1_params(), f1_grid(), cfg);
    ASSERT_EQ(r.loss_history.size(), 15u);
    for (std::size_t i = 0; i < r.loss_history.size(); ++i) {
      const auto& h = r.loss_history[i];
      EXPECT_EQ(h.epoch, i + 1);
      EXPECT_TRUE(std::isfinite(h.loss.total));
      EXPECT_GE(h.loss.l1, 0.0);
      EXPECT_GE(h.loss.l2, 0.0);
    }
    // The last entry is the loss of the returned parameters.
    EXPECT_EQ(r.loss_history.back().loss.total,
              total_loss(r.final_params, f1_grid(), cfg.weights).total);
  }
}

TEST(Train, F1LossDropsBelowTenPercent) {
  const TrainReport r = train(f1_params(), f1_grid(), f1_config(3000));
  ASSERT_TRUE(r.initial_loss.has_value());
  EXPECT_LT(r.loss_history.back().loss.l1, 0.1 * r.initial_loss->l1);
}

TEST(Train, SmallStepDoesNotIncreaseLoss) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const RevNetParams p0 = init_params(RevNetConfig::with_dim(4, 3, 0.25, 30 + t), 0.5);
    const Dataset data = testing::random_batch(rng, 4, 20);
    TrainConfig cfg;
    cfg.learning_rate = 1e-6;
    cfg.n_epochs = 1;
    cfg.weights = AnisotropyWeights::from_active(4, {0});
    const TrainReport r = train(p0, data, cfg);
    EXPECT_LE(r.loss_history.back().loss.total, r.initial_loss->total);
  }
}

TEST(Train, Deterministic) {
  TrainConfig cfg = f1_config(30);
  cfg.batch_size = 16;
  cfg.seed = 11;
  const TrainReport a = train(f1_params(), f1_grid(), cfg);
  const TrainReport b = train(f1_params(), f1_grid(), cfg);
  EXPECT_EQ(a.final_params, b.final_params);
  ASSERT_EQ(a.loss_history.size(), b.loss_history.size());
  for (std::size_t i = 0; i < a.loss_history.size(); ++i) {
    EXPECT_EQ(a.loss_history[i].loss.total, b.loss_history[i].loss.total);
  }
}

TEST(Train, AbortKeepsLastGoodState) {
  TrainConfig cfg = f1_config(50);
  cfg.learning_rate = 1e200;
  const RevNetParams p0 = f1_params();
  const TrainReport r = train(p0, f1_grid(), cfg);
  EXPECT_EQ(r.status, TrainStatus::kAborted);
  EXPECT_FALSE(r.message.empty());
  EXPECT_TRUE(std::isfinite(flatten(r.final_params).sum()));
  EXPECT_EQ(r.loss_history.size(), r.epochs_completed);
  EXPECT_LT(r.epochs_completed, 50u);
}

TEST(Train, ConfigValidation) {
  TrainConfig cfg = f1_config(1);
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train(f1_params(), f1_grid(), cfg), ConfigError);
  cfg = f1_config(1);
  cfg.batch_size = 1000;
  EXPECT_THROW(train(f1_params(), f1_grid(), cfg), ConfigError);
  cfg = f1_config(1);
  cfg.weights = AnisotropyWeights::from_active(4, {0});
  EXPECT_THROW(train(f1_params(), f1_grid(), cfg), DimensionError);
  EXPECT_THROW(train(f1_params(), Dataset{}, f1_config(1)), ConfigError);
}

class Resume : public ::testing::TestWithParam<std::optional<std::size_t>> {};

TEST_P(Resume, SplitRunMatchesSingleRun) {
  TempDir dir("resume");
  TrainConfig cfg = f1_config(10);
  cfg.batch_size = GetParam();
  cfg.seed = 5;
  const TrainReport whole = train(f1_params(), f1_grid(), cfg);

  cfg.n_epochs = 5;
  const TrainReport first = train(f1_params(), f1_grid(), cfg);
  save_checkpoint(first.final_params, dir / "c.json", first.epochs_completed);
  const TrainReport second = resume(dir / "c.json", f1_grid(), cfg);

  EXPECT_EQ(second.final_params, whole.final_params);
  EXPECT_EQ(second.epochs_completed, 10u);
  ASSERT_EQ(second.loss_history.size(), 5u);
  EXPECT_EQ(second.loss_history.front().epoch, 6u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(first.loss_history[i].loss.total, whole.loss_history[i].loss.total);
    EXPECT_EQ(second.loss_history[i].loss.total, whole.loss_history[i + 5].loss.total);
  }
}

INSTANTIATE_TEST_SUITE_P(Batching, Resume,
                         ::testing::Values(std::optional<std::size_t>{},
                                           std::optional<std::size_t>{20}));

TEST(ResumeErrors, ZeroEpochsAndMismatch) {
  TempDir dir("resume_err");
  const RevNetParams p = f1_params();
  save_checkpoint(p, dir / "c.json", 3);
  const TrainReport r = resume(dir / "c.json", f1_grid(), f1_config(0));
  EXPECT_EQ(r.final_params, p);
  EXPECT_EQ(r.epochs_completed, 3u);

  const Dataset f4 = sample_dataset(make_function(FunctionId::kF4), 10, 0, SampleLayout::kUniformRandom);
  TrainConfig cfg = f1_config(1);
  cfg.weights = AnisotropyWeights::from_active(20, {0});
  EXPECT_THROW(resume(dir / "c.json", f4, cfg), DimensionError);
  EXPECT_THROW(resume(dir / "missing.json", f1_grid(), f1_config(1)), IoError);
}

TEST(Train, PeriodicCheckpoints) {
  TempDir dir("periodic");
  TrainConfig cfg = f1_config(7);
  cfg.checkpoint_every = 3;
  cfg.checkpoint_path = dir / "c.json";
  train(f1_params(), f1_grid(), cfg);
  EXPECT_EQ(load_checkpoint_state(dir / "c.json").epochs_completed, 6u);
}

TEST(LossHistoryCsv, HeaderRowsAndAppend) {
  TempDir dir("hist");
  const TrainReport r = train(f1_params(), f1_grid(), f1_config(3));
  write_loss_history_csv(r.loss_history, dir / "h.csv");
  write_loss_history_csv(r.loss_history, dir / "h.csv", true);
  std::istringstream in(testing::slurp(dir / "h.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epoch,l1,l2,total");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(0, 2), std::to_string((rows - 1) % 3 + 1) + ",");
  }
  EXPECT_EQ(rows, 6);
}

}  // namespace
}  // namespace levelset
