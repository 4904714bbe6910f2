#include "genelm/sft.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "genelm/metrics.hpp"
#include "test_support.hpp"

using namespace genelm;
using genelm::testing::make_tiny_world;
using genelm::testing::TinyWorld;

namespace {

// hand-built input: n rows, first `prompt` rows masked out
MultimodalInput fixture_input(std::size_t n, std::size_t prompt,
                              const std::vector<int>& targets) {
  MultimodalInput in;
  in.rows = Tensor({n, 4}, std::vector<double>(n * 4, 0.1));
  for (std::size_t i = 0; i < n; ++i) {
    in.positions.push_back(static_cast<int>(i));
    bool resp = i >= prompt;
    in.segments.push_back(resp ? Segment::response : Segment::query);
    in.loss_mask.push_back(resp ? 1 : 0);
    in.target_ids.push_back(resp ? targets[i - prompt] : -1);
    in.block_index.push_back(-1);
  }
  return in;
}

}  // namespace

TEST(SftLoss, UniformLogitsGiveLogV) {
  std::size_t n = 8, v = 23;
  MultimodalInput in = fixture_input(n, 4, {3, 5, 7, 9});
  Tensor logits = Tensor::zeros({n, v});
  Tensor loss = sft_loss(logits, in);
  EXPECT_NEAR(loss.item(), std::log(static_cast<double>(v)), 1e-12);
}

TEST(SftLoss, OneHotCorrectLogitsNearZero) {
  std::size_t n = 6, v = 11;
  std::vector<int> targets = {1, 4, 0};
  MultimodalInput in = fixture_input(n, 3, targets);
  std::vector<double> lv(n * v, 0.0);
  // logits row i-1 predicts target at row i
  for (std::size_t i = 3; i < 6; ++i) {
    lv[(i - 1) * v + static_cast<std::size_t>(targets[i - 3])] = 50.0;
  }
  Tensor loss = sft_loss(Tensor({n, v}, lv), in);
  EXPECT_LT(loss.item(), 1e-9);
}

TEST(SftLoss, MaskedRowsChangeNothingExactly) {
  std::size_t n = 10, v = 13;
  MultimodalInput in = fixture_input(n, 6, {1, 2, 3, 4});
  Rng rng(23);
  std::vector<double> lv(n * v);
  for (double& x : lv) x = rng.normal();
  double base = sft_loss(Tensor({n, v}, lv), in).item();
  // rows whose successor is masked out: every row except 5..8 (they predict
  // response rows 6..9); also the final row predicts nothing
  for (std::size_t row : {0u, 1u, 2u, 3u, 4u, 9u}) {
    std::vector<double> perturbed = lv;
    for (std::size_t c = 0; c < v; ++c) perturbed[row * v + c] += 100.0;
    double got = sft_loss(Tensor({n, v}, perturbed), in).item();
    EXPECT_EQ(got, base) << "row " << row;  // exactly zero effect
  }
  // a response-aligned row does change the loss
  std::vector<double> perturbed = lv;
  perturbed[5 * v] += 1.0;
  EXPECT_NE(sft_loss(Tensor({n, v}, perturbed), in).item(), base);
}

TEST(SftLoss, AllZeroMaskErrors) {
  MultimodalInput in = fixture_input(4, 4, {});
  EXPECT_THROW(sft_loss(Tensor::zeros({4, 7}), in), TensorError);
}

TEST(SftLoss, SumModeScalesByActiveCount) {
  std::size_t n = 8, v = 9;
  MultimodalInput in = fixture_input(n, 4, {1, 2, 3, 4});
  Rng rng(5);
  std::vector<double> lv(n * v);
  for (double& x : lv) x = rng.normal();
  Tensor logits(std::vector<std::size_t>{n, v}, lv);
  double mean_loss = sft_loss(logits, in, true).item();
  double sum_loss = sft_loss(logits, in, false).item();
  EXPECT_NEAR(sum_loss, mean_loss * 4.0, 1e-9);
}

TEST(TrainStep, AccumulationEquivalence) {
  TinyWorld w1 = make_tiny_world(6, 23);
  TinyWorld w2 = make_tiny_world(6, 23);
  std::vector<MultimodalInput> batch1, batch2;
  for (std::size_t i = 0; i < 4; ++i) {
    batch1.push_back(w1.model.encode_example(w1.records[i], true));
    batch2.push_back(w2.model.encode_example(w2.records[i], true));
  }
  SftConfig micro;
  micro.batch_size = 1;  // 4 accumulated micro-batches
  SftConfig full;
  full.batch_size = 4;  // one full batch
  AdamWState s1, s2;
  Rng d1(7), d2(7);
  train_step(batch1, w1.model, s1, micro, d1);
  train_step(batch2, w2.model, s2, full, d2);
  std::vector<Tensor> p1 = w1.model.trainable_params();
  std::vector<Tensor> p2 = w2.model.trainable_params();
  ASSERT_EQ(p1.size(), p2.size());
  for (std::size_t t = 0; t < p1.size(); ++t) {
    for (std::size_t i = 0; i < p1[t].size(); ++i) {
      double a = p1[t].at(i), b = p2[t].at(i);
      double denom = std::max({std::fabs(a), std::fabs(b), 1e-10});
      ASSERT_LT(std::fabs(a - b) / denom, 1e-6) << "param " << t;
    }
  }
}

TEST(TrainStep, ZeroLrLeavesParams) {
  TinyWorld w = make_tiny_world(3, 23);
  std::vector<MultimodalInput> batch = {w.model.encode_example(w.records[0], true)};
  std::vector<std::vector<double>> before;
  for (const Tensor& p : w.model.trainable_params()) before.push_back(p.values());
  SftConfig cfg;
  cfg.lr = 0.0;
  AdamWState state;
  Rng drng(7);
  train_step(batch, w.model, state, cfg, drng);
  EXPECT_EQ(state.step_count, 1);
  std::size_t i = 0;
  for (const Tensor& p : w.model.trainable_params()) {
    EXPECT_EQ(p.values(), before[i++]);
  }
}

TEST(TrainStep, LossDecreasesOnRepeatedBatch) {
  TinyWorld w = make_tiny_world(3, 23);
  std::vector<MultimodalInput> batch = {w.model.encode_example(w.records[0], true)};
  SftConfig cfg;
  cfg.lr = 1e-3;
  AdamWState state;
  Rng drng(7);
  StepMetrics first = train_step(batch, w.model, state, cfg, drng);
  EXPECT_GT(first.grad_norm, 0.0);
  double after;
  {
    NoGradGuard ng;
    Tensor logits = w.model.llm().forward_rows(batch[0].rows, batch[0].positions);
    after = sft_loss(logits, batch[0]).item();
  }
  EXPECT_LT(after, first.loss);
}

TEST(TrainStep, FrozenEncoderNeverMoves) {
  TinyWorld w = make_tiny_world(4, 23);
  std::uint64_t before = params_hash(w.model.encoder_params());
  std::vector<MultimodalInput> batch;
  for (int i = 0; i < 3; ++i) {
    batch.push_back(w.model.encode_example(w.records[i], true));
  }
  SftConfig cfg;
  AdamWState state;
  Rng drng(7);
  for (int step = 0; step < 3; ++step) train_step(batch, w.model, state, cfg, drng);
  EXPECT_EQ(params_hash(w.model.encoder_params()), before);
}

TEST(TrainStep, AdapterScopeLeavesBaseWeights) {
  TinyWorld w = make_tiny_world(3, 23, TrainableScope::adapters);
  std::vector<std::vector<double>> base_before;
  std::vector<std::string> base_names;
  for (const auto& [name, t] : w.model.llm().named_params()) {
    if (!t.requires_grad()) {
      base_before.push_back(t.values());
      base_names.push_back(name);
    }
  }
  std::vector<MultimodalInput> batch = {w.model.encode_example(w.records[0], true)};
  SftConfig cfg;
  AdamWState state;
  Rng drng(7);
  train_step(batch, w.model, state, cfg, drng);
  std::size_t i = 0;
  for (const auto& [name, t] : w.model.llm().named_params()) {
    if (!t.requires_grad()) {
      EXPECT_EQ(t.values(), base_before[i]) << base_names[i];
      ++i;
    }
  }
}

TEST(TrainEpochs, OverfitOneExample) {
  TinyWorld w = make_tiny_world(1, 23);
  SftConfig cfg;
  cfg.lr = 1e-2;
  cfg.epochs = 150;
  cfg.val_fraction = 0.0;
  train_epochs(w.records, w.model, cfg);
  double em = exact_match_rate(w.model, w.records, 64);
  EXPECT_EQ(em, 1.0);
  // and the evaluation harness agrees
  EvalResult r = evaluate(w.model, w.records, 64);
  EXPECT_DOUBLE_EQ(r.report.accuracy, 1.0);
}

TEST(TrainEpochs, DeterministicLogsUnderSeed) {
  TinyWorld w1 = make_tiny_world(8, 23);
  TinyWorld w2 = make_tiny_world(8, 23);
  SftConfig cfg;
  cfg.epochs = 2;
  TrainResult r1 = train_epochs(w1.records, w1.model, cfg);
  TrainResult r2 = train_epochs(w2.records, w2.model, cfg);
  ASSERT_EQ(r1.log.size(), r2.log.size());
  for (std::size_t i = 0; i < r1.log.size(); ++i) {
    EXPECT_EQ(r1.log[i].loss, r2.log[i].loss);
    EXPECT_EQ(r1.log[i].grad_norm, r2.log[i].grad_norm);
    EXPECT_EQ(r1.log[i].val_exact_match, r2.log[i].val_exact_match);
  }
}

TEST(TrainEpochs, EmptyDatasetErrors) {
  TinyWorld w = make_tiny_world(1, 23);
  SftConfig cfg;
  EXPECT_THROW(train_epochs({}, w.model, cfg), TensorError);
}
