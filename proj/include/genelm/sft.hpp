#pragma once

// Supervised fine-tuning: masked next-token objective with gradient
// accumulation over assembled multimodal batches.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "genelm/checkpoint.hpp"
#include "genelm/fusion.hpp"
#include "genelm/pipeline.hpp"
#include "genelm/rewards.hpp"
#include "genelm/tensor.hpp"

namespace genelm {

struct SftConfig {
  double lr = 5e-5;
  double weight_decay = 1e-2;
  int accum_steps = 8;
  int epochs = 3;
  int batch_size = 1;
  std::uint64_t seed = 23;
  std::size_t max_dna_tokens = 2048;
  std::size_t max_text_tokens = 1024;
  bool mean_reduction = true;  // sum mode available as a deviation knob
  int max_decode_tokens = 96;  // validation decode budget
  double val_fraction = 0.1;
};

// loss = -(1/|mask|) sum over masked rows i of log P(target[i] | rows < i);
// the logit row predicting the target at position i is row i-1
inline Tensor sft_loss(const Tensor& logits, const MultimodalInput& input,
                       bool mean_reduction = true) {
  std::size_t n = input.size();
  if (logits.ndim() != 2 || logits.dim(0) != n) {
    throw ShapeError("sft_loss: logits rows " + std::to_string(logits.dim(0)) +
                     " vs input rows " + std::to_string(n));
  }
  std::size_t active = 0;
  for (int m : input.loss_mask) active += static_cast<std::size_t>(m);
  if (active == 0) throw TensorError("sft_loss: all-zero loss mask");

  // shift: logits row i-1 scores target_ids[i]
  std::vector<int> shifted_targets(n - 1, 0);
  std::vector<double> shifted_mask(n - 1, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    if (input.loss_mask[i]) {
      shifted_targets[i - 1] = input.target_ids[i];
      shifted_mask[i - 1] = 1.0;
    }
  }
  Tensor pred_logits = slice_rows(logits, 0, n - 1);
  Tensor logp = gather_log_probs(pred_logits, shifted_targets);  // (n-1, 1)
  Tensor masked = mul(logp, constant_like({n - 1, 1}, std::move(shifted_mask)));
  Tensor total = sum(masked);
  double denom = mean_reduction ? static_cast<double>(active) : 1.0;
  return scale(total, -1.0 / denom);
}

struct StepMetrics {
  double loss = 0.0;
  double grad_norm = 0.0;
};

// gradients averaged across micro-batches, then one AdamW step
inline StepMetrics train_step(const std::vector<MultimodalInput>& batch,
                              FusedModel& model, AdamWState& state,
                              const SftConfig& cfg, Rng& dropout_rng) {
  if (batch.empty()) throw TensorError("train_step: empty batch");
  std::vector<Tensor> params = model.trainable_params();
  zero_grads(params);
  std::size_t micro = std::max<std::size_t>(
      1, static_cast<std::size_t>(cfg.batch_size));
  std::size_t n_chunks = (batch.size() + micro - 1) / micro;
  double loss_acc = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    std::size_t b0 = c * micro;
    std::size_t b1 = std::min(batch.size(), b0 + micro);
    std::vector<Tensor> losses;
    for (std::size_t b = b0; b < b1; ++b) {
      const MultimodalInput& ex = batch[b];
      Tensor logits =
          model.llm().forward_rows(ex.rows, ex.positions, true, &dropout_rng);
      losses.push_back(sft_loss(logits, ex, cfg.mean_reduction));
    }
    Tensor chunk_loss = losses[0];
    for (std::size_t i = 1; i < losses.size(); ++i) {
      chunk_loss = add(chunk_loss, losses[i]);
    }
    if (losses.size() > 1) {
      chunk_loss = scale(chunk_loss, 1.0 / static_cast<double>(losses.size()));
    }
    loss_acc += chunk_loss.item() * static_cast<double>(b1 - b0);
    backward(scale(chunk_loss, 1.0 / static_cast<double>(n_chunks)));
  }
  StepMetrics m;
  m.loss = loss_acc / static_cast<double>(batch.size());
  double sq = 0.0;
  for (const Tensor& p : params) {
    if (!p.has_grad()) continue;
    for (double g : p.grad()) sq += g * g;
  }
  m.grad_norm = std::sqrt(sq);
  AdamWConfig acfg;
  acfg.lr = cfg.lr;
  acfg.weight_decay = cfg.weight_decay;
  adamw_step(params, state, acfg);
  zero_grads(params);
  return m;
}

struct EpochLogEntry {
  int epoch = 0;
  int step = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double val_exact_match = -1.0;  // -1 when not measured this record
};

struct TrainResult {
  std::vector<EpochLogEntry> log;
  double best_val_exact_match = 0.0;
  int best_epoch = -1;
};

// greedy decode and compare extracted answers; used for validation
inline double exact_match_rate(FusedModel& model,
                               const std::vector<data::QaExample>& examples,
                               int max_decode_tokens) {
  if (examples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const data::QaExample& ex : examples) {
    MultimodalInput prompt = model.encode_example(ex, false);
    DecodeResult d = decode(model.llm(), prompt.rows, prompt.positions,
                            max_decode_tokens, model.vocab().specials().eos);
    TokenSequence seq{d.ids, SequenceKind::text};
    if (!seq.ids.empty() && seq.ids.back() == model.vocab().specials().eos) {
      seq.ids.pop_back();
    }
    std::string text = model.vocab().detokenize(seq);
    auto answer = rewards::extract_final_answer(text);
    if (answer && rewards::detail::lower(*answer) ==
                      rewards::detail::lower(ex.answer)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

// deterministic order under cfg.seed; 10% of the shuffled training data
// held out for validation; best-validation parameters retained
inline TrainResult train_epochs(const std::vector<data::QaExample>& dataset,
                                FusedModel& model, const SftConfig& cfg,
                                const std::function<void(const EpochLogEntry&)>&
                                    log_sink = nullptr) {
  if (dataset.empty()) throw TensorError("train_epochs: empty dataset");
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::size_t n_val = static_cast<std::size_t>(
      static_cast<double>(order.size()) * cfg.val_fraction);
  std::vector<data::QaExample> val;
  std::vector<std::size_t> train_order(order.begin(), order.end() - n_val);
  for (std::size_t i = order.size() - n_val; i < order.size(); ++i) {
    val.push_back(dataset[order[i]]);
  }

  AdamWState state;
  Rng dropout_rng(cfg.seed ^ 0xD20F);
  TrainResult result;
  std::vector<std::vector<double>> best_values;
  std::vector<Tensor> params = model.trainable_params();
  std::size_t step_span =
      static_cast<std::size_t>(cfg.accum_steps) *
      static_cast<std::size_t>(std::max(1, cfg.batch_size));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng(cfg.seed ^ (0x5D5Cull * (epoch + 1)));
    erng.shuffle(train_order);
    int step = 0;
    double loss_sum = 0.0;
    double grad_sum = 0.0;
    for (std::size_t at = 0; at < train_order.size(); at += step_span) {
      std::vector<MultimodalInput> batch;
      for (std::size_t b = at; b < std::min(train_order.size(), at + step_span);
           ++b) {
        batch.push_back(model.encode_example(dataset[train_order[b]], true));
      }
      StepMetrics m = train_step(batch, model, state, cfg, dropout_rng);
      loss_sum += m.loss;
      grad_sum += m.grad_norm;
      ++step;
    }
    EpochLogEntry entry;
    entry.epoch = epoch;
    entry.step = step;
    entry.loss = step > 0 ? loss_sum / step : 0.0;
    entry.grad_norm = step > 0 ? grad_sum / step : 0.0;
    entry.val_exact_match =
        val.empty() ? -1.0
                    : exact_match_rate(model, val, cfg.max_decode_tokens);
    result.log.push_back(entry);
    if (log_sink) log_sink(entry);
    if (entry.val_exact_match >= result.best_val_exact_match) {
      result.best_val_exact_match = std::max(0.0, entry.val_exact_match);
      result.best_epoch = epoch;
      best_values.clear();
      for (const Tensor& p : params) best_values.push_back(p.values());
    }
  }
  if (!best_values.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i].mutable_values() = best_values[i];
    }
  }
  return result;
}

}  // namespace genelm
