#pragma once

// Frozen DNA encoder, decoder-only text backbone with rotary positions and
// low-rank adapters, decoding routines, and the attention-pooling baseline
// head.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "genelm/tensor.hpp"
#include "genelm/tokenizer.hpp"

namespace genelm {

using NamedParams = std::vector<std::pair<std::string, Tensor>>;

struct DnaEncoderConfig {
  int vocab_size = 5;
  int d_dna = 64;
  int n_layers = 2;
  int n_heads = 4;
  int max_positions = 2048;
  double rope_base = 10000.0;
};

struct LlmConfig {
  int vocab_size = 512;
  int d_llm = 128;
  int n_layers = 2;
  int n_heads = 4;
  double rope_base = 10000.0;
  int max_positions = 4096;
  int ffn_mult = 4;
};

struct LoraConfig {
  int rank = 32;
  double alpha = 64.0;
  double dropout = 0.05;
};

// ---- building blocks ----

struct Linear {
  Tensor w;  // (fan_in, fan_out)
  Tensor b;  // (fan_out)

  Linear() = default;
  Linear(std::size_t fan_in, std::size_t fan_out, Rng& rng, bool trainable)
      : w(linear_init(fan_in, fan_out, rng, trainable)),
        b(Tensor::zeros({fan_out}, trainable)) {}

  Tensor forward(const Tensor& x) const { return add_row(matmul(x, w), b); }

  void collect(const std::string& prefix, NamedParams& out) const {
    out.push_back({prefix + ".w", w});
    out.push_back({prefix + ".b", b});
  }
};

// output = base(x) + (alpha/r) * dropout(x) A B, with B zero-initialized so
// the adapter starts as an exact identity delta
struct LoraAdapter {
  Tensor a;  // (fan_in, r)
  Tensor b;  // (r, fan_out)
  double alpha = 64.0;
  int rank = 32;
  double dropout_p = 0.05;

  LoraAdapter() = default;
  LoraAdapter(std::size_t fan_in, std::size_t fan_out, const LoraConfig& cfg,
              Rng& rng)
      : a(linear_init(fan_in, static_cast<std::size_t>(cfg.rank), rng, true)),
        b(Tensor::zeros({static_cast<std::size_t>(cfg.rank), fan_out}, true)),
        alpha(cfg.alpha),
        rank(cfg.rank),
        dropout_p(cfg.dropout) {}

  Tensor delta(const Tensor& x, bool train_mode, Rng* drop_rng) const {
    Tensor h = x;
    if (train_mode && drop_rng != nullptr && dropout_p > 0.0) {
      h = dropout(h, dropout_p, *drop_rng, true);
    }
    return scale(matmul(matmul(h, a), b), alpha / static_cast<double>(rank));
  }

  void collect(const std::string& prefix, NamedParams& out) const {
    out.push_back({prefix + ".a", a});
    out.push_back({prefix + ".b", b});
  }
};

struct TransformerBlock {
  Tensor attn_norm;
  Linear wq, wk, wv, wo;
  std::optional<LoraAdapter> lora_q, lora_v;
  Tensor ffn_norm;
  Linear w1, w2;

  TransformerBlock() = default;
  TransformerBlock(int d, int ffn_mult, Rng& rng, bool trainable)
      : attn_norm(Tensor::full({static_cast<std::size_t>(d)}, 1.0, trainable)),
        wq(d, d, rng, trainable),
        wk(d, d, rng, trainable),
        wv(d, d, rng, trainable),
        wo(d, d, rng, trainable),
        ffn_norm(Tensor::full({static_cast<std::size_t>(d)}, 1.0, trainable)),
        w1(d, d * ffn_mult, rng, trainable),
        w2(d * ffn_mult, d, rng, trainable) {}

  void attach_lora(int d, const LoraConfig& cfg, Rng& rng) {
    lora_q.emplace(d, d, cfg, rng);
    lora_v.emplace(d, d, cfg, rng);
  }

  void collect(const std::string& prefix, NamedParams& out) const {
    out.push_back({prefix + ".attn_norm", attn_norm});
    wq.collect(prefix + ".wq", out);
    wk.collect(prefix + ".wk", out);
    wv.collect(prefix + ".wv", out);
    wo.collect(prefix + ".wo", out);
    if (lora_q) lora_q->collect(prefix + ".lora_q", out);
    if (lora_v) lora_v->collect(prefix + ".lora_v", out);
    out.push_back({prefix + ".ffn_norm", ffn_norm});
    w1.collect(prefix + ".w1", out);
    w2.collect(prefix + ".w2", out);
  }
};

namespace detail {

inline Tensor causal_mask(std::size_t n) {
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = -1e9;
  return constant_like({n, n}, std::move(m));
}

inline Tensor block_forward(const TransformerBlock& blk, const Tensor& x,
                            const std::vector<int>& positions, int n_heads,
                            double rope_base, bool causal, bool train_mode,
                            Rng* drop_rng) {
  std::size_t n = x.dim(0), d = x.dim(1);
  std::size_t dh = d / static_cast<std::size_t>(n_heads);
  Tensor h = rms_norm_rows(x, blk.attn_norm);
  Tensor q = blk.wq.forward(h);
  if (blk.lora_q) q = add(q, blk.lora_q->delta(h, train_mode, drop_rng));
  Tensor k = blk.wk.forward(h);
  Tensor v = blk.wv.forward(h);
  if (blk.lora_v) v = add(v, blk.lora_v->delta(h, train_mode, drop_rng));
  Tensor mask = causal ? causal_mask(n) : Tensor();
  std::vector<Tensor> heads;
  heads.reserve(static_cast<std::size_t>(n_heads));
  for (int hd = 0; hd < n_heads; ++hd) {
    std::size_t c0 = static_cast<std::size_t>(hd) * dh;
    Tensor qh = apply_rope(slice_cols(q, c0, c0 + dh), positions, rope_base);
    Tensor kh = apply_rope(slice_cols(k, c0, c0 + dh), positions, rope_base);
    Tensor vh = slice_cols(v, c0, c0 + dh);
    Tensor scores =
        scale(matmul(qh, transpose(kh)), 1.0 / std::sqrt(static_cast<double>(dh)));
    if (causal) scores = add(scores, mask);
    Tensor att = softmax_rows(scores);
    heads.push_back(matmul(att, vh));
  }
  Tensor attn_out = blk.wo.forward(concat_cols(heads));
  Tensor x1 = add(x, attn_out);
  Tensor h2 = rms_norm_rows(x1, blk.ffn_norm);
  Tensor ffn = blk.w2.forward(silu(blk.w1.forward(h2)));
  return add(x1, ffn);
}

}  // namespace detail

// ---- frozen DNA encoder ----

class DnaEncoder {
 public:
  DnaEncoder() = default;

  DnaEncoder(const DnaEncoderConfig& cfg, Rng& rng) : cfg_(cfg) {
    if (cfg.d_dna % cfg.n_heads != 0) {
      throw TensorError("dna encoder: d_dna not divisible by n_heads");
    }
    // Unit-scale embeddings: this encoder is frozen, so its blocks act as a
    // fixed random feature map. At the 0.02 scale used for trainable tables
    // the pre-norm blocks' output (per-dim std ~0.6) would swamp token
    // identity and every position would collapse onto a near-constant
    // vector; at unit scale the residual stream stays content-dominated.
    {
      std::vector<double> e(static_cast<std::size_t>(cfg.vocab_size) *
                            static_cast<std::size_t>(cfg.d_dna));
      for (double& x : e) x = rng.normal();
      embed_ = Tensor({static_cast<std::size_t>(cfg.vocab_size),
                       static_cast<std::size_t>(cfg.d_dna)},
                      std::move(e), false);
    }
    for (int l = 0; l < cfg.n_layers; ++l) {
      blocks_.emplace_back(cfg.d_dna, 4, rng, false);
    }
    final_norm_ =
        Tensor::full({static_cast<std::size_t>(cfg.d_dna)}, 1.0, false);
  }

  const DnaEncoderConfig& config() const { return cfg_; }

  // one embedding row per token, bidirectional attention, never trained
  Tensor encode(const TokenSequence& tokens) const {
    if (tokens.kind != SequenceKind::dna) {
      throw TensorError("dna encoder: expected a DNA token sequence");
    }
    if (tokens.size() == 0) throw TensorError("dna encoder: empty input");
    if (tokens.size() > static_cast<std::size_t>(cfg_.max_positions)) {
      throw TensorError("dna encoder: input length " +
                        std::to_string(tokens.size()) + " exceeds " +
                        std::to_string(cfg_.max_positions));
    }
    std::vector<int> positions(tokens.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
      positions[i] = static_cast<int>(i);
    Tensor x = embedding_lookup(embed_, tokens.ids);
    for (const TransformerBlock& blk : blocks_) {
      x = detail::block_forward(blk, x, positions, cfg_.n_heads, cfg_.rope_base,
                                /*causal=*/false, /*train_mode=*/false, nullptr);
    }
    return rms_norm_rows(x, final_norm_);
  }

  NamedParams named_params() const {
    NamedParams out;
    out.push_back({"dna.embed", embed_});
    for (std::size_t l = 0; l < blocks_.size(); ++l) {
      blocks_[l].collect("dna.block" + std::to_string(l), out);
    }
    out.push_back({"dna.final_norm", final_norm_});
    return out;
  }

 private:
  DnaEncoderConfig cfg_;
  Tensor embed_;
  std::vector<TransformerBlock> blocks_;
  Tensor final_norm_;
};

// ---- LLM backbone ----

enum class TrainableScope {
  full,      // everything on the text side trains
  adapters,  // only LoRA matrices, special-token embeddings, lm head
};

class LlmBackbone {
 public:
  LlmBackbone() = default;

  LlmBackbone(const LlmConfig& cfg, Rng& rng,
              TrainableScope scope = TrainableScope::full,
              const LoraConfig& lora = LoraConfig())
      : cfg_(cfg), scope_(scope) {
    if (cfg.d_llm % cfg.n_heads != 0) {
      throw TensorError("llm: d_llm not divisible by n_heads");
    }
    if ((cfg.d_llm / cfg.n_heads) % 2 != 0) {
      throw TensorError("llm: head width must be even for RoPE");
    }
    bool base_trainable = (scope == TrainableScope::full);
    embed_ = embedding_init(static_cast<std::size_t>(cfg.vocab_size),
                            static_cast<std::size_t>(cfg.d_llm), rng,
                            base_trainable);
    // special-token embeddings live in their own always-trainable table
    special_embed_ = embedding_init(SpecialTokens::count,
                                    static_cast<std::size_t>(cfg.d_llm), rng,
                                    true);
    for (int l = 0; l < cfg.n_layers; ++l) {
      blocks_.emplace_back(cfg.d_llm, cfg.ffn_mult, rng, base_trainable);
      if (scope == TrainableScope::adapters) {
        blocks_.back().attach_lora(cfg.d_llm, lora, rng);
      }
    }
    final_norm_ = Tensor::full({static_cast<std::size_t>(cfg.d_llm)}, 1.0,
                               base_trainable);
    lm_head_ = Linear(static_cast<std::size_t>(cfg.d_llm),
                      static_cast<std::size_t>(cfg.vocab_size), rng, true);
  }

  const LlmConfig& config() const { return cfg_; }
  TrainableScope scope() const { return scope_; }

  // token ids -> embedding rows; special ids route through the trainable
  // special-token table
  Tensor embed_tokens(const std::vector<int>& ids) const {
    std::size_t n = ids.size();
    std::size_t d = static_cast<std::size_t>(cfg_.d_llm);
    std::vector<int> base_ids(n), special_ids(n);
    std::vector<double> base_mask(n * d), special_mask(n * d);
    for (std::size_t i = 0; i < n; ++i) {
      bool sp = ids[i] < SpecialTokens::count;
      base_ids[i] = sp ? 0 : ids[i];
      special_ids[i] = sp ? ids[i] : 0;
      for (std::size_t j = 0; j < d; ++j) {
        base_mask[i * d + j] = sp ? 0.0 : 1.0;
        special_mask[i * d + j] = sp ? 1.0 : 0.0;
      }
    }
    Tensor rows_base = mul(embedding_lookup(embed_, base_ids),
                           constant_like({n, d}, std::move(base_mask)));
    Tensor rows_special = mul(embedding_lookup(special_embed_, special_ids),
                              constant_like({n, d}, std::move(special_mask)));
    return add(rows_base, rows_special);
  }

  // causal forward over pre-assembled embedding rows
  Tensor forward_rows(const Tensor& rows, const std::vector<int>& positions,
                      bool train_mode = false, Rng* drop_rng = nullptr) const {
    if (rows.ndim() != 2 ||
        rows.dim(1) != static_cast<std::size_t>(cfg_.d_llm)) {
      throw ShapeError("llm forward: rows must be (N, d_llm)");
    }
    if (positions.size() != rows.dim(0)) {
      throw ShapeError("llm forward: positions length mismatch");
    }
    if (rows.dim(0) > static_cast<std::size_t>(cfg_.max_positions)) {
      throw TensorError("llm forward: sequence length " +
                        std::to_string(rows.dim(0)) + " exceeds " +
                        std::to_string(cfg_.max_positions));
    }
    Tensor x = rows;
    for (const TransformerBlock& blk : blocks_) {
      x = detail::block_forward(blk, x, positions, cfg_.n_heads, cfg_.rope_base,
                                /*causal=*/true, train_mode, drop_rng);
    }
    x = rms_norm_rows(x, final_norm_);
    return lm_head_.forward(x);
  }

  NamedParams named_params() const {
    NamedParams out;
    out.push_back({"llm.embed", embed_});
    out.push_back({"llm.special_embed", special_embed_});
    for (std::size_t l = 0; l < blocks_.size(); ++l) {
      blocks_[l].collect("llm.block" + std::to_string(l), out);
    }
    out.push_back({"llm.final_norm", final_norm_});
    lm_head_.collect("llm.lm_head", out);
    return out;
  }

  std::vector<Tensor> trainable_params() const {
    std::vector<Tensor> out;
    for (auto& [name, t] : named_params()) {
      if (t.requires_grad()) out.push_back(t);
    }
    return out;
  }

 private:
  LlmConfig cfg_;
  TrainableScope scope_ = TrainableScope::full;
  Tensor embed_;
  Tensor special_embed_;
  std::vector<TransformerBlock> blocks_;
  Tensor final_norm_;
  Linear lm_head_;
};

// ---- decoding ----

struct DecodeResult {
  std::vector<int> ids;
  std::vector<double> logps;  // log-prob of each emitted token under the
                              // (temperature-scaled) sampling distribution
};

struct SampleMode {
  double temperature = 1.0;
  int top_k = 0;  // 0 = off
  std::uint64_t seed = 23;
};

// greedy when `sample` is absent; ties break toward the lowest token id
inline DecodeResult decode(const LlmBackbone& model, const Tensor& prefix_rows,
                           const std::vector<int>& prefix_positions,
                           int max_new, int eos_id,
                           const std::optional<SampleMode>& sample = std::nullopt) {
  if (max_new <= 0) throw TensorError("decode: max_new must be positive");
  if (prefix_rows.dim(0) == 0) throw TensorError("decode: empty prefix");
  NoGradGuard ng;
  DecodeResult result;
  std::optional<Rng> rng;
  if (sample) rng.emplace(sample->seed);
  Tensor rows = prefix_rows;
  std::vector<int> positions = prefix_positions;
  for (int step = 0; step < max_new; ++step) {
    Tensor logits = model.forward_rows(rows, positions, false, nullptr);
    std::size_t last = logits.dim(0) - 1;
    std::size_t v = logits.dim(1);
    int chosen = 0;
    double logp = 0.0;
    if (!sample) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < v; ++j) {
        double x = logits.at(last, j);
        if (x > best) {
          best = x;
          chosen = static_cast<int>(j);
        }
      }
      // logp under the untempered distribution, for bookkeeping
      double mx = best, s = 0.0;
      for (std::size_t j = 0; j < v; ++j) s += std::exp(logits.at(last, j) - mx);
      logp = logits.at(last, static_cast<std::size_t>(chosen)) - mx - std::log(s);
    } else {
      double t = sample->temperature;
      if (t <= 0.0) throw TensorError("decode: sample temperature must be positive");
      std::vector<double> scaled(v);
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < v; ++j) {
        scaled[j] = logits.at(last, j) / t;
        mx = std::max(mx, scaled[j]);
      }
      if (sample->top_k > 0 && static_cast<std::size_t>(sample->top_k) < v) {
        std::vector<double> sorted(scaled);
        std::nth_element(sorted.begin(),
                         sorted.begin() + (sample->top_k - 1), sorted.end(),
                         std::greater<double>());
        double cutoff = sorted[static_cast<std::size_t>(sample->top_k - 1)];
        for (double& x : scaled) {
          if (x < cutoff) x = -std::numeric_limits<double>::infinity();
        }
      }
      double s = 0.0;
      std::vector<double> p(v);
      for (std::size_t j = 0; j < v; ++j) {
        p[j] = std::exp(scaled[j] - mx);
        s += p[j];
      }
      double u = rng->uniform() * s;
      double acc = 0.0;
      chosen = static_cast<int>(v) - 1;
      for (std::size_t j = 0; j < v; ++j) {
        acc += p[j];
        if (u < acc) {
          chosen = static_cast<int>(j);
          break;
        }
      }
      logp = scaled[static_cast<std::size_t>(chosen)] - mx - std::log(s);
    }
    result.ids.push_back(chosen);
    result.logps.push_back(logp);
    if (chosen == eos_id) break;
    Tensor new_row = model.embed_tokens({chosen});
    rows = concat_rows({rows, new_row});
    positions.push_back(positions.back() + 1);
  }
  return result;
}

// ---- DNA-only baseline head ----

// softmax(E q) pools token embeddings into one vector; a linear map
// produces class logits
struct AttentionPoolHead {
  Tensor query;  // (d, 1)
  Linear classifier;

  AttentionPoolHead() = default;
  AttentionPoolHead(std::size_t d, std::size_t n_classes, Rng& rng)
      : query(linear_init(d, 1, rng, true)), classifier(d, n_classes, rng, true) {}

  Tensor forward(const Tensor& embeddings) const {
    if (embeddings.ndim() != 2 || embeddings.dim(0) == 0) {
      throw ShapeError("attention pool: expected nonempty (N, d) matrix");
    }
    Tensor scores = transpose(matmul(embeddings, query));  // (1, N)
    Tensor weights = softmax_rows(scores);
    Tensor pooled = matmul(weights, embeddings);  // (1, d)
    return classifier.forward(pooled);
  }

  void collect(NamedParams& out) const {
    out.push_back({"pool.query", query});
    classifier.collect("pool.classifier", out);
  }
};

}  // namespace genelm
