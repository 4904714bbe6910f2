#pragma once

// The fused model bundle: tokenizers, frozen DNA encoder, projection and
// LLM backbone, plus example-to-multimodal-input encoding shared by
// training, RL, and evaluation.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "genelm/data.hpp"
#include "genelm/fusion.hpp"
#include "genelm/model.hpp"
#include "genelm/tensor.hpp"
#include "genelm/tokenizer.hpp"

namespace genelm {

struct FusedConfig {
  DnaEncoderConfig dna;
  LlmConfig llm;
  LoraConfig lora;
  TrainableScope scope = TrainableScope::adapters;
  int dna_k = 1;
  std::size_t max_dna_tokens = 2048;
  std::size_t max_text_tokens = 1024;
};

class FusedModel {
 public:
  FusedModel() = default;

  FusedModel(const FusedConfig& cfg, const TextVocabulary& vocab, Rng& rng)
      : cfg_(cfg),
        dna_tok_(cfg.dna_k, cfg.max_dna_tokens),
        vocab_(vocab),
        encoder_(cfg.dna, rng),
        projection_(static_cast<std::size_t>(cfg.dna.d_dna),
                    static_cast<std::size_t>(cfg.llm.d_llm), rng),
        llm_(cfg.llm, rng, cfg.scope, cfg.lora) {
    if (cfg.dna.vocab_size < dna_tok_.vocab_size()) {
      throw TensorError("fused model: encoder vocab smaller than tokenizer");
    }
    if (cfg.llm.vocab_size < vocab_.size()) {
      throw TensorError("fused model: llm vocab_size " +
                        std::to_string(cfg.llm.vocab_size) +
                        " smaller than vocabulary " +
                        std::to_string(vocab_.size()));
    }
  }

  const FusedConfig& config() const { return cfg_; }
  const DnaTokenizer& dna_tokenizer() const { return dna_tok_; }
  const TextVocabulary& vocab() const { return vocab_; }
  const DnaEncoder& encoder() const { return encoder_; }
  DnaProjection& projection() { return projection_; }
  const DnaProjection& projection() const { return projection_; }
  LlmBackbone& llm() { return llm_; }
  const LlmBackbone& llm() const { return llm_; }

  // DNA-blind ablation: every DNA row is replaced with a constant embedding
  bool dna_blind = false;

  // frozen-encoder outputs are constants; cache them per sequence
  Tensor encode_dna(const std::string& sequence) const {
    auto it = dna_cache_.find(sequence);
    if (it == dna_cache_.end()) {
      NoGradGuard ng;
      TokenSequence toks = dna_tok_.tokenize(sequence);
      Tensor e = encoder_.encode(toks);
      it = dna_cache_.emplace(sequence, Tensor(e.shape(), e.values())).first;
    }
    return it->second;
  }

  Tensor project_block(const std::string& sequence) const {
    Tensor e_dna = encode_dna(sequence);
    if (dna_blind) {
      // same shape, no sequence information
      return constant_like(
          {e_dna.dim(0), static_cast<std::size_t>(cfg_.llm.d_llm)},
          std::vector<double>(
              e_dna.dim(0) * static_cast<std::size_t>(cfg_.llm.d_llm), 0.01));
    }
    return projection_.forward(e_dna);
  }

  // chat-rendered user turn plus the assistant generation header
  TokenSequence query_ids(const std::string& question) const {
    std::size_t slots = 0;
    for (std::size_t p = question.find("<dna>"); p != std::string::npos;
         p = question.find("<dna>", p + 5)) {
      ++slots;
    }
    TokenSequence q =
        render_chat_template(vocab_, {{"user", question}}, slots);
    TokenSequence glue = vocab_.tokenize("\n");
    q.ids.insert(q.ids.end(), glue.ids.begin(), glue.ids.end());
    q.ids.push_back(vocab_.specials().im_start);
    TokenSequence role = vocab_.tokenize("assistant\n");
    q.ids.insert(q.ids.end(), role.ids.begin(), role.ids.end());
    return q;
  }

  // response span: <think> ... </think> answer, closed by <eos>
  TokenSequence response_ids(const std::string& reasoning,
                             const std::string& answer) const {
    TokenSequence r =
        vocab_.tokenize("<think>\n" + reasoning + "\n</think>\n" + answer);
    r.ids.push_back(vocab_.specials().eos);
    return r;
  }

  MultimodalInput encode_example(const data::QaExample& ex,
                                 bool with_response) const {
    std::vector<Tensor> blocks = {project_block(ex.ref_seq),
                                  project_block(ex.var_seq)};
    TokenSequence q = query_ids(ex.question);
    TokenSequence r;
    if (with_response) r = response_ids(ex.reasoning, ex.answer);
    std::size_t text_len = q.size() + r.size();
    if (text_len > cfg_.max_text_tokens) {
      throw TensorError("encode_example: text length " +
                        std::to_string(text_len) + " exceeds " +
                        std::to_string(cfg_.max_text_tokens));
    }
    return assemble_x_llm(blocks, q, with_response ? &r : nullptr, llm_);
  }

  std::vector<Tensor> trainable_params() const {
    std::vector<Tensor> out = llm_.trainable_params();
    // the ablation bypasses the projection entirely, leaving it gradient-free
    if (!dna_blind) {
      out.push_back(projection_.proj.w);
      out.push_back(projection_.proj.b);
    }
    return out;
  }

  NamedParams named_params() const {
    NamedParams out = encoder_.named_params();
    projection_.collect(out);
    NamedParams llm_params = llm_.named_params();
    out.insert(out.end(), llm_params.begin(), llm_params.end());
    return out;
  }

  NamedParams encoder_params() const { return encoder_.named_params(); }

 private:
  FusedConfig cfg_;
  DnaTokenizer dna_tok_;
  TextVocabulary vocab_;
  DnaEncoder encoder_;
  DnaProjection projection_;
  LlmBackbone llm_;
  mutable std::map<std::string, Tensor> dna_cache_;
};

// vocabulary over everything the model will see as text
inline TextVocabulary build_vocabulary(const std::vector<data::QaExample>& records) {
  TextVocabulary vocab;
  std::vector<std::string> corpus = {"user\n", "assistant\n", "\n",
                                     "benign", "pathogenic"};
  for (const data::QaExample& ex : records) {
    corpus.push_back(ex.question);
    corpus.push_back(ex.reasoning);
    corpus.push_back(ex.answer);
  }
  vocab.build_from_corpus(corpus);
  return vocab;
}

}  // namespace genelm
