#pragma once

// Shared fixture: a deliberately tiny fused model over a short-sequence
// synthetic corpus, small enough for training-loop tests to run in seconds.

#include <string>
#include <vector>

#include "genelm/data.hpp"
#include "genelm/pipeline.hpp"

namespace genelm::testing {

inline data::SyntheticSpec tiny_synthetic_spec() {
  data::SyntheticSpec spec;
  spec.len_min = 24;
  spec.len_max = 40;
  return spec;
}

inline FusedConfig tiny_fused_config(int vocab_size,
                                     TrainableScope scope = TrainableScope::full) {
  FusedConfig cfg;
  cfg.dna.vocab_size = 5;
  cfg.dna.d_dna = 16;
  cfg.dna.n_layers = 1;
  cfg.dna.n_heads = 4;
  cfg.dna.max_positions = 64;
  cfg.llm.vocab_size = vocab_size;
  cfg.llm.d_llm = 32;
  cfg.llm.n_layers = 1;
  cfg.llm.n_heads = 4;
  cfg.llm.max_positions = 512;
  cfg.lora.rank = 4;
  cfg.lora.alpha = 8.0;
  cfg.lora.dropout = 0.0;
  cfg.scope = scope;
  cfg.max_dna_tokens = 64;
  cfg.max_text_tokens = 256;
  return cfg;
}

struct TinyWorld {
  std::vector<data::QaExample> records;
  TextVocabulary vocab;
  FusedModel model;
};

inline TinyWorld make_tiny_world(std::size_t n_records, std::uint64_t seed,
                                 TrainableScope scope = TrainableScope::full) {
  TinyWorld w;
  w.records = data::generate_synthetic_task(n_records, seed, tiny_synthetic_spec());
  w.vocab = build_vocabulary(w.records);
  Rng rng(seed);
  w.model = FusedModel(tiny_fused_config(w.vocab.size(), scope), w.vocab, rng);
  return w;
}

}  // namespace genelm::testing
