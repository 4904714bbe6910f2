#pragma once

// Projects DNA embeddings into LLM space and assembles the multimodal
// input: dna_start, DNA blocks with separators, dna_end, query, and
// optionally the response rows with the training loss mask.

#include <sstream>
#include <string>
#include <vector>

#include "genelm/model.hpp"
#include "genelm/tensor.hpp"
#include "genelm/tokenizer.hpp"

namespace genelm {

enum class Segment { dna_start, dna_block, sep, dna_end, query, response };

inline const char* segment_name(Segment s) {
  switch (s) {
    case Segment::dna_start: return "dna_start";
    case Segment::dna_block: return "dna_block";
    case Segment::sep: return "sep";
    case Segment::dna_end: return "dna_end";
    case Segment::query: return "query";
    case Segment::response: return "response";
  }
  return "?";
}

struct MultimodalInput {
  Tensor rows;                  // (N, d_llm)
  std::vector<int> positions;   // 0..N-1
  std::vector<int> loss_mask;   // 1 on response rows only
  std::vector<Segment> segments;
  std::vector<int> block_index;  // which DNA block a dna_block row belongs to
  std::vector<int> target_ids;   // token id per response row, -1 elsewhere

  std::size_t size() const { return positions.size(); }
};

// learnable d_dna -> d_llm map
struct DnaProjection {
  Linear proj;

  DnaProjection() = default;
  DnaProjection(std::size_t d_dna, std::size_t d_llm, Rng& rng)
      : proj(d_dna, d_llm, rng, true) {
    // Encoder outputs are RMS-normalized (per-dim std ~1), so a fan-in
    // uniform init would emit rows ~30x larger than token embeddings
    // (per-dim std 0.02), drowning the text stream at the start of
    // training. Shrink the init so projected rows match embedding scale.
    for (double& w : proj.w.mutable_values()) w *= 0.02 * std::sqrt(3.0);
  }

  Tensor forward(const Tensor& e_dna) const {
    if (e_dna.ndim() != 2 || e_dna.dim(1) != proj.w.dim(0)) {
      throw ShapeError("dna projection: input width " +
                       std::to_string(e_dna.ndim() == 2 ? e_dna.dim(1) : 0) +
                       " vs expected " + std::to_string(proj.w.dim(0)));
    }
    return proj.forward(e_dna);
  }

  void collect(NamedParams& out) const { proj.collect("fusion.proj", out); }
};

// Stacks [dna_start] block (sep block)* [dna_end] query response? with one
// contiguous position space and a response-only loss mask. Slot markers in
// the query are consumed here; their count must equal the block count.
inline MultimodalInput assemble_x_llm(
    const std::vector<Tensor>& dna_blocks, const TokenSequence& query_ids,
    const TokenSequence* response_ids, const LlmBackbone& llm) {
  const SpecialTokens sp;
  std::size_t d = static_cast<std::size_t>(llm.config().d_llm);
  if (dna_blocks.empty()) {
    throw TensorError("assemble: at least one DNA block required");
  }
  for (const Tensor& b : dna_blocks) {
    if (b.ndim() != 2 || b.dim(1) != d) {
      throw ShapeError("assemble: DNA block width mismatch");
    }
    if (b.dim(0) == 0) throw TensorError("assemble: empty DNA block");
  }
  std::vector<int> query_clean;
  std::size_t slots = 0;
  for (int id : query_ids.ids) {
    if (id == sp.dna_slot) {
      ++slots;
    } else {
      query_clean.push_back(id);
    }
  }
  if (slots != dna_blocks.size()) {
    throw TensorError("assemble: query declares " + std::to_string(slots) +
                      " DNA slots but " + std::to_string(dna_blocks.size()) +
                      " blocks were provided");
  }
  if (query_clean.empty()) throw TensorError("assemble: empty query");

  MultimodalInput out;
  std::vector<Tensor> parts;
  parts.push_back(llm.embed_tokens({sp.dna_start}));
  out.segments.push_back(Segment::dna_start);
  out.block_index.push_back(-1);
  for (std::size_t k = 0; k < dna_blocks.size(); ++k) {
    if (k > 0) {
      parts.push_back(llm.embed_tokens({sp.sep}));
      out.segments.push_back(Segment::sep);
      out.block_index.push_back(-1);
    }
    parts.push_back(dna_blocks[k]);
    for (std::size_t i = 0; i < dna_blocks[k].dim(0); ++i) {
      out.segments.push_back(Segment::dna_block);
      out.block_index.push_back(static_cast<int>(k));
    }
  }
  parts.push_back(llm.embed_tokens({sp.dna_end}));
  out.segments.push_back(Segment::dna_end);
  out.block_index.push_back(-1);
  parts.push_back(llm.embed_tokens(query_clean));
  for (std::size_t i = 0; i < query_clean.size(); ++i) {
    out.segments.push_back(Segment::query);
    out.block_index.push_back(-1);
  }
  std::vector<int> response_clean;
  if (response_ids != nullptr && !response_ids->ids.empty()) {
    response_clean = response_ids->ids;
    parts.push_back(llm.embed_tokens(response_clean));
    for (std::size_t i = 0; i < response_clean.size(); ++i) {
      out.segments.push_back(Segment::response);
      out.block_index.push_back(-1);
    }
  }
  out.rows = concat_rows(parts);
  std::size_t n = out.rows.dim(0);
  out.positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.positions[i] = static_cast<int>(i);
  out.target_ids.assign(n, -1);
  std::size_t resp_start = n - response_clean.size();
  for (std::size_t i = 0; i < response_clean.size(); ++i) {
    out.target_ids[resp_start + i] = response_clean[i];
  }
  out.loss_mask.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.loss_mask[i] = (out.segments[i] == Segment::response) ? 1 : 0;
  }
  return out;
}

// mask derivation from segment labels alone
inline std::vector<int> build_loss_mask(const std::vector<Segment>& segments) {
  std::vector<int> mask(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    mask[i] = (segments[i] == Segment::response) ? 1 : 0;
  }
  return mask;
}

// debug dump, one row per line: index<TAB>segment<TAB>mask<TAB>target
inline std::string fusion_dump(const MultimodalInput& input) {
  std::ostringstream os;
  for (std::size_t i = 0; i < input.size(); ++i) {
    os << i << "\t" << segment_name(input.segments[i]) << "\t"
       << input.loss_mask[i] << "\t" << input.target_ids[i] << "\n";
  }
  return os.str();
}

}  // namespace genelm
