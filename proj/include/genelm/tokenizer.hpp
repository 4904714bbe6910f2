#pragma once

// DNA k-mer tokenizer, corpus-built word-level text tokenizer with byte
// fallback and reserved special tokens, and chat-template rendering.

#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace genelm {

class TokenizeError : public std::runtime_error {
 public:
  explicit TokenizeError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class SequenceKind { dna, text };

struct TokenSequence {
  std::vector<int> ids;
  SequenceKind kind = SequenceKind::text;
  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
};

// ---- DNA tokenizer ----
//
// Non-overlapping k-mers over {A,C,G,T,N} (case-insensitive); the final
// short k-mer is kept as its own token. Ids are dense: tokens of length l
// occupy the block starting at (5^l - 5) / 4.

class DnaTokenizer {
 public:
  explicit DnaTokenizer(int k = 1, std::size_t max_tokens = 2048)
      : k_(k), max_tokens_(max_tokens) {
    if (k_ < 1) throw TokenizeError("dna tokenizer: k must be positive");
    if (max_tokens_ < 1) throw TokenizeError("dna tokenizer: max_tokens must be positive");
  }

  int k() const { return k_; }
  std::size_t max_tokens() const { return max_tokens_; }

  // total id space over all token lengths 1..k
  int vocab_size() const {
    long long n = 0, p = 1;
    for (int l = 1; l <= k_; ++l) {
      p *= 5;
      n += p;
    }
    return static_cast<int>(n);
  }

  TokenSequence tokenize(const std::string& sequence) const {
    TokenSequence out;
    out.kind = SequenceKind::dna;
    std::size_t i = 0;
    while (i < sequence.size() && out.ids.size() < max_tokens_) {
      std::size_t len = std::min<std::size_t>(k_, sequence.size() - i);
      long long digits = 0;
      for (std::size_t j = 0; j < len; ++j) {
        digits = digits * 5 + base_index(sequence[i + j], i + j);
      }
      out.ids.push_back(block_offset(static_cast<int>(len)) +
                        static_cast<int>(digits));
      i += len;
    }
    // validate the truncated tail so bad characters are reported regardless
    for (std::size_t j = i; j < sequence.size(); ++j) {
      base_index(sequence[j], j);
    }
    return out;
  }

  std::string detokenize(const TokenSequence& seq) const {
    static const char kBases[5] = {'A', 'C', 'G', 'T', 'N'};
    std::string out;
    for (int id : seq.ids) {
      if (id < 0 || id >= vocab_size()) {
        throw TokenizeError("dna detokenize: id " + std::to_string(id) +
                            " out of range");
      }
      int l = 1;
      while (id >= block_offset(l + 1) && l < k_) ++l;
      long long digits = id - block_offset(l);
      std::string tok(l, 'A');
      for (int j = l - 1; j >= 0; --j) {
        tok[j] = kBases[digits % 5];
        digits /= 5;
      }
      out += tok;
    }
    return out;
  }

 private:
  static int base_index(char c, std::size_t pos) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'A': return 0;
      case 'C': return 1;
      case 'G': return 2;
      case 'T': return 3;
      case 'N': return 4;
      default:
        throw TokenizeError("dna tokenizer: invalid character '" +
                            std::string(1, c) + "' at position " +
                            std::to_string(pos));
    }
  }

  // first id of the length-l block: 5 + 25 + ... + 5^(l-1) summed
  static int block_offset(int l) {
    long long n = 0, p = 1;
    for (int j = 1; j < l; ++j) {
      p *= 5;
      n += p;
    }
    return static_cast<int>(n);
  }

  int k_;
  std::size_t max_tokens_;
};

// ---- text tokenizer ----

struct SpecialTokens {
  int pad = 0;
  int eos = 1;
  int im_start = 2;
  int im_end = 3;
  int think_open = 4;
  int think_close = 5;
  int dna_start = 6;
  int dna_end = 7;
  int sep = 8;
  int dna_slot = 9;  // placeholder consumed by fusion
  static constexpr int count = 10;
};

// Fixed header block: 10 special tokens, then 256 byte-fallback tokens,
// then corpus-built segments. Segmentation is longest-special-literal
// first, then maximal alnum runs, maximal whitespace runs, or a single
// punctuation character; unknown segments fall back to bytes.
class TextVocabulary {
 public:
  TextVocabulary() { init_reserved(); }

  static const std::vector<std::string>& special_literals() {
    static const std::vector<std::string> lits = {
        "<pad>",   "<eos>",       "<|im_start|>", "<|im_end|>", "<think>",
        "</think>", "<dna_start>", "<dna_end>",    "<sep>",      "<dna>"};
    return lits;
  }

  const SpecialTokens& specials() const { return specials_; }
  int size() const { return static_cast<int>(id_to_token_.size()); }

  bool is_special(int id) const { return id >= 0 && id < SpecialTokens::count; }
  bool is_byte(int id) const {
    return id >= SpecialTokens::count && id < SpecialTokens::count + 256;
  }

  void build_from_corpus(const std::vector<std::string>& lines) {
    for (const std::string& line : lines) {
      for (const std::string& seg : segment(line)) {
        add_token(seg);
      }
    }
  }

  // also used to make sure template glue ("\n", role words) is in-vocab
  void add_token(const std::string& seg) {
    if (!token_to_id_.count(seg)) {
      token_to_id_[seg] = static_cast<int>(id_to_token_.size());
      id_to_token_.push_back(seg);
    }
  }

  TokenSequence tokenize(const std::string& text) const {
    TokenSequence out;
    out.kind = SequenceKind::text;
    for (const std::string& seg : segment(text)) {
      auto it = token_to_id_.find(seg);
      if (it != token_to_id_.end()) {
        out.ids.push_back(it->second);
      } else {
        for (unsigned char b : seg) {
          out.ids.push_back(SpecialTokens::count + static_cast<int>(b));
        }
      }
    }
    return out;
  }

  std::string detokenize(const TokenSequence& seq) const {
    std::string out;
    for (int id : seq.ids) {
      if (id < 0 || id >= size()) {
        throw TokenizeError("detokenize: id " + std::to_string(id) +
                            " out of vocabulary");
      }
      if (is_byte(id)) {
        out += static_cast<char>(id - SpecialTokens::count);
      } else {
        out += id_to_token_[static_cast<std::size_t>(id)];
      }
    }
    return out;
  }

  const std::string& token_text(int id) const {
    return id_to_token_.at(static_cast<std::size_t>(id));
  }

  // One token per line, id = line number. Control characters are escaped
  // so whitespace tokens survive the line format.
  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw TokenizeError("vocabulary save: cannot open " + path);
    for (const std::string& tok : id_to_token_) {
      os << escape(tok) << "\n";
    }
  }

  static TextVocabulary load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw TokenizeError("vocabulary load: cannot open " + path);
    TextVocabulary v;
    std::string line;
    int id = 0;
    while (std::getline(is, line)) {
      std::string tok = unescape(line);
      if (id >= SpecialTokens::count + 256) {
        v.add_token(tok);
      } else if (tok != v.id_to_token_[static_cast<std::size_t>(id)]) {
        throw TokenizeError("vocabulary load: reserved token mismatch at id " +
                            std::to_string(id));
      }
      ++id;
    }
    return v;
  }

  static std::vector<std::string> segment(const std::string& text) {
    std::vector<std::string> segs;
    std::size_t i = 0;
    const auto& lits = special_literals();
    while (i < text.size()) {
      // longest special literal match
      std::size_t best = 0;
      for (const std::string& lit : lits) {
        if (lit.size() > best && text.compare(i, lit.size(), lit) == 0) {
          best = lit.size();
        }
      }
      if (best > 0) {
        segs.push_back(text.substr(i, best));
        i += best;
        continue;
      }
      unsigned char c = static_cast<unsigned char>(text[i]);
      std::size_t j = i + 1;
      if (std::isalnum(c) || c == '_') {
        while (j < text.size()) {
          unsigned char d = static_cast<unsigned char>(text[j]);
          if (!std::isalnum(d) && d != '_') break;
          ++j;
        }
      } else if (std::isspace(c)) {
        while (j < text.size() &&
               std::isspace(static_cast<unsigned char>(text[j]))) {
          // stop a whitespace run before a special literal
          bool lit_here = false;
          for (const std::string& lit : lits) {
            if (text.compare(j, lit.size(), lit) == 0) {
              lit_here = true;
              break;
            }
          }
          if (lit_here) break;
          ++j;
        }
      }
      segs.push_back(text.substr(i, j - i));
      i = j;
    }
    return segs;
  }

 private:
  void init_reserved() {
    for (const std::string& lit : special_literals()) {
      token_to_id_[lit] = static_cast<int>(id_to_token_.size());
      id_to_token_.push_back(lit);
    }
    for (int b = 0; b < 256; ++b) {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "<0x%02X>", b);
      token_to_id_[buf] = static_cast<int>(id_to_token_.size());
      id_to_token_.push_back(buf);
    }
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
      }
    }
    return out;
  }

  static std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) {
        char c = s[++i];
        if (c == 'n') out += '\n';
        else if (c == 'r') out += '\r';
        else if (c == 't') out += '\t';
        else out += c;
      } else {
        out += s[i];
      }
    }
    return out;
  }

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
  SpecialTokens specials_;
};

// ---- chat template ----
//
// Per message: <|im_start|> role "\n" content <|im_end|>, messages joined
// by "\n"; assistant turns additionally end with <eos>. DNA placeholders
// appear as the literal "<dna>" in user content and render to the slot id.

struct ChatMessage {
  std::string role;  // "user" or "assistant"
  std::string content;
};

inline TokenSequence render_chat_template(const TextVocabulary& vocab,
                                          const std::vector<ChatMessage>& messages,
                                          std::size_t dna_slot_count) {
  TokenSequence out;
  out.kind = SequenceKind::text;
  std::size_t slots_seen = 0;
  const SpecialTokens& sp = vocab.specials();
  for (std::size_t m = 0; m < messages.size(); ++m) {
    const ChatMessage& msg = messages[m];
    if (msg.role != "user" && msg.role != "assistant") {
      throw TokenizeError("chat template: unknown role '" + msg.role + "'");
    }
    if (m > 0) {
      TokenSequence nl = vocab.tokenize("\n");
      out.ids.insert(out.ids.end(), nl.ids.begin(), nl.ids.end());
    }
    out.ids.push_back(sp.im_start);
    TokenSequence role = vocab.tokenize(msg.role + "\n");
    out.ids.insert(out.ids.end(), role.ids.begin(), role.ids.end());
    TokenSequence content = vocab.tokenize(msg.content);
    for (int id : content.ids) {
      if (id == sp.dna_slot) {
        if (msg.role != "user") {
          throw TokenizeError("chat template: DNA slot in non-user message");
        }
        ++slots_seen;
      }
    }
    out.ids.insert(out.ids.end(), content.ids.begin(), content.ids.end());
    out.ids.push_back(sp.im_end);
    if (msg.role == "assistant") out.ids.push_back(sp.eos);
  }
  if (slots_seen != dna_slot_count) {
    throw TokenizeError("chat template: expected " +
                        std::to_string(dna_slot_count) + " DNA slots, found " +
                        std::to_string(slots_seen));
  }
  return out;
}

}  // namespace genelm
