#pragma once

// Dataset model and pipeline: symbolic pathway-notation parsing, variant
// application, question/reasoning templating, split strategies, synthetic
// task generation, and the line-delimited JSON data format.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "genelm/tensor.hpp"  // Rng

namespace genelm {
namespace data {

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- pathway notation ----

enum class Relation { activates, inhibits, complexes_with, transcriptionally_regulates };

inline const char* relation_name(Relation r) {
  switch (r) {
    case Relation::activates: return "activates";
    case Relation::inhibits: return "inhibits";
    case Relation::complexes_with: return "complexes_with";
    case Relation::transcriptionally_regulates: return "transcriptionally_regulates";
  }
  return "?";
}

struct NetworkEdge {
  std::vector<std::string> source;  // >1 genes = complex
  Relation relation = Relation::activates;
  std::string target;

  bool operator==(const NetworkEdge& o) const {
    return source == o.source && relation == o.relation && target == o.target;
  }
};

namespace detail {

inline bool gene_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '*' || c == '(' || c == ')';
}

inline void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline std::string parse_gene(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  std::size_t start = i;
  while (i < s.size() && gene_char(s[i])) ++i;
  if (i == start) {
    throw DataError("network notation: empty gene name at offset " +
                    std::to_string(start));
  }
  return s.substr(start, i - start);
}

// node := GENE ('+' GENE)*
inline std::vector<std::string> parse_node(const std::string& s, std::size_t& i) {
  std::vector<std::string> genes;
  genes.push_back(parse_gene(s, i));
  while (true) {
    std::size_t save = i;
    skip_ws(s, i);
    if (i < s.size() && s[i] == '+') {
      ++i;
      genes.push_back(parse_gene(s, i));
    } else {
      i = save;
      break;
    }
  }
  return genes;
}

}  // namespace detail

// Grammar: chain := node (op node)*, op in {"->" activates, "-|" inhibits,
// "=>" transcriptionally_regulates}; "+" inside a node marks complex
// members. Chains associate left to right: each op's source is the node
// immediately before it. A complex source additionally yields
// complexes_with edges among its members toward the first member.
inline std::vector<NetworkEdge> parse_network_notation(const std::string& text) {
  std::vector<NetworkEdge> edges;
  std::size_t i = 0;
  detail::skip_ws(text, i);
  if (i >= text.size()) return edges;
  std::vector<std::string> prev = detail::parse_node(text, i);
  while (true) {
    detail::skip_ws(text, i);
    if (i >= text.size()) break;
    Relation rel;
    std::size_t op_at = i;
    if (text.compare(i, 2, "->") == 0) {
      rel = Relation::activates;
    } else if (text.compare(i, 2, "-|") == 0) {
      rel = Relation::inhibits;
    } else if (text.compare(i, 2, "=>") == 0) {
      rel = Relation::transcriptionally_regulates;
    } else {
      throw DataError("network notation: unknown operator at offset " +
                      std::to_string(op_at));
    }
    i += 2;
    detail::skip_ws(text, i);
    if (i >= text.size()) {
      throw DataError("network notation: dangling operator at offset " +
                      std::to_string(op_at));
    }
    std::vector<std::string> next = detail::parse_node(text, i);
    // the chain edge targets the head gene of the next node
    edges.push_back({prev, rel, next.front()});
    prev = std::move(next);
  }
  return edges;
}

// canonical rendering; inverse of the parser on canonical-form inputs
inline std::string render_network_notation(const std::vector<NetworkEdge>& edges) {
  std::ostringstream os;
  auto node_str = [](const std::vector<std::string>& genes) {
    std::string s;
    for (std::size_t i = 0; i < genes.size(); ++i) {
      if (i) s += "+";
      s += genes[i];
    }
    return s;
  };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (e == 0) os << node_str(edges[e].source);
    switch (edges[e].relation) {
      case Relation::activates: os << " -> "; break;
      case Relation::inhibits: os << " -| "; break;
      case Relation::transcriptionally_regulates: os << " => "; break;
      case Relation::complexes_with:
        throw DataError("render: complexes_with is implicit in node syntax");
    }
    os << edges[e].target;
  }
  return os.str();
}

// ---- variant application ----

// 1-based inclusive coordinates; alleles bounded at 64 bases
inline std::string apply_variant(const std::string& ref_seq, std::size_t position,
                                 const std::string& ref_allele,
                                 const std::string& alt_allele) {
  if (ref_allele.empty() && alt_allele.empty()) {
    throw DataError("apply_variant: both alleles empty");
  }
  if (ref_allele.size() > 64 || alt_allele.size() > 64) {
    throw DataError("apply_variant: allele longer than 64 bases");
  }
  if (position < 1 || position + ref_allele.size() - 1 > ref_seq.size() ||
      (ref_allele.empty() && position > ref_seq.size() + 1)) {
    throw DataError("apply_variant: position " + std::to_string(position) +
                    " out of range for sequence length " +
                    std::to_string(ref_seq.size()));
  }
  std::size_t idx = position - 1;
  std::string found = ref_seq.substr(idx, ref_allele.size());
  if (found != ref_allele) {
    throw DataError("apply_variant: reference allele mismatch at position " +
                    std::to_string(position) + ": expected \"" + ref_allele +
                    "\" found \"" + found + "\"");
  }
  std::string out = ref_seq;
  out.replace(idx, ref_allele.size(), alt_allele);
  return out;
}

// ---- records ----

enum class Split { train, val, test };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

inline Split split_from_name(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw DataError("unknown split '" + s + "'");
}

struct QaExample {
  std::string id;
  std::string chromosome;
  long position = 0;  // 1-based
  std::string ref_seq;
  std::string var_seq;
  std::string question;
  std::string reasoning;
  std::string answer;
  std::string disease;  // optional, empty = absent
  std::string pathway;  // optional symbolic notation
  Split split = Split::train;
  nlohmann::json extra;  // unknown fields, preserved on round-trip
};

// ---- jsonl ----

inline nlohmann::json to_json(const QaExample& ex) {
  nlohmann::json j = ex.extra.is_object() ? ex.extra : nlohmann::json::object();
  j["id"] = ex.id;
  j["chromosome"] = ex.chromosome;
  j["position"] = ex.position;
  j["ref_seq"] = ex.ref_seq;
  j["var_seq"] = ex.var_seq;
  j["question"] = ex.question;
  j["reasoning"] = ex.reasoning;
  j["answer"] = ex.answer;
  if (!ex.disease.empty()) j["disease"] = ex.disease;
  if (!ex.pathway.empty()) j["pathway"] = ex.pathway;
  j["split"] = split_name(ex.split);
  return j;
}

inline QaExample from_json(const nlohmann::json& j) {
  static const char* required[] = {"id",      "chromosome", "position",
                                   "ref_seq", "var_seq",    "question",
                                   "reasoning", "answer",   "split"};
  for (const char* f : required) {
    if (!j.contains(f)) {
      throw DataError(std::string("record missing field \"") + f + "\"");
    }
  }
  QaExample ex;
  ex.id = j.at("id").get<std::string>();
  ex.chromosome = j.at("chromosome").get<std::string>();
  ex.position = j.at("position").get<long>();
  ex.ref_seq = j.at("ref_seq").get<std::string>();
  ex.var_seq = j.at("var_seq").get<std::string>();
  ex.question = j.at("question").get<std::string>();
  ex.reasoning = j.at("reasoning").get<std::string>();
  ex.answer = j.at("answer").get<std::string>();
  if (j.contains("disease")) ex.disease = j.at("disease").get<std::string>();
  if (j.contains("pathway")) ex.pathway = j.at("pathway").get<std::string>();
  ex.split = split_from_name(j.at("split").get<std::string>());
  static const std::set<std::string> known = {
      "id",       "chromosome", "position", "ref_seq", "var_seq",
      "question", "reasoning",  "answer",   "disease", "pathway",
      "split"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) ex.extra[it.key()] = it.value();
  }
  if (ex.answer.empty()) throw DataError("record has empty answer");
  if (ex.ref_seq == ex.var_seq) {
    throw DataError("record " + ex.id + ": ref_seq equals var_seq");
  }
  return ex;
}

inline void write_jsonl(const std::string& path,
                        const std::vector<QaExample>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("write_jsonl: cannot open " + path);
  for (const QaExample& ex : records) {
    os << to_json(ex).dump() << "\n";
  }
}

inline std::vector<QaExample> read_jsonl(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("read_jsonl: cannot open " + path);
  std::vector<QaExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// ---- question / reasoning templates ----

enum class Task { kegg_reasoning, vep_coding, vep_nonsnv };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::kegg_reasoning: return "kegg_reasoning";
    case Task::vep_coding: return "vep_coding";
    case Task::vep_nonsnv: return "vep_nonsnv";
  }
  return "?";
}

namespace detail {

inline std::string replace_all(std::string s, const std::string& from,
                               const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

// ten paraphrase templates per task; {gene} {chrom} {pathway} substituted,
// the two <dna> slots carry the reference and variant sequences
inline const std::vector<std::string>& question_templates(Task task) {
  static const std::vector<std::string> kegg = {
      "Given the pathway {pathway} and the gene {gene} on {chrom}, reference <dna> and variant <dna> , what disease results from this variant?",
      "The network {pathway} involves {gene} ( {chrom} ). With reference <dna> and variant <dna> , name the disease caused by the variant.",
      "Reference sequence <dna> and variant sequence <dna> affect {gene} on {chrom} within {pathway} . Which disease does the variant cause?",
      "Considering pathway {pathway} , gene {gene} , chromosome {chrom} , reference <dna> , variant <dna> : predict the resulting disease.",
      "For {gene} ( {chrom} ) in the network {pathway} , compare reference <dna> with variant <dna> and state the associated disease.",
      "A variant in {gene} on {chrom} sits in the pathway {pathway} . Reference: <dna> Variant: <dna> What disease follows?",
      "Using the pathway context {pathway} and sequences reference <dna> variant <dna> for gene {gene} on {chrom} , identify the disease.",
      "Which disease is expected when the variant <dna> replaces reference <dna> in {gene} ( {chrom} ), pathway {pathway} ?",
      "Analyze reference <dna> versus variant <dna> of {gene} on {chrom} given {pathway} and report the disease outcome.",
      "In the molecular network {pathway} , the gene {gene} on {chrom} carries a variant. Reference <dna> , variant <dna> . Name the disease.",
  };
  static const std::vector<std::string> vep = {
      "Is the variant in {gene} on {chrom} benign or pathogenic? Reference <dna> , variant <dna> .",
      "Classify the following variant of {gene} ( {chrom} ) as benign or pathogenic. Reference: <dna> Variant: <dna>",
      "Given reference <dna> and variant <dna> for gene {gene} on {chrom} , predict pathogenicity.",
      "Reference sequence <dna> versus variant sequence <dna> in {gene} ( {chrom} ): benign or pathogenic?",
      "Determine whether this {gene} variant on {chrom} is pathogenic. Reference <dna> , variant <dna> .",
      "For the gene {gene} located on {chrom} , compare reference <dna> with variant <dna> and classify the variant.",
      "Does the variant <dna> of reference <dna> in {gene} on {chrom} cause disease? Answer benign or pathogenic.",
      "Assess pathogenicity for {gene} ( {chrom} ). Reference: <dna> Variant: <dna>",
      "With reference <dna> and variant <dna> , is this {gene} change on {chrom} benign or pathogenic?",
      "Evaluate the {chrom} gene {gene} variant. Reference <dna> , variant <dna> . Benign or pathogenic?",
  };
  return task == Task::kegg_reasoning ? kegg : vep;
}

}  // namespace detail

struct RenderFields {
  std::string id;
  std::string gene;
  std::string chromosome;
  long position = 0;
  std::string ref_seq;
  std::string var_seq;
  std::string pathway;  // kegg task only
  std::string disease;  // empty for benign vep records
  bool pathogenic = false;
};

inline QaExample render_example(const RenderFields& f, Task task,
                                std::uint64_t template_seed) {
  if (f.ref_seq.empty() || f.var_seq.empty() || f.gene.empty() ||
      f.chromosome.empty()) {
    throw DataError("render_example: missing required field");
  }
  if (task == Task::kegg_reasoning && f.pathway.empty()) {
    throw DataError("render_example: kegg record requires pathway");
  }
  if (task == Task::kegg_reasoning && f.disease.empty()) {
    throw DataError("render_example: kegg record requires disease");
  }
  const auto& templates = detail::question_templates(task);
  Rng rng(template_seed);
  const std::string& tpl = templates[rng.index(templates.size())];
  std::string q = detail::replace_all(tpl, "{gene}", f.gene);
  q = detail::replace_all(q, "{chrom}", f.chromosome);
  q = detail::replace_all(q, "{pathway}", f.pathway);

  QaExample ex;
  ex.id = f.id;
  ex.chromosome = f.chromosome;
  ex.position = f.position;
  ex.ref_seq = f.ref_seq;
  ex.var_seq = f.var_seq;
  ex.question = q;
  ex.pathway = f.pathway;
  ex.disease = f.disease;
  if (task == Task::kegg_reasoning) {
    ex.answer = f.disease;
    ex.reasoning = "The variant alters " + f.gene + " on " + f.chromosome +
                   ". Within the network " + f.pathway +
                   " this perturbs downstream signaling, and disruption of this"
                   " pathway is associated with " + f.disease + ".";
  } else if (f.pathogenic) {
    ex.answer = f.disease.empty() ? "pathogenic" : ("pathogenic: " + f.disease);
    ex.reasoning = "The variant changes the coding sequence of " + f.gene +
                   " in a way that alters its product." +
                   (f.disease.empty() ? "" : " This dysfunction is linked to " +
                                                 f.disease + ".");
  } else {
    ex.answer = "benign";
    ex.reasoning = "The variant does not disrupt the functional elements of " +
                   f.gene + ", so no disease effect is expected.";
  }
  return ex;
}

// ---- splits ----

inline void split_by_chromosome(std::vector<QaExample>& records,
                                const std::set<std::string>& test_chromosomes,
                                std::uint64_t seed = 23,
                                double val_fraction = 0.1) {
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (test_chromosomes.count(records[i].chromosome)) {
      records[i].split = Split::test;
    } else {
      records[i].split = Split::train;
      train_idx.push_back(i);
    }
  }
  Rng rng(seed);
  rng.shuffle(train_idx);
  std::size_t n_val = static_cast<std::size_t>(
      static_cast<double>(train_idx.size()) * val_fraction);
  for (std::size_t i = 0; i < n_val; ++i) {
    records[train_idx[i]].split = Split::val;
  }
}

// Per-disease partition: every disease with >=2 records lands in both
// train and test; singletons go to train; per-disease test counts round
// toward the global fraction.
inline void split_stratified(std::vector<QaExample>& records,
                             double test_fraction, std::uint64_t seed = 23) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("split_stratified: test_fraction must be in (0,1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_disease;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_disease[records[i].disease].push_back(i);
  }
  Rng rng(seed);
  for (auto& [disease, idx] : by_disease) {
    if (idx.size() < 2) {
      for (std::size_t i : idx) records[i].split = Split::train;
      continue;
    }
    rng.shuffle(idx);
    std::size_t n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(idx.size()) * test_fraction));
    n_test = std::max<std::size_t>(1, std::min(n_test, idx.size() - 1));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      records[idx[i]].split = (i < n_test) ? Split::test : Split::train;
    }
  }
}

// ---- synthetic motif task ----

// The label is a function of the DNA pair only: the variant is pathogenic
// iff the edit completes the recognition motif at the edit site; the
// pseudo-disease is chosen by which third of the sequence holds the motif.
struct SyntheticSpec {
  std::size_t len_min = 200;
  std::size_t len_max = 400;
  std::string motif = "GGTACC";
  std::vector<std::string> diseases = {"alphosis", "betargia", "gammane"};
  double pathogenic_fraction = 0.5;
};

namespace detail {

inline std::string random_dna(std::size_t len, Rng& rng) {
  static const char bases[4] = {'A', 'C', 'G', 'T'};
  std::string s(len, 'A');
  for (char& c : s) c = bases[rng.index(4)];
  return s;
}

// remove every occurrence of the motif by mutating its middle base
inline void scrub_motif(std::string& seq, const std::string& motif, Rng& rng) {
  std::size_t pos = 0;
  while ((pos = seq.find(motif, pos)) != std::string::npos) {
    std::size_t mid = pos + motif.size() / 2;
    char orig = seq[mid];
    char repl = orig;
    static const char bases[4] = {'A', 'C', 'G', 'T'};
    while (repl == orig) repl = bases[rng.index(4)];
    seq[mid] = repl;
  }
}

}  // namespace detail

inline std::string synthetic_disease_for(const SyntheticSpec& spec,
                                         std::size_t motif_pos,
                                         std::size_t seq_len) {
  std::size_t bucket = motif_pos * spec.diseases.size() / seq_len;
  bucket = std::min(bucket, spec.diseases.size() - 1);
  return spec.diseases[bucket];
}

inline std::vector<QaExample> generate_synthetic_task(
    std::size_t n, std::uint64_t seed, const SyntheticSpec& spec = SyntheticSpec()) {
  if (n == 0) throw DataError("generate_synthetic_task: n must be positive");
  std::vector<QaExample> out;
  Rng rng(seed);
  const std::string& motif = spec.motif;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t len = spec.len_min + rng.index(spec.len_max - spec.len_min + 1);
    std::string ref = detail::random_dna(len, rng);
    detail::scrub_motif(ref, motif, rng);
    bool pathogenic = rng.uniform() < spec.pathogenic_fraction;
    std::string ref_allele, alt_allele;
    std::size_t position;  // 1-based
    std::string var;
    std::string disease;
    if (pathogenic) {
      // plant the motif: edit a short span inside a motif-shaped window
      while (true) {
        std::string attempt = ref;
        std::size_t m = rng.index(len - motif.size() + 1);
        std::size_t span_len =
            1 + rng.index(std::min<std::size_t>(3, motif.size()));
        std::size_t span_off = rng.index(motif.size() - span_len + 1);
        // surrounding window matches the motif outside the edit span
        for (std::size_t j = 0; j < motif.size(); ++j) {
          if (j < span_off || j >= span_off + span_len) attempt[m + j] = motif[j];
        }
        // the edit site itself must differ from the motif chars
        for (std::size_t j = span_off; j < span_off + span_len; ++j) {
          if (attempt[m + j] == motif[j]) {
            static const char bases[4] = {'A', 'C', 'G', 'T'};
            char repl = motif[j];
            while (repl == motif[j]) repl = bases[rng.index(4)];
            attempt[m + j] = repl;
          }
        }
        if (attempt.find(motif) != std::string::npos) continue;
        position = m + span_off + 1;
        ref_allele = attempt.substr(m + span_off, span_len);
        alt_allele = motif.substr(span_off, span_len);
        var = apply_variant(attempt, position, ref_allele, alt_allele);
        if (var.find(motif) == std::string::npos) continue;
        ref = attempt;
        break;
      }
      disease = synthetic_disease_for(spec, var.find(motif), len);
    } else {
      // benign edit that never completes the motif
      while (true) {
        std::size_t span_len = 1 + rng.index(3);
        std::size_t p = rng.index(len - span_len + 1);
        ref_allele = ref.substr(p, span_len);
        alt_allele = detail::random_dna(span_len, rng);
        if (alt_allele == ref_allele) continue;
        position = p + 1;
        var = apply_variant(ref, position, ref_allele, alt_allele);
        if (var.find(motif) == std::string::npos) break;
      }
    }
    RenderFields f;
    f.id = "syn" + std::to_string(i);
    f.gene = "SYN" + std::to_string(1 + i % 17);
    f.chromosome = "chr" + std::to_string(1 + rng.index(22));
    f.position = static_cast<long>(position);
    f.ref_seq = ref;
    f.var_seq = var;
    f.disease = disease;
    f.pathogenic = pathogenic;
    QaExample rendered = render_example(f, Task::vep_coding, seed ^ (i * 0x9E3779B97F4A7C15ull));
    if (pathogenic) {
      rendered.reasoning =
          "The edit completes the recognition motif at the variant site, "
          "which marks this change as damaging. The motif falls in the " +
          disease + " region of the sequence.";
    } else {
      rendered.reasoning =
          "The edit does not complete the recognition motif anywhere in the "
          "sequence, so the change is tolerated.";
    }
    out.push_back(std::move(rendered));
  }
  return out;
}

// desk-scale stand-in for the pathway reasoning corpus: defaults mirror the
// class-count regime (1,449 records, 37 distinct diseases)
inline std::vector<QaExample> generate_kegg_corpus(std::size_t n = 1449,
                                                   std::size_t n_diseases = 37,
                                                   std::uint64_t seed = 23) {
  if (n == 0) throw DataError("generate_kegg_corpus: n must be positive");
  std::vector<QaExample> out;
  Rng rng(seed);
  std::vector<std::string> diseases;
  for (std::size_t d = 0; d < n_diseases; ++d) {
    diseases.push_back("disease_" + std::to_string(d));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t len = 200 + rng.index(201);
    std::string ref = detail::random_dna(len, rng);
    std::size_t p = rng.index(len);
    std::string ref_allele = ref.substr(p, 1);
    static const char bases[4] = {'A', 'C', 'G', 'T'};
    std::string alt_allele(1, ref_allele[0]);
    while (alt_allele[0] == ref_allele[0]) alt_allele[0] = bases[rng.index(4)];
    std::string var = apply_variant(ref, p + 1, ref_allele, alt_allele);
    std::string gene = "GENE" + std::to_string(1 + rng.index(200));
    std::string g2 = "GENE" + std::to_string(1 + rng.index(200));
    std::string g3 = "GENE" + std::to_string(1 + rng.index(200));
    std::string pathway = gene + "+" + g2 + " -> " + g3 + " -| GENE" +
                          std::to_string(1 + rng.index(200));
    RenderFields f;
    f.id = "kegg" + std::to_string(i);
    f.gene = gene;
    f.chromosome = "chr" + std::to_string(1 + rng.index(22));
    f.position = static_cast<long>(p + 1);
    f.ref_seq = ref;
    f.var_seq = var;
    f.pathway = pathway;
    f.disease = diseases[rng.index(diseases.size())];
    f.pathogenic = true;
    out.push_back(render_example(f, Task::kegg_reasoning,
                                 seed ^ (i * 0x9E3779B97F4A7C15ull)));
  }
  return out;
}

// per-disease counts and split sizes
struct DatasetStats {
  std::size_t n = 0;
  std::map<std::string, std::size_t> per_split;
  std::map<std::string, std::size_t> per_disease;
  std::map<std::string, std::size_t> per_chromosome;
};

inline DatasetStats compute_stats(const std::vector<QaExample>& records) {
  DatasetStats s;
  s.n = records.size();
  for (const QaExample& ex : records) {
    s.per_split[split_name(ex.split)]++;
    s.per_disease[ex.disease.empty() ? "(none)" : ex.disease]++;
    s.per_chromosome[ex.chromosome]++;
  }
  return s;
}

}  // namespace data
}  // namespace genelm
