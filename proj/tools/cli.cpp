// Command-line surface tying the library together: dataset building and
// inspection, SFT and GRPO training, evaluation, reward auditing, gradient
// checking, and fusion debugging.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "genelm/checkpoint.hpp"
#include "genelm/config.hpp"
#include "genelm/data.hpp"
#include "genelm/fusion.hpp"
#include "genelm/grpo.hpp"
#include "genelm/metrics.hpp"
#include "genelm/pipeline.hpp"
#include "genelm/rewards.hpp"
#include "genelm/sft.hpp"
#include "genelm/tensor.hpp"

using namespace genelm;

namespace {

const char* kUsage = R"(usage: genelm <command> [options]

commands:
  data build      --out FILE [--task synthetic|kegg] [--n N] [--seed S]
                  [--split chromosome|stratified] [--test-chrom CHR]
                  [--test-fraction F] [--len-min L] [--len-max L]
  data validate   --in FILE
  data stats      --in FILE
  train sft       --data FILE --out CKPT [--config FILE] [--seed S]
  train grpo      --data FILE --init CKPT --out CKPT [--config FILE] [--seed S]
                  [--iterations N]
  eval            --data FILE --checkpoint CKPT [--out FILE] [--config FILE]
  reward-audit    --in FILE [--out FILE]
  grad-check      [--seed S] [--config FILE]
  fusion-dump     --data FILE [--index I] [--seed S] [--config FILE]

every command accepts --config FILE and --seed S)";

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// flat --flag value parser over a fixed whitelist
std::map<std::string, std::string> parse_flags(
    const std::vector<std::string>& args, const std::set<std::string>& allowed) {
  std::map<std::string, std::string> flags;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      throw UsageError("unexpected argument '" + a + "'");
    }
    std::string key = a.substr(2);
    if (!allowed.count(key)) throw UsageError("unknown flag '--" + key + "'");
    if (i + 1 >= args.size()) throw UsageError("flag '--" + key + "' needs a value");
    flags[key] = args[++i];
  }
  return flags;
}

std::string require(const std::map<std::string, std::string>& flags,
                    const std::string& key) {
  auto it = flags.find(key);
  if (it == flags.end()) throw UsageError("missing required flag '--" + key + "'");
  return it->second;
}

std::string get(const std::map<std::string, std::string>& flags,
                const std::string& key, const std::string& dflt) {
  auto it = flags.find(key);
  return it == flags.end() ? dflt : it->second;
}

long get_long(const std::map<std::string, std::string>& flags,
              const std::string& key, long dflt) {
  auto it = flags.find(key);
  if (it == flags.end()) return dflt;
  try {
    return std::stol(it->second);
  } catch (...) {
    throw UsageError("flag '--" + key + "' expects an integer, got '" +
                     it->second + "'");
  }
}

double get_dbl(const std::map<std::string, std::string>& flags,
               const std::string& key, double dflt) {
  auto it = flags.find(key);
  if (it == flags.end()) return dflt;
  try {
    return std::stod(it->second);
  } catch (...) {
    throw UsageError("flag '--" + key + "' expects a number, got '" +
                     it->second + "'");
  }
}

Config load_config(const std::map<std::string, std::string>& flags) {
  auto it = flags.find("config");
  return it == flags.end() ? Config() : Config::load(it->second);
}

// ---- model construction from config ----

FusedConfig fused_config_from(const Config& cfg, int min_vocab) {
  FusedConfig f;
  f.dna.vocab_size = static_cast<int>(cfg.get_int("model.dna_vocab", 5));
  f.dna.d_dna = static_cast<int>(cfg.get_int("model.d_dna", 32));
  f.dna.n_layers = static_cast<int>(cfg.get_int("model.dna_layers", 2));
  f.dna.n_heads = static_cast<int>(cfg.get_int("model.dna_heads", 4));
  f.dna.max_positions = static_cast<int>(cfg.get_int("model.dna_max_positions", 2048));
  f.llm.d_llm = static_cast<int>(cfg.get_int("model.d_llm", 64));
  f.llm.n_layers = static_cast<int>(cfg.get_int("model.llm_layers", 2));
  f.llm.n_heads = static_cast<int>(cfg.get_int("model.llm_heads", 4));
  f.llm.rope_base = cfg.get_double("model.rope_base", 10000.0);
  f.llm.max_positions = static_cast<int>(cfg.get_int("model.llm_max_positions", 4096));
  f.llm.ffn_mult = static_cast<int>(cfg.get_int("model.ffn_mult", 4));
  f.llm.vocab_size =
      static_cast<int>(cfg.get_int("model.vocab_size", min_vocab));
  if (f.llm.vocab_size < min_vocab) f.llm.vocab_size = min_vocab;
  f.lora.rank = static_cast<int>(cfg.get_int("lora.rank", 32));
  f.lora.alpha = cfg.get_double("lora.alpha", 64.0);
  f.lora.dropout = cfg.get_double("lora.dropout", 0.05);
  std::string scope = cfg.get_string("train.scope", "adapters");
  if (scope == "full") {
    f.scope = TrainableScope::full;
  } else if (scope == "adapters") {
    f.scope = TrainableScope::adapters;
  } else {
    throw ConfigError("train.scope must be 'full' or 'adapters'");
  }
  f.dna_k = static_cast<int>(cfg.get_int("tokenize.dna_k", 1));
  f.max_dna_tokens =
      static_cast<std::size_t>(cfg.get_int("tokenize.max_dna_tokens", 2048));
  f.max_text_tokens =
      static_cast<std::size_t>(cfg.get_int("tokenize.max_text_tokens", 1024));
  return f;
}

SftConfig sft_config_from(const Config& cfg, std::uint64_t seed) {
  SftConfig s;
  s.lr = cfg.get_double("train.lr", 5e-5);
  s.weight_decay = cfg.get_double("train.weight_decay", 1e-2);
  s.accum_steps = static_cast<int>(cfg.get_int("train.accum_steps", 8));
  s.epochs = static_cast<int>(cfg.get_int("train.epochs", 3));
  s.batch_size = static_cast<int>(cfg.get_int("train.batch_size", 1));
  s.seed = seed;
  s.mean_reduction = cfg.get_string("train.reduction", "mean") == "mean";
  s.max_decode_tokens = static_cast<int>(cfg.get_int("train.max_decode_tokens", 96));
  s.val_fraction = cfg.get_double("train.val_fraction", 0.1);
  return s;
}

GrpoConfig grpo_config_from(const Config& cfg, std::uint64_t seed) {
  GrpoConfig g;
  g.group_size = static_cast<int>(cfg.get_int("grpo.group_size", 4));
  g.clip_eps = cfg.get_double("grpo.clip_eps", 0.2);
  g.kl_coef = cfg.get_double("grpo.kl_coef", 0.04);
  g.sample_temperature = cfg.get_double("grpo.temperature", 1.0);
  g.top_k = static_cast<int>(cfg.get_int("grpo.top_k", 0));
  g.lr = cfg.get_double("grpo.lr", cfg.get_double("train.lr", 5e-5));
  g.weight_decay = cfg.get_double("grpo.weight_decay", 1e-2);
  g.seed = seed;
  g.max_new = static_cast<int>(cfg.get_int("grpo.max_new", 64));
  return g;
}

// metadata sidecar so a checkpoint can be reopened without the original
// config file
void save_meta(const std::string& ckpt_path, const FusedConfig& f) {
  std::ofstream os(ckpt_path + ".meta");
  os << "model.dna_vocab=" << f.dna.vocab_size << "\n"
     << "model.d_dna=" << f.dna.d_dna << "\n"
     << "model.dna_layers=" << f.dna.n_layers << "\n"
     << "model.dna_heads=" << f.dna.n_heads << "\n"
     << "model.dna_max_positions=" << f.dna.max_positions << "\n"
     << "model.d_llm=" << f.llm.d_llm << "\n"
     << "model.llm_layers=" << f.llm.n_layers << "\n"
     << "model.llm_heads=" << f.llm.n_heads << "\n"
     << "model.rope_base=" << f.llm.rope_base << "\n"
     << "model.llm_max_positions=" << f.llm.max_positions << "\n"
     << "model.ffn_mult=" << f.llm.ffn_mult << "\n"
     << "model.vocab_size=" << f.llm.vocab_size << "\n"
     << "lora.rank=" << f.lora.rank << "\n"
     << "lora.alpha=" << f.lora.alpha << "\n"
     << "lora.dropout=" << f.lora.dropout << "\n"
     << "train.scope=" << (f.scope == TrainableScope::full ? "full" : "adapters")
     << "\n"
     << "tokenize.dna_k=" << f.dna_k << "\n"
     << "tokenize.max_dna_tokens=" << f.max_dna_tokens << "\n"
     << "tokenize.max_text_tokens=" << f.max_text_tokens << "\n";
}

FusedModel open_checkpoint(const std::string& ckpt_path, std::uint64_t seed) {
  Config meta = Config::load(ckpt_path + ".meta");
  TextVocabulary vocab = TextVocabulary::load(ckpt_path + ".vocab");
  FusedConfig f = fused_config_from(meta, vocab.size());
  Rng rng(seed);
  FusedModel model(f, vocab, rng);
  restore_params(model.named_params(), load_checkpoint(ckpt_path));
  return model;
}

std::vector<data::QaExample> filter_split(const std::vector<data::QaExample>& all,
                                          data::Split split) {
  std::vector<data::QaExample> out;
  for (const data::QaExample& ex : all) {
    if (ex.split == split) out.push_back(ex);
  }
  return out;
}

// ---- commands ----

int cmd_data_build(const std::map<std::string, std::string>& flags) {
  std::string out = require(flags, "out");
  std::string task = get(flags, "task", "synthetic");
  std::uint64_t seed = static_cast<std::uint64_t>(get_long(flags, "seed", 23));
  std::size_t n = static_cast<std::size_t>(get_long(flags, "n", 1000));
  std::vector<data::QaExample> records;
  if (task == "synthetic") {
    data::SyntheticSpec spec;
    spec.len_min = static_cast<std::size_t>(get_long(flags, "len-min", 200));
    spec.len_max = static_cast<std::size_t>(get_long(flags, "len-max", 400));
    records = data::generate_synthetic_task(n, seed, spec);
  } else if (task == "kegg") {
    records = data::generate_kegg_corpus(n, 37, seed);
  } else {
    throw UsageError("unknown task '" + task + "'");
  }
  std::string split = get(flags, "split", "chromosome");
  if (split == "chromosome") {
    data::split_by_chromosome(records, {get(flags, "test-chrom", "chr8")}, seed);
  } else if (split == "stratified") {
    data::split_stratified(records, get_dbl(flags, "test-fraction", 0.2), seed);
  } else {
    throw UsageError("unknown split mode '" + split + "'");
  }
  data::write_jsonl(out, records);
  data::DatasetStats stats = data::compute_stats(records);
  std::cout << "wrote " << stats.n << " records to " << out;
  for (const auto& [name, count] : stats.per_split) {
    std::cout << " " << name << "=" << count;
  }
  std::cout << "\n";
  return 0;
}

int cmd_data_validate(const std::map<std::string, std::string>& flags) {
  auto records = data::read_jsonl(require(flags, "in"));
  std::cout << "valid: " << records.size() << " records\n";
  return 0;
}

int cmd_data_stats(const std::map<std::string, std::string>& flags) {
  auto records = data::read_jsonl(require(flags, "in"));
  data::DatasetStats s = data::compute_stats(records);
  nlohmann::json j;
  j["n"] = s.n;
  j["per_split"] = s.per_split;
  j["per_disease"] = s.per_disease;
  j["per_chromosome"] = s.per_chromosome;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_train_sft(const std::map<std::string, std::string>& flags) {
  Config cfg = load_config(flags);
  std::uint64_t seed = static_cast<std::uint64_t>(
      get_long(flags, "seed", cfg.get_int("train.seed", 23)));
  std::string out = require(flags, "out");
  auto all = data::read_jsonl(require(flags, "data"));
  auto train = filter_split(all, data::Split::train);
  if (train.empty()) throw std::runtime_error("no train-split records");
  TextVocabulary vocab = build_vocabulary(all);
  FusedConfig fc = fused_config_from(cfg, vocab.size());
  Rng rng(seed);
  FusedModel model(fc, vocab, rng);
  SftConfig sc = sft_config_from(cfg, seed);
  TrainResult r = train_epochs(train, model, sc, [](const EpochLogEntry& e) {
    nlohmann::json j;
    j["epoch"] = e.epoch;
    j["step"] = e.step;
    j["loss"] = e.loss;
    j["grad_norm"] = e.grad_norm;
    j["val_exact_match"] = e.val_exact_match;
    std::cout << j.dump() << std::endl;
  });
  save_checkpoint(out, model.named_params());
  vocab.save(out + ".vocab");
  save_meta(out, fc);
  std::cout << "saved " << out << " (best val exact-match "
            << r.best_val_exact_match << " at epoch " << r.best_epoch << ")\n";
  return 0;
}

int cmd_train_grpo(const std::map<std::string, std::string>& flags) {
  Config cfg = load_config(flags);
  std::uint64_t seed = static_cast<std::uint64_t>(
      get_long(flags, "seed", cfg.get_int("train.seed", 23)));
  std::string init = require(flags, "init");
  std::string out = require(flags, "out");
  auto all = data::read_jsonl(require(flags, "data"));
  auto train = filter_split(all, data::Split::train);
  if (train.empty()) throw std::runtime_error("no train-split records");
  FusedModel policy = open_checkpoint(init, seed);
  FusedModel ref = open_checkpoint(init, seed);
  GrpoConfig gc = grpo_config_from(cfg, seed);
  long iterations = get_long(flags, "iterations",
                             cfg.get_int("grpo.iterations", 50));
  long batch = cfg.get_int("grpo.prompts_per_iter", 4);
  AdamWState state;
  Rng order_rng(seed ^ 0xA5A5);
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (long it = 0; it < iterations; ++it) {
    order_rng.shuffle(order);
    std::vector<std::pair<MultimodalInput, std::string>> prompts;
    for (long b = 0; b < batch && b < static_cast<long>(order.size()); ++b) {
      const data::QaExample& ex = train[order[static_cast<std::size_t>(b)]];
      prompts.push_back({policy.encode_example(ex, false), ex.answer});
    }
    GrpoStepMetrics m = grpo_step(prompts, policy, ref, state, gc,
                                  static_cast<std::uint64_t>(it));
    nlohmann::json j;
    j["iter"] = it;
    j["mean_reward"] = m.mean_reward;
    j["correctness"] = m.mean_components.correctness;
    j["conciseness"] = m.mean_components.conciseness;
    j["strict_format"] = m.mean_components.strict_format;
    j["soft_format"] = m.mean_components.soft_format;
    j["tag_count"] = m.mean_components.tag_count;
    j["mean_kl"] = m.mean_kl;
    j["clip_fraction"] = m.clip_fraction;
    std::cout << j.dump() << std::endl;
  }
  save_checkpoint(out, policy.named_params());
  std::filesystem::copy_file(init + ".vocab", out + ".vocab",
                             std::filesystem::copy_options::overwrite_existing);
  std::filesystem::copy_file(init + ".meta", out + ".meta",
                             std::filesystem::copy_options::overwrite_existing);
  std::cout << "saved " << out << "\n";
  return 0;
}

int cmd_eval(const std::map<std::string, std::string>& flags) {
  Config cfg = load_config(flags);
  std::uint64_t seed = static_cast<std::uint64_t>(get_long(flags, "seed", 23));
  std::string ckpt = require(flags, "checkpoint");
  auto all = data::read_jsonl(require(flags, "data"));
  auto test = filter_split(all, data::Split::test);
  if (test.empty()) throw std::runtime_error("no test-split records");
  FusedModel model = open_checkpoint(ckpt, seed);
  std::uint64_t before = params_hash(model.named_params());
  EvalResult r = evaluate(
      model, test,
      static_cast<int>(cfg.get_int("train.max_decode_tokens", 96)));
  if (params_hash(model.named_params()) != before) {
    throw std::runtime_error("evaluation mutated model parameters");
  }
  nlohmann::json j = report_to_json(r.report);
  std::string out = get(flags, "out", "");
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out, std::ios::binary);
    os << j.dump(2) << "\n";
    std::cout << "wrote report to " << out << " (accuracy "
              << r.report.accuracy << ")\n";
  }
  return 0;
}

int cmd_reward_audit(const std::map<std::string, std::string>& flags) {
  std::ifstream is(require(flags, "in"));
  if (!is) throw std::runtime_error("cannot open input file");
  std::string out_path = get(flags, "out", "");
  std::ofstream of;
  if (!out_path.empty()) of.open(out_path, std::ios::binary);
  std::ostream& os = out_path.empty() ? std::cout : of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " +
                               e.what());
    }
    rewards::RewardBreakdown b = rewards::composite_reward(
        j.at("text").get<std::string>(), j.at("target").get<std::string>());
    nlohmann::json r;
    r["correctness"] = b.correctness;
    r["conciseness"] = b.conciseness;
    r["strict_format"] = b.strict_format;
    r["soft_format"] = b.soft_format;
    r["tag_count"] = b.tag_count;
    r["total"] = b.total;
    os << r.dump() << "\n";
  }
  return 0;
}

int cmd_grad_check(const std::map<std::string, std::string>& flags) {
  Config cfg = load_config(flags);
  std::uint64_t seed = static_cast<std::uint64_t>(get_long(flags, "seed", 23));
  // a deliberately small model so exhaustive central differences stay fast
  data::SyntheticSpec spec;
  spec.len_min = 16;
  spec.len_max = 24;
  auto records = data::generate_synthetic_task(2, seed, spec);
  TextVocabulary vocab = build_vocabulary(records);
  FusedConfig fc;
  fc.dna.d_dna = 8;
  fc.dna.n_layers = 1;
  fc.dna.n_heads = 2;
  fc.dna.max_positions = 64;
  fc.llm.d_llm = 8;
  fc.llm.n_layers = 1;
  fc.llm.n_heads = 2;
  fc.llm.vocab_size = vocab.size();
  fc.lora.rank = 2;
  fc.lora.alpha = 4.0;
  fc.lora.dropout = 0.0;
  fc.scope = TrainableScope::adapters;
  (void)cfg;
  Rng rng(seed);
  FusedModel model(fc, vocab, rng);
  // push the zero-initialized adapter B matrices off their stationary point
  // so their gradients are informative
  Rng nudge(seed ^ 0xB0);
  for (const auto& [name, t] : model.named_params()) {
    if (name.find("lora") != std::string::npos && name.back() == 'b') {
      for (double& v : const_cast<Tensor&>(t).mutable_values()) {
        v = nudge.normal() * 0.02;
      }
    }
  }
  // re-encode inside the closure so perturbations of the projection (and
  // anything upstream of row assembly) are visible to finite differences
  auto loss_value = [&]() {
    MultimodalInput input = model.encode_example(records[0], true);
    Tensor logits = model.llm().forward_rows(input.rows, input.positions);
    return sft_loss(logits, input);
  };
  backward(loss_value());

  double max_rel = 0.0;
  std::string worst;
  NamedParams trainables;
  for (const auto& [name, t] : model.named_params()) {
    if (t.requires_grad()) trainables.push_back({name, t});
  }
  for (const auto& [name, t] : trainables) {
    Tensor& param = const_cast<Tensor&>(t);
    std::vector<double> saved = param.values();
    Tensor probe(param.shape(), saved);
    auto f = [&](const Tensor& x) {
      NoGradGuard ng;
      param.mutable_values() = x.values();
      double v = loss_value().item();
      param.mutable_values() = saved;
      return v;
    };
    Tensor fd = finite_difference_gradient(f, probe, 1e-5);
    std::vector<double> ad = param.has_grad()
                                 ? param.grad()
                                 : std::vector<double>(param.size(), 0.0);
    double group_max = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      // central differences carry ~1e-10 round-off here; entries with
      // near-zero true gradients need an absolute floor above that noise
      double denom = std::max(std::fabs(ad[i]) + std::fabs(fd.at(i)), 1e-5);
      group_max = std::max(group_max, std::fabs(ad[i] - fd.at(i)) / denom);
    }
    std::cout << name << " max_rel_err " << group_max << "\n";
    if (group_max > max_rel) {
      max_rel = group_max;
      worst = name;
    }
  }
  std::cout << "overall max_rel_err " << max_rel << " (worst: " << worst
            << ")\n";
  return max_rel < 1e-4 ? 0 : 1;
}

int cmd_fusion_dump(const std::map<std::string, std::string>& flags) {
  Config cfg = load_config(flags);
  std::uint64_t seed = static_cast<std::uint64_t>(get_long(flags, "seed", 23));
  auto records = data::read_jsonl(require(flags, "data"));
  std::size_t index = static_cast<std::size_t>(get_long(flags, "index", 0));
  if (index >= records.size()) {
    throw std::runtime_error("index " + std::to_string(index) +
                             " out of range (" + std::to_string(records.size()) +
                             " records)");
  }
  TextVocabulary vocab = build_vocabulary(records);
  FusedConfig fc = fused_config_from(cfg, vocab.size());
  Rng rng(seed);
  FusedModel model(fc, vocab, rng);
  std::cout << fusion_dump(model.encode_example(records[index], true));
  return 0;
}

const std::set<std::string> kCommonFlags = {"config", "seed"};

std::set<std::string> with_common(std::set<std::string> extra) {
  extra.insert(kCommonFlags.begin(), kCommonFlags.end());
  return extra;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (args.empty()) throw UsageError("no command given");
    std::string cmd = args[0];
    std::vector<std::string> rest(args.begin() + 1, args.end());
    if (cmd == "data") {
      if (rest.empty()) throw UsageError("data: expected build|validate|stats");
      std::string sub = rest[0];
      std::vector<std::string> sub_rest(rest.begin() + 1, rest.end());
      if (sub == "build") {
        return cmd_data_build(parse_flags(
            sub_rest, with_common({"out", "task", "n", "split", "test-chrom",
                                   "test-fraction", "len-min", "len-max"})));
      }
      if (sub == "validate") {
        return cmd_data_validate(parse_flags(sub_rest, with_common({"in"})));
      }
      if (sub == "stats") {
        return cmd_data_stats(parse_flags(sub_rest, with_common({"in"})));
      }
      throw UsageError("unknown data subcommand '" + sub + "'");
    }
    if (cmd == "train") {
      if (rest.empty()) throw UsageError("train: expected sft|grpo");
      std::string sub = rest[0];
      std::vector<std::string> sub_rest(rest.begin() + 1, rest.end());
      if (sub == "sft") {
        return cmd_train_sft(
            parse_flags(sub_rest, with_common({"data", "out"})));
      }
      if (sub == "grpo") {
        return cmd_train_grpo(parse_flags(
            sub_rest, with_common({"data", "init", "out", "iterations"})));
      }
      throw UsageError("unknown train subcommand '" + sub + "'");
    }
    if (cmd == "eval") {
      return cmd_eval(
          parse_flags(rest, with_common({"data", "checkpoint", "out"})));
    }
    if (cmd == "reward-audit") {
      return cmd_reward_audit(parse_flags(rest, with_common({"in", "out"})));
    }
    if (cmd == "grad-check") {
      return cmd_grad_check(parse_flags(rest, with_common({})));
    }
    if (cmd == "fusion-dump") {
      return cmd_fusion_dump(
          parse_flags(rest, with_common({"data", "index"})));
    }
    throw UsageError("unknown command '" + cmd + "'");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << kUsage << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
