// Acceptance gate: twelve end-to-end criteria covering gradient
// correctness, loss masking, frozen-encoder guarantees, input assembly,
// rewards, advantages, the RL objective, gradient accumulation, end-to-end
// learnability, RL format improvement, the data pipeline, and determinism.
//
// Prints one PASS/FAIL line per criterion; exits nonzero on any failure.
// Usage: acceptance --cli <path-to-cli-binary>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "genelm/checkpoint.hpp"
#include "genelm/data.hpp"
#include "genelm/fusion.hpp"
#include "genelm/grpo.hpp"
#include "genelm/metrics.hpp"
#include "genelm/pipeline.hpp"
#include "genelm/rewards.hpp"
#include "genelm/sft.hpp"
#include "genelm/tensor.hpp"
#include "test_support.hpp"

#ifndef GENELM_SOURCE_DIR
#define GENELM_SOURCE_DIR "."
#endif

namespace fs = std::filesystem;
using namespace genelm;
using genelm::testing::make_tiny_world;
using genelm::testing::TinyWorld;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int run_cli(const std::string& command, std::string* output) {
  static int counter = 0;
  std::string tmp =
      (fs::temp_directory_path() / ("accept_cli_" + std::to_string(counter++)))
          .string();
  int rc = std::system((command + " > " + tmp + " 2>&1").c_str());
  std::ifstream is(tmp);
  std::stringstream ss;
  ss << is.rdbuf();
  *output = ss.str();
  fs::remove(tmp);
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// the short-sequence variant-classification corpus used by the end-to-end
// criteria: fixed-length sequences and canonical question/reasoning text so
// a from-scratch model can master it inside the desk-scale budget
std::vector<data::QaExample> e2e_corpus(std::size_t n, std::uint64_t seed,
                                        const std::string& motif) {
  data::SyntheticSpec spec;
  spec.len_min = 12;
  spec.len_max = 12;
  spec.motif = motif;
  auto records = data::generate_synthetic_task(n, seed, spec);
  for (auto& ex : records) {
    ex.question = "Reference <dna> variant <dna> classify the edit.";
    ex.reasoning = ex.disease.empty()
                       ? "no motif completed"
                       : "motif completed in the " + ex.disease + " region";
  }
  return records;
}

FusedConfig e2e_config(int vocab_size) {
  FusedConfig fc;
  fc.dna.d_dna = 32;
  fc.dna.n_layers = 1;
  fc.dna.n_heads = 4;
  fc.dna.max_positions = 256;
  fc.llm.d_llm = 64;
  fc.llm.n_layers = 2;
  fc.llm.n_heads = 8;
  fc.llm.vocab_size = vocab_size;
  fc.llm.max_positions = 1024;
  fc.lora.rank = 4;
  fc.lora.alpha = 8.0;
  fc.lora.dropout = 0.0;
  fc.scope = TrainableScope::full;
  return fc;
}

struct FormatProbe {
  double mean_reward = 0.0;
  double strict_rate = 0.0;
};

FormatProbe probe_format(FusedModel& model,
                         const std::vector<data::QaExample>& held) {
  FormatProbe p;
  for (const auto& ex : held) {
    MultimodalInput prompt = model.encode_example(ex, false);
    DecodeResult d = decode(model.llm(), prompt.rows, prompt.positions, 48,
                            model.vocab().specials().eos);
    TokenSequence seq{d.ids, SequenceKind::text};
    if (!seq.ids.empty() && seq.ids.back() == model.vocab().specials().eos) {
      seq.ids.pop_back();
    }
    auto b = rewards::composite_reward(model.vocab().detokenize(seq), ex.answer);
    p.mean_reward += b.total;
    p.strict_rate += b.strict_format > 0.0 ? 1.0 : 0.0;
  }
  p.mean_reward /= static_cast<double>(held.size());
  p.strict_rate /= static_cast<double>(held.size());
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  }
  if (cli.empty()) {
    std::cerr << "usage: acceptance --cli <path-to-cli-binary>\n";
    return 2;
  }

  bool all_pass = true;
  auto report = [&](int n, bool pass, const std::string& what,
                    const std::string& detail) {
    all_pass = all_pass && pass;
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << n << ": "
              << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
  };
  auto guarded = [&](int n, const std::string& what, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      report(n, false, what, std::string("exception: ") + e.what());
    }
  };

  // 1. gradient correctness over every trainable parameter group
  guarded(1, "finite-difference gradient check", [&] {
    double t0 = now_s();
    std::string out;
    int rc = run_cli(cli + " grad-check --seed 23", &out);
    double elapsed = now_s() - t0;
    double max_rel = -1.0;
    std::istringstream is(out);
    std::string line;
    while (std::getline(is, line)) {
      std::size_t p = line.find("overall max_rel_err ");
      if (p != std::string::npos) max_rel = std::stod(line.substr(p + 20));
    }
    bool pass = rc == 0 && max_rel >= 0.0 && max_rel < 1e-4 && elapsed < 120.0;
    std::ostringstream d;
    d << "max_rel_err " << max_rel << ", " << elapsed << "s, exit " << rc;
    report(1, pass, "finite-difference gradient check", d.str());
  });

  // 2. masking invariant: exhaustive over a 30-row fixture
  guarded(2, "response-only loss masking", [&] {
    const std::size_t n = 30, v = 50;
    Rng rng(23);
    std::vector<double> vals(n * v);
    for (double& x : vals) x = rng.normal();
    MultimodalInput input;
    input.positions.resize(n);
    input.loss_mask.assign(n, 0);
    input.target_ids.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) input.positions[i] = static_cast<int>(i);
    for (std::size_t i = 20; i < n; ++i) {
      input.loss_mask[i] = 1;
      input.target_ids[i] = static_cast<int>(rng.index(v));
    }
    Tensor logits({n, v}, vals, true);
    Tensor loss = sft_loss(logits, input);
    double base = loss.item();
    backward(loss);
    // logit row r predicts the target at row r+1; rows 19..28 are live
    bool pass = true;
    std::string detail;
    for (std::size_t r = 0; r < n && pass; ++r) {
      // shift one column only: log-softmax is invariant to a whole-row shift
      std::vector<double> perturbed = vals;
      perturbed[r * v] += 0.37;
      double changed = sft_loss(Tensor({n, v}, perturbed), input).item();
      bool live = r >= 19 && r <= 28;
      if (live && changed == base) {
        pass = false;
        detail = "row " + std::to_string(r) + " should affect the loss";
      }
      if (!live && changed != base) {
        pass = false;
        detail = "row " + std::to_string(r) + " leaked into the loss";
      }
      for (std::size_t c = 0; c < v; ++c) {
        double g = logits.grad()[r * v + c];
        if (!live && g != 0.0) {
          pass = false;
          detail = "nonzero gradient at masked row " + std::to_string(r);
        }
      }
    }
    report(2, pass, "response-only loss masking", detail);
  });

  // 3. frozen encoder across 100 SFT steps + 10 RL iterations
  guarded(3, "frozen DNA encoder", [&] {
    TinyWorld w = make_tiny_world(8, 23);
    TinyWorld ref = make_tiny_world(8, 23);
    std::uint64_t before = params_hash(w.model.encoder_params());
    SftConfig sc;
    sc.lr = 1e-3;
    sc.batch_size = 1;
    AdamWState state;
    Rng drop(23);
    for (int step = 0; step < 100; ++step) {
      std::vector<MultimodalInput> batch = {
          w.model.encode_example(w.records[step % w.records.size()], true)};
      train_step(batch, w.model, state, sc, drop);
    }
    GrpoConfig gc;
    gc.max_new = 8;
    AdamWState rl_state;
    for (int it = 0; it < 10; ++it) {
      std::vector<std::pair<MultimodalInput, std::string>> prompts = {
          {w.model.encode_example(w.records[it % w.records.size()], false),
           w.records[it % w.records.size()].answer}};
      grpo_step(prompts, w.model, ref.model, rl_state, gc, it);
    }
    bool pass = params_hash(w.model.encoder_params()) == before;
    report(3, pass, "frozen DNA encoder",
           pass ? "hash unchanged after 100 SFT + 10 RL steps"
                : "encoder bytes changed");
  });

  // 4. assembly length and grammar over 1,000 randomized layouts
  guarded(4, "multimodal assembly grammar", [&] {
    TinyWorld w = make_tiny_world(2, 23);
    const LlmBackbone& llm = w.model.llm();
    std::size_t d = static_cast<std::size_t>(llm.config().d_llm);
    SpecialTokens sp;
    Rng rng(23);
    std::size_t failures = 0;
    for (int trial = 0; trial < 1000 && failures == 0; ++trial) {
      std::size_t k = 1 + rng.index(4);
      std::vector<Tensor> blocks;
      std::vector<std::size_t> lens;
      std::size_t total_l = 0;
      for (std::size_t b = 0; b < k; ++b) {
        std::size_t l = 1 + rng.index(12);
        lens.push_back(l);
        total_l += l;
        std::vector<double> bv(l * d);
        for (double& x : bv) x = rng.normal() * 0.02;
        blocks.push_back(Tensor({l, d}, std::move(bv)));
      }
      std::size_t m = 1 + rng.index(15);
      TokenSequence query{{}, SequenceKind::text};
      std::size_t slots_left = k;
      // scatter the K slot markers among M ordinary tokens
      for (std::size_t i = 0; i < m + k; ++i) {
        bool put_slot =
            slots_left > 0 &&
            (rng.index(m + k - i) < slots_left || (m + k - i) == slots_left);
        if (put_slot) {
          query.ids.push_back(sp.dna_slot);
          --slots_left;
        } else {
          query.ids.push_back(static_cast<int>(10 + rng.index(200)));
        }
      }
      bool with_resp = rng.uniform() < 0.5;
      std::size_t r = 0;
      TokenSequence resp{{}, SequenceKind::text};
      if (with_resp) {
        r = 1 + rng.index(10);
        for (std::size_t i = 0; i < r; ++i) {
          resp.ids.push_back(static_cast<int>(10 + rng.index(200)));
        }
      }
      MultimodalInput in =
          assemble_x_llm(blocks, query, with_resp ? &resp : nullptr, llm);
      std::size_t expect_n = 1 + total_l + (k - 1) + 1 + m + r;
      std::vector<Segment> expect_seg;
      expect_seg.push_back(Segment::dna_start);
      for (std::size_t b = 0; b < k; ++b) {
        if (b > 0) expect_seg.push_back(Segment::sep);
        for (std::size_t i = 0; i < lens[b]; ++i) {
          expect_seg.push_back(Segment::dna_block);
        }
      }
      expect_seg.push_back(Segment::dna_end);
      for (std::size_t i = 0; i < m; ++i) expect_seg.push_back(Segment::query);
      for (std::size_t i = 0; i < r; ++i) {
        expect_seg.push_back(Segment::response);
      }
      if (in.size() != expect_n || in.segments != expect_seg) ++failures;
    }
    report(4, failures == 0, "multimodal assembly grammar",
           failures == 0 ? "1000 randomized layouts"
                         : std::to_string(failures) + " failures");
  });

  // 5. reward golden file + bounded composite under fuzzing
  guarded(5, "composite reward suite", [&] {
    std::ifstream is(std::string(GENELM_SOURCE_DIR) +
                     "/tests/golden/rewards.jsonl");
    std::size_t cases = 0, mismatches = 0;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line);
      ++cases;
      auto b = rewards::composite_reward(j.at("text").get<std::string>(),
                                         j.at("target").get<std::string>());
      if (b.correctness != j.at("correctness").get<double>() ||
          b.conciseness != j.at("conciseness").get<double>() ||
          b.strict_format != j.at("strict_format").get<double>() ||
          b.soft_format != j.at("soft_format").get<double>() ||
          b.tag_count != j.at("tag_count").get<double>() ||
          b.total != j.at("total").get<double>()) {
        ++mismatches;
      }
    }
    Rng rng(23);
    const std::vector<std::string> pieces = {
        "<think>", "</think>", "\n",    "benign",       "pathogenic",
        " ",       "the edit", "<eos>", "  \t",         "alpha beta gamma",
        "x",       "<think>",  "\n\n",  "pathogenic: alphosis"};
    std::size_t bound_violations = 0;
    for (int t = 0; t < 10000; ++t) {
      std::string text;
      std::size_t parts = rng.index(10);
      for (std::size_t p = 0; p < parts; ++p) {
        text += pieces[rng.index(pieces.size())];
      }
      auto b = rewards::composite_reward(text, "pathogenic");
      double sum = b.correctness + b.conciseness + b.strict_format +
                   b.soft_format + b.tag_count;
      if (b.total < 0.0 || b.total > 3.75 || b.total != sum) {
        ++bound_violations;
      }
    }
    bool pass = cases >= 40 && mismatches == 0 && bound_violations == 0;
    std::ostringstream d;
    d << cases << " golden cases, " << mismatches << " mismatches, "
      << bound_violations << " fuzz violations";
    report(5, pass, "composite reward suite", d.str());
  });

  // 6. advantage normalization against a direct-formula oracle
  guarded(6, "group advantage oracle", [&] {
    Rng rng(23);
    std::size_t failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::size_t g = 2 + rng.index(7);
      std::vector<double> rewards_v(g);
      for (double& r : rewards_v) r = rng.uniform() * 3.75;
      std::vector<double> got = compute_advantages(rewards_v);
      double mean = 0.0, var = 0.0;
      for (double r : rewards_v) mean += r;
      mean /= static_cast<double>(g);
      for (double r : rewards_v) var += (r - mean) * (r - mean);
      double sd = std::sqrt(var / static_cast<double>(g));
      double got_mean = 0.0;
      for (std::size_t i = 0; i < g; ++i) {
        double want =
            sd == 0.0 ? 0.0 : (rewards_v[i] - mean) / std::max(sd, 1e-8);
        if (std::fabs(got[i] - want) > 1e-12) ++failures;
        got_mean += got[i];
      }
      if (std::fabs(got_mean / static_cast<double>(g)) > 1e-12) ++failures;
    }
    for (double a : compute_advantages({1.5, 1.5, 1.5, 1.5})) {
      if (a != 0.0) ++failures;
    }
    report(6, failures == 0, "group advantage oracle",
           failures == 0 ? "1000 random groups within 1e-12"
                         : std::to_string(failures) + " failures");
  });

  // 7. RL objective fixed points and clip hand values
  guarded(7, "RL objective fixed points", [&] {
    TinyWorld w = make_tiny_world(2, 23);
    MultimodalInput prompt = w.model.encode_example(w.records[0], false);
    GrpoConfig cfg;
    cfg.max_new = 6;
    Group g = sample_group(prompt, "pathogenic", w.model, w.model, cfg);
    ObjectiveMetrics om;
    double at_fixed_point = grpo_objective(g, w.model, cfg, &om).item();

    GrpoConfig clip_cfg;
    clip_cfg.kl_coef = 0.0;
    clip_cfg.max_new = 4;
    DecodeResult dres = decode(w.model.llm(), prompt.rows, prompt.positions, 4,
                               w.model.vocab().specials().eos, SampleMode{});
    double logp_theta;
    {
      NoGradGuard ng;
      logp_theta = sequence_logp(w.model, prompt, dres.ids, 1.0).item();
    }
    Group h;
    h.prompt = prompt;
    h.completions = {dres.ids};
    h.logp_ref = {logp_theta};
    h.logp_old = {logp_theta - std::log(1.5)};  // rho = 1.5, A = +1
    h.advantages = {1.0};
    double up = grpo_objective(h, w.model, clip_cfg).item();
    h.logp_old = {logp_theta - std::log(0.5)};  // rho = 0.5, A = -1
    h.advantages = {-1.0};
    double down = grpo_objective(h, w.model, clip_cfg).item();
    bool pass = std::fabs(at_fixed_point) < 1e-9 && std::fabs(om.mean_kl) < 1e-9 &&
                std::fabs(up - 1.2) < 1e-9 && std::fabs(down + 0.8) < 1e-9;
    std::ostringstream d;
    d << "fixed point " << at_fixed_point << ", clip " << up << "/" << down;
    report(7, pass, "RL objective fixed points", d.str());
  });

  // 8. gradient accumulation equivalence
  guarded(8, "gradient accumulation equivalence", [&] {
    TinyWorld a = make_tiny_world(8, 23);
    TinyWorld b = make_tiny_world(8, 23);
    std::vector<MultimodalInput> batch_a, batch_b;
    for (int i = 0; i < 8; ++i) {
      batch_a.push_back(a.model.encode_example(a.records[i], true));
      batch_b.push_back(b.model.encode_example(b.records[i], true));
    }
    SftConfig full;
    full.lr = 1e-3;
    full.batch_size = 8;  // one chunk
    SftConfig micro = full;
    micro.batch_size = 1;  // eight accumulated micro-steps
    AdamWState sa, sb;
    Rng da(23), db(23);
    train_step(batch_a, a.model, sa, full, da);
    train_step(batch_b, b.model, sb, micro, db);
    std::vector<Tensor> pa = a.model.trainable_params();
    std::vector<Tensor> pb = b.model.trainable_params();
    double max_rel = 0.0;
    for (std::size_t t = 0; t < pa.size(); ++t) {
      for (std::size_t i = 0; i < pa[t].size(); ++i) {
        double x = pa[t].values()[i], y = pb[t].values()[i];
        double denom = std::max({std::fabs(x), std::fabs(y), 1e-12});
        max_rel = std::max(max_rel, std::fabs(x - y) / denom);
      }
    }
    std::ostringstream d;
    d << "max relative parameter difference " << max_rel;
    report(8, max_rel < 1e-6, "gradient accumulation equivalence", d.str());
  });

  // 9. end-to-end SFT learnability with the DNA-blind control
  guarded(9, "end-to-end SFT learnability", [&] {
    auto records = e2e_corpus(2400, 23, "GGTACC");
    std::vector<data::QaExample> train(records.begin(), records.begin() + 2000);
    std::vector<data::QaExample> test(records.begin() + 2000, records.end());
    TextVocabulary vocab = build_vocabulary(records);
    SftConfig sc;
    sc.lr = 1e-3;
    sc.weight_decay = 1e-2;
    sc.accum_steps = 1;
    sc.batch_size = 1;
    sc.epochs = 5;
    sc.seed = 23;
    sc.val_fraction = 0.05;
    sc.max_decode_tokens = 48;

    double t0 = now_s();
    Rng rng(23);
    FusedModel fused(e2e_config(vocab.size()), vocab, rng);
    train_epochs(train, fused, sc);
    double fused_em = exact_match_rate(fused, test, sc.max_decode_tokens);
    double fused_time = now_s() - t0;

    Rng rng_blind(23);
    FusedModel blind(e2e_config(vocab.size()), vocab, rng_blind);
    blind.dna_blind = true;
    train_epochs(train, blind, sc);
    double blind_em = exact_match_rate(blind, test, sc.max_decode_tokens);

    bool pass = fused_em >= 0.95 && fused_time < 900.0 && blind_em <= 0.60;
    std::ostringstream d;
    d << "fused " << fused_em << " in " << static_cast<int>(fused_time)
      << "s, DNA-blind " << blind_em;
    report(9, pass, "end-to-end SFT learnability", d.str());
  });

  // 10. RL format improvement from a deliberately format-weak checkpoint
  guarded(10, "RL format improvement", [&] {
    auto records = e2e_corpus(660, 23, "G");
    std::vector<data::QaExample> held(records.end() - 60, records.end());
    std::vector<data::QaExample> train(records.begin(), records.end() - 60);
    // weaken most SFT targets: duplicate think tag + verbose two-line answer
    Rng weak_rng(7);
    std::vector<data::QaExample> sft_train = train;
    for (auto& ex : sft_train) {
      if (weak_rng.uniform() < 0.75) {
        ex.reasoning += " <think>";
        ex.answer = "the result of this check is " + ex.answer + "\nconfirmed";
      }
    }
    TextVocabulary vocab = build_vocabulary(sft_train);
    Rng rng(23);
    FusedModel policy(e2e_config(vocab.size()), vocab, rng);
    Rng rng2(23);
    FusedModel ref(e2e_config(vocab.size()), vocab, rng2);
    SftConfig sc;
    sc.lr = 1e-3;
    sc.accum_steps = 1;
    sc.epochs = 4;
    sc.seed = 23;
    sc.val_fraction = 0.0;
    train_epochs(sft_train, policy, sc);
    {
      std::map<std::string, CheckpointEntry> snap;
      for (const auto& [name, t] : policy.named_params()) {
        snap[name] = {t.shape(), t.values()};
      }
      restore_params(ref.named_params(), snap);
    }
    FormatProbe before = probe_format(policy, held);

    GrpoConfig gc;
    gc.group_size = 4;
    gc.clip_eps = 0.2;
    gc.kl_coef = 0.04;
    gc.lr = 3e-4;
    gc.max_new = 48;
    gc.seed = 23;
    AdamWState state;
    Rng order(99);
    std::vector<std::size_t> idx(train.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    bool kl_finite = true;
    for (int it = 0; it < 50; ++it) {
      order.shuffle(idx);
      std::vector<std::pair<MultimodalInput, std::string>> prompts;
      for (int b = 0; b < 4; ++b) {
        const auto& ex = train[idx[static_cast<std::size_t>(b)]];
        prompts.push_back({policy.encode_example(ex, false), ex.answer});
      }
      GrpoStepMetrics m =
          grpo_step(prompts, policy, ref, state, gc, static_cast<std::uint64_t>(it));
      kl_finite = kl_finite && std::isfinite(m.mean_kl);
    }
    FormatProbe after = probe_format(policy, held);
    double d_reward = after.mean_reward - before.mean_reward;
    double d_strict = after.strict_rate - before.strict_rate;
    bool pass = d_reward >= 0.5 && d_strict >= 0.30 && kl_finite;
    std::ostringstream d;
    d << "reward " << before.mean_reward << " -> " << after.mean_reward
      << ", strict " << before.strict_rate << " -> " << after.strict_rate;
    report(10, pass, "RL format improvement", d.str());
  });

  // 11. data pipeline: splits, notation grammar, variant splice oracle
  guarded(11, "data pipeline", [&] {
    std::string detail;
    bool pass = true;
    data::SyntheticSpec spec;
    spec.len_min = 16;
    spec.len_max = 24;
    auto records = data::generate_synthetic_task(300, 23, spec);
    data::split_by_chromosome(records, {"chr8"}, 23);
    for (const auto& ex : records) {
      bool is8 = ex.chromosome == "chr8";
      if (is8 != (ex.split == data::Split::test)) {
        pass = false;
        detail = "chromosome holdout leaked " + ex.id;
      }
    }
    auto kegg = data::generate_kegg_corpus(200, 10, 23);
    data::split_stratified(kegg, 0.2, 23);
    std::map<std::string, std::pair<int, int>> by_disease;  // train, test
    std::map<std::string, int> count;
    for (const auto& ex : kegg) {
      count[ex.disease]++;
      if (ex.split == data::Split::test) {
        by_disease[ex.disease].second++;
      } else {
        by_disease[ex.disease].first++;
      }
    }
    for (const auto& [disease, n] : count) {
      if (n >= 2 && (by_disease[disease].first == 0 ||
                     by_disease[disease].second == 0)) {
        pass = false;
        detail = "disease " + disease + " missing from a split";
      }
    }
    auto edges =
        data::parse_network_notation("GENE1+GENE2 -> GENE3 -| GENE4");
    if (edges.size() != 2 ||
        edges[0].source != std::vector<std::string>{"GENE1", "GENE2"} ||
        edges[0].relation != data::Relation::activates ||
        edges[0].target != "GENE3" ||
        edges[1].source != std::vector<std::string>{"GENE3"} ||
        edges[1].relation != data::Relation::inhibits ||
        edges[1].target != "GENE4") {
      pass = false;
      detail = "canonical notation example mis-parsed";
    }
    for (const std::string& s :
         {"GENE1+GENE2 -> GENE3 -| GENE4", "A -> B", "TF => TARGET -| X",
          "P53+MDM2 -| CASP3 => BAX -> APAF1"}) {
      if (data::render_network_notation(data::parse_network_notation(s)) != s) {
        pass = false;
        detail = "notation round-trip failed on " + std::string(s);
      }
    }
    for (const std::string& bad : {"A ->", "A -? B", "+A -> B", "A -> -> B"}) {
      try {
        data::parse_network_notation(bad);
        pass = false;
        detail = "notation accepted invalid input " + std::string(bad);
      } catch (const data::DataError&) {
      }
    }
    Rng rng(23);
    static const char bases[4] = {'A', 'C', 'G', 'T'};
    for (int trial = 0; trial < 1000; ++trial) {
      std::size_t len = 20 + rng.index(180);
      std::string ref(len, 'A');
      for (char& c : ref) c = bases[rng.index(4)];
      std::size_t ref_len = rng.index(std::min<std::size_t>(65, len));
      std::size_t alt_len = rng.index(65);
      if (ref_len == 0 && alt_len == 0) alt_len = 1;
      std::size_t pos = 1 + rng.index(len - ref_len + 1);
      std::string ref_allele = ref.substr(pos - 1, ref_len);
      std::string alt_allele(alt_len, 'A');
      for (char& c : alt_allele) c = bases[rng.index(4)];
      std::string got =
          data::apply_variant(ref, pos, ref_allele, alt_allele);
      // independent splice: prefix + alt + suffix
      std::string want =
          ref.substr(0, pos - 1) + alt_allele + ref.substr(pos - 1 + ref_len);
      if (got != want) {
        pass = false;
        detail = "splice mismatch at trial " + std::to_string(trial);
      }
    }
    report(11, pass, "data pipeline",
           pass ? "splits, notation grammar, 1000 splice edits" : detail);
  });

  // 12. byte-identical reports across two full CLI pipeline runs
  guarded(12, "pipeline determinism", [&] {
    fs::path base = fs::temp_directory_path() / "accept_determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    std::string cfg_path = (base / "run.cfg").string();
    {
      std::ofstream cfg(cfg_path);
      cfg << "model.d_dna=16\nmodel.dna_layers=1\nmodel.dna_heads=4\n"
             "model.dna_max_positions=64\nmodel.d_llm=32\nmodel.llm_layers=1\n"
             "model.llm_heads=4\nmodel.llm_max_positions=512\n"
             "lora.rank=4\nlora.alpha=8.0\nlora.dropout=0.0\n"
             "train.scope=full\ntrain.lr=1e-3\ntrain.epochs=2\n"
             "train.accum_steps=2\ntrain.val_fraction=0.1\n"
             "train.max_decode_tokens=32\n";
    }
    std::vector<std::string> reports, datasets;
    bool ran_ok = true;
    for (int run = 0; run < 2; ++run) {
      fs::path dir = base / ("run" + std::to_string(run));
      fs::create_directories(dir);
      std::string data = (dir / "d.jsonl").string();
      std::string ckpt = (dir / "m.ckpt").string();
      std::string rep = (dir / "report.json").string();
      std::string out;
      int rc = run_cli(cli + " data build --out " + data +
                           " --task synthetic --n 60 --seed 23 --len-min 16"
                           " --len-max 24 --split stratified --test-fraction 0.2",
                       &out);
      ran_ok = ran_ok && rc == 0;
      rc = run_cli(cli + " train sft --data " + data + " --out " + ckpt +
                       " --config " + cfg_path + " --seed 23",
                   &out);
      ran_ok = ran_ok && rc == 0;
      rc = run_cli(cli + " eval --data " + data + " --checkpoint " + ckpt +
                       " --config " + cfg_path + " --out " + rep,
                   &out);
      ran_ok = ran_ok && rc == 0;
      reports.push_back(read_file(rep));
      datasets.push_back(read_file(data));
    }
    bool pass = ran_ok && !reports[0].empty() && reports[0] == reports[1] &&
                datasets[0] == datasets[1];
    report(12, pass, "pipeline determinism",
           pass ? "byte-identical datasets and reports"
                : (ran_ok ? "outputs differ between runs" : "a CLI step failed"));
  });

  return all_pass ? 0 : 1;
}
