#pragma once

// Group Relative Policy Optimization: group sampling, advantage
// normalization, and the clipped surrogate objective with a KL anchor to a
// frozen reference policy. No value network anywhere.

#include <cmath>
#include <string>
#include <vector>

#include "genelm/fusion.hpp"
#include "genelm/pipeline.hpp"
#include "genelm/rewards.hpp"
#include "genelm/sft.hpp"
#include "genelm/tensor.hpp"

namespace genelm {

struct GrpoConfig {
  int group_size = 4;
  double clip_eps = 0.2;
  double kl_coef = 0.04;
  double sample_temperature = 1.0;
  int top_k = 0;
  double lr = 5e-5;
  double weight_decay = 1e-2;
  std::uint64_t seed = 23;
  int max_new = 64;
  double advantage_eps_guard = 1e-8;
};

struct Group {
  MultimodalInput prompt;
  std::string target;
  std::vector<std::vector<int>> completions;
  std::vector<std::string> completion_texts;
  std::vector<rewards::RewardBreakdown> breakdowns;
  std::vector<double> reward_values;
  std::vector<double> advantages;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;
};

// A_i = (r_i - mean) / max(population std, eps_guard)
inline std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                              double eps_guard = 1e-8) {
  if (rewards.size() < 2) {
    throw TensorError("compute_advantages: group size must be >= 2");
  }
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(rewards.size());
  double sd = std::sqrt(var);
  bool all_equal = (sd == 0.0);
  double denom = std::max(sd, eps_guard);
  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i] = all_equal ? 0.0 : (rewards[i] - mean) / denom;
  }
  return out;
}

// sum of per-token log-probs of `completion` given the prompt, under the
// temperature-scaled policy distribution; differentiable in the policy
inline Tensor sequence_logp(const FusedModel& model,
                            const MultimodalInput& prompt,
                            const std::vector<int>& completion,
                            double temperature) {
  if (completion.empty()) {
    // empty completion has probability 1
    return Tensor::scalar(0.0);
  }
  Tensor comp_rows = model.llm().embed_tokens(completion);
  Tensor rows = concat_rows({prompt.rows, comp_rows});
  std::vector<int> positions = prompt.positions;
  for (std::size_t i = 0; i < completion.size(); ++i) {
    positions.push_back(positions.back() + 1);
  }
  Tensor logits = model.llm().forward_rows(rows, positions, false, nullptr);
  if (temperature != 1.0) logits = scale(logits, 1.0 / temperature);
  std::size_t p = prompt.size();
  // rows p-1 .. N-2 predict the completion tokens
  Tensor pred = slice_rows(logits, p - 1, rows.dim(0) - 1);
  Tensor logp = gather_log_probs(pred, completion);
  return sum(logp);
}

// G sampled decodes with seeds derived from cfg.seed and the sample index;
// log-probabilities recorded at sampling time, rewards via composite_reward
inline Group sample_group(const MultimodalInput& prompt,
                          const std::string& target, const FusedModel& policy,
                          const FusedModel& ref_policy, const GrpoConfig& cfg,
                          std::uint64_t round = 0) {
  Group g;
  g.prompt = prompt;
  g.target = target;
  int eos = policy.vocab().specials().eos;
  for (int i = 0; i < cfg.group_size; ++i) {
    SampleMode mode;
    mode.temperature = cfg.sample_temperature;
    mode.top_k = cfg.top_k;
    mode.seed = cfg.seed ^ (0x9E3779B97F4A7C15ull * (round * 1000 + i + 1));
    DecodeResult d = decode(policy.llm(), prompt.rows, prompt.positions,
                            cfg.max_new, eos, mode);
    double logp = 0.0;
    for (double lp : d.logps) logp += lp;
    g.completions.push_back(d.ids);
    g.logp_old.push_back(logp);
    TokenSequence seq{d.ids, SequenceKind::text};
    if (!seq.ids.empty() && seq.ids.back() == eos) seq.ids.pop_back();
    std::string text = policy.vocab().detokenize(seq);
    g.completion_texts.push_back(text);
    rewards::RewardBreakdown b = rewards::composite_reward(text, target);
    g.breakdowns.push_back(b);
    g.reward_values.push_back(b.total);
    {
      NoGradGuard ng;
      g.logp_ref.push_back(
          sequence_logp(ref_policy, prompt, d.ids, cfg.sample_temperature)
              .item());
    }
  }
  g.advantages = compute_advantages(g.reward_values, cfg.advantage_eps_guard);
  return g;
}

struct ObjectiveMetrics {
  double mean_kl = 0.0;
  double clip_fraction = 0.0;
};

// (1/G) sum_i [ min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i)
//               - beta (exp(delta_i) - delta_i - 1) ],
// rho_i the sequence-level importance ratio, delta_i = logp_ref - logp_theta
inline Tensor grpo_objective(const Group& group, const FusedModel& policy,
                             const GrpoConfig& cfg,
                             ObjectiveMetrics* metrics = nullptr) {
  std::size_t G = group.completions.size();
  if (G == 0) throw TensorError("grpo_objective: empty group");
  if (group.logp_old.size() != G || group.logp_ref.size() != G ||
      group.advantages.size() != G) {
    throw TensorError("grpo_objective: group bookkeeping incomplete");
  }
  Tensor total = Tensor::scalar(0.0);
  double kl_sum = 0.0;
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < G; ++i) {
    Tensor logp_theta = sequence_logp(policy, group.prompt,
                                      group.completions[i],
                                      cfg.sample_temperature);
    Tensor ratio = exp(add_scalar(logp_theta, -group.logp_old[i]));
    double rho = ratio.item();
    if (!std::isfinite(rho)) {
      throw TensorError("grpo_objective: non-finite ratio for sample " +
                        std::to_string(i) + " (logp_theta=" +
                        std::to_string(logp_theta.item()) + ", logp_old=" +
                        std::to_string(group.logp_old[i]) + ")");
    }
    if (rho < 1.0 - cfg.clip_eps || rho > 1.0 + cfg.clip_eps) ++clipped;
    double a = group.advantages[i];
    Tensor unclipped = scale(ratio, a);
    Tensor clipped_term =
        scale(clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps), a);
    Tensor term = minimum(unclipped, clipped_term);
    // KL via the per-sample estimator exp(delta) - delta - 1
    Tensor delta = add_scalar(scale(logp_theta, -1.0), group.logp_ref[i]);
    Tensor kl = add_scalar(sub(exp(delta), delta), -1.0);
    kl_sum += kl.item();
    total = add(total, sub(term, scale(kl, cfg.kl_coef)));
  }
  if (metrics != nullptr) {
    metrics->mean_kl = kl_sum / static_cast<double>(G);
    metrics->clip_fraction =
        static_cast<double>(clipped) / static_cast<double>(G);
  }
  return scale(total, 1.0 / static_cast<double>(G));
}

struct GrpoStepMetrics {
  double mean_reward = 0.0;
  double mean_kl = 0.0;
  double clip_fraction = 0.0;
  rewards::RewardBreakdown mean_components;
};

// one outer iteration: sample a group per prompt, ascend the objective
// (descent on its negation); theta_old is implicit in the logps recorded
// at sampling time
inline GrpoStepMetrics grpo_step(
    const std::vector<std::pair<MultimodalInput, std::string>>& prompts,
    FusedModel& policy, const FusedModel& ref_policy, AdamWState& state,
    const GrpoConfig& cfg, std::uint64_t round = 0) {
  if (prompts.empty()) throw TensorError("grpo_step: no prompts");
  std::vector<Tensor> params = policy.trainable_params();
  zero_grads(params);
  GrpoStepMetrics out;
  Tensor objective_sum = Tensor::scalar(0.0);
  std::size_t n_samples = 0;
  for (std::size_t p = 0; p < prompts.size(); ++p) {
    Group g = sample_group(prompts[p].first, prompts[p].second, policy,
                           ref_policy, cfg, round * 7919 + p);
    ObjectiveMetrics om;
    Tensor obj = grpo_objective(g, policy, cfg, &om);
    objective_sum = add(objective_sum, obj);
    out.mean_kl += om.mean_kl;
    out.clip_fraction += om.clip_fraction;
    for (std::size_t i = 0; i < g.breakdowns.size(); ++i) {
      out.mean_reward += g.reward_values[i];
      out.mean_components.correctness += g.breakdowns[i].correctness;
      out.mean_components.conciseness += g.breakdowns[i].conciseness;
      out.mean_components.strict_format += g.breakdowns[i].strict_format;
      out.mean_components.soft_format += g.breakdowns[i].soft_format;
      out.mean_components.tag_count += g.breakdowns[i].tag_count;
      ++n_samples;
    }
  }
  double np = static_cast<double>(prompts.size());
  Tensor loss = scale(objective_sum, -1.0 / np);
  backward(loss);
  AdamWConfig acfg;
  acfg.lr = cfg.lr;
  acfg.weight_decay = cfg.weight_decay;
  adamw_step(params, state, acfg);
  zero_grads(params);
  out.mean_kl /= np;
  out.clip_fraction /= np;
  double ns = static_cast<double>(n_samples);
  out.mean_reward /= ns;
  out.mean_components.correctness /= ns;
  out.mean_components.conciseness /= ns;
  out.mean_components.strict_format /= ns;
  out.mean_components.soft_format /= ns;
  out.mean_components.tag_count /= ns;
  out.mean_components.total = out.mean_reward;
  return out;
}

}  // namespace genelm
