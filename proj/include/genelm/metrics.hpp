#pragma once

// Classification metrics (accuracy, per-class P/R/F1, macro averages with
// the 0/0 := 0 convention) and the greedy evaluation harness.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "genelm/model.hpp"
#include "genelm/pipeline.hpp"
#include "genelm/rewards.hpp"

namespace genelm {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  std::string task;
  std::size_t n = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double binary_f1 = 0.0;  // F1 of the "pathogenic" class, when present
  std::map<std::string, ClassMetrics> per_class;
};

inline EvalReport compute_metrics(const std::vector<std::string>& predictions,
                                  const std::vector<std::string>& golds,
                                  const std::set<std::string>& label_universe) {
  if (predictions.size() != golds.size()) {
    throw TensorError("compute_metrics: prediction/gold length mismatch");
  }
  if (predictions.empty()) {
    throw TensorError("compute_metrics: empty inputs");
  }
  EvalReport r;
  r.n = predictions.size();
  std::size_t correct = 0;
  std::map<std::string, std::size_t> tp, fp, fn;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == golds[i]) {
      ++correct;
      tp[golds[i]]++;
    } else {
      fp[predictions[i]]++;
      fn[golds[i]]++;
    }
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  for (const std::string& label : label_universe) {
    ClassMetrics cm;
    std::size_t t = tp.count(label) ? tp[label] : 0;
    std::size_t p = fp.count(label) ? fp[label] : 0;
    std::size_t f = fn.count(label) ? fn[label] : 0;
    cm.precision = ratio(t, t + p);
    cm.recall = ratio(t, t + f);
    cm.f1 = (cm.precision + cm.recall) > 0.0
                ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
                : 0.0;
    cm.support = t + f;
    r.per_class[label] = cm;
    r.macro_precision += cm.precision;
    r.macro_recall += cm.recall;
    r.macro_f1 += cm.f1;
  }
  double k = static_cast<double>(label_universe.size());
  r.macro_precision /= k;
  r.macro_recall /= k;
  r.macro_f1 /= k;
  if (r.per_class.count("pathogenic")) {
    r.binary_f1 = r.per_class["pathogenic"].f1;
  }
  return r;
}

// normalization chain: exact match against the universe, then the reward
// module's containment rule, else "unmatched" (always counted wrong)
inline std::string normalize_prediction(const std::string& generated_text,
                                        const std::set<std::string>& universe) {
  auto answer = rewards::extract_final_answer(generated_text);
  if (!answer) return "unmatched";
  std::string norm = rewards::detail::lower(rewards::detail::trim(*answer));
  if (universe.count(norm)) return norm;
  for (const std::string& label : universe) {
    if (norm.find(label) != std::string::npos) return label;
  }
  return "unmatched";
}

struct Transcript {
  std::string id;
  std::string generated;
  std::string predicted;
  std::string gold;
};

struct EvalResult {
  EvalReport report;
  std::vector<Transcript> transcripts;
};

// greedy (temperature-0 equivalent) evaluation over a dataset split
inline EvalResult evaluate(FusedModel& model,
                           const std::vector<data::QaExample>& dataset,
                           int max_decode_tokens = 96,
                           const std::string& task = "eval") {
  if (dataset.empty()) throw TensorError("evaluate: empty dataset");
  std::set<std::string> universe;
  std::vector<std::string> golds;
  for (const data::QaExample& ex : dataset) {
    golds.push_back(rewards::detail::lower(rewards::detail::trim(ex.answer)));
    universe.insert(golds.back());
  }
  std::vector<std::string> preds;
  EvalResult out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    MultimodalInput prompt = model.encode_example(dataset[i], false);
    DecodeResult d = decode(model.llm(), prompt.rows, prompt.positions,
                            max_decode_tokens, model.vocab().specials().eos);
    TokenSequence seq{d.ids, SequenceKind::text};
    if (!seq.ids.empty() && seq.ids.back() == model.vocab().specials().eos) {
      seq.ids.pop_back();
    }
    std::string text = model.vocab().detokenize(seq);
    std::string pred = normalize_prediction(text, universe);
    preds.push_back(pred);
    out.transcripts.push_back({dataset[i].id, text, pred, golds[i]});
  }
  out.report = compute_metrics(preds, golds, universe);
  out.report.task = task;
  return out;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["task"] = r.task;
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["binary_f1"] = r.binary_f1;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [label, cm] : r.per_class) {
    per[label] = {{"precision", cm.precision},
                  {"recall", cm.recall},
                  {"f1", cm.f1},
                  {"support", cm.support}};
  }
  j["per_class"] = per;
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.task = j.at("task").get<std::string>();
  r.n = j.at("n").get<std::size_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  r.macro_precision = j.at("macro_precision").get<double>();
  r.macro_recall = j.at("macro_recall").get<double>();
  r.binary_f1 = j.at("binary_f1").get<double>();
  for (auto it = j.at("per_class").begin(); it != j.at("per_class").end(); ++it) {
    ClassMetrics cm;
    cm.precision = it.value().at("precision").get<double>();
    cm.recall = it.value().at("recall").get<double>();
    cm.f1 = it.value().at("f1").get<double>();
    cm.support = it.value().at("support").get<std::size_t>();
    r.per_class[it.key()] = cm;
  }
  return r;
}

}  // namespace genelm
