#include "semcond/knowledge.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "semcond/distribution.hpp"
#include "semcond/errors.hpp"
#include "semcond/numeric.hpp"

namespace semcond {

Knowledge::Knowledge(CompiledKnowledge ck) : k_(ck.num_labels()), impl_(std::move(ck)) {}

Knowledge::Knowledge(Formula f) : k_(f.signature().size()), impl_(Enumerated{f, model_indices(f)}) {
  if (std::get<Enumerated>(impl_).models.empty()) throw UnsatisfiableKnowledge("knowledge formula has no model");
}

const Formula* Knowledge::formula() const noexcept {
  const auto* e = std::get_if<Enumerated>(&impl_);
  return e ? &e->formula : nullptr;
}

bool Knowledge::entails(const LabelVector& y) const {
  check_same_size(k_, y.size(), "label vector");
  if (const auto* ck = compiled()) return ck->accepts(y);
  const auto& models = std::get<Enumerated>(impl_).models;
  return std::binary_search(models.begin(), models.end(), y.index());
}

std::vector<double> Knowledge::model_scores(const ActivationVector& a) const {
  check_same_size(k_, a.size(), "activation vector");
  const auto& models = std::get<Enumerated>(impl_).models;
  std::vector<double> scores(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    double s = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
      if ((models[m] >> (k_ - 1 - j)) & 1u) s += a[j];
    }
    scores[m] = s;
  }
  return scores;
}

double Knowledge::log_partition(const ActivationVector& a) const {
  if (const auto* ck = compiled()) return semcond::log_partition(*ck, a);
  return log_sum_exp(model_scores(a));
}

double Knowledge::log_pqe(const ActivationVector& a) const {
  if (const auto* ck = compiled()) return pqe(*ck, a);
  return std::min(0.0, log_partition(a) - log_partition_function(a));
}

std::vector<double> Knowledge::marginals(const ActivationVector& a) const {
  if (const auto* ck = compiled()) return conditioned_marginals(*ck, a);
  const auto scores = model_scores(a);
  const double lz = log_sum_exp(scores);
  const auto& models = std::get<Enumerated>(impl_).models;
  std::vector<LogSumAccumulator> on(k_);
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t j = 0; j < k_; ++j) {
      if ((models[m] >> (k_ - 1 - j)) & 1u) on[j].add(scores[m]);
    }
  }
  std::vector<double> mu(k_);
  for (std::size_t j = 0; j < k_; ++j) mu[j] = std::exp(on[j].value() - lz);
  return mu;
}

LabelVector Knowledge::map_state(const ActivationVector& a) const {
  if (const auto* ck = compiled()) return semcond::map_state(*ck, a);
  const auto scores = model_scores(a);
  // Models are in increasing index order, so the first maximum is the
  // lexicographically smallest.
  const auto best = std::max_element(scores.begin(), scores.end()) - scores.begin();
  return LabelVector::from_index(k_, std::get<Enumerated>(impl_).models[static_cast<std::size_t>(best)]);
}

InferenceResult Knowledge::infer(const ActivationVector& a) const {
  if (const auto* ck = compiled()) return semcond::infer(*ck, a);
  return {log_pqe(a), marginals(a), map_state(a)};
}

std::string Knowledge::serialize() const {
  if (const auto* ck = compiled()) return ck->serialize();
  nlohmann::json j;
  j["format"] = kCompiledFormat;
  j["version"] = kCompiledVersion;
  j["kind"] = "formula";
  j["k"] = k_;
  j["formula"] = formula()->to_string();
  return j.dump();
}

Knowledge Knowledge::deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("invalid compiled knowledge JSON: ") + ex.what());
  }
  if (!j.is_object() || !j.contains("kind")) throw InputError("compiled knowledge file lacks a \"kind\"");
  if (j["kind"] == "hex") return Knowledge(CompiledKnowledge::deserialize(text));
  if (j["kind"] != "formula") throw InputError("unknown compiled knowledge kind " + j["kind"].dump());
  try {
    if (j.at("format") != kCompiledFormat) throw InputError("not a compiled knowledge file");
    if (j.at("version") != kCompiledVersion) throw InputError("unsupported compiled knowledge version");
    const Signature sig(j.at("k").get<std::size_t>());
    return Knowledge(parse_formula(j.at("formula").get<std::string>(), sig));
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("malformed compiled knowledge: ") + ex.what());
  }
}

Knowledge tautology(std::size_t k) {
  return Knowledge(compile(HexGraph::from_edges(k, {}, {})));
}

}  // namespace semcond
