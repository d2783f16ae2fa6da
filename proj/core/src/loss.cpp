#include "semcond/loss.hpp"

#include <algorithm>
#include <string>

#include "semcond/errors.hpp"
#include "semcond/numeric.hpp"

namespace semcond {

LossValue loss_imc(const ActivationVector& a, const LabelVector& y) {
  check_same_size(a.size(), y.size(), "label vector");
  LossValue out;
  out.gradient.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    out.value += y[j] ? softplus(-a[j]) : softplus(a[j]);
    out.gradient[j] = sigmoid(a[j]) - (y[j] ? 1.0 : 0.0);
  }
  return out;
}

LossValue loss_categorical(const ActivationVector& a, std::size_t j_true) {
  if (j_true < 1 || j_true > a.size()) {
    throw InputError("class index " + std::to_string(j_true) + " outside [1, " + std::to_string(a.size()) + "]");
  }
  const double lse = log_sum_exp(a.values());
  LossValue out;
  out.value = std::max(0.0, lse - a[j_true - 1]);
  out.gradient.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out.gradient[j] = std::exp(a[j] - lse) - (j + 1 == j_true ? 1.0 : 0.0);
  return out;
}

LogProbability log_knowledge_probability(const Knowledge& kappa, const ActivationVector& a) {
  check_same_size(kappa.num_labels(), a.size(), "activation vector");
  const auto mu = kappa.marginals(a);
  LogProbability out;
  out.value = kappa.log_pqe(a);
  out.gradient.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out.gradient[j] = mu[j] - sigmoid(a[j]);
  return out;
}

LossValue loss_sr(const Knowledge& kappa, const ActivationVector& a, const LabelVector& y, double lambda) {
  LossValue out = loss_imc(a, y);
  if (lambda == 0.0) return out;
  const LogProbability lp = log_knowledge_probability(kappa, a);
  out.value -= lambda * lp.value;
  for (std::size_t j = 0; j < a.size(); ++j) out.gradient[j] -= lambda * lp.gradient[j];
  return out;
}

LossValue loss_sc(const Knowledge& kappa, const ActivationVector& a, const LabelVector& y) {
  check_same_size(kappa.num_labels(), a.size(), "activation vector");
  check_same_size(kappa.num_labels(), y.size(), "label vector");
  if (!kappa.entails(y)) throw InconsistentLabel("label " + y.to_string() + " does not entail the knowledge");
  // log Z_kappa - a . y directly; going through loss_imc + log P would cancel
  // two large terms when activations are big.
  const auto mu = kappa.marginals(a);
  LossValue out;
  out.value = std::max(0.0, kappa.log_partition(a) - log_exponential_weight(a, y));
  out.gradient.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out.gradient[j] = mu[j] - (y[j] ? 1.0 : 0.0);
  return out;
}

}  // namespace semcond
