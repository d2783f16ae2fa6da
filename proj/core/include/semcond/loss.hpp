#pragma once

#include <cstddef>
#include <vector>

#include "semcond/distribution.hpp"
#include "semcond/knowledge.hpp"

namespace semcond {

/// A loss value in nats and its gradient with respect to the activations.
struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;
};

/// log P(kappa | a) and its gradient mu - s(a).
struct LogProbability {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Binary cross-entropy, -log P(y | a).
LossValue loss_imc(const ActivationVector& a, const LabelVector& y);

/// -log softmax(a)_j for the 1-based true class j.
LossValue loss_categorical(const ActivationVector& a, std::size_t j_true);

LogProbability log_knowledge_probability(const Knowledge& kappa, const ActivationVector& a);

/// loss_imc - lambda * log P(kappa | a). Any lambda and any y are accepted.
LossValue loss_sr(const Knowledge& kappa, const ActivationVector& a, const LabelVector& y, double lambda);

/// -log P(y | a, kappa). Throws InconsistentLabel when y does not entail kappa.
LossValue loss_sc(const Knowledge& kappa, const ActivationVector& a, const LabelVector& y);

}  // namespace semcond
