#pragma once

#include <vector>

#include "semcond/compiled_knowledge.hpp"
#include "semcond/distribution.hpp"
#include "semcond/logic.hpp"

namespace semcond {

struct InferenceResult {
  double log_pqe = 0.0;          // log P(kappa | a)
  std::vector<double> marginals;  // P(Y_j = 1 | a, kappa)
  LabelVector map_state;
};

/// log sum_{y |= kappa} exp(a . y), by sum-product over the junction tree.
double log_partition(const CompiledKnowledge& ck, const ActivationVector& a);

/// log P(kappa | a).
double pqe(const CompiledKnowledge& ck, const ActivationVector& a);

/// P(Y_j = 1 | a, kappa) from calibrated clique beliefs.
std::vector<double> conditioned_marginals(const CompiledKnowledge& ck, const ActivationVector& a);

/// argmax_{y |= kappa} P(y | a) by max-product with Viterbi decoding. Exact
/// score ties go to the lexicographically smallest vector.
LabelVector map_state(const CompiledKnowledge& ck, const ActivationVector& a);

/// One calibration pass for all three quantities.
InferenceResult infer(const CompiledKnowledge& ck, const ActivationVector& a);

/// Elementwise 1[a >= 0].
LabelVector predict_imc(const ActivationVector& a);

/// Conditioned MAP; always a model of the knowledge.
LabelVector predict_sci(const CompiledKnowledge& ck, const ActivationVector& a);

// Enumeration mirrors for arbitrary formulas with k <= kEnumerationCap.

double pqe_bruteforce(const Formula& f, const ActivationVector& a);
std::vector<double> conditioned_marginals_bruteforce(const Formula& f, const ActivationVector& a);
LabelVector map_bruteforce(const Formula& f, const ActivationVector& a);

}  // namespace semcond
