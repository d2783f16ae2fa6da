#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "semcond/logic.hpp"

namespace semcond {

/// Pre-sigmoid scores a in R^k. Every entry is finite.
class ActivationVector {
 public:
  ActivationVector() = default;
  explicit ActivationVector(std::vector<double> values);
  ActivationVector(std::initializer_list<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Unnormalized distribution E over {0,1}^k stored as one log-weight per
/// state, indexed by LabelVector::index(). Carved-out states hold -inf.
class DenseDistribution {
 public:
  DenseDistribution(Signature sig, std::vector<double> log_weights);

  /// E(y|a) = exp(a . y) for every state.
  static DenseDistribution exponential(const ActivationVector& a);

  const Signature& signature() const noexcept { return sig_; }
  std::size_t state_count() const noexcept { return log_weights_.size(); }
  std::span<const double> log_weights() const noexcept { return log_weights_; }
  double log_weight(std::uint64_t index) const { return log_weights_[index]; }
  double weight(const LabelVector& y) const;

  bool is_null() const;
  /// log Z(E).
  double log_partition() const;
  /// E / Z(E). Throws NumericError on the null distribution.
  DenseDistribution normalized() const;

 private:
  Signature sig_;
  std::vector<double> log_weights_;
};

double exponential_weight(const ActivationVector& a, const LabelVector& y);
double log_exponential_weight(const ActivationVector& a, const LabelVector& y);

/// Z(E(.|a)) = prod_j (1 + e^{a_j}).
double partition_function(const ActivationVector& a);
double log_partition_function(const ActivationVector& a);

/// P(y|a) = prod_j s(a_j)^{y_j} (1 - s(a_j))^{1 - y_j}.
double probability(const ActivationVector& a, const LabelVector& y);
double log_probability(const ActivationVector& a, const LabelVector& y);

/// Keeps the weight of models of f and zeroes every other state.
DenseDistribution semantic_project(const DenseDistribution& d, const Formula& f);

/// P(f|a) by enumeration.
double formula_probability_bruteforce(const ActivationVector& a, const Formula& f);
double log_formula_probability_bruteforce(const ActivationVector& a, const Formula& f);

/// P(.|a, f). Throws UnsatisfiableKnowledge when f has no model.
DenseDistribution conditioned_distribution_bruteforce(const ActivationVector& a, const Formula& f);

/// Most probable state; ties go to the lexicographically smallest vector.
/// Throws NumericError on the null distribution.
LabelVector mode_bruteforce(const DenseDistribution& d);

/// P(Y_j = 1) under the normalized distribution.
std::vector<double> marginals_bruteforce(const DenseDistribution& d);

void check_same_size(std::size_t expected, std::size_t got, const char* what);

}  // namespace semcond
