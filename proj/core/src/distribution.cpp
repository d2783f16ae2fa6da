#include "semcond/distribution.hpp"

#include <cmath>
#include <string>

#include "semcond/errors.hpp"
#include "semcond/numeric.hpp"

namespace semcond {

ActivationVector::ActivationVector(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j])) {
      throw InputError("activation " + std::to_string(j + 1) + " is not finite");
    }
  }
}

ActivationVector::ActivationVector(std::initializer_list<double> values)
    : ActivationVector(std::vector<double>(values)) {}

void check_same_size(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InputError(std::string(what) + " has length " + std::to_string(got) + ", expected " +
                     std::to_string(expected));
  }
}

DenseDistribution::DenseDistribution(Signature sig, std::vector<double> log_weights)
    : sig_(sig), log_weights_(std::move(log_weights)) {
  check_enumerable(sig_.size());
  if (log_weights_.size() != (std::size_t{1} << sig_.size())) {
    throw InputError("dense distribution needs one weight per state");
  }
  for (double w : log_weights_) {
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
      throw NumericError("dense distribution log-weight is NaN or +inf");
    }
  }
}

DenseDistribution DenseDistribution::exponential(const ActivationVector& a) {
  const std::size_t k = a.size();
  const Signature sig(k);
  check_enumerable(k);
  const std::uint64_t states = std::uint64_t{1} << k;
  std::vector<double> lw(states);
  for (std::uint64_t i = 0; i < states; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if ((i >> (k - 1 - j)) & 1u) s += a[j];
    }
    lw[i] = s;
  }
  return {sig, std::move(lw)};
}

double DenseDistribution::weight(const LabelVector& y) const {
  check_same_size(sig_.size(), y.size(), "label vector");
  return std::exp(log_weights_[y.index()]);
}

bool DenseDistribution::is_null() const {
  for (double w : log_weights_) {
    if (w != kNegInf) return false;
  }
  return true;
}

double DenseDistribution::log_partition() const { return log_sum_exp(log_weights_); }

DenseDistribution DenseDistribution::normalized() const {
  if (is_null()) throw NumericError("cannot normalize the null distribution");
  const double lz = log_partition();
  std::vector<double> lw(log_weights_);
  for (double& w : lw) {
    if (w != kNegInf) w -= lz;
  }
  return {sig_, std::move(lw)};
}

double log_exponential_weight(const ActivationVector& a, const LabelVector& y) {
  check_same_size(a.size(), y.size(), "label vector");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (y[j]) s += a[j];
  }
  return s;
}

double exponential_weight(const ActivationVector& a, const LabelVector& y) {
  return std::exp(log_exponential_weight(a, y));
}

double log_partition_function(const ActivationVector& a) {
  double s = 0.0;
  for (double x : a.values()) s += softplus(x);
  return s;
}

double partition_function(const ActivationVector& a) { return std::exp(log_partition_function(a)); }

double log_probability(const ActivationVector& a, const LabelVector& y) {
  check_same_size(a.size(), y.size(), "label vector");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += y[j] ? log_sigmoid(a[j]) : log_sigmoid(-a[j]);
  return s;
}

double probability(const ActivationVector& a, const LabelVector& y) { return std::exp(log_probability(a, y)); }

DenseDistribution semantic_project(const DenseDistribution& d, const Formula& f) {
  if (!(d.signature() == f.signature())) throw InputError("projection across different signatures");
  std::vector<double> lw(d.log_weights().begin(), d.log_weights().end());
  for (std::uint64_t i = 0; i < lw.size(); ++i) {
    if (!evaluate_index(f, i)) lw[i] = kNegInf;
  }
  return {d.signature(), std::move(lw)};
}

double log_formula_probability_bruteforce(const ActivationVector& a, const Formula& f) {
  check_same_size(f.signature().size(), a.size(), "activation vector");
  const auto projected = semantic_project(DenseDistribution::exponential(a), f);
  return projected.log_partition() - log_partition_function(a);
}

double formula_probability_bruteforce(const ActivationVector& a, const Formula& f) {
  return std::exp(log_formula_probability_bruteforce(a, f));
}

DenseDistribution conditioned_distribution_bruteforce(const ActivationVector& a, const Formula& f) {
  check_same_size(f.signature().size(), a.size(), "activation vector");
  const auto projected = semantic_project(DenseDistribution::exponential(a), f);
  if (projected.is_null()) throw UnsatisfiableKnowledge("cannot condition on an unsatisfiable formula");
  return projected.normalized();
}

LabelVector mode_bruteforce(const DenseDistribution& d) {
  if (d.is_null()) throw NumericError("the null distribution has no mode");
  std::uint64_t best = 0;
  double best_w = kNegInf;
  for (std::uint64_t i = 0; i < d.state_count(); ++i) {
    // Strict comparison keeps the smallest index among ties.
    if (d.log_weight(i) > best_w) {
      best_w = d.log_weight(i);
      best = i;
    }
  }
  return LabelVector::from_index(d.signature().size(), best);
}

std::vector<double> marginals_bruteforce(const DenseDistribution& d) {
  const auto p = d.normalized();
  const std::size_t k = d.signature().size();
  std::vector<double> mu(k, 0.0);
  for (std::uint64_t i = 0; i < p.state_count(); ++i) {
    const double w = std::exp(p.log_weight(i));
    for (std::size_t j = 0; j < k; ++j) {
      if ((i >> (k - 1 - j)) & 1u) mu[j] += w;
    }
  }
  return mu;
}

}  // namespace semcond
