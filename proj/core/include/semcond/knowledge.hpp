#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "semcond/compiled_knowledge.hpp"
#include "semcond/inference.hpp"
#include "semcond/logic.hpp"

namespace semcond {

/// Background knowledge ready for exact queries: either a compiled HEX graph
/// or an arbitrary formula answered by enumeration (k <= kEnumerationCap).
class Knowledge {
 public:
  explicit Knowledge(CompiledKnowledge ck);
  /// Throws CapExceeded above the enumeration cap and UnsatisfiableKnowledge
  /// when the formula has no model.
  explicit Knowledge(Formula f);

  bool is_compiled() const noexcept { return std::holds_alternative<CompiledKnowledge>(impl_); }
  const CompiledKnowledge* compiled() const noexcept { return std::get_if<CompiledKnowledge>(&impl_); }
  const Formula* formula() const noexcept;

  std::size_t num_labels() const noexcept { return k_; }

  /// y |= kappa.
  bool entails(const LabelVector& y) const;

  double log_partition(const ActivationVector& a) const;
  double log_pqe(const ActivationVector& a) const;
  std::vector<double> marginals(const ActivationVector& a) const;
  LabelVector map_state(const ActivationVector& a) const;
  InferenceResult infer(const ActivationVector& a) const;

  /// Versioned JSON; compiled knowledge keeps its own container layout.
  std::string serialize() const;
  static Knowledge deserialize(const std::string& text);

 private:
  struct Enumerated {
    Formula formula;
    std::vector<std::uint64_t> models;  // increasing
  };

  std::vector<double> model_scores(const ActivationVector& a) const;

  std::size_t k_;
  std::variant<CompiledKnowledge, Enumerated> impl_;
};

/// Trivial knowledge over k labels.
Knowledge tautology(std::size_t k);

}  // namespace semcond
