#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "semcond/hex_graph.hpp"

namespace semcond {

/// Largest label count for which exact queries enumerate all 2^k states.
inline constexpr std::size_t kEnumerationCap = 20;

/// A fixed set of k label variables Y_1..Y_k.
class Signature {
 public:
  explicit Signature(std::size_t k);

  std::size_t size() const noexcept { return k_; }
  bool contains(std::size_t var) const noexcept { return var >= 1 && var <= k_; }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::size_t k_;
};

/// A binary assignment y in {0,1}^k. Positions are 0-based here; position j
/// holds the value of variable Y_{j+1}.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::size_t k) : bits_(k, 0) {}
  explicit LabelVector(std::vector<std::uint8_t> bits);
  LabelVector(std::initializer_list<int> bits);

  /// State index in big-endian order: Y_1 is the most significant bit, so
  /// numeric order on indices is lexicographic order on label vectors.
  static LabelVector from_index(std::size_t k, std::uint64_t index);
  std::uint64_t index() const;

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t pos) const { return bits_[pos] != 0; }
  void set(std::size_t pos, bool value) { bits_[pos] = value ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  /// Comma-separated bits, e.g. "1,0,1".
  std::string to_string() const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;
  friend auto operator<=>(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

std::ostream& operator<<(std::ostream& os, const LabelVector& y);

/// One-hot encoding of label j (1-based) among k labels.
LabelVector one_hot(std::size_t k, std::size_t j);

/// Immutable propositional formula over a signature. And/Or nodes are kept
/// n-ary and flattened: no And has an And child, no Or has an Or child, and
/// each has at least two children.
class Formula {
 public:
  enum class Kind { kTrue, kFalse, kVar, kNot, kAnd, kOr };

  struct Node {
    Kind kind;
    std::size_t var = 0;  // 1-based, only for kVar
    std::vector<std::shared_ptr<const Node>> children;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static Formula top(Signature sig);
  static Formula bottom(Signature sig);
  static Formula var(Signature sig, std::size_t index);
  static Formula negate(const Formula& f);
  /// A single conjunct is returned unchanged; an empty list throws (use top).
  static Formula conj(const std::vector<Formula>& parts);
  /// A single disjunct is returned unchanged; an empty list throws (use bottom).
  static Formula disj(const std::vector<Formula>& parts);

  const Signature& signature() const noexcept { return sig_; }
  const Node& root() const noexcept { return *root_; }
  Kind kind() const noexcept { return root_->kind; }

  /// Text form accepted by parse_formula.
  std::string to_string() const;

  /// Number of AST nodes.
  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  Formula(Signature sig, NodePtr root) : sig_(sig), root_(std::move(root)) {}
  static Formula nary(Kind kind, const std::vector<Formula>& parts);

  Signature sig_;
  NodePtr root_;
};

std::ostream& operator<<(std::ostream& os, const Formula& f);

/// Parses `formula := or ; or := and ('|' and)* ; and := unary ('&' unary)* ;
/// unary := '~' unary | atom ; atom := 'true' | 'false' | 'y' DIGITS | '(' formula ')'`.
/// Throws ParseError on syntax errors and on variables outside [1, k].
Formula parse_formula(std::string_view text, Signature sig);

bool evaluate(const Formula& f, const LabelVector& y);

/// y |= f.
inline bool entails(const LabelVector& y, const Formula& f) { return evaluate(f, y); }

/// Evaluates f on the state with the given big-endian index.
bool evaluate_index(const Formula& f, std::uint64_t index);

// The queries below enumerate all 2^k states and throw CapExceeded when
// k > kEnumerationCap.

bool is_satisfiable(const Formula& f);
bool equivalent(const Formula& f, const Formula& g);
std::uint64_t model_count(const Formula& f);
/// Indices of all models in increasing (lexicographic) order.
std::vector<std::uint64_t> model_indices(const Formula& f);

/// One-and-only-one constraint over k variables.
Formula exactly_one(std::size_t k);

/// Background knowledge of a HEX graph: one clause (Y_p | ~Y_c) per hierarchy
/// edge and one clause (~Y_a | ~Y_b) per exclusion edge. A graph without edges
/// yields true.
Formula hex_to_formula(const HexGraph& h);

void check_enumerable(std::size_t k);

}  // namespace semcond
