#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "semcond/bit_matrix.hpp"
#include "semcond/hex_graph.hpp"
#include "semcond/logic.hpp"

namespace semcond {

/// Largest clique the compiler accepts.
inline constexpr std::size_t kMaxCliqueSize = 22;

/// A junction-tree node. `states` lists the assignments of `vars` that are
/// consistent with the knowledge restricted to the clique; bit i of a state is
/// the value of vars[i].
struct Clique {
  std::vector<std::size_t> vars;       // sorted node indices
  std::vector<std::uint32_t> states;   // sorted, nonempty
  std::vector<std::size_t> owned;      // positions in vars whose activation this clique scores
  std::size_t parent = 0;              // meaningless for the root
  std::vector<std::size_t> separator;  // vars shared with the parent, sorted
  std::vector<std::size_t> children;   // sorted clique indices
};

/// Precomputed aggregation maps between a clique and its parent separator.
struct SeparatorMap {
  std::size_t count = 0;                     // distinct separator assignments seen from the child
  std::vector<std::uint32_t> child_to_sep;   // per child state
  std::vector<std::int32_t> parent_to_sep;   // per parent state, -1 when the child has no match
};

struct JunctionTree {
  std::vector<Clique> cliques;
  std::size_t root = 0;
  /// Pre-order from the root; the upward pass runs it backwards.
  std::vector<std::size_t> schedule;
  /// Indexed by clique, empty for the root.
  std::vector<SeparatorMap> separator_maps;
};

/// HEX knowledge compiled for linear-time inference.
class CompiledKnowledge {
 public:
  const Signature& signature() const noexcept { return sig_; }
  std::size_t num_labels() const noexcept { return sig_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const JunctionTree& tree() const noexcept { return tree_; }

  /// dense_hierarchy().test(i, j) iff node i is an ancestor of node j.
  const BitMatrix& dense_hierarchy() const noexcept { return dense_hierarchy_; }
  /// dense_exclusion().test(i, j) iff Y_i and Y_j can never both hold; a set
  /// diagonal bit means the node is always false.
  const BitMatrix& dense_exclusion() const noexcept { return dense_exclusion_; }
  const std::vector<Edge>& sparse_hierarchy() const noexcept { return sparse_hierarchy_; }
  const std::vector<Edge>& sparse_exclusion() const noexcept { return sparse_exclusion_; }
  const std::vector<std::size_t>& forced_false() const noexcept { return forced_false_; }

  /// 64-bit FNV-1a of the source graph's canonical JSON, in hex.
  const std::string& source_hash() const noexcept { return source_hash_; }

  /// True iff every clique restriction of y is a valid clique state, i.e. y
  /// is a model of the compiled knowledge.
  bool accepts(const LabelVector& y) const;

  std::size_t max_clique_size() const;
  std::size_t total_states() const;

  /// Versioned JSON container. Byte-identical for identical sources.
  std::string serialize() const;
  static CompiledKnowledge deserialize(const std::string& text);

  friend CompiledKnowledge compile(const HexGraph& h);

 private:
  CompiledKnowledge() : sig_(1) {}
  void build_separator_maps();

  Signature sig_;
  std::vector<std::string> names_;
  BitMatrix dense_hierarchy_;
  BitMatrix dense_exclusion_;
  std::vector<Edge> sparse_hierarchy_;
  std::vector<Edge> sparse_exclusion_;
  std::vector<std::size_t> forced_false_;
  std::string source_hash_;
  JunctionTree tree_;
};

/// Compiles a HEX graph: dense closure, sparsification, min-fill
/// triangulation (lowest index breaks ties), a maximum-weight spanning
/// junction tree and per-clique valid-state tables. Throws TreewidthExceeded
/// when a clique would exceed kMaxCliqueSize variables.
CompiledKnowledge compile(const HexGraph& h);

inline constexpr const char* kCompiledFormat = "semcond-compiled";
inline constexpr int kCompiledVersion = 1;

}  // namespace semcond
