#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semcond/bit_matrix.hpp"

namespace semcond {

using Edge = std::pair<std::size_t, std::size_t>;
using NamedEdge = std::pair<std::string, std::string>;

/// Hierarchy-and-exclusion graph over label nodes. Node i stands for label
/// variable Y_{i+1}. Hierarchy edges are (parent, child); exclusion edges are
/// stored with first < second. Both lists are sorted and duplicate-free.
///
/// Invariants (checked by the factories): the hierarchy is acyclic, there are
/// no self-loops, and no pair is both a hierarchy and an exclusion edge.
class HexGraph {
 public:
  HexGraph() = default;

  /// Builds a validated graph from 0-based node indices. Names default to
  /// y1..yn when empty.
  static HexGraph from_edges(std::size_t n, std::vector<Edge> hierarchy, std::vector<Edge> exclusion,
                             std::vector<std::string> names = {});

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<Edge>& hierarchy() const noexcept { return hierarchy_; }
  const std::vector<Edge>& exclusion() const noexcept { return exclusion_; }

  /// Index of the node with the given name, or size() if absent.
  std::size_t find(std::string_view name) const;

  std::vector<std::vector<std::size_t>> parents() const;
  std::vector<std::vector<std::size_t>> children() const;

  /// Nodes in a topological order of the hierarchy (parents first, ties by
  /// lowest index).
  std::vector<std::size_t> topological_order() const;

  /// closure.test(i, j) iff i is a strict ancestor of j.
  BitMatrix ancestor_closure() const;

  /// Canonical JSON text (nodes, hierarchy, exclusion by name).
  std::string to_json() const;

  friend bool operator==(const HexGraph&, const HexGraph&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Edge> hierarchy_;
  std::vector<Edge> exclusion_;
};

/// Validates names and edges given by node name. Throws InputError on
/// duplicate nodes or unknown endpoints and CycleError on hierarchy cycles.
HexGraph ingest_hex(std::vector<std::string> nodes, const std::vector<NamedEdge>& hierarchy,
                    const std::vector<NamedEdge>& exclusion);

/// Reads `{"nodes":[...],"hierarchy":[[p,c],...],"exclusion":[[a,b],...]}`.
HexGraph parse_hex_json(std::string_view text);
HexGraph load_hex_file(const std::string& path);

/// Adds an exclusion between every pair of nodes whose descendant-or-self
/// sets are disjoint. Existing exclusions are kept.
HexGraph derive_exclusions(const HexGraph& h);

/// Repeatedly removes nodes with exactly one parent and exactly one child,
/// linking the parent to the child. Exclusions of a removed node move to its
/// child, so the model set projected on the retained nodes is unchanged; a
/// node whose exclusions cannot move without clashing with a hierarchy edge
/// is kept.
HexGraph prune_pass_through(const HexGraph& h);

/// Replaces the hierarchy by its transitive reduction.
HexGraph sparsify_hierarchy(const HexGraph& h);

}  // namespace semcond
