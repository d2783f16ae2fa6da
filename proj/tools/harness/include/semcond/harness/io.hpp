#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semcond/hex_graph.hpp"
#include "semcond/knowledge.hpp"
#include "semcond/scaling.hpp"

namespace semcond::harness {

/// A numeric CSV with header `id,<p>1,...,<p>k`.
struct Table {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::size_t cols = 0;
};

/// Parses a table whose value columns are named prefix1..prefixk. Errors
/// carry 1-based line numbers.
Table parse_table(const std::string& text, char prefix, const std::string& origin);
Table read_table(const std::string& path, char prefix);

/// Activations with labels joined on id, in activation order.
struct LabeledBatch {
  std::vector<std::string> ids;
  std::vector<ActivationVector> activations;
  std::vector<LabelVector> labels;
};

std::vector<ActivationVector> to_activations(const Table& t);
LabeledBatch join_labels(const Table& activations, const Table& labels);

/// Throws InconsistentLabel naming every offending row when a label does
/// not entail the knowledge.
void check_consistent(const Knowledge& kappa, const LabeledBatch& batch);

std::string read_file(const std::string& path);
/// Writes to path, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& content);

/// A knowledge source: HEX JSON (`nodes`), formula JSON (`k`, `formula`) or
/// a compiled container (`format`).
struct KnowledgeSource {
  std::optional<HexGraph> graph;  // set for HEX sources after the requested transforms
  Knowledge knowledge;
};

struct CompileOptions {
  bool derive_exclusions = false;
  bool prune_pass_through = false;
};

KnowledgeSource load_knowledge(const std::string& path, const CompileOptions& opts = {});

/// Rows `technique,m,accuracy`; returns one point list per technique in
/// first-appearance order.
std::vector<std::pair<std::string, std::vector<AccuracyPoint>>> read_points(const std::string& path);

}  // namespace semcond::harness
