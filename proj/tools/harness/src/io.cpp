#include "semcond/harness/io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "semcond/compiled_knowledge.hpp"
#include "semcond/errors.hpp"

namespace semcond::harness {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty()) throw InputError("not a number '" + cell + "' " + where);
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

Table parse_table(const std::string& text, char prefix, const std::string& origin) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw InputError(origin + " is empty");
  const auto header = split(lines[0]);
  if (header.size() < 2 || header[0] != "id") {
    throw InputError(origin + ": header must start with id followed by " + prefix + "1.." + prefix + "k");
  }
  Table t;
  t.cols = header.size() - 1;
  for (std::size_t j = 1; j < header.size(); ++j) {
    const std::string want = std::string(1, prefix) + std::to_string(j);
    if (header[j] != want) throw InputError(origin + ": header column " + std::to_string(j + 1) + " must be " + want);
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "in " + origin + " line " + std::to_string(i + 1);
    const auto cells = split(lines[i]);
    if (cells.size() != header.size()) {
      throw InputError("expected " + std::to_string(header.size()) + " columns, found " +
                       std::to_string(cells.size()) + " " + where);
    }
    if (!seen.insert(cells[0]).second) throw InputError("duplicate id '" + cells[0] + "' " + where);
    std::vector<double> row(t.cols);
    for (std::size_t j = 0; j < t.cols; ++j) row[j] = parse_number(cells[j + 1], where);
    t.ids.push_back(cells[0]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_table(const std::string& path, char prefix) { return parse_table(read_file(path), prefix, path); }

std::vector<ActivationVector> to_activations(const Table& t) {
  std::vector<ActivationVector> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    try {
      out.emplace_back(t.rows[i]);
    } catch (const InputError& e) {
      throw InputError(std::string(e.what()) + " in row '" + t.ids[i] + "'");
    }
  }
  return out;
}

LabeledBatch join_labels(const Table& activations, const Table& labels) {
  if (activations.cols != labels.cols) {
    throw InputError("activations have " + std::to_string(activations.cols) + " columns but labels have " +
                     std::to_string(labels.cols));
  }
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < labels.ids.size(); ++i) by_id.emplace(labels.ids[i], i);
  if (labels.ids.size() != activations.ids.size()) {
    throw InputError("activation and label files have different row counts");
  }
  LabeledBatch batch;
  batch.ids = activations.ids;
  batch.activations = to_activations(activations);
  for (const auto& id : activations.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw InputError("no label row for id '" + id + "'");
    std::vector<std::uint8_t> bits;
    for (double v : labels.rows[it->second]) {
      if (v != 0.0 && v != 1.0) throw InputError("label values must be 0 or 1 in row '" + id + "'");
      bits.push_back(v == 1.0 ? 1 : 0);
    }
    batch.labels.emplace_back(std::move(bits));
  }
  return batch;
}

void check_consistent(const Knowledge& kappa, const LabeledBatch& batch) {
  std::string bad;
  std::size_t count = 0;
  for (std::size_t i = 0; i < batch.labels.size(); ++i) {
    if (kappa.entails(batch.labels[i])) continue;
    if (count < 20) bad += (count ? ", " : "") + std::to_string(i + 1) + " (id '" + batch.ids[i] + "')";
    ++count;
  }
  if (count > 0) {
    throw InconsistentLabel(std::to_string(count) + " label rows do not entail the knowledge: rows " + bad +
                            (count > 20 ? ", ..." : ""));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
}

KnowledgeSource load_knowledge(const std::string& path, const CompileOptions& opts) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw InputError("'" + path + "' must hold a JSON object");
  if (j.contains("format")) return {std::nullopt, Knowledge::deserialize(text)};
  if (j.contains("nodes")) {
    HexGraph g = parse_hex_json(text);
    if (opts.prune_pass_through) g = prune_pass_through(g);
    if (opts.derive_exclusions) g = derive_exclusions(g);
    Knowledge k(compile(g));
    return {std::move(g), std::move(k)};
  }
  if (j.contains("formula")) {
    try {
      const Signature sig(j.at("k").get<std::size_t>());
      return {std::nullopt, Knowledge(parse_formula(j.at("formula").get<std::string>(), sig))};
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed formula file '" + path + "': " + e.what());
    }
  }
  throw InputError("'" + path + "' is neither a HEX graph, a formula nor a compiled file");
}

std::vector<std::pair<std::string, std::vector<AccuracyPoint>>> read_points(const std::string& path) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty() || lines[0] != "technique,m,accuracy") {
    throw InputError(path + ": header must be technique,m,accuracy");
  }
  std::vector<std::pair<std::string, std::vector<AccuracyPoint>>> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "in " + path + " line " + std::to_string(i + 1);
    const auto cells = split(lines[i]);
    if (cells.size() != 3) throw InputError("expected 3 columns " + where);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == cells[0]; });
    if (it == out.end()) {
      out.emplace_back(cells[0], std::vector<AccuracyPoint>{});
      it = std::prev(out.end());
    }
    it->second.push_back({parse_number(cells[1], where), parse_number(cells[2], where)});
  }
  return out;
}

}  // namespace semcond::harness
