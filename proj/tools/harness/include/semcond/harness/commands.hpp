#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "semcond/harness/io.hpp"

namespace semcond::harness {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool percent = false;
};

// Each command writes its payload to `out` (stdout for an empty path) and
// human-readable notes to `log`. Errors propagate as exceptions.

void cmd_compile(const std::string& knowledge_file, const std::string& out_file, const CompileOptions& opts,
                 std::ostream& log);

void cmd_infer(const std::string& compiled_file, const std::string& activations_csv, const std::string& mode,
               const std::string& out_file, const GlobalOptions& g);

void cmd_loss(const std::string& compiled_file, const std::string& activations_csv, const std::string& labels_csv,
              const std::string& technique, double lambda, const std::string& out_file, const GlobalOptions& g);

void cmd_eval(const std::string& compiled_file, const std::string& activations_csv, const std::string& labels_csv,
              const std::string& out_file, const GlobalOptions& g);

void cmd_toytrain(const std::string& knowledge_file, const std::string& config_file,
                  const std::optional<std::vector<double>>& lambda_sweep, const std::string& out_file,
                  const GlobalOptions& g, std::ostream& log);

void cmd_fit(const std::string& points_csv, const std::string& models_json, const std::string& baseline,
             const std::string& out_file, const std::string& curves_csv, const GlobalOptions& g);

/// Parses "a,b,c" into numbers.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace semcond::harness
