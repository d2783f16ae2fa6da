#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semcond/knowledge.hpp"

namespace semcond::harness {

struct ToyConfig {
  std::size_t n = 2000;       // training samples
  std::size_t n_test = 500;   // held-out samples
  std::size_t d = 10;         // feature dimension
  std::size_t prototypes = 16;
  double sigma = 0.3;         // feature noise
  std::size_t epochs = 200;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
  std::vector<double> lambdas{-1.0, 0.0, 0.1, 0.5, 1.0};
};

/// Reads a JSON object with any subset of the ToyConfig fields.
ToyConfig parse_toy_config(const std::string& text);

struct ToyData {
  std::vector<std::vector<double>> features;  // n x d
  std::vector<LabelVector> labels;            // every label entails kappa
};

struct ToyDataset {
  ToyData train;
  ToyData test;
};

/// Prototypes on the unit sphere, each carrying a model of kappa; a sample is
/// a noisy prototype labelled by its nearest prototype.
ToyDataset generate_toy_data(const Knowledge& kappa, const ToyConfig& cfg);

/// Linear scores a = W x + bias.
struct ToyModel {
  std::vector<std::vector<double>> weights;  // k x d
  std::vector<double> bias;                  // k
  std::vector<double> scores(const std::vector<double>& x) const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;     // mean training loss before the update
  double acc_imc = 0.0;  // exact accuracy on the test split
  double acc_sci = 0.0;
};

struct ToyRun {
  double lambda = 0.0;
  std::vector<EpochStats> epochs;
  double acc_imc = 0.0;
  double acc_sci = 0.0;
  ToyModel model;
};

/// Exact accuracy under I_imc and under conditioned MAP.
std::pair<double, double> evaluate_toy(const Knowledge& kappa, const ToyModel& model, const ToyData& data,
                                       std::size_t threads = 1);

/// Full-batch gradient descent on L_r(lambda); lambda = -1 is semantic
/// conditioning. Throws NumericError when the loss stops being finite.
ToyRun train_toy(const Knowledge& kappa, const ToyDataset& data, const ToyConfig& cfg, double lambda,
                 std::size_t threads = 1);

/// "sc" for lambda = -1, "imc" for 0, "sr" otherwise.
std::string technique_name(double lambda);

}  // namespace semcond::harness
