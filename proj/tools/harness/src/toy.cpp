#include "semcond/harness/toy.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "semcond/errors.hpp"
#include "semcond/harness/parallel.hpp"
#include "semcond/inference.hpp"
#include "semcond/loss.hpp"

namespace semcond::harness {

namespace {

std::vector<LabelVector> enumerate_models(const Knowledge& kappa) {
  const std::size_t k = kappa.num_labels();
  check_enumerable(k);
  std::vector<LabelVector> models;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) {
    auto y = LabelVector::from_index(k, i);
    if (kappa.entails(y)) models.push_back(std::move(y));
  }
  return models;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

ToyData sample(std::size_t n, const std::vector<std::vector<double>>& protos, const std::vector<LabelVector>& tags,
               double sigma, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, protos.size() - 1);
  std::normal_distribution<double> noise(0.0, sigma);
  ToyData data;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = protos[pick(rng)];
    for (double& v : x) v += noise(rng);
    std::size_t nearest = 0;
    for (std::size_t p = 1; p < protos.size(); ++p) {
      if (sq_dist(x, protos[p]) < sq_dist(x, protos[nearest])) nearest = p;
    }
    data.features.push_back(std::move(x));
    data.labels.push_back(tags[nearest]);
  }
  return data;
}

}  // namespace

ToyConfig parse_toy_config(const std::string& text) {
  ToyConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw InputError("toy config must be a JSON object");
    cfg.n = j.value("n", cfg.n);
    cfg.n_test = j.value("n_test", cfg.n_test);
    cfg.d = j.value("d", cfg.d);
    cfg.prototypes = j.value("prototypes", cfg.prototypes);
    cfg.sigma = j.value("sigma", cfg.sigma);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.lambdas = j.value("lambdas", cfg.lambdas);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed toy config: ") + e.what());
  }
  if (cfg.n == 0 || cfg.d == 0 || cfg.prototypes == 0) throw InputError("toy config needs n, d, prototypes > 0");
  if (!(cfg.sigma >= 0.0) || !(cfg.learning_rate > 0.0)) throw InputError("toy config needs sigma >= 0 and lr > 0");
  if (cfg.lambdas.empty()) throw InputError("toy config needs at least one lambda");
  return cfg;
}

ToyDataset generate_toy_data(const Knowledge& kappa, const ToyConfig& cfg) {
  const auto models = enumerate_models(kappa);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, models.size() - 1);
  std::vector<std::vector<double>> protos(cfg.prototypes, std::vector<double>(cfg.d));
  std::vector<LabelVector> tags;
  for (auto& p : protos) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : p) {
        v = gauss(rng);
        norm += v * v;
      }
    } while (norm == 0.0);
    for (double& v : p) v /= std::sqrt(norm);
    tags.push_back(models[pick(rng)]);
  }
  ToyDataset ds;
  ds.train = sample(cfg.n, protos, tags, cfg.sigma, rng);
  ds.test = sample(cfg.n_test, protos, tags, cfg.sigma, rng);
  return ds;
}

std::vector<double> ToyModel::scores(const std::vector<double>& x) const {
  std::vector<double> a(bias);
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) a[j] += weights[j][i] * x[i];
  }
  return a;
}

std::pair<double, double> evaluate_toy(const Knowledge& kappa, const ToyModel& model, const ToyData& data,
                                       std::size_t threads) {
  const std::size_t n = data.features.size();
  if (n == 0) return {0.0, 0.0};
  std::vector<std::uint8_t> hit_imc(n, 0), hit_sci(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const ActivationVector a(model.scores(data.features[i]));
    hit_imc[i] = predict_imc(a) == data.labels[i];
    hit_sci[i] = kappa.map_state(a) == data.labels[i];
  });
  double imc = 0.0, sci = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    imc += hit_imc[i];
    sci += hit_sci[i];
  }
  return {imc / static_cast<double>(n), sci / static_cast<double>(n)};
}

ToyRun train_toy(const Knowledge& kappa, const ToyDataset& data, const ToyConfig& cfg, double lambda,
                 std::size_t threads) {
  const std::size_t k = kappa.num_labels();
  const std::size_t d = cfg.d;
  const std::size_t n = data.train.features.size();
  ToyRun run;
  run.lambda = lambda;
  run.model.weights.assign(k, std::vector<double>(d, 0.0));
  run.model.bias.assign(k, 0.0);

  std::vector<LossValue> per_sample(n);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    parallel_for(n, threads, [&](std::size_t i) {
      const ActivationVector a(run.model.scores(data.train.features[i]));
      per_sample[i] = lambda == -1.0 ? loss_sc(kappa, a, data.train.labels[i])
                                     : loss_sr(kappa, a, data.train.labels[i], lambda);
    });
    double loss = 0.0;
    std::vector<std::vector<double>> gw(k, std::vector<double>(d, 0.0));
    std::vector<double> gb(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      loss += per_sample[i].value;
      const auto& x = data.train.features[i];
      for (std::size_t j = 0; j < k; ++j) {
        const double g = per_sample[i].gradient[j];
        gb[j] += g;
        for (std::size_t t = 0; t < d; ++t) gw[j][t] += g * x[t];
      }
    }
    loss /= static_cast<double>(n);
    if (!std::isfinite(loss)) {
      throw NumericError("training loss became non-finite at epoch " + std::to_string(epoch) + " (lambda " +
                         std::to_string(lambda) + ", learning rate " + std::to_string(cfg.learning_rate) + ")");
    }
    const double step = cfg.learning_rate / static_cast<double>(n);
    for (std::size_t j = 0; j < k; ++j) {
      run.model.bias[j] -= step * gb[j];
      for (std::size_t t = 0; t < d; ++t) run.model.weights[j][t] -= step * gw[j][t];
    }
    const auto [imc, sci] = evaluate_toy(kappa, run.model, data.test, threads);
    run.epochs.push_back({epoch, loss, imc, sci});
  }
  if (run.epochs.empty()) {
    std::tie(run.acc_imc, run.acc_sci) = evaluate_toy(kappa, run.model, data.test, threads);
  } else {
    run.acc_imc = run.epochs.back().acc_imc;
    run.acc_sci = run.epochs.back().acc_sci;
  }
  return run;
}

std::string technique_name(double lambda) {
  if (lambda == -1.0) return "sc";
  if (lambda == 0.0) return "imc";
  return "sr";
}

}  // namespace semcond::harness
