// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "semcond/distribution.hpp"
#include "semcond/harness/io.hpp"
#include "semcond/harness/toy.hpp"
#include "semcond/inference.hpp"
#include "semcond/knowledge.hpp"
#include "semcond/loss.hpp"
#include "semcond/scaling.hpp"
#include "test_support.hpp"

namespace {

using namespace semcond;
using testing::Rng;
namespace oracle = testing::oracle;
using Clock = std::chrono::steady_clock;

// Tolerances.
constexpr double kOracleRelTol = 1e-9;
constexpr double kLossTol = 1e-9;
constexpr double kPartitionRelTol = 1e-9;
constexpr double kGradStep = 1e-5;
constexpr double kGradTol = 1e-5;
constexpr double kMinR2 = 0.95;
constexpr double kDepth1000BudgetMs = 50.0;
constexpr double kOracleBudgetS = 60.0;
constexpr double kFitRelTol = 0.01;
constexpr double kGainTol = 1e-9;
constexpr double kRoundTripTol = 1e-9;
constexpr double kToyGapPp = 1.0;
constexpr double kStressMagnitude = 1e4;

constexpr int kPropositionCases = 1000;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("criterion %d %-24s %s  %s\n", id, name.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::uint64_t> models_of(const Knowledge& kappa) {
  std::vector<std::uint64_t> out;
  const std::size_t k = kappa.num_labels();
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) {
    if (kappa.entails(LabelVector::from_index(k, i))) out.push_back(i);
  }
  return out;
}

// 1. Compiled inference against brute-force enumeration.
void oracle_equivalence() {
  Rng rng(1001);
  const auto t0 = Clock::now();
  double worst = 0.0;
  int map_mismatch = 0, cases = 0;
  for (int g = 0; g < 100; ++g) {
    const std::size_t n = 1 + g % 14;
    const HexGraph h = g % 2 ? testing::random_hex(rng, n) : derive_exclusions(testing::random_taxonomy(rng, n));
    const CompiledKnowledge ck = compile(h);
    const Formula f = hex_to_formula(h);
    const auto models = oracle::hex_models(h);
    for (int r = 0; r < 10; ++r, ++cases) {
      const auto a = testing::random_activations(rng, n, 3.0);
      const double want = std::exp(oracle::log_pqe(models, a));
      const double got = std::exp(pqe(ck, a));
      worst = std::max(worst, std::abs(got - want) / want);
      const LabelVector mode = mode_bruteforce(conditioned_distribution_bruteforce(a, f));
      if (map_state(ck, a) != mode) ++map_mismatch;
    }
  }
  const double secs = seconds_since(t0);
  report(1, "oracle-equivalence", worst <= kOracleRelTol && map_mismatch == 0 && secs < kOracleBudgetS,
         fmt("%d cases, max rel err %.2e (tol %.0e), map mismatches %d, %.2f s (budget %.0f s)", cases, worst,
             kOracleRelTol, map_mismatch, secs, kOracleBudgetS));
}

// 2. Propositions, each over kPropositionCases random cases.
void proposition_suite() {
  Rng rng(1002);
  int consistency_fail = 0, guarantee_fail = 0, guarantee_hits = 0, invariance_fail = 0;
  int top_fail = 0, categorical_fail = 0, sr_fail = 0, partition_fail = 0;

  for (int t = 0; t < kPropositionCases; ++t) {
    const std::size_t n = 2 + t % 12;
    const HexGraph h = t % 2 ? testing::random_taxonomy(rng, n) : testing::random_hex(rng, n);
    const CompiledKnowledge ck = compile(h);
    const auto models = oracle::hex_models(h);
    const auto y = LabelVector::from_index(n, models[rng() % models.size()]);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = (y[j] ? 1.5 : -1.5) + noise(rng);
    const ActivationVector a(v);

    const LabelVector sci = predict_sci(ck, a);
    if (!oracle::hex_accepts(h, sci.index())) ++consistency_fail;
    if (predict_imc(a) == y) {
      ++guarantee_hits;
      if (sci != y) ++guarantee_fail;
    }

    const CompiledKnowledge sparse = compile(sparsify_hierarchy(h));
    const auto b = testing::random_activations(rng, n);
    bool same = std::abs(pqe(ck, b) - pqe(sparse, b)) <= kOracleRelTol && map_state(ck, b) == map_state(sparse, b);
    const auto mu1 = conditioned_marginals(ck, b), mu2 = conditioned_marginals(sparse, b);
    for (std::size_t j = 0; j < n; ++j) same = same && std::abs(mu1[j] - mu2[j]) <= kOracleRelTol;
    if (!same) ++invariance_fail;

    const auto y_any = LabelVector::from_index(n, rng() % (std::uint64_t{1} << n));
    if (std::abs(loss_sc(tautology(n), b, y_any).value - loss_imc(b, y_any).value) > kLossTol) ++top_fail;

    const std::size_t kc = 1 + t % 10;
    const auto c = testing::random_activations(rng, kc);
    const std::size_t j_true = 1 + rng() % kc;
    if (std::abs(loss_sc(Knowledge(exactly_one(kc)), c, one_hot(kc, j_true)).value -
                 loss_categorical(c, j_true).value) > kLossTol) {
      ++categorical_fail;
    }

    const Knowledge kappa(ck);
    if (std::abs(loss_sc(kappa, b, y).value - loss_sr(kappa, b, y, -1.0).value) > kLossTol) ++sr_fail;

    long double z = 0.0L;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) z += std::exp(static_cast<long double>(oracle::score(b, i)));
    long double prod = 1.0L;
    for (std::size_t j = 0; j < n; ++j) prod *= 1.0L + std::exp(static_cast<long double>(b[j]));
    const double got = partition_function(b);
    if (std::abs(got - static_cast<double>(z)) / static_cast<double>(z) > kPartitionRelTol ||
        std::abs(got - static_cast<double>(prod)) / static_cast<double>(prod) > kPartitionRelTol) {
      ++partition_fail;
    }
  }
  const int total = consistency_fail + guarantee_fail + invariance_fail + top_fail + categorical_fail + sr_fail +
                    partition_fail;
  report(2, "proposition-suite", total == 0 && guarantee_hits > 0,
         fmt("%d cases each; failures: consistency %d, guarantee %d (of %d imc-correct), sparsify %d, "
             "top %d, categorical %d, sc=sr(-1) %d, partition %d",
             kPropositionCases, consistency_fail, guarantee_fail, guarantee_hits, invariance_fail, top_fail,
             categorical_fail, sr_fail, partition_fail));
}

// 3. Analytic gradients against central differences.
void gradient_checks() {
  Rng rng(1003);
  double worst = 0.0;
  auto fd = [](const std::function<double(const ActivationVector&)>& f, const ActivationVector& a) {
    std::vector<double> v(a.values().begin(), a.values().end()), g(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double keep = v[j];
      v[j] = keep + kGradStep;
      const double up = f(ActivationVector(v));
      v[j] = keep - kGradStep;
      const double down = f(ActivationVector(v));
      v[j] = keep;
      g[j] = (up - down) / (2 * kGradStep);
    }
    return g;
  };
  auto check = [&](const std::vector<double>& analytic, const std::vector<double>& numeric) {
    for (std::size_t j = 0; j < analytic.size(); ++j) worst = std::max(worst, std::abs(analytic[j] - numeric[j]));
  };
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 1 + t % 10;
    const Knowledge kappa = t % 3 == 2 ? Knowledge(testing::random_satisfiable(rng, Signature(k), 3))
                                       : Knowledge(compile(testing::random_hex(rng, k)));
    const auto models = models_of(kappa);
    const auto y = LabelVector::from_index(k, models[rng() % models.size()]);
    const auto a = testing::random_activations(rng, k);
    const std::size_t j_true = 1 + rng() % k;
    const double lambda = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    check(loss_imc(a, y).gradient, fd([&](const ActivationVector& b) { return loss_imc(b, y).value; }, a));
    check(loss_categorical(a, j_true).gradient,
          fd([&](const ActivationVector& b) { return loss_categorical(b, j_true).value; }, a));
    check(log_knowledge_probability(kappa, a).gradient,
          fd([&](const ActivationVector& b) { return log_knowledge_probability(kappa, b).value; }, a));
    check(loss_sr(kappa, a, y, lambda).gradient,
          fd([&](const ActivationVector& b) { return loss_sr(kappa, b, y, lambda).value; }, a));
    check(loss_sc(kappa, a, y).gradient, fd([&](const ActivationVector& b) { return loss_sc(kappa, b, y).value; }, a));
  }
  report(3, "gradient-checks", worst <= kGradTol,
         fmt("100 cases x 5 losses, h = %.0e, max abs err %.2e (tol %.0e)", kGradStep, worst, kGradTol));
}

// Wall time in ms of one pqe query, averaged over a short batch.
double time_pqe_ms(const CompiledKnowledge& ck, const ActivationVector& a) {
  constexpr int kReps = 20;
  volatile double sink = 0.0;
  const auto t0 = Clock::now();
  for (int r = 0; r < kReps; ++r) sink = sink + pqe(ck, a);
  return seconds_since(t0) * 1e3 / kReps;
}

// 4. Linear-time scaling on chains. Depths are timed in interleaved rounds
// and each keeps its median, so drifts in machine speed hit all depths alike.
void linear_scaling() {
  Rng rng(1004);
  const std::vector<std::size_t> depths{10, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  std::vector<CompiledKnowledge> chains;
  std::vector<ActivationVector> acts;
  for (std::size_t d : depths) {
    std::vector<Edge> chain;
    for (std::size_t i = 0; i + 1 < d; ++i) chain.emplace_back(i, i + 1);
    chains.push_back(compile(HexGraph::from_edges(d, chain, {})));
    acts.push_back(testing::random_activations(rng, d));
  }
  constexpr int kRounds = 31;
  std::vector<std::vector<double>> samples(depths.size());
  for (int r = 0; r < kRounds; ++r) {
    for (std::size_t i = 0; i < depths.size(); ++i) samples[i].push_back(time_pqe_ms(chains[i], acts[i]));
  }
  std::vector<double> depth, ms;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    auto& v = samples[i];
    std::nth_element(v.begin(), v.begin() + kRounds / 2, v.end());
    depth.push_back(static_cast<double>(depths[i]));
    ms.push_back(v[kRounds / 2]);
  }
  const double n = static_cast<double>(depth.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    mx += depth[i] / n;
    my += ms[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    sxy += (depth[i] - mx) * (ms[i] - my);
    sxx += (depth[i] - mx) * (depth[i] - mx);
    syy += (ms[i] - my) * (ms[i] - my);
  }
  const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  const double at1000 = ms.back();
  report(4, "linear-time-scaling", r2 >= kMinR2 && at1000 < kDepth1000BudgetMs,
         fmt("depths 10..1000, R^2 %.4f (min %.2f), slope %.3f us/node, depth-1000 query %.3f ms (budget %.0f ms)",
             r2, kMinR2, 1e3 * sxy / sxx, at1000, kDepth1000BudgetMs));
}

// 5. Scaling analyzer.
void scaling_analyzer() {
  const SurrogateModel truth{-2.0, 0.4, 0.99};
  std::vector<AccuracyPoint> pts;
  for (double m : {1e2, 1e3, 1e4, 1e5, 1e6}) pts.push_back({m, predict(truth, m)});
  const FitResult fr = fit_surrogate(pts);
  const double rel = std::max({std::abs(fr.model.alpha / truth.alpha - 1), std::abs(fr.model.b / truth.b - 1),
                               std::abs(fr.model.a_inf / truth.a_inf - 1)});

  // Asymptotic accuracies in percent, as reported for MNIST and Cifar.
  const double mnist = asymptotic_gain({0, 1, 99.0}, {0, 1, 97.7});
  const double cifar = asymptotic_gain({0, 1, 71.8}, {0, 1, 68.4});
  const bool gains_ok = std::abs(mnist - 1.3) <= kGainTol && std::abs(cifar - 3.4) <= kGainTol;

  Rng rng(1005);
  double worst_rt = 0.0;
  std::uniform_real_distribution<double> target(0.0, 0.985);
  for (int t = 0; t < 100; ++t) {
    const double acc = target(rng);
    worst_rt = std::max(worst_rt, std::abs(predict(truth, inverse(truth, acc)) - acc));
  }
  report(5, "scaling-analyzer", rel <= kFitRelTol && gains_ok && worst_rt <= kRoundTripTol,
         fmt("fit max rel err %.2e (tol %.0e), gains %.12g / %.12g pp (tol %.0e), round-trip %.2e (tol %.0e)", rel,
             kFitRelTol, mnist, cifar, kGainTol, worst_rt, kRoundTripTol));
}

// 6. Toy end-to-end on the bundled config.
void toy_end_to_end() {
  using namespace semcond::harness;
  const std::string dir = SEMCOND_DATA_DIR;
  const auto src = load_knowledge(dir + "/hex_k6.json");
  ToyConfig cfg = parse_toy_config(read_file(dir + "/toy_config.json"));
  const auto t0 = Clock::now();

  bool ordered = true;
  std::string per_lambda;
  const ToyDataset data = generate_toy_data(src.knowledge, cfg);
  double gap_seed0 = 0.0;
  for (double lambda : cfg.lambdas) {
    const ToyRun run = train_toy(src.knowledge, data, cfg, lambda);
    ordered = ordered && run.acc_sci >= run.acc_imc;
    per_lambda += fmt(" %g:%.3f/%.3f", lambda, run.acc_imc, run.acc_sci);
    if (lambda == 0.0) gap_seed0 = run.acc_sci - run.acc_imc;
  }

  int gap_seeds = gap_seed0 * 100.0 >= kToyGapPp ? 1 : 0;
  for (std::uint64_t seed = 1; seed < 5; ++seed) {
    cfg.seed = seed;
    const ToyDataset d = generate_toy_data(src.knowledge, cfg);
    const ToyRun run = train_toy(src.knowledge, d, cfg, 0.0);
    if ((run.acc_sci - run.acc_imc) * 100.0 >= kToyGapPp) ++gap_seeds;
  }
  const std::string soft = gap_seeds >= 4 ? "met" : "NOT met (reported, not failed)";
  report(6, "toy-end-to-end", ordered,
         fmt("k=%zu d=%zu n=%zu seed 0, imc/sci per lambda:%s; sci>=imc for all lambdas: %s; "
             "lambda=0 gap >= %.0f pp on %d/5 seeds, soft check %s; %.1f s",
             src.knowledge.num_labels(), cfg.d, cfg.n, per_lambda.c_str(), ordered ? "yes" : "no", kToyGapPp,
             gap_seeds, soft.c_str(), seconds_since(t0)));
}

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// 7. Log-space stress test.
void robustness() {
  Rng rng(1007);
  int cases = 0, bad = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 14;
    const Knowledge kappa = t % 4 == 3 ? Knowledge(testing::random_satisfiable(rng, Signature(n), 3))
                                       : Knowledge(compile(testing::random_hex(rng, n)));
    const auto models = models_of(kappa);
    const auto y = LabelVector::from_index(n, models[rng() % models.size()]);
    std::vector<double> v(n);
    std::bernoulli_distribution sign(0.5);
    std::uniform_real_distribution<double> mag(0.0, kStressMagnitude);
    for (double& x : v) x = t % 2 ? (sign(rng) ? kStressMagnitude : -kStressMagnitude) : (sign(rng) ? 1 : -1) * mag(rng);
    const ActivationVector a(v);
    ++cases;
    bool ok = true;
    const InferenceResult r = kappa.infer(a);
    ok = ok && std::isfinite(r.log_pqe) && r.log_pqe <= 0.0 && finite_all(r.marginals) && kappa.entails(r.map_state);
    ok = ok && std::isfinite(kappa.log_partition(a)) && std::isfinite(log_partition_function(a));
    const std::size_t j_true = 1 + rng() % n;
    for (const LossValue& l : {loss_imc(a, y), loss_categorical(a, j_true), loss_sr(kappa, a, y, 0.5),
                               loss_sr(kappa, a, y, -1.0), loss_sc(kappa, a, y)}) {
      ok = ok && std::isfinite(l.value) && finite_all(l.gradient);
    }
    const LogProbability lp = log_knowledge_probability(kappa, a);
    ok = ok && std::isfinite(lp.value) && finite_all(lp.gradient);
    if (!ok) ++bad;
  }
  report(7, "numerical-robustness", bad == 0,
         fmt("%d cases with |a_j| up to %.0e, non-finite outputs in %d", cases, kStressMagnitude, bad));
}

}  // namespace

int main() {
  oracle_equivalence();
  proposition_suite();
  gradient_checks();
  linear_scaling();
  scaling_analyzer();
  toy_end_to_end();
  robustness();
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
