#include <iostream>

#include <CLI11.hpp>

#include "semcond/errors.hpp"
#include "semcond/harness/commands.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace semcond::harness;

  CLI::App app{"semcond: exact inference and losses under propositional background knowledge"};
  app.require_subcommand(1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Seed override for stochastic commands");
  app.add_option("--threads", g.threads, "Worker threads for row-parallel commands (0 = all cores)");
  app.add_flag("--percent", g.percent, "Accuracies in scaling inputs are percentages");

  std::string knowledge, compiled, out, activations, labels;

  auto* compile = app.add_subcommand("compile", "Compile a HEX graph or formula into an inference artifact");
  CompileOptions copts;
  compile->add_option("knowledge", knowledge, "HEX JSON or formula JSON")->required();
  compile->add_option("-o,--out", out, "Compiled output file (stdout if omitted)");
  compile->add_flag("--derive-exclusions", copts.derive_exclusions, "Add exclusions between disjoint subtrees");
  compile->add_flag("--prune-pass-through", copts.prune_pass_through,
                    "Remove nodes with exactly one parent and one child");

  auto* infer = app.add_subcommand("infer", "Per-row prediction, log P(kappa|a) and conditioned marginals");
  std::string mode = "sci";
  infer->add_option("compiled", compiled, "Compiled knowledge")->required();
  infer->add_option("activations", activations, "CSV id,a1..ak")->required();
  infer->add_option("--mode", mode, "imc or sci")->check(CLI::IsMember({"imc", "sci"}));
  infer->add_option("-o,--out", out, "Output JSON (stdout if omitted)");

  auto* loss = app.add_subcommand("loss", "Per-row loss and gradient");
  std::string technique = "imc";
  double lambda = 0.0;
  loss->add_option("compiled", compiled, "Compiled knowledge")->required();
  loss->add_option("activations", activations, "CSV id,a1..ak")->required();
  loss->add_option("labels", labels, "CSV id,y1..yk")->required();
  loss->add_option("--technique", technique, "imc, sr or sc")->check(CLI::IsMember({"imc", "sr", "sc"}));
  loss->add_option("--lambda", lambda, "Regularization weight for sr");
  loss->add_option("-o,--out", out, "Output JSON (stdout if omitted)");

  auto* eval = app.add_subcommand("eval", "Exact accuracy and consistency under imc and sci");
  eval->add_option("compiled", compiled, "Compiled knowledge")->required();
  eval->add_option("activations", activations, "CSV id,a1..ak")->required();
  eval->add_option("labels", labels, "CSV id,y1..yk")->required();
  eval->add_option("-o,--out", out, "Output JSON (stdout if omitted)");

  auto* toy = app.add_subcommand("toytrain", "Train a linear model on synthetic data for a lambda sweep");
  std::string config, sweep;
  toy->add_option("knowledge", knowledge, "HEX, formula or compiled knowledge")->required();
  toy->add_option("config", config, "Synthetic config JSON")->required();
  toy->add_option("--lambda-sweep", sweep, "Comma-separated lambdas, overriding the config");
  toy->add_option("-o,--out", out, "Output JSON (stdout if omitted)");

  auto* fit = app.add_subcommand("fit", "Fit accuracy curves, asymptotic gains and resource savings");
  std::string points, models, curves, baseline = "imc";
  fit->add_option("points", points, "CSV technique,m,accuracy");
  fit->add_option("--models", models, "JSON of fixed {alpha,b,a_inf} per technique");
  fit->add_option("--baseline", baseline, "Reference technique");
  fit->add_option("--curves", curves, "CSV file for sampled epsilon/tau curves");
  fit->add_option("-o,--out", out, "Output JSON (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (*compile) {
      cmd_compile(knowledge, out, copts, std::cerr);
    } else if (*infer) {
      cmd_infer(compiled, activations, mode, out, g);
    } else if (*loss) {
      cmd_loss(compiled, activations, labels, technique, lambda, out, g);
    } else if (*eval) {
      cmd_eval(compiled, activations, labels, out, g);
    } else if (*toy) {
      std::optional<std::vector<double>> lambdas;
      if (!sweep.empty()) lambdas = parse_number_list(sweep);
      cmd_toytrain(knowledge, config, lambdas, out, g, std::cerr);
    } else if (*fit) {
      cmd_fit(points, models, baseline, out, curves, g);
    }
  } catch (const semcond::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const semcond::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
