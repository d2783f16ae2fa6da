#include "semcond/harness/commands.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semcond/errors.hpp"
#include "semcond/harness/parallel.hpp"
#include "semcond/harness/toy.hpp"
#include "semcond/inference.hpp"
#include "semcond/loss.hpp"
#include "semcond/scaling.hpp"

namespace semcond::harness {

using nlohmann::json;

namespace {

Knowledge load_compiled(const std::string& path) { return load_knowledge(path).knowledge; }

void check_width(const Knowledge& kappa, std::size_t cols, const std::string& what) {
  if (cols != kappa.num_labels()) {
    throw InputError(what + " has " + std::to_string(cols) + " columns but the knowledge has " +
                     std::to_string(kappa.num_labels()) + " labels");
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))));
  }
  return out;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) throw InputError("not a number '" + cell + "' in list '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

void cmd_compile(const std::string& knowledge_file, const std::string& out_file, const CompileOptions& opts,
                 std::ostream& log) {
  const KnowledgeSource src = load_knowledge(knowledge_file, opts);
  write_output(out_file, src.knowledge.serialize() + "\n");
  if (const auto* ck = src.knowledge.compiled()) {
    std::map<std::size_t, std::size_t> sizes;
    for (const auto& q : ck->tree().cliques) ++sizes[q.vars.size()];
    log << "labels " << ck->num_labels() << ", cliques " << ck->tree().cliques.size() << ", max clique "
        << ck->max_clique_size() << ", total states " << ck->total_states() << "\n";
    log << "sparse edges: hierarchy " << ck->sparse_hierarchy().size() << ", exclusion "
        << ck->sparse_exclusion().size() << "\n";
    log << "clique sizes:";
    for (const auto& [size, count] : sizes) log << " " << size << "x" << count;
    log << "\n";
  } else {
    log << "formula knowledge over " << src.knowledge.num_labels() << " labels, "
        << model_count(*src.knowledge.formula()) << " models\n";
  }
}

void cmd_infer(const std::string& compiled_file, const std::string& activations_csv, const std::string& mode,
               const std::string& out_file, const GlobalOptions& g) {
  if (mode != "imc" && mode != "sci") throw InputError("mode must be imc or sci, got '" + mode + "'");
  const Knowledge kappa = load_compiled(compiled_file);
  const Table t = read_table(activations_csv, 'a');
  check_width(kappa, t.cols, activations_csv);
  const auto acts = to_activations(t);
  std::vector<json> rows(acts.size());
  parallel_for(acts.size(), g.threads, [&](std::size_t i) {
    const InferenceResult r = kappa.infer(acts[i]);
    const LabelVector y = mode == "sci" ? r.map_state : predict_imc(acts[i]);
    if (mode == "sci" && !kappa.entails(y)) {
      throw NumericError("sci prediction for row '" + t.ids[i] + "' violates the knowledge");
    }
    rows[i] = {{"id", t.ids[i]},
               {"prediction", y.to_string()},
               {"consistent", kappa.entails(y)},
               {"log_pqe", r.log_pqe},
               {"marginals", r.marginals}};
  });
  write_output(out_file, dump({{"mode", mode}, {"k", kappa.num_labels()}, {"rows", rows}}));
}

void cmd_loss(const std::string& compiled_file, const std::string& activations_csv, const std::string& labels_csv,
              const std::string& technique, double lambda, const std::string& out_file, const GlobalOptions& g) {
  if (technique != "imc" && technique != "sr" && technique != "sc") {
    throw InputError("technique must be imc, sr or sc, got '" + technique + "'");
  }
  if (!std::isfinite(lambda)) throw InputError("lambda must be finite");
  const Knowledge kappa = load_compiled(compiled_file);
  const Table at = read_table(activations_csv, 'a');
  check_width(kappa, at.cols, activations_csv);
  const LabeledBatch batch = join_labels(at, read_table(labels_csv, 'y'));
  if (technique == "sc") check_consistent(kappa, batch);

  std::vector<LossValue> values(batch.ids.size());
  parallel_for(values.size(), g.threads, [&](std::size_t i) {
    const auto& a = batch.activations[i];
    const auto& y = batch.labels[i];
    if (technique == "imc") {
      values[i] = loss_imc(a, y);
    } else if (technique == "sr") {
      values[i] = loss_sr(kappa, a, y, lambda);
    } else {
      values[i] = loss_sc(kappa, a, y);
    }
  });
  json rows = json::array();
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].value)) throw NumericError("non-finite loss in row '" + batch.ids[i] + "'");
    mean += values[i].value;
    rows.push_back({{"id", batch.ids[i]}, {"loss", values[i].value}, {"gradient", values[i].gradient}});
  }
  if (!values.empty()) mean /= static_cast<double>(values.size());
  json j = {{"technique", technique}, {"rows", rows}, {"mean", mean}};
  if (technique == "sr") j["lambda"] = lambda;
  write_output(out_file, dump(j));
}

void cmd_eval(const std::string& compiled_file, const std::string& activations_csv, const std::string& labels_csv,
              const std::string& out_file, const GlobalOptions& g) {
  const Knowledge kappa = load_compiled(compiled_file);
  const Table at = read_table(activations_csv, 'a');
  check_width(kappa, at.cols, activations_csv);
  const LabeledBatch batch = join_labels(at, read_table(labels_csv, 'y'));
  check_consistent(kappa, batch);

  const std::size_t n = batch.ids.size();
  struct Row {
    bool imc_hit, sci_hit, imc_consistent, sci_consistent, boundary;
  };
  std::vector<Row> rows(n);
  parallel_for(n, g.threads, [&](std::size_t i) {
    const auto& a = batch.activations[i];
    const LabelVector imc = predict_imc(a);
    const LabelVector sci = kappa.map_state(a);
    bool boundary = false;
    for (double v : a.values()) boundary = boundary || v == 0.0;
    rows[i] = {imc == batch.labels[i], sci == batch.labels[i], kappa.entails(imc), kappa.entails(sci), boundary};
  });
  double imc = 0, sci = 0, imc_c = 0, sci_c = 0;
  std::size_t boundary = 0;
  for (const Row& r : rows) {
    imc += r.imc_hit;
    sci += r.sci_hit;
    imc_c += r.imc_consistent;
    sci_c += r.sci_consistent;
    boundary += r.boundary;
  }
  const double denom = n ? static_cast<double>(n) : 1.0;
  write_output(out_file, dump({{"n", n},
                               {"exact_accuracy_imc", imc / denom},
                               {"exact_accuracy_sci", sci / denom},
                               {"consistency_imc", imc_c / denom},
                               {"consistency_sci", sci_c / denom},
                               {"boundary_rows", boundary}}));
}

void cmd_toytrain(const std::string& knowledge_file, const std::string& config_file,
                  const std::optional<std::vector<double>>& lambda_sweep, const std::string& out_file,
                  const GlobalOptions& g, std::ostream& log) {
  const Knowledge kappa = load_knowledge(knowledge_file).knowledge;
  ToyConfig cfg = parse_toy_config(read_file(config_file));
  if (g.seed) cfg.seed = *g.seed;
  if (lambda_sweep) cfg.lambdas = *lambda_sweep;
  const ToyDataset data = generate_toy_data(kappa, cfg);

  json runs = json::array();
  log << "lambda  technique  acc_imc  acc_sci\n";
  for (double lambda : cfg.lambdas) {
    const ToyRun run = train_toy(kappa, data, cfg, lambda, g.threads);
    json epochs = json::array();
    for (const auto& e : run.epochs) {
      epochs.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"acc_imc", e.acc_imc}, {"acc_sci", e.acc_sci}});
    }
    runs.push_back({{"lambda", lambda},
                    {"technique", technique_name(lambda)},
                    {"final", {{"acc_imc", run.acc_imc}, {"acc_sci", run.acc_sci}}},
                    {"epochs", epochs}});
    char line[96];
    std::snprintf(line, sizeof line, "%6.2f  %-9s  %.4f   %.4f\n", lambda, technique_name(lambda).c_str(),
                  run.acc_imc, run.acc_sci);
    log << line;
  }
  const json config = {{"n", cfg.n},         {"n_test", cfg.n_test}, {"d", cfg.d},
                       {"k", kappa.num_labels()}, {"prototypes", cfg.prototypes}, {"sigma", cfg.sigma},
                       {"epochs", cfg.epochs}, {"learning_rate", cfg.learning_rate}, {"seed", cfg.seed},
                       {"lambdas", cfg.lambdas}};
  write_output(out_file, dump({{"config", config}, {"runs", runs}}));
}

void cmd_fit(const std::string& points_csv, const std::string& models_json, const std::string& baseline,
             const std::string& out_file, const std::string& curves_csv, const GlobalOptions& g) {
  if (points_csv.empty() && models_json.empty()) throw InputError("fit needs a points file or --models");
  const AccuracyUnit unit = g.percent ? AccuracyUnit::kPercent : AccuracyUnit::kFraction;

  std::vector<std::pair<std::string, SurrogateModel>> models;
  std::set<std::string> asymptote_only;  // given without alpha and b
  json techniques = json::object();
  double m_lo = 1e2, m_hi = 1e6;
  if (!points_csv.empty()) {
    const auto groups = read_points(points_csv);
    m_lo = std::numeric_limits<double>::infinity();
    m_hi = 0.0;
    for (const auto& [name, pts] : groups) {
      for (const auto& p : pts) {
        m_lo = std::min(m_lo, p.m);
        m_hi = std::max(m_hi, p.m);
      }
      const FitResult fr = fit_surrogate(pts, unit);
      models.emplace_back(name, fr.model);
      techniques[name] = {{"alpha", fr.model.alpha},   {"b", fr.model.b},
                          {"a_inf", fr.model.a_inf},   {"residual", fr.residual},
                          {"converged", fr.converged}, {"iterations", fr.iterations},
                          {"source", "fit"}};
    }
  }
  if (!models_json.empty()) {
    try {
      const json given = json::parse(read_file(models_json));
      for (const auto& [name, p] : given.items()) {
        const bool has_curve = p.contains("alpha") || p.contains("b");
        const SurrogateModel sm{has_curve ? p.at("alpha").get<double>() : 0.0,
                                has_curve ? p.at("b").get<double>() : 1.0, p.at("a_inf").get<double>()};
        if (!(sm.b > 0.0)) throw InputError("model '" + name + "' needs b > 0");
        models.emplace_back(name, sm);
        if (!has_curve) asymptote_only.insert(name);
        techniques[name] = {{"a_inf", sm.a_inf}, {"source", "given"}};
        if (has_curve) {
          techniques[name]["alpha"] = sm.alpha;
          techniques[name]["b"] = sm.b;
        }
      }
    } catch (const json::exception& e) {
      throw InputError("malformed models file '" + models_json + "': " + e.what());
    }
  }
  const auto base = std::find_if(models.begin(), models.end(), [&](const auto& e) { return e.first == baseline; });
  if (base == models.end()) throw InputError("baseline technique '" + baseline + "' not found");

  json gains = json::object();
  json savings = json::object();
  std::string curves = "technique,baseline,m,epsilon,tau\n";
  const auto grid = log_grid(m_lo, m_hi, 25);
  for (const auto& [name, sm] : models) {
    if (name == baseline) continue;
    gains[name] = asymptotic_gain(sm, base->second);
    if (asymptote_only.count(name) || asymptote_only.count(baseline)) continue;
    json curve = json::array();
    for (double m : grid) {
      try {
        const ResourceSavings rs = resource_savings(sm, base->second, m);
        curve.push_back({{"m", m}, {"epsilon", rs.epsilon}, {"tau", rs.tau}});
        std::ostringstream row;
        row.precision(17);
        row << name << ',' << baseline << ',' << m << ',' << rs.epsilon << ',' << rs.tau << '\n';
        curves += row.str();
      } catch (const Unattainable&) {
        curve.push_back({{"m", m}, {"epsilon", nullptr}, {"tau", nullptr}});
      }
    }
    savings[name] = curve;
  }
  write_output(out_file, dump({{"units", g.percent ? "percent" : "fraction"},
                               {"baseline", baseline},
                               {"techniques", techniques},
                               {"asymptotic_gain", gains},
                               {"resource_savings", savings}}));
  if (!curves_csv.empty()) write_output(curves_csv, curves);
}

}  // namespace semcond::harness
