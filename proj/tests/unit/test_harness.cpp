#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "semcond/errors.hpp"
#include "semcond/harness/commands.hpp"
#include "semcond/harness/io.hpp"
#include "semcond/harness/parallel.hpp"
#include "semcond/harness/toy.hpp"

namespace semcond::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("semcond_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string put(const std::string& name, const std::string& content) const {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << content;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  json load(const std::string& name) const { return json::parse(read_file(path(name))); }

  fs::path dir_;
};

// Root with two exclusive children.
constexpr const char* kFork = R"({"nodes":["r","a","b"],"hierarchy":[["r","a"],["r","b"]],"exclusion":[["a","b"]]})";

TEST(Table, ParsesAndValidates) {
  const auto t = parse_table("id,a1,a2\nx,0.5,-1\ny,2,3e-1\n", 'a', "mem");
  EXPECT_EQ(t.cols, 2u);
  EXPECT_EQ(t.ids, (std::vector<std::string>{"x", "y"}));
  EXPECT_DOUBLE_EQ(t.rows[1][1], 0.3);
  EXPECT_THROW(parse_table("id,b1\nx,1\n", 'a', "mem"), InputError);
  EXPECT_THROW(parse_table("id,a1,a2\nx,1\n", 'a', "mem"), InputError);
  EXPECT_THROW(parse_table("id,a1\nx,1\nx,2\n", 'a', "mem"), InputError);
  EXPECT_THROW(parse_table("id,a1\nx,abc\n", 'a', "mem"), InputError);
  try {
    parse_table("id,a1\nx,1\ny,zz\n", 'a', "mem");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos) << e.what();
  }
}

TEST(Table, JoinMatchesIdsAndChecksLabels) {
  const auto a = parse_table("id,a1,a2\nx,1,2\ny,3,4\n", 'a', "a");
  const auto y = parse_table("id,y1,y2\ny,0,1\nx,1,0\n", 'y', "y");
  const auto b = join_labels(a, y);
  EXPECT_EQ(b.ids, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(b.labels[0], (LabelVector{1, 0}));
  EXPECT_EQ(b.labels[1], (LabelVector{0, 1}));
  EXPECT_THROW(join_labels(a, parse_table("id,y1,y2\nx,1,0\nz,0,1\n", 'y', "y")), InputError);
  EXPECT_THROW(join_labels(a, parse_table("id,y1,y2\nx,1,0\ny,0,2\n", 'y', "y")), InputError);
  EXPECT_THROW(join_labels(a, parse_table("id,y1\nx,1\ny,0\n", 'y', "y")), InputError);
}

TEST(Parallel, CoversAllIndicesAndRethrowsLowest) {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  try {
    parallel_for(50, 3, [](std::size_t i) {
      if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

TEST(NumberList, Parses) {
  EXPECT_EQ(parse_number_list("-1,0,0.5"), (std::vector<double>{-1.0, 0.0, 0.5}));
  EXPECT_THROW(parse_number_list("1,,2"), InputError);
  EXPECT_THROW(parse_number_list("x"), InputError);
}

TEST_F(TempDir, LoadKnowledgeDetectsSources) {
  const auto hex = put("fork.json", kFork);
  const auto src = load_knowledge(hex);
  ASSERT_TRUE(src.graph.has_value());
  EXPECT_TRUE(src.knowledge.is_compiled());
  EXPECT_FALSE(src.knowledge.entails(LabelVector{1, 1, 1}));

  const auto formula = put("f.json", R"({"k":2,"formula":"y1 | y2"})");
  const auto fsrc = load_knowledge(formula);
  EXPECT_FALSE(fsrc.graph.has_value());
  EXPECT_FALSE(fsrc.knowledge.entails(LabelVector{0, 0}));

  std::ostringstream log;
  cmd_compile(hex, path("fork.hex"), {}, log);
  const auto back = load_knowledge(path("fork.hex"));
  EXPECT_EQ(back.knowledge.serialize(), src.knowledge.serialize());

  EXPECT_THROW(load_knowledge(put("bad.json", R"({"what":1})")), InputError);
  EXPECT_THROW(load_knowledge(path("missing.json")), InputError);
}

TEST_F(TempDir, ThreeNodeForkCompilesToOneClique) {
  const auto hex = put("d.json", kFork);
  std::ostringstream log;
  cmd_compile(hex, path("d.hex"), {}, log);
  EXPECT_EQ(load("d.hex")["cliques"].size(), 1u);
  EXPECT_NE(log.str().find("cliques 1"), std::string::npos) << log.str();
  // Four nodes t -> {l, r} -> b need a separator of size two.
  const auto four = put("d4.json", R"({"nodes":["t","l","r","b"],"hierarchy":[["t","l"],["t","r"],["l","b"],["r","b"]]})");
  cmd_compile(four, path("d4.hex"), {}, log);
  EXPECT_EQ(load("d4.hex")["cliques"].size(), 2u);
}

TEST_F(TempDir, InferAndEval) {
  std::ostringstream log;
  cmd_compile(put("fork.json", kFork), path("fork.hex"), {}, log);
  const auto acts = put("a.csv", "id,a1,a2,a3\nu,5,5,-5\nv,0,0,0\nw,-3,4,4\n");
  const auto labels = put("y.csv", "id,y1,y2,y3\nu,1,1,0\nv,0,0,0\nw,1,0,1\n");
  const GlobalOptions g;

  cmd_infer(path("fork.hex"), acts, "sci", path("sci.json"), g);
  const auto sci = load("sci.json");
  ASSERT_EQ(sci["rows"].size(), 3u);
  EXPECT_EQ(sci["rows"][0]["prediction"], "1,1,0");
  // Zero activations tie over every model; the all-zero one wins.
  EXPECT_EQ(sci["rows"][1]["prediction"], "0,0,0");
  EXPECT_EQ(sci["rows"][2]["prediction"], "1,0,1");
  for (const auto& r : sci["rows"]) EXPECT_TRUE(r["consistent"].get<bool>());

  cmd_infer(path("fork.hex"), acts, "imc", path("imc.json"), g);
  const auto imc = load("imc.json");
  EXPECT_EQ(imc["rows"][1]["prediction"], "1,1,1");
  EXPECT_FALSE(imc["rows"][1]["consistent"].get<bool>());

  cmd_eval(path("fork.hex"), acts, labels, path("eval.json"), g);
  const auto ev = load("eval.json");
  EXPECT_EQ(ev["n"], 3);
  EXPECT_DOUBLE_EQ(ev["exact_accuracy_sci"].get<double>(), 1.0);
  EXPECT_GE(ev["exact_accuracy_sci"].get<double>(), ev["exact_accuracy_imc"].get<double>());
  EXPECT_DOUBLE_EQ(ev["consistency_sci"].get<double>(), 1.0);
  EXPECT_EQ(ev["boundary_rows"], 1);
}

TEST_F(TempDir, LossTechniquesAgree) {
  std::ostringstream log;
  cmd_compile(put("fork.json", kFork), path("fork.hex"), {}, log);
  const auto acts = put("a.csv", "id,a1,a2,a3\nu,0.3,-1.2,0.8\nv,-2,0.1,0.4\n");
  const auto labels = put("y.csv", "id,y1,y2,y3\nu,1,0,1\nv,0,0,0\n");
  const GlobalOptions g;
  cmd_loss(path("fork.hex"), acts, labels, "imc", 0.0, path("imc.json"), g);
  cmd_loss(path("fork.hex"), acts, labels, "sr", 0.0, path("sr0.json"), g);
  cmd_loss(path("fork.hex"), acts, labels, "sr", -1.0, path("srm1.json"), g);
  cmd_loss(path("fork.hex"), acts, labels, "sc", 0.0, path("sc.json"), g);
  const auto imc = load("imc.json"), sr0 = load("sr0.json"), srm1 = load("srm1.json"), sc = load("sc.json");
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_EQ(imc["rows"][r]["loss"], sr0["rows"][r]["loss"]);
    EXPECT_NEAR(sc["rows"][r]["loss"].get<double>(), srm1["rows"][r]["loss"].get<double>(), 1e-12);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(sc["rows"][r]["gradient"][j].get<double>(), srm1["rows"][r]["gradient"][j].get<double>(), 1e-12);
    }
  }
  EXPECT_EQ(sc["technique"], "sc");

  const auto bad = put("bad.csv", "id,y1,y2,y3\nu,0,1,1\nv,0,0,0\n");
  EXPECT_THROW(cmd_loss(path("fork.hex"), acts, bad, "sc", 0.0, path("x.json"), g), InconsistentLabel);
  EXPECT_NO_THROW(cmd_loss(path("fork.hex"), acts, bad, "sr", 0.5, path("x.json"), g));
}

TEST_F(TempDir, OutputsAreByteIdenticalAcrossThreadCounts) {
  std::ostringstream log;
  cmd_compile(put("fork.json", kFork), path("fork.hex"), {}, log);
  std::string acts = "id,a1,a2,a3\n";
  for (int i = 0; i < 40; ++i) acts += "r" + std::to_string(i) + "," + std::to_string(i % 7 - 3) + ".25,-0.5," +
                                       std::to_string(i % 5 - 2) + "\n";
  const auto a = put("a.csv", acts);
  GlobalOptions one, four;
  four.threads = 4;
  cmd_infer(path("fork.hex"), a, "sci", path("one.json"), one);
  cmd_infer(path("fork.hex"), a, "sci", path("four.json"), four);
  cmd_infer(path("fork.hex"), a, "sci", path("again.json"), one);
  EXPECT_EQ(read_file(path("one.json")), read_file(path("four.json")));
  EXPECT_EQ(read_file(path("one.json")), read_file(path("again.json")));
}

TEST(Toy, SeedReproducibleAndLossDecreases) {
  const Knowledge kappa(compile(HexGraph::from_edges(3, {{0, 1}, {0, 2}}, {{1, 2}})));
  ToyConfig cfg;
  cfg.n = 200;
  cfg.n_test = 100;
  cfg.d = 4;
  cfg.prototypes = 6;
  cfg.epochs = 30;
  cfg.seed = 3;
  const auto d1 = generate_toy_data(kappa, cfg), d2 = generate_toy_data(kappa, cfg);
  EXPECT_EQ(d1.train.features, d2.train.features);
  EXPECT_EQ(d1.train.labels, d2.train.labels);
  for (const auto& y : d1.train.labels) EXPECT_TRUE(kappa.entails(y));
  for (double lambda : {-1.0, 0.0, 0.5}) {
    const auto run = train_toy(kappa, d1, cfg, lambda);
    ASSERT_EQ(run.epochs.size(), cfg.epochs);
    EXPECT_LT(run.epochs.back().loss, run.epochs.front().loss);
    const auto again = train_toy(kappa, d1, cfg, lambda);
    EXPECT_EQ(run.acc_sci, again.acc_sci);
    EXPECT_EQ(run.model.weights, again.model.weights);
  }
  cfg.seed = 4;
  EXPECT_NE(generate_toy_data(kappa, cfg).train.features, d1.train.features);
  EXPECT_EQ(technique_name(-1.0), "sc");
  EXPECT_EQ(technique_name(0.0), "imc");
  EXPECT_EQ(technique_name(0.1), "sr");
}

TEST(Toy, ConfigValidation) {
  const auto cfg = parse_toy_config(R"({"n":10,"lambdas":[0,1]})");
  EXPECT_EQ(cfg.n, 10u);
  EXPECT_EQ(cfg.lambdas, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(cfg.d, ToyConfig{}.d);
  EXPECT_THROW(parse_toy_config(R"({"n":0})"), InputError);
  EXPECT_THROW(parse_toy_config("[1]"), InputError);
}

TEST_F(TempDir, FitReportsGainsAndSavings) {
  std::string csv = "technique,m,accuracy\n";
  for (double m : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    std::ostringstream row;
    row.precision(17);
    row << "imc," << m << "," << -2.0 * std::pow(m, -0.5) + 0.97 << "\n";
    row << "sc," << m << "," << -2.0 * std::pow(m, -0.5) + 0.99 << "\n";
    csv += row.str();
  }
  const auto pts = put("p.csv", csv);
  cmd_fit(pts, "", "imc", path("fit.json"), path("curves.csv"), {});
  const auto fit = load("fit.json");
  EXPECT_NEAR(fit["asymptotic_gain"]["sc"].get<double>(), 0.02, 1e-4);
  EXPECT_NEAR(fit["techniques"]["sc"]["b"].get<double>(), 0.5, 5e-3);
  EXPECT_NE(read_file(path("curves.csv")).find("technique,baseline,m,epsilon,tau"), std::string::npos);

  const auto models = put("m.json", R"({"imc":{"alpha":-200,"b":0.5,"a_inf":97.7},"sci":{"alpha":-200,"b":0.5,"a_inf":99.0}})");
  GlobalOptions pct;
  pct.percent = true;
  cmd_fit("", models, "imc", path("m_out.json"), "", pct);
  EXPECT_NEAR(load("m_out.json")["asymptotic_gain"]["sci"].get<double>(), 1.3, 1e-9);
}

#ifdef SEMCOND_CLI
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SEMCOND_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(TempDir, CliExitCodes) {
  const auto ok = put("fork.json", kFork);
  const auto cyc = put("cyc.json", R"({"nodes":["a","b"],"hierarchy":[["a","b"],["b","a"]]})");
  EXPECT_EQ(run_cli("compile " + ok + " -o " + path("fork.hex")), 0);
  EXPECT_EQ(run_cli("compile " + cyc), 2);
  EXPECT_EQ(run_cli("nosuchcommand"), 1);
  EXPECT_EQ(run_cli("infer " + path("fork.hex")), 1);
  EXPECT_EQ(run_cli("infer " + path("fork.hex") + " " + path("missing.csv")), 2);
}
#endif

}  // namespace
}  // namespace semcond::harness
