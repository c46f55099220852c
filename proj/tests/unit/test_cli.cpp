#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "commands.hpp"
#include "run_io.hpp"
#include "ssm/approx.hpp"
#include "ssm/kalman.hpp"

namespace fs = std::filesystem;
using namespace ssm;
using ssm::cli::json;

namespace {

struct Result {
  int code;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ssm_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const json& doc) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  Result run(const std::string& args) {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(SSM_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  static json local_level() {
    return {{"model",
             {{"family", "bsm_lg"},
              {"data_path", std::string(SSM_TEST_DATA_DIR) + "/local_level.csv"},
              {"sd_y", {{"family", "halfnormal"}, {"init", 1.0}, {"params", {2.0}}}},
              {"sd_level", {{"family", "halfnormal"}, {"init", 0.3}, {"params", {2.0}}}}}},
            {"mcmc", {{"iter", 1500}, {"burnin", 500}}},
            {"seed", 3}};
  }

  static json poisson_rw() {
    return {{"model",
             {{"family", "bsm_ng"},
              {"distribution", "poisson"},
              {"data_path", std::string(SSM_TEST_DATA_DIR) + "/counts.csv"},
              {"sd_level", {{"family", "halfnormal"}, {"init", 0.1}, {"params", {1.0}}}}}},
            {"mcmc", {{"iter", 1500}, {"burnin", 500}, {"mcmc_type", "approx"}, {"particles", 10}}},
            {"seed", 4}};
  }

  fs::path dir_;
};

TEST_F(CliTest, UnknownFieldIsConfigErrorWithPath) {
  json doc = local_level();
  doc["model"]["sd_levl"] = 0.1;
  const auto cfg = write_config("bad.json", doc);
  const Result r = run("filter --config " + cfg.string() + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("model.sd_levl"), std::string::npos) << r.err;
}

TEST_F(CliTest, BadMcmcSettingsAreConfigErrors) {
  json doc = local_level();
  doc["mcmc"]["burnin"] = 5000;
  const auto cfg = write_config("bad.json", doc);
  const Result r = run("mcmc --config " + cfg.string() + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("burnin"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingDataFileNamesField) {
  json doc = local_level();
  doc["model"]["data_path"] = "does_not_exist.csv";
  const auto cfg = write_config("bad.json", doc);
  const Result r = run("filter --config " + cfg.string() + " --out " + (dir_ / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("model.data_path"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownSubcommandFails) { EXPECT_EQ(run("frobnicate").code, 2); }

TEST_F(CliTest, PostCorrectRejectsFullRun) {
  const auto cfg = write_config("ll.json", local_level());
  ASSERT_EQ(run("mcmc --config " + cfg.string() + " --out " + (dir_ / "r").string()).code, 0);
  const Result r = run("post-correct --run " + (dir_ / "r").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("approx"), std::string::npos) << r.err;
}

TEST_F(CliTest, SameSeedGivesIdenticalFiles) {
  const auto cfg = write_config("pois.json", poisson_rw());
  for (const char* d : {"a", "b"}) {
    ASSERT_EQ(run("mcmc --config " + cfg.string() + " --seed 17 --out " + (dir_ / d).string()).code, 0);
    ASSERT_EQ(run("post-correct --seed 5 --threads 2 --run " + (dir_ / d).string()).code, 0);
  }
  for (const char* f : {"theta.csv", "states.csv", "run.json"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  ASSERT_EQ(run("mcmc --config " + cfg.string() + " --seed 18 --out " + (dir_ / "c").string()).code, 0);
  EXPECT_NE(slurp(dir_ / "a" / "theta.csv"), slurp(dir_ / "c" / "theta.csv"));
}

TEST_F(CliTest, SummaryMatchesLibrary) {
  const auto cfg = write_config("pois.json", poisson_rw());
  const fs::path r = dir_ / "r";
  ASSERT_EQ(run("mcmc --config " + cfg.string() + " --out " + r.string()).code, 0);
  ASSERT_EQ(run("post-correct --run " + r.string()).code, 0);
  ASSERT_EQ(run("summary --run " + r.string()).code, 0);

  const McmcOutput out = cli::load_run(r);
  EXPECT_TRUE(out.weighted);
  const json got = cli::read_json(r / "summary.json");
  std::vector<SummaryRow> want = summarize(out, Variable::theta);
  const auto st = summarize(out, Variable::states);
  want.insert(want.end(), st.begin(), st.end());
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got[i]["variable"].get<std::string>(), want[i].variable);
    EXPECT_DOUBLE_EQ(got[i]["mean"].get<double>(), want[i].mean);
    EXPECT_DOUBLE_EQ(got[i]["mcse"].get<double>(), want[i].mcse);
  }
}

TEST_F(CliTest, RunFilesRoundTrip) {
  const auto cfg = write_config("pois.json", poisson_rw());
  const fs::path r = dir_ / "r";
  ASSERT_EQ(run("mcmc --config " + cfg.string() + " --out " + r.string()).code, 0);
  const McmcOutput a = cli::load_run(r);
  cli::save_run(dir_ / "copy", a, cli::read_json(r / "run.json")["config"]);
  for (const char* f : {"theta.csv", "states.csv", "run.json"})
    EXPECT_EQ(slurp(r / f), slurp(dir_ / "copy" / f)) << f;
}

TEST_F(CliTest, FilterMatchesLibrary) {
  const auto cfg = write_config("ll.json", local_level());
  ASSERT_EQ(run("filter --config " + cfg.string() + " --out " + (dir_ / "f").string()).code, 0);
  const json info = cli::read_json(dir_ / "f" / "filter.json");
  EXPECT_EQ(info["loglik_type"], "exact");

  const cli::ModelSetup setup = cli::build_model(cli::load_config(cfg));
  const FilterResult f = kalman_filter(setup.model.update(setup.model.initial_theta()));
  EXPECT_DOUBLE_EQ(info["loglik"].get<double>(), f.loglik);

  const cli::DataTable tab = cli::read_csv(dir_ / "f" / "filter.csv");
  ASSERT_EQ(tab.values.rows(), f.att.rows());
  for (Eigen::Index t = 0; t < tab.values.rows(); ++t) {
    EXPECT_DOUBLE_EQ(tab.values(t, tab.column("mean_1")), f.att(t, 0));
    EXPECT_DOUBLE_EQ(tab.values(t, tab.column("var_1")), f.Ptt[static_cast<std::size_t>(t)](0, 0));
  }
  // row 10 of the data is missing: kept, with the predicted (wider) variance
  EXPECT_GT(tab.values(9, tab.column("var_1")), tab.values(8, tab.column("var_1")));
}

TEST_F(CliTest, PoissonFilterIsFlaggedApproximate) {
  const auto cfg = write_config("pois.json", poisson_rw());
  ASSERT_EQ(run("smooth --config " + cfg.string() + " --out " + (dir_ / "s").string()).code, 0);
  const json info = cli::read_json(dir_ / "s" / "smooth.json");
  EXPECT_EQ(info["loglik_type"], "approximate");
  const cli::ModelSetup setup = cli::build_model(cli::load_config(cfg));
  const GaussianApprox ga = gaussian_approximation(setup.model.update(setup.model.initial_theta()));
  EXPECT_NEAR(info["loglik"].get<double>(), ga.approx_loglik(), 1e-9);
}

TEST_F(CliTest, ZeroNoiseSimulateIsTrend) {
  const json doc = {{"model",
                     {{"family", "bsm_lg"},
                      {"sd_y", 0.0},
                      {"sd_level", 0.0},
                      {"sd_slope", 0.0},
                      {"a1", {1.0, 0.5}},
                      {"P1", {{0.0, 0.0}, {0.0, 0.0}}}}},
                    {"simulate", {{"n", 12}}}};
  const auto cfg = write_config("trend.json", doc);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "s").string()).code, 0);
  const cli::DataTable tab = cli::read_csv(dir_ / "s" / "simulated.csv");
  ASSERT_EQ(tab.values.rows(), 12);
  for (Eigen::Index t = 0; t < 12; ++t) EXPECT_NEAR(tab.values(t, tab.column("y")), 1.0 + 0.5 * t, 1e-12);
}

TEST_F(CliTest, ConfigEchoReproducesRun) {
  const auto cfg = write_config("pois.json", poisson_rw());
  ASSERT_EQ(run("mcmc --config " + cfg.string() + " --seed 21 --out " + (dir_ / "a").string()).code, 0);
  ASSERT_EQ(run("mcmc --config " + (dir_ / "a" / "run.json").string() + " --out " + (dir_ / "b").string()).code, 0);
  for (const char* f : {"theta.csv", "states.csv", "run.json"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(CliTest, BivariatePoissonPipeline) {
  {
    std::ofstream csv(dir_ / "y.csv");
    csv << "y1,y2\n";
    const int a[] = {2, 1, 3, 0, 2, 4, 3, 5, 2, 3, 1, 2, 4, 3, 2};
    const int b[] = {1, 2, 2, 1, 3, 3, 4, 4, 2, 2, 2, 1, 3, 4, 3};
    for (int t = 0; t < 15; ++t) csv << a[t] << "," << b[t] << "\n";
  }
  const json doc = {
      {"model",
       {{"family", "ssm_custom"},
        {"data_path", "y.csv"},
        {"columns", {"y1", "y2"}},
        {"distribution", {"poisson", "poisson"}},
        {"Z", {{1.0}, {1.0}}},
        {"T", {{1.0}}},
        {"R", {{0.1}}},
        {"a1", {0.0}},
        {"P1", {{1.0}}},
        {"parameters",
         {{{"name", "sigma"},
           {"prior", {{"family", "gamma"}, {"init", 0.1}, {"params", {2.0, 0.01}}}},
           {"targets", {"R[0,0,0]"}}}}}}},
      {"mcmc", {{"iter", 1200}, {"burnin", 400}, {"mcmc_type", "approx"}, {"particles", 10}}},
      {"suggest_n", {{"ladder", {2, 4, 8}}, {"replications", 20}}},
      {"seed", 2}};
  const auto cfg = write_config("biv.json", doc);
  const std::string r = (dir_ / "r").string();
  ASSERT_EQ(run("mcmc --config " + cfg.string() + " --out " + r).code, 0);
  const Result sn = run("suggest-n --run " + r);
  ASSERT_EQ(sn.code, 0) << sn.err;
  const json est = cli::read_json(dir_ / "r" / "suggest_n.json");
  EXPECT_EQ(est["sd_table"].size(), 3u);
  ASSERT_EQ(run("post-correct --run " + r).code, 0);
  ASSERT_EQ(run("summary --run " + r).code, 0);
  const McmcOutput out = cli::load_run(dir_ / "r");
  EXPECT_TRUE(out.weighted);
  EXPECT_FALSE((out.weights.array() == 1.0).all());
  const json sum = cli::read_json(dir_ / "r" / "summary.json");
  EXPECT_EQ(sum[0]["variable"], "sigma");
  EXPECT_TRUE(std::isfinite(sum[0]["mean"].get<double>()));
}

TEST_F(CliTest, NegbinDriftSimulation) {
  {
    std::ofstream csv(dir_ / "x.csv");
    csv << "x\n";
    for (int t = 1; t <= 200; ++t) csv << 3.0 + 0.01 * t + std::sin(t) << "\n";
  }
  const json doc = {{"model",
                     {{"family", "bsm_ng"},
                      {"distribution", "negative_binomial"},
                      {"data_path", "x.csv"},
                      {"xreg", {"x"}},
                      {"beta", {-0.9}},
                      {"sd_level", 0.1},
                      {"sd_slope", 0.0},
                      {"phi", 5.0},
                      {"a1", {5.0, 0.01}},
                      {"P1", {{0.0, 0.0}, {0.0, 0.0}}}}}};
  const auto cfg = write_config("nb.json", doc);
  for (const char* d : {"a", "b"})
    ASSERT_EQ(run("simulate --config " + cfg.string() + " --seed 123 --out " + (dir_ / d).string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "simulated.csv"), slurp(dir_ / "b" / "simulated.csv"));
  const cli::DataTable tab = cli::read_csv(dir_ / "a" / "simulated.csv");
  ASSERT_EQ(tab.values.rows(), 200);
  ASSERT_GE(tab.column("x"), 0);
  ASSERT_GE(tab.column("state_2"), 0);
  for (Eigen::Index t = 0; t < 200; ++t) {
    const double y = tab.values(t, tab.column("y"));
    EXPECT_GE(y, 0.0);
    EXPECT_EQ(y, std::floor(y));
    EXPECT_NEAR(tab.values(t, tab.column("state_2")), 0.01, 1e-12);
  }
}

TEST(CliExitCodes, MapsExceptionKinds) {
  EXPECT_EQ(cli::exit_code_for(cli::ConfigError("a", "b")), 2);
  EXPECT_EQ(cli::exit_code_for(ModelError("x")), 2);
  EXPECT_EQ(cli::exit_code_for(NumericalError("x", 3)), 3);
  EXPECT_EQ(cli::exit_code_for(std::runtime_error("io")), 1);
}

}  // namespace
