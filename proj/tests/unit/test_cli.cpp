#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run eqd_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = eqd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return (fs::path(EQD_TEST_DATA_DIR) / name).string(); }

std::vector<std::string> t1_args(std::string cmd, std::string n, std::string theta2) {
  return {std::move(cmd), "--pedigree", data("t1_pedigree.csv"), "--ebv", data("t1_ebv.csv"),
          "--n", std::move(n), "--theta2", std::move(theta2)};
}

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> more) {
  base.insert(base.end(), more);
  return base;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("eqd_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Cli, SolveFixtureT1) {
  const auto r = eqd_run(with(t1_args("solve", "2", "0.8"), {"--json", "-"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["method"], "socp+sa");
  const auto& sa = j["results"].back();
  EXPECT_EQ(sa["kind"], "SA");
  EXPECT_EQ(sa["start_kind"], "SOCP");
  EXPECT_DOUBLE_EQ(sa["gTx"].get<double>(), 3.5);
  EXPECT_TRUE(sa["feasible"].get<bool>());
  EXPECT_EQ(j["chosen"], json::array({1, 2}));
  EXPECT_TRUE(j.contains("meta"));
}

TEST(Cli, EveryMethodRuns) {
  for (const char* m : {"lp", "socp", "sdp", "lp+sa", "sdp+sa", "round+sa"}) {
    const auto r = eqd_run(with(t1_args("solve", "2", "0.8"), {"--method", m, "--json", "-"}));
    ASSERT_EQ(r.code, 0) << m << ": " << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["method"], m);
  }
}

TEST(Cli, ReportsAssumption1Failure) {
  const auto r = eqd_run(with(t1_args("solve", "2", "0.45"), {"--method", "lp", "--json", "-"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_FALSE(j["instance"]["assumption1"].get<bool>());
  EXPECT_EQ(j["results"][0]["residuals"]["assumption1"].get<double>(), 0.0);
}

TEST(Cli, SdpCapExceeded) {
  const auto dir = scratch("cap");
  ASSERT_EQ(eqd_run({"gen", "--founders", "401", "--generations", "0", "--out", dir.string()}).code, 0);
  const auto r = eqd_run({"solve", "--pedigree", (dir / "pedigree.csv").string(), "--ebv",
                          (dir / "ebv.csv").string(), "--n", "5", "--theta2", "1", "--method", "sdp"});
  EXPECT_EQ(r.code, eqd::cli::kExitSolver);
  EXPECT_NE(r.err.find("CapExceeded"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, GenIsReproducible) {
  const auto a = scratch("gen_a");
  const auto b = scratch("gen_b");
  for (const auto& d : {a, b}) {
    ASSERT_EQ(eqd_run({"gen", "--founders", "12", "--generations", "3", "--seed", "7", "--out", d.string()}).code, 0);
  }
  EXPECT_EQ(slurp(a / "pedigree.csv"), slurp(b / "pedigree.csv"));
  EXPECT_EQ(slurp(a / "ebv.csv"), slurp(b / "ebv.csv"));
  EXPECT_FALSE(slurp(a / "ebv.csv").empty());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, OracleFixtureT1) {
  for (const char* m : {"enum", "bnb"}) {
    const auto r = eqd_run(with(t1_args("oracle", "2", "0.8"), {"--method", m, "--json", "-"}));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_DOUBLE_EQ(j["opt"].get<double>(), 3.5);
    EXPECT_EQ(j["chosen"], json::array({1, 2}));
  }
}

TEST(Cli, NoMetaIsByteIdentical) {
  const auto args = with(t1_args("solve", "2", "0.6"), {"--method", "round+sa", "--seed", "3", "--json", "-", "--no-meta"});
  const auto first = eqd_run(args);
  const auto second = eqd_run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_EQ(first.out, second.out);
  EXPECT_EQ(first.out.find("time_s"), std::string::npos);
  EXPECT_EQ(first.out.find("meta"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(eqd_run(t1_args("oracle", "2", "0.4")).code, eqd::cli::kExitInfeasible);
  EXPECT_EQ(eqd_run(with(t1_args("solve", "2", "0.1"), {"--method", "socp+sa"})).code,
            eqd::cli::kExitInfeasible);
  EXPECT_EQ(eqd_run({"solve", "--pedigree", "/nonexistent.csv", "--ebv", data("t1_ebv.csv"), "--n",
                     "2", "--theta2", "0.8"})
                .code,
            eqd::cli::kExitInput);
  EXPECT_EQ(eqd_run({"solve", "--bogus"}).code, eqd::cli::kExitInput);
  EXPECT_EQ(eqd_run(with(t1_args("solve", "2", "0.8"), {"--method", "qp"})).code, eqd::cli::kExitInput);
  EXPECT_EQ(eqd_run({"--help"}).code, eqd::cli::kExitOk);
}

TEST(Cli, ConfigSuppliesDefaults) {
  const auto dir = scratch("config");
  {
    std::ofstream f(dir / "run.ini");
    f << "pedigree = " << data("t1_pedigree.csv") << "\n"
      << "ebv = " << data("t1_ebv.csv") << "\n"
      << "n = 2\ntheta2 = 0.8\nmethod = lp\n";
  }
  const auto from_file = eqd_run({"solve", "--config", (dir / "run.ini").string(), "--json", "-"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(json::parse(from_file.out)["method"], "lp");
  // Command line wins.
  const auto override_ = eqd_run({"solve", "--config", (dir / "run.ini").string(), "--method", "sdp", "--json", "-"});
  ASSERT_EQ(override_.code, 0) << override_.err;
  EXPECT_EQ(json::parse(override_.out)["method"], "sdp");
  fs::remove_all(dir);
}

TEST(Cli, KinshipReport) {
  const auto r = eqd_run({"kinship", "--pedigree", data("t1_pedigree.csv"), "--json", "-", "--no-meta"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["Z"], 4);
  EXPECT_EQ(j["founders"], 2);
  EXPECT_LT(j["identity_residual"].get<double>(), 1e-12);
}

TEST(Cli, BoundsReport) {
  const auto r = eqd_run(with(t1_args("bounds", "2", "0.8"), {"--samples", "200", "--json", "-"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto b = json::parse(r.out)["bounds"];
  EXPECT_LE(b["lower"].get<double>(), b["upper"].get<double>());
  EXPECT_EQ(b["samples"], 200);
}
