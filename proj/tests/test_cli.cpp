// End-to-end tests of the qstab binary: exit codes, output schemas, and
// byte-level determinism. The binary path is baked in at configure time.
#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef QSTAB_CLI_BIN
#error "QSTAB_CLI_BIN must point at the qstab executable"
#endif

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

CommandResult run(const std::string& args, const std::string& env = "") {
  const fs::path log = fs::temp_directory_path() /
                       ("qstab_cli_out_" + std::to_string(::getpid()) + ".log");
  const std::string cmd =
      env + (env.empty() ? "" : " ") + QSTAB_CLI_BIN " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream buffer;
  buffer << in.rdbuf();
  fs::remove(log);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, buffer.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qstab_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }

  std::string config(const std::string& overrides = "") {
    std::string text =
        "d 2\n"
        "m 1\n"
        "A [0.5000000000000001 -0.8660254037844386 0.8660254037844386 0.5000000000000001]\n"
        "B [1 0]\n"
        "x0 [10 10]\n"
        "r 7\n"
        "phi_target 0.39269908169872414\n"
        "noise gaussian_isotropic 1\n"
        "policy quantized\n"
        "runs 50\n"
        "horizon 40\n"
        "seed 42\n"
        "umax 10\n";
    return text + overrides;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CheckPassesTheReferenceSystem) {
  const auto res = run("check --config " + write("ok.cfg", config()));
  EXPECT_EQ(res.exit_code, 0) << res.output;
  EXPECT_NE(res.output.find("overall pass"), std::string::npos);
}

TEST_F(CliTest, CheckFailsForSmallRadiusWithTheExpectedMargin) {
  std::string text = config();
  text.replace(text.find("r 7"), 3, "r 5");
  const auto res = run("check --config " + write("r5.cfg", text));
  EXPECT_EQ(res.exit_code, 1);
  const auto pos = res.output.find("radius_condition fail ");
  ASSERT_NE(pos, std::string::npos) << res.output;
  const double margin = std::strtod(res.output.c_str() + pos + 22, nullptr);
  EXPECT_NEAR(margin, 5.0 - 6.2150958961201512, 1e-9);
}

TEST_F(CliTest, CheckFailsWhenUnreachable) {
  std::string text = config();
  text.replace(text.find("B [1 0]"), 7, "B [0 0]");
  const auto res = run("check --config " + write("unreach.cfg", text));
  EXPECT_EQ(res.exit_code, 1);
  EXPECT_NE(res.output.find("reachable fail"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("frobnicate --config x").exit_code, 2);
  EXPECT_EQ(run("check").exit_code, 2);                              // missing --config
  EXPECT_EQ(run("check --config /nonexistent/path.cfg").exit_code, 2);
  EXPECT_EQ(run("simulate --config x --frob").exit_code, 2);
}

TEST_F(CliTest, DesignRejectsInadmissibleAngle) {
  std::string text = config();
  text.replace(text.find("phi_target 0.39269908169872414"), 30, "phi_target 0.8             ");
  const auto res = run("design --config " + write("wide.cfg", text));
  EXPECT_EQ(res.exit_code, 2);
  EXPECT_NE(res.output.find("invalid argument"), std::string::npos);
}

TEST_F(CliTest, DesignWritesBinsAndSummary) {
  const std::string bins = (dir_ / "bins.txt").string();
  const auto res = run("design --config " + write("ok.cfg", config()) + " --out " + bins);
  EXPECT_EQ(res.exit_code, 0) << res.output;
  EXPECT_NE(res.output.find("bins 8"), std::string::npos);
  EXPECT_NE(res.output.find("certified true"), std::string::npos);
  EXPECT_NE(res.output.find("control_alphabet 18"), std::string::npos);

  std::ifstream in(bins);
  int d = 0;
  double r = 0.0;
  in >> d >> r;
  EXPECT_EQ(d, 2);
  EXPECT_EQ(r, 7.0);
}

TEST_F(CliTest, SimulateEmitsTheCsvSchema) {
  const std::string out = (dir_ / "run.csv").string();
  const auto res =
      run("simulate --config " + write("ok.cfg", config()) + " --out " + out);
  EXPECT_EQ(res.exit_code, 0) << res.output;
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.rfind("t,mean_sq_norm\n", 0), 0u);
  EXPECT_NE(csv.find("0,200\n"), std::string::npos);  // ||x0||^2 exactly
  EXPECT_NE(res.output.find("b_theoretical"), std::string::npos);  // drift report on stderr
}

TEST_F(CliTest, SimulateRejectsPolicyBoth) {
  std::string text = config();
  text.replace(text.find("policy quantized"), 16, "policy both     ");
  EXPECT_EQ(run("simulate --config " + write("both.cfg", text)).exit_code, 2);
}

TEST_F(CliTest, SimulateZeroNoiseBaselineDeadBeatsFromInsideTheBall) {
  std::string text = config();
  text.replace(text.find("noise gaussian_isotropic 1"), 26, "noise gaussian_isotropic 0");
  text.replace(text.find("policy quantized"), 16, "policy baseline ");
  text.replace(text.find("runs 50"), 7, "runs 1 ");
  text.replace(text.find("x0 [10 10]"), 10, "x0 [2 1]  ");
  const std::string out = (dir_ / "dead.csv").string();
  const auto res = run("simulate --config " + write("dead.cfg", text) + " --out " + out);
  EXPECT_EQ(res.exit_code, 0) << res.output;
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);  // header
  int t = 0;
  while (std::getline(csv, line)) {
    if (t >= 2) {
      // Dead-beat: zero at t = kappa up to the solve's rounding residual.
      const double v = std::strtod(line.c_str() + line.find(',') + 1, nullptr);
      EXPECT_LE(v, 1e-28) << "t = " << t;
    }
    ++t;
  }
  EXPECT_EQ(t, 41);
}

TEST_F(CliTest, SimulateGateAndForce) {
  std::string text = config();
  text.replace(text.find("r 7"), 3, "r 5");
  const std::string cfg = write("gate.cfg", text);
  EXPECT_EQ(run("simulate --config " + cfg).exit_code, 1);
  EXPECT_EQ(run("simulate --config " + cfg + " --force --out " + (dir_ / "f.csv").string())
                .exit_code,
            0);
}

TEST_F(CliTest, SimulateRunsOverrideRejectsZero) {
  EXPECT_EQ(run("simulate --config " + write("ok.cfg", config()) + " --runs 0").exit_code, 2);
}

TEST_F(CliTest, CompareSchemaAndZeroNoiseColumns) {
  std::string text = config();
  text.replace(text.find("noise gaussian_isotropic 1"), 26, "noise gaussian_isotropic 0");
  text.replace(text.find("x0 [10 10]"), 10, "x0 [2 1]  ");
  text.replace(text.find("runs 50"), 7, "runs 1 ");
  const std::string out = (dir_ / "cmp.csv").string();
  const auto res = run("compare --config " + write("cmp.cfg", text) + " --out " + out);
  EXPECT_EQ(res.exit_code, 0) << res.output;
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,msn_quantized,msn_baseline");
  // Interior start: quantized control is zero, so the rotation preserves the
  // norm; the baseline dead-beats to zero from t = kappa on.
  int t = 0;
  while (std::getline(csv, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double q = std::strtod(line.substr(c1 + 1, c2 - c1 - 1).c_str(), nullptr);
    const double b = std::strtod(line.c_str() + c2 + 1, nullptr);
    EXPECT_NEAR(q, 5.0, 1e-12) << "t = " << t;
    if (t >= 2) {
      EXPECT_LE(b, 1e-28) << "t = " << t;
    }
    ++t;
  }
}

TEST_F(CliTest, IdenticalConfigAndSeedGiveIdenticalBytes) {
  const std::string cfg = write("det.cfg", config());
  const std::string out1 = (dir_ / "a.csv").string();
  const std::string out2 = (dir_ / "b.csv").string();
  ASSERT_EQ(run("simulate --config " + cfg + " --out " + out1).exit_code, 0);
  ASSERT_EQ(run("simulate --config " + cfg + " --out " + out2).exit_code, 0);
  EXPECT_EQ(slurp(out1), slurp(out2));

  const std::string out3 = (dir_ / "c.csv").string();
  ASSERT_EQ(run("simulate --config " + cfg + " --out " + out3, "QSTAB_THREADS=1").exit_code, 0);
  EXPECT_EQ(slurp(out1), slurp(out3));

  // A different seed must change the bytes.
  const std::string out4 = (dir_ / "d.csv").string();
  ASSERT_EQ(run("simulate --config " + cfg + " --seed 43 --out " + out4).exit_code, 0);
  EXPECT_NE(slurp(out1), slurp(out4));
}

TEST_F(CliTest, DesignOneDimensionalSystem) {
  const std::string text =
      "d 1\nm 1\nA [1]\nB [1]\nx0 [5]\nr 3\nphi_target 0.3\n"
      "noise gaussian_isotropic 1\npolicy quantized\nruns 5\nhorizon 10\nseed 1\numax 10\n";
  const auto res = run("design --config " + write("one.cfg", text) + " --out " +
                       (dir_ / "bins1.txt").string());
  EXPECT_EQ(res.exit_code, 0) << res.output;
  EXPECT_NE(res.output.find("bins 2"), std::string::npos);
  EXPECT_NE(res.output.find("phi 0"), std::string::npos);
}
