#include "qstab/config.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace qstab;

namespace {

constexpr double kPi = std::numbers::pi;

std::string reference_config(const std::string& r = "7", const std::string& umax = "10") {
  return "# reference rotation experiment\n"
         "d 2\n"
         "m 1\n"
         "A [0.5000000000000001 -0.8660254037844386 0.8660254037844386 0.5000000000000001]\n"
         "B [1 0]\n"
         "x0 [10 10]\n"
         "r " + r + "\n"
         "phi_target 0.39269908169872414\n"
         "noise gaussian_isotropic 1\n"
         "policy both\n"
         "runs 1000\n"
         "horizon 200\n"
         "seed 42\n"
         "umax " + umax + "\n";
}

class TempDir {
public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("qstab_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
  std::filesystem::path path() const { return path_; }

private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

}  // namespace

TEST(ParseConfig, ReferenceExperiment) {
  const ExperimentConfig cfg = parse_config(reference_config());
  EXPECT_EQ(cfg.d, 2);
  EXPECT_EQ(cfg.m, 1);
  EXPECT_FALSE(cfg.r_auto);
  EXPECT_EQ(cfg.r, 7.0);
  ASSERT_TRUE(cfg.phi_target.has_value());
  EXPECT_EQ(*cfg.phi_target, 0.39269908169872414);
  EXPECT_EQ(cfg.noise.kind, "gaussian_isotropic");
  EXPECT_EQ(cfg.noise.param, 1.0);
  EXPECT_EQ(cfg.policy, PolicyChoice::Both);
  EXPECT_EQ(cfg.runs, 1000);
  EXPECT_EQ(cfg.horizon, 200);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_FALSE(cfg.umax_auto);
  EXPECT_EQ(cfg.umax, 10.0);
  EXPECT_EQ(cfg.A(0, 1), -0.8660254037844386);
  EXPECT_EQ(cfg.B(0, 0), 1.0);
  EXPECT_EQ(cfg.x0(1), 10.0);
}

TEST(ParseConfig, RoundTripIsLossless) {
  for (const std::string& text :
       {reference_config(), reference_config("auto", "auto"),
        std::string("d 2\nm 2\nA [1 0 0 1]\nB [1 0 0 1]\nx0 [0 0]\n"
                    "phi_target 0.3\nnoise gaussian_diag [0.5 2]\n"
                    "policy baseline\nruns 3\nhorizon 10\nseed 9\n")}) {
    const ExperimentConfig once = parse_config(text);
    const std::string serialized = serialize_config(once);
    const ExperimentConfig twice = parse_config(serialized);
    EXPECT_EQ(serialize_config(twice), serialized);
  }
}

TEST(ParseConfig, Failures) {
  EXPECT_THROW(parse_config(std::string("d 2\n")), ConfigError);  // missing keys
  EXPECT_THROW(parse_config(reference_config() + "d 2\n"), ConfigError);  // duplicate
  EXPECT_THROW(parse_config(reference_config() + "mystery 1\n"), ConfigError);  // unknown
  {
    std::string bad = reference_config();
    const std::string full = "A [0.5000000000000001 ";
    bad.replace(bad.find(full), full.size(), "A [");  // drops one entry
    EXPECT_THROW(parse_config(bad), ConfigError);
  }
  {
    std::string bad = reference_config();
    bad.replace(bad.find("runs 1000"), 9, "runs 0\n#");
    EXPECT_THROW(parse_config(bad), ConfigError);
  }
  {
    std::string bad = reference_config();
    bad.replace(bad.find("policy both"), 11, "policy blah");
    EXPECT_THROW(parse_config(bad), ConfigError);
  }
  {
    std::string bad = reference_config();
    bad.replace(bad.find("noise gaussian_isotropic 1"), 26, "noise exotic_stable 1.5   ");
    EXPECT_THROW(parse_config(bad), ConfigError);
  }
  // phi_target may only be dropped when a bins file provides directions.
  {
    std::string bad = reference_config();
    bad.erase(bad.find("phi_target"), 40);
    EXPECT_THROW(parse_config(bad), ConfigError);
  }
}

TEST(Resolve, ExplicitReferenceValues) {
  const ResolvedExperiment exp = resolve(parse_config(reference_config()));
  EXPECT_EQ(exp.reach.kappa, 2);
  EXPECT_EQ(exp.quantizer.directions.size(), 8u);
  EXPECT_EQ(exp.quantizer.r, 7.0);
  EXPECT_EQ(exp.umax, 10.0);
  EXPECT_EQ(exp.c4, 8.0);
  EXPECT_TRUE(exp.c4_is_analytic);
  EXPECT_TRUE(exp.report.all_pass());
}

TEST(Resolve, AutoRadiusAndBudget) {
  const ResolvedExperiment exp = resolve(parse_config(reference_config("auto", "auto")));
  const double r_min = min_radius(2, exp.reach.sigma_max_RI, exp.c4, exp.quantizer.phi);
  EXPECT_NEAR(exp.quantizer.r, 1.1 * r_min, 1e-12);
  EXPECT_EQ(exp.umax, min_umax(exp.quantizer.r, exp.reach.sigma_min));
  EXPECT_TRUE(exp.report.all_pass());
  EXPECT_NEAR(exp.report.find("radius_condition")->margin, 0.1 * r_min, 1e-9);
}

TEST(Resolve, EmpiricalC4WhenNoAnalyticValueExists) {
  TempDir dir;
  // A two-point table with ||w|| = 1 exactly: E||w||^4 = 1.
  const std::string table = dir.file("table.txt", "1 0\n-1 0\n");
  std::string text = reference_config();
  text.replace(text.find("noise gaussian_isotropic 1"), 26, "noise user_table " + table);
  const ResolvedExperiment exp = resolve(parse_config(text));
  EXPECT_FALSE(exp.c4_is_analytic);
  EXPECT_EQ(exp.c4, 1.0);
}

TEST(Resolve, BinsFileProvidesDirectionsAndRadius) {
  TempDir dir;
  const RadialQuantizer designed = design_bins(2, 6.5, kPi / 8.0);
  const std::string bins_path = (dir.path() / "bins.txt").string();
  save_bins(designed, bins_path);

  std::string text = reference_config("auto", "10");
  text += "bins_file " + bins_path + "\n";
  const std::string phi_line = "phi_target 0.39269908169872414\n";
  text.erase(text.find(phi_line), phi_line.size());
  const ResolvedExperiment exp = resolve(parse_config(text));
  EXPECT_EQ(exp.quantizer.r, 6.5);  // file radius used when r is auto
  EXPECT_EQ(exp.quantizer.directions.size(), designed.directions.size());

  // Explicit r overrides the file radius.
  std::string text2 = reference_config("7", "10");
  text2 += "bins_file " + bins_path + "\n";
  EXPECT_EQ(resolve(parse_config(text2)).quantizer.r, 7.0);
}

TEST(Resolve, UnreachableSystemThrows) {
  std::string text = reference_config();
  text.replace(text.find("B [1 0]"), 7, "B [0 0]");
  EXPECT_THROW(resolve(parse_config(text)), NotReachableError);
}

TEST(CheckConfig, UnreachableSystemDegrades) {
  std::string text = reference_config("auto", "auto");
  text.replace(text.find("B [1 0]"), 7, "B [0 0]");
  const ConditionReport report = check_config(parse_config(text));
  EXPECT_FALSE(report.all_pass());
  ASSERT_NE(report.find("reachable"), nullptr);
  EXPECT_FALSE(report.find("reachable")->pass);
  EXPECT_TRUE(std::isnan(report.r));
  EXPECT_TRUE(std::isnan(report.umax));
}

TEST(CheckConfig, PassesForTheReferenceExperiment) {
  EXPECT_TRUE(check_config(parse_config(reference_config())).all_pass());
  EXPECT_FALSE(check_config(parse_config(reference_config("5"))).all_pass());
}

TEST(MakeNoiseModel, TableValidation) {
  TempDir dir;
  const std::string bad = dir.file("bad.txt", "1 2 3\n");
  NoiseSpec spec;
  spec.kind = "user_table";
  spec.table_file = bad;
  EXPECT_THROW(make_noise_model(spec, 2), ConfigError);
  spec.table_file = dir.file("empty.txt", "# nothing\n");
  EXPECT_THROW(make_noise_model(spec, 2), ConfigError);
  spec.table_file = (dir.path() / "missing.txt").string();
  EXPECT_THROW(make_noise_model(spec, 2), ConfigError);
}

TEST(SerializeConfig, EmitsCanonicalKeys) {
  const std::string text = serialize_config(parse_config(reference_config()));
  for (const char* key : {"d ", "m ", "A [", "B [", "x0 [", "r 7", "phi_target ",
                          "noise gaussian_isotropic ", "policy both", "runs 1000",
                          "horizon 200", "seed 42", "umax 10"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}
