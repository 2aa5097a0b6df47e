#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cpm::cli::run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);)
    if (!l.empty() && l[0] != '#') v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> v;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      v.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  v.push_back(cur);
  return v;
}

// Value of a column in the first data row.
std::string field(const std::string& csv, const std::string& column, std::size_t row = 0) {
  const auto l = lines(csv);
  const auto header = split(l.at(0));
  const auto values = split(l.at(1 + row));
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == column) return values.at(i);
  throw std::runtime_error("no column " + column);
}

}  // namespace

TEST(Cli, ExactGueOrigin) {
  const auto r = run({"exact", "--ensemble", "gue", "--N", "100", "--K", "1", "--lambda", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(field(r.out, "value")), 100 / std::numbers::pi, 0.01 * 100 / std::numbers::pi);
  EXPECT_EQ(field(r.out, "normalization"), "universal-M");
}

TEST(Cli, ExactArgumentErrors) {
  EXPECT_EQ(run({"exact", "--K", "0", "--N", "10"}).code, 2);
  EXPECT_EQ(run({"exact", "--N", "10", "--bogus"}).code, 2);
  EXPECT_EQ(run({"exact"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"exact", "--N", "10", "--ensemble", "sp", "--normalization", "universal-M"}).code, 2);
  EXPECT_EQ(run({"exact", "--N", "10", "--grid", "1:2"}).code, 2);
}

TEST(Cli, ExactSymplecticOriginHasPrediction) {
  const auto r = run({"exact", "--ensemble", "sp", "--N", "50", "--K", "2", "--lambda", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "normalization"), "normalized-origin");
  const double n = 50;
  EXPECT_NEAR(std::stod(field(r.out, "prediction")), n * n * n / (3 * std::numbers::pi), 1e-6 * n * n * n);
  EXPECT_GT(std::stod(field(r.out, "value")), 0.0);
}

TEST(Cli, ExactRawAndGrid) {
  const auto r = run({"exact", "--N", "1", "--M", "1", "--K", "2", "--lambda", "1,0", "--normalization", "raw-F"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(field(r.out, "value")), 1.0, 1e-12);
  const auto g = run({"exact", "--N", "20", "--K", "1", "--grid", "-0.5:0.5:5"});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_EQ(lines(g.out).size(), 6u);
}

TEST(Cli, UniversalityGate) {
  auto r = run({"universality", "--g", "0.1", "--N", "100"});
  EXPECT_EQ(r.code, 0) << r.err;
  r = run({"universality", "--g", "0", "--N", "60", "--K", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"universality", "--g", "-1"}).code, 2);
  r = run({"universality", "--g", "0.1", "--N", "100", "--tolerance", "1e-6"});
  EXPECT_EQ(r.code, 4);
}

TEST(Cli, ConstantsGamma) {
  const auto r = run({"constants", "--gamma", "--K", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(field(r.out, "gamma_K", 0), "1");
  EXPECT_EQ(field(r.out, "gamma_K", 1), "1/12");
  EXPECT_EQ(field(r.out, "gamma_K", 2), "1/8640");
  EXPECT_EQ(field(r.out, "gamma_K", 3), "1/870912000");
  const auto all = run({"constants", "--K", "3", "--format", "json"});
  ASSERT_EQ(all.code, 0);
  const auto j = nlohmann::json::parse(all.out);
  EXPECT_EQ(j["rows"][1]["sp_constant"], "1/24");
  EXPECT_EQ(j["rows"][1]["o_constant"], "1/2");
  EXPECT_EQ(j["rows"][2]["hankel_det"], "-1/8640");
}

TEST(Cli, ZetaRow) {
  const auto r = run({"zeta", "--K", "1", "--T", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(field(r.out, "predicted")), std::log(1000.0), 1e-9);
  const double ratio = std::stod(field(r.out, "ratio"));
  EXPECT_GT(ratio, 0.6);
  EXPECT_LT(ratio, 1.1);
  EXPECT_EQ(run({"zeta", "--T", "5"}).code, 2);
  const auto t = run({"zeta", "--K", "2", "--dk-table", "10"});
  EXPECT_EQ(field(t.out, "d_K", 5), "4");
  const auto s = run({"zeta", "--K", "2", "--sums", "10"});
  EXPECT_EQ(field(s.out, "exact"), "83");
}

TEST(Cli, McDeterministicBytes) {
  const std::vector<std::string> args{"mc", "--ensemble", "gue", "--M", "6", "--K", "2", "--samples", "1e5", "--seed",
                                      "7"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto w = args;
  w.insert(w.end(), {"--workers", "4"});
  EXPECT_EQ(run(w).out, a.out);
}

TEST(Cli, McAgainstExact) {
  const auto r = run({"mc", "--ensemble", "sp", "--M", "3", "--N", "3", "--K", "2", "--lambda", "0.4,1.2",
                      "--samples", "50000", "--seed", "3", "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(std::stod(field(r.out, "z")), 3.0);
  const auto n = run({"mc", "--M", "1", "--N", "1", "--lambda", "5", "--negative", "--epsilon", "1e-3", "--samples",
                      "100000", "--seed", "5", "--exact"});
  ASSERT_EQ(n.code, 0) << n.err;
  EXPECT_LT(std::stod(field(n.out, "z")), 3.0);
}

TEST(Cli, McSampleFileReuse) {
  const std::string path = ::testing::TempDir() + "cpm_cli_samples.bin";
  const auto a = run({"mc", "--ensemble", "quartic", "--M", "3", "--samples", "4000", "--seed", "9", "--lambda",
                      "0.5", "--save-samples", path});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run({"mc", "--load-samples", path, "--lambda", "0.5"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(field(a.out, "mean_re"), field(b.out, "mean_re"));
  std::remove(path.c_str());
  EXPECT_EQ(run({"mc", "--load-samples", path}).code, 3);
}

TEST(Cli, McTuningFailureIsNumerical) {
  EXPECT_EQ(run({"mc", "--ensemble", "quartic", "--M", "4", "--samples", "2000", "--width", "50"}).code, 3);
  EXPECT_EQ(run({"mc", "--M", "2", "--negative", "--lambda", "0.1,0.2", "--K", "3"}).code, 2);
}

TEST(Cli, ConfigFileAndPrecedence) {
  const std::string path = ::testing::TempDir() + "cpm_test.cfg";
  {
    std::ofstream f(path);
    f << "# moment sweep\nensemble = gue\nN = 40\nK = 2\nlambda = 0.1\n";
  }
  const auto cfg = run({"exact", "--config", path});
  ASSERT_EQ(cfg.code, 0) << cfg.err;
  EXPECT_EQ(field(cfg.out, "N"), "40");
  EXPECT_EQ(field(cfg.out, "K"), "2");
  const auto flag = run({"exact", "--config", path, "--K", "1"});
  EXPECT_EQ(field(flag.out, "K"), "1");
  {
    std::ofstream f(path);
    f << "nonsense = 1\n";
  }
  EXPECT_EQ(run({"exact", "--N", "4", "--config", path}).code, 2);
  std::remove(path.c_str());
}

TEST(Cli, JsonOutputFile) {
  const std::string path = ::testing::TempDir() + "cpm_out.json";
  const auto r = run({"exact", "--N", "30", "--K", "1", "--lambda", "0.2", "--format", "json", "--output", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j["metadata"]["command"], "exact");
  EXPECT_EQ(j["metadata"]["parameters"]["N"], "30");
  EXPECT_FALSE(j["metadata"].contains("timestamp"));
  EXPECT_EQ(j["rows"].size(), 1u);
  std::remove(path.c_str());
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("universality"), std::string::npos);
}
