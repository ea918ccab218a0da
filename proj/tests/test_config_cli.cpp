#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "app.hpp"
#include "config.hpp"

using namespace wavelab;
using namespace wavelab::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wavelab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const auto p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

std::vector<std::string> problems_of(const json& doc) {
  try {
    build_config(doc);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems)
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Config, DefaultsAndMinimalDocument) {
  const auto c = build_config(default_config_json());
  EXPECT_EQ(c.mollifiers.size(), 2u);
  EXPECT_EQ(c.epsilons.size(), 6u);
  EXPECT_DOUBLE_EQ(c.epsilons.front(), 0.1);
  const json minimal = {{"version", 1},
                        {"model", {{"kind", "landau"}, {"B", 1.0}}},
                        {"modes", {{"cutoff", 5.0}}},
                        {"speed", {{"kind", "constant"}, {"value", 1.0}}},
                        {"data", {{"kind", "law"}, {"law", {{"kind", "constant"}}}}}};
  const auto m = build_config(minimal);
  EXPECT_DOUBLE_EQ(m.cutoff, 5.0);
  EXPECT_TRUE(m.epsilons.empty());
  auto missing = minimal;
  missing.erase("speed");
  EXPECT_TRUE(mentions(problems_of(missing), "speed"));
}

TEST(Config, InvalidValuesReportFieldPaths) {
  auto doc = default_config_json();
  doc["model"]["B"] = -1.0;
  EXPECT_TRUE(mentions(problems_of(doc), "model.B"));

  doc = default_config_json();
  doc["regularization"]["scale"] = {{"kind", "logarithmic"}};
  doc["regularization"]["epsilons"] = json::array({0.5, 0.1, 0.05, 0.01, 0.005, 0.001});
  EXPECT_TRUE(mentions(problems_of(doc), "regularization.epsilons"));

  doc = default_config_json();
  doc["regularization"]["epsilons"] = json::array({1.5, 0.1, 0.05, 0.01, 0.005, 0.001});
  EXPECT_FALSE(problems_of(doc).empty());

  doc = default_config_json();
  doc["model"]["colour"] = "blue";
  EXPECT_TRUE(mentions(problems_of(doc), "model.colour"));

  doc = default_config_json();
  doc["version"] = 2;
  EXPECT_TRUE(mentions(problems_of(doc), "version"));
}

TEST(Config, ErrorsAreCollectedTogether) {
  auto doc = default_config_json();
  doc["model"]["B"] = 0.0;
  doc["time"]["T"] = -1.0;
  EXPECT_GE(problems_of(doc).size(), 2u);
}

TEST(Config, SampleConfigsLoad) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(fs::path(WAVELAB_SOURCE_DIR) / "configs")) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(parse_config(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GE(n, 5u);
}

TEST(Config, SyntaxErrorCarriesLineAndColumn) {
  try {
    parse_json_text("{\n  \"version\": 1,\n  \"model\": {\n}", "cfg.json");
    FAIL() << "expected a parse error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.json:4:"), std::string::npos) << e.what();
  }
}

TEST(Cli, SpectraWritesOneRowPerMode) {
  const auto dir = scratch("spectra");
  auto doc = default_config_json();
  doc["modes"]["cutoff"] = 5.0;
  Options o;
  o.command = "spectra";
  o.config_path = write_config(dir, doc).string();
  o.out_dir = (dir / "out").string();
  std::ostringstream log;
  ASSERT_EQ(run(o, log), kAllPass) << log.str();
  const auto csv = read_file(dir / "out" / "spectra.csv");
  std::size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  EXPECT_EQ(rows, 4u);
  const auto report = json::parse(read_file(dir / "out" / "report.json"));
  EXPECT_TRUE(report["all_pass"].get<bool>());
  bool listed = false;
  for (const auto& m : report["manifest"])
    if (m["file"] == "spectra.csv") {
      listed = true;
      EXPECT_EQ(m["sha256"], sha256_hex(csv));
    }
  EXPECT_TRUE(listed);
}

TEST(Cli, VerifySuitePasses) {
  const auto dir = scratch("verify");
  Options o;
  o.command = "verify";
  o.out_dir = dir.string();
  std::ostringstream log;
  EXPECT_EQ(run(o, log), kAllPass) << log.str();
}

TEST(Cli, UnwritableOutputIsConfigError) {
  const auto dir = scratch("blocked");
  std::ofstream(dir / "file") << "x";
  Options o;
  o.command = "spectra";
  o.out_dir = (dir / "file" / "sub").string();
  std::ostringstream log;
  EXPECT_EQ(run(o, log), kConfigError);
  o.command = "bogus";
  EXPECT_EQ(run(o, log), kConfigError);
  o.command = "spectra";
  o.config_path = (dir / "missing.json").string();
  EXPECT_EQ(run(o, log), kConfigError);
}

TEST(Cli, SolveOutputsIndependentOfJobCount) {
  auto doc = default_config_json();
  doc["modes"]["cutoff"] = 40.0;
  doc["data"] = {{"kind", "random"}, {"seed", 17}, {"u1_weight", 1.0}, {"law", {{"kind", "sobolev"}, {"r", 2.0}}}};
  std::vector<json> manifests;
  for (std::size_t jobs : {1u, 2u}) {
    const auto dir = scratch("jobs" + std::to_string(jobs));
    Options o;
    o.command = "solve";
    o.config_path = write_config(dir, doc).string();
    o.out_dir = (dir / "out").string();
    o.jobs = jobs;
    std::ostringstream log;
    ASSERT_EQ(run(o, log), kAllPass) << log.str();
    manifests.push_back(json::parse(read_file(dir / "out" / "report.json"))["manifest"]);
  }
  ASSERT_FALSE(manifests[0].empty());
  for (std::size_t i = 0; i + 1 < manifests[0].size(); ++i) EXPECT_EQ(manifests[0][i], manifests[1][i]);
}

TEST(Cli, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Cli, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
