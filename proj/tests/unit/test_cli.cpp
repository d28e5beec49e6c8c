#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "fsad/cli/commands.hpp"
#include "fsad/error.hpp"

using namespace fsad;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fsad_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

int run(std::vector<std::string> args) {
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main_entry(static_cast<int>(argv.size()), argv.data());
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    CHECK(run({"fsad", "localtime", "--nu", "0.5", "--out-dir", dir.string()}) == 2);
    CHECK(run({"fsad", "simulate", "--hurst", "0.3", "--out-dir", dir.string()}) == 2);
    CHECK(run({"fsad", "simulate", "--method", "milstein", "--out-dir", dir.string()}) == 2);
    CHECK(run({"fsad", "nonsense"}) == 2);
    CHECK(run({"fsad", "simulate", "--paths", "4", "--steps", "8", "--out-dir", dir.string()}) == 0);
  }

  TEST_CASE("binary reports usage errors") {
    const auto dir = scratch("bin");
    const std::string cmd = std::string(FSAD_CLI_PATH) + " localtime --nu 1 --out-dir " + dir.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
  }

  TEST_CASE("simulate writes a manifest") {
    const auto dir = scratch("manifest");
    CHECK(run({"fsad", "simulate", "--paths", "3", "--steps", "8", "--dim", "2", "--out-dir", dir.string()}) == 0);
    const auto doc = nlohmann::json::parse(read(dir / "manifest.json"));
    for (const char* key : {"command", "tool_version", "timestamp", "seed", "parameters", "outputs", "assumptions"})
      CHECK(doc.contains(key));
    CHECK(doc["command"] == "simulate");
    CHECK(doc["outputs"].size() == 3);
    CHECK(fs::exists(dir / "moments_dim1.csv"));
    CHECK(read(dir / "paths.csv").rfind("path_index,dim,t,value", 0) == 0);
  }

  TEST_CASE("euler and representation agree without attraction") {
    const auto e = scratch("euler"), r = scratch("repr");
    const std::vector<std::string> common = {"--a", "0", "--paths", "3", "--steps", "16", "--seed", "5"};
    auto with = [&](const std::string& method, const fs::path& dir) {
      std::vector<std::string> args = {"fsad", "simulate", "--method", method, "--out-dir", dir.string()};
      args.insert(args.end(), common.begin(), common.end());
      return run(args);
    };
    REQUIRE(with("euler", e) == 0);
    REQUIRE(with("representation", r) == 0);
    std::ifstream fe(e / "paths.csv"), fr(r / "paths.csv");
    std::string le, lr;
    std::getline(fe, le);
    std::getline(fr, lr);
    while (std::getline(fe, le) && std::getline(fr, lr)) {
      const double ve = std::stod(le.substr(le.rfind(',') + 1));
      const double vr = std::stod(lr.substr(lr.rfind(',') + 1));
      CHECK(ve == doctest::Approx(vr).epsilon(1e-12));
    }
  }

  TEST_CASE("covariance and tanaka commands") {
    const auto dir = scratch("cov");
    CHECK(run({"fsad", "covariance", "--steps", "8", "--out-dir", dir.string()}) == 0);
    CHECK(fs::exists(dir / "covariance.csv"));
    CHECK(fs::exists(dir / "dh.csv"));
    CHECK(fs::exists(dir / "bounds.csv"));
    CHECK(run({"fsad", "tanaka", "--out-dir", dir.string()}) == 0);
    CHECK(read(dir / "tanaka.csv").rfind("t,x,E_abs,drift_term,E_weighted_lt,residual", 0) == 0);
  }

  TEST_CASE("config file supplies defaults") {
    const auto dir = scratch("config");
    fs::create_directories(dir);
    std::ofstream(dir / "run.ini") << "paths=2\nsteps=4\nseed=9\n";
    CHECK(run({"fsad", "simulate", "--config", (dir / "run.ini").string(), "--out-dir", (dir / "out").string()}) == 0);
    const auto doc = nlohmann::json::parse(read(dir / "out" / "manifest.json"));
    CHECK(doc["parameters"]["paths"] == 2);
    CHECK(doc["seed"] == 9);
  }

  TEST_CASE("quick artifacts are deterministic") {
    const auto a = cli::write_quick_artifacts(scratch("qa"), 1);
    const auto b = cli::write_quick_artifacts(scratch("qb"), 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(read(a[i]) == read(b[i]));
  }
}
