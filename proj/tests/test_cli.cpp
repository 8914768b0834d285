#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() { return SINHP_CLI_PATH; }

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sinhp_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("optimize: k=2 critical point and the equal-signs branch") {
  const fs::path dir = fresh_dir("opt");
  REQUIRE(run("optimize --k 2 --out " + dir.string()) == 0);
  nlohmann::json j;
  std::ifstream(dir / "optimize.json") >> j;
  CHECK(j["classification"] == "max");
  CHECK(std::abs(j["xi"][0].get<double>() + 0.57735026918962) <= 1e-6);
  CHECK(std::abs(j["xi"][1].get<double>() - 0.57735026918962) <= 1e-6);

  const fs::path dir2 = fresh_dir("opt_same");
  REQUIRE(run("optimize --k 2 --signs ++ --out " + dir2.string()) == 0);
  nlohmann::json j2;
  std::ifstream(dir2 / "optimize.json") >> j2;
  CHECK(j2["classification"] == "none found");
}

TEST_CASE("solve + verify round trip through the emitted files") {
  const fs::path dir = fresh_dir("solve");
  REQUIRE(run("solve --k 1 --lambda 0.05 --base-n 128 --no-sigma --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "profile.csv"));
  CHECK(fs::exists(dir / "profile.json"));
  CHECK(fs::exists(dir / "manifest.txt"));

  nlohmann::json j;
  std::ifstream(dir / "profile.json") >> j;
  CHECK(j["nodal_count"] == 1);
  CHECK(j["nodal_certified"] == true);
  CHECK(j["residual_sup"].get<double>() <= 1e-10);

  const fs::path vdir = fresh_dir("verify");
  const int code = run("verify --profile " + (dir / "profile.csv").string() + " --report " +
                       (dir / "profile.json").string() + " --out " + vdir.string());
  CHECK(code == 0);
  nlohmann::json v;
  std::ifstream(vdir / "verify.json") >> v;
  CHECK(v["pass"] == true);
  CHECK(v["checks"]["nodal_count"]["pass"] == true);

  // a tight mass tolerance must fail verification with exit code 4
  const fs::path vdir2 = fresh_dir("verify_tight");
  const int code2 = run("verify --profile " + (dir / "profile.csv").string() + " --report " +
                        (dir / "profile.json").string() + " --mass-tol 1e-6 --out " +
                        vdir2.string());
  CHECK(code2 == 4);
}

TEST_CASE("config errors exit with code 2") {
  const fs::path dir = fresh_dir("badcfg");
  CHECK(run("solve --k 2 --signs +++ --out " + dir.string()) == 2);
  CHECK(run("nonsense --k 1") == 2);
  CHECK(run("solve --k 1 --xi 1.5 --out " + dir.string()) == 2);
}

TEST_CASE("manifest round trip reproduces every emitted digit") {
  const fs::path a = fresh_dir("run_a");
  REQUIRE(run("sweep --k 1 --lambda-range 0.2:0.05 --factor 0.5 --base-n 128 --no-sigma --out " +
              a.string()) == 0);
  const fs::path b = fresh_dir("run_b");
  REQUIRE(run("sweep --config " + (a / "manifest.txt").string() + " --out " + b.string()) == 0);
  for (const char* name : {"summary.csv", "profile_0001.csv", "profile_0002.json",
                           "profile_0003.csv", "profile_0003.json"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }
}

TEST_CASE("sweep emits one profile and report per lambda") {
  const fs::path dir = fresh_dir("sweep");
  REQUIRE(run("sweep --k 1 --lambda-range 0.2:0.0125 --factor 0.5 --base-n 128 --no-sigma --out " +
              dir.string()) == 0);
  for (int i = 1; i <= 5; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "profile_%04d", i);
    CHECK(fs::exists(dir / (std::string(stem) + ".csv")));
    CHECK(fs::exists(dir / (std::string(stem) + ".json")));
  }
  CHECK(!fs::exists(dir / "profile_0006.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
}
