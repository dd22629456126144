#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using archmark::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("archmark_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("synth writes the requested models and a manifest") {
  const auto dir = scratch("synth");
  const auto r = call({"synth", "--n", "4", "--out", dir.string(), "--seed", "3"});
  REQUIRE(r.code == 0);
  int stl = 0;
  for (const auto& e : fs::directory_iterator(dir)) stl += e.path().extension() == ".stl";
  CHECK(stl == 4);
  CHECK(fs::exists(dir / "manifest.csv"));
  CHECK(fs::exists(dir / "run_meta.json"));
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(call({"synth", "--bogus"}).code == 1);
  CHECK(call({"nonsense"}).code == 1);
  CHECK(call({}).code == 1);
}

TEST_CASE("missing input is a data error") {
  CHECK(call({"info", "--mesh", "/nonexistent/arch.stl"}).code == 2);
  CHECK(call({"evaluate", "--pred", "/nonexistent", "--manifest", "/nonexistent/manifest.csv"}).code == 2);
}

TEST_CASE("oracle predictions evaluate perfectly and repeat byte for byte") {
  const auto data = scratch("data");
  REQUIRE(call({"synth", "--n", "4", "--out", data.string(), "--seed", "5"}).code == 0);
  std::string first_report;
  for (int round = 0; round < 2; ++round) {
    const auto pred = scratch("pred" + std::to_string(round));
    const auto p = call({"predict", "--manifest", (data / "manifest.csv").string(), "--auto-split", "2/2",
                         "--oracle", "--out", pred.string(), "--seed", "5", "--threads", "1"});
    REQUIRE(p.code == 0);
    const auto e = call({"evaluate", "--pred", pred.string(), "--manifest", (data / "manifest.csv").string()});
    REQUIRE(e.code == 0);
    const auto report = slurp(pred / "report.json");
    CHECK(report.find("\"accuracy_percent\"") != std::string::npos);
    if (round == 0) {
      first_report = report;
    } else {
      CHECK(report == first_report);
    }
  }
  for (int round = 0; round < 2; ++round) fs::remove_all(scratch("pred" + std::to_string(round)));
  fs::remove_all(data);
}
