#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "entrans/commands.hpp"
#include "entrans/config.hpp"
#include "entrans/json_io.hpp"

using namespace entrans;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("entrans_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json readJson(const fs::path& p) { return Json::parse(slurp(p)); }

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::string& command, const std::string& text, const fs::path& dir) {
  RunConfig cfg = parseConfig(text);
  cfg.outputDir = dir.string();
  std::ostringstream out, err;
  const int code = runCommand(command, cfg, out, err);
  return {code, out.str(), err.str()};
}

const char* kGrid = "[grid]\ndimension = 2\nlower = -5\nupper = 5\nnodes = 101\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing and echo") {
  const std::string text = std::string(kGrid) +
                           "[constraints]\n# comment\nitems = [{\"expr\": \"x1^2\", \"target\": 0.5}]\n"
                           "[dynamics]\ndt = 0.0005\nseed = 9\n[contour]\nlevels = [0.5, 1, 2]\n";
  const RunConfig c = parseConfig(text);
  CHECK(c.lower == std::vector<double>{-5, -5});
  CHECK(c.nodes == std::vector<int>{101, 101});
  REQUIRE(c.constraints.size() == 1);
  CHECK(c.constraints[0].expr == "x1^2");
  CHECK(*c.constraints[0].target == 0.5);
  CHECK_FALSE(c.constraints[0].lambda.has_value());
  CHECK(c.dt == 0.0005);
  CHECK(c.seed == 9);
  CHECK(c.levels == std::vector<double>{0.5, 1, 2});
  CHECK(c.particles == 100000);

  const std::string echo = echoConfig(c);
  const RunConfig again = parseConfig(echo);
  CHECK(echoConfig(again) == echo);
  CHECK(again.dt == c.dt);
  CHECK(again.levels == c.levels);

  CHECK_THROWS_AS(parseConfig("[grid]\nbogus = 1\n"), InputError);
  CHECK_THROWS_AS(parseConfig("[grid]\nnodes = 11\nnodes = 12\n"), InputError);
  CHECK_THROWS_AS(parseConfig("[constraints]\nitems = [{\"expr\": \"x1\", \"lambda\": 1, \"target\": 2}]\n"),
                  InputError);
  CHECK_THROWS_AS(parseConfig("[constraints]\nitems = [{\"expr\": \"x1\"}]\n"), InputError);
}

TEST_CASE("fit command") {
  const fs::path dir = scratch("fit");
  const std::string text = std::string(kGrid) + "[constraints]\nitems = [{\"expr\": \"x1^2\", \"target\": 0.5}]\n";
  const Run r = run("fit", text, dir);
  CHECK(r.code == kExitOk);
  const Json rep = readJson(dir / "fit_report.json");
  CHECK(std::abs(rep["lambda"][0].get<double>() - 1.0) <= 1e-8);
  CHECK(rep["converged"].get<bool>());
  CHECK(fs::exists(dir / "density.csv"));
  CHECK(fs::exists(dir / "density.json"));

  // Re-running from the echoed config reproduces the outputs byte for byte.
  const fs::path again = scratch("fit_again");
  CHECK(run("fit", slurp(dir / "config.cfg"), again).code == kExitOk);
  CHECK(slurp(again / "fit_report.json") == slurp(dir / "fit_report.json"));
  CHECK(slurp(again / "density.csv") == slurp(dir / "density.csv"));

  const Run dup = run("fit", std::string(kGrid) + "[constraints]\nitems = [{\"expr\": \"x1^2\", \"target\": 0.5}, "
                                                  "{\"expr\": \"x1^2\", \"target\": 0.5}]\n",
                      scratch("fit_dup"));
  CHECK(dup.code == kExitSolver);
  CHECK(dup.err.find("singular Hessian") != std::string::npos);

  const Run bad = run("fit", std::string(kGrid) + "[constraints]\nitems = [{\"expr\": \"x1^^2\", \"target\": 0.5}]\n",
                      scratch("fit_bad"));
  CHECK(bad.code == kExitConfig);
  CHECK(bad.err.find("at offset 3") != std::string::npos);

  const Run fixed = run("fit", std::string(kGrid) + "[constraints]\nitems = [{\"expr\": \"x1^2\", \"lambda\": 1}]\n",
                        scratch("fit_fixed"));
  CHECK(fixed.code == kExitConfig);
}

TEST_CASE("transport command") {
  const std::string bowl = std::string(kGrid) + "[constraints]\nitems = [{\"expr\": \"x1^2 + x2^2\", \"lambda\": 1}]\n";
  const fs::path dir = scratch("transport");
  CHECK(run("transport", bowl + "[transport]\npath = [[0, 0], [1, 1]]\n", dir).code == kExitOk);
  const Json t = readJson(dir / "transport.json");
  CHECK(std::abs(t["factor"].get<double>() - std::exp(-2.0)) <= 1e-12);

  const fs::path loop = scratch("transport_loop");
  CHECK(run("transport", bowl + "[transport]\npath = [[1, 0], [0, 1], [-1, 0], [0, -1]]\nclosed = true\n", loop).code ==
        kExitOk);
  CHECK(std::abs(readJson(loop / "transport.json")["factor"].get<double>() - 1.0) <= 1e-9);

  const Run skew = run("transport",
                       std::string(kGrid) + "[drift]\ncomponents = [\"-x2\", \"x1\"]\n[transport]\npath = [[0, 0], [1, 1]]\n",
                       scratch("transport_skew"));
  CHECK(skew.code == kExitNotSolvable);
}

TEST_CASE("certify command") {
  const fs::path ok = scratch("certify_ok");
  const Run good = run("certify", std::string(kGrid) + "[drift]\ncomponents = [\"-2*x1\", \"-2*x2\"]\n", ok);
  CHECK(good.code == kExitOk);
  CHECK(readJson(ok / "certificate.json")["verdict"].get<std::string>() == "solvable");

  const fs::path bad = scratch("certify_skew");
  const Run skew = run("certify", std::string(kGrid) + "[drift]\ncomponents = [\"-2*x1 + x2\", \"-2*x2 - x1\"]\n", bad);
  CHECK(skew.code == kExitNotSolvable);
  const Json c = readJson(bad / "certificate.json");
  CHECK(c["verdict"].get<std::string>() == "not solvable");
  CHECK(std::abs(c["curvatureMax"].get<double>() - 2.0) <= 1e-6);
  CHECK(c["fpResidual"].is_null());
}

TEST_CASE("contour command") {
  const fs::path dir = scratch("contour");
  const Run r = run("contour",
                    std::string(kGrid) + "[constraints]\nitems = [{\"expr\": \"x1^2 + x2^2\", \"lambda\": 1}]\n"
                                         "[contour]\nlevels = [0.5, 1, 2]\n",
                    dir);
  CHECK(r.code == kExitOk);
  for (int i = 0; i < 3; ++i) CHECK(fs::exists(dir / ("contour_" + std::to_string(i) + ".csv")));
  const Json c = readJson(dir / "contour.json");
  REQUIRE(c["levels"].size() == 3);
  for (const auto& level : c["levels"]) CHECK(level["closed"] == Json::array({true}));
}

TEST_CASE("evolve and sample commands") {
  const std::string base = "[grid]\ndimension = 2\nlower = -4\nupper = 4\nnodes = 41\n"
                           "[constraints]\nitems = [{\"expr\": \"x1^2 + x2^2\", \"lambda\": 1}]\n";
  const fs::path dir = scratch("evolve");
  CHECK(run("evolve", base + "[dynamics]\ndt = 0.002\nT = 1\nsample_every = 250\n", dir).code == kExitOk);
  const Json e = readJson(dir / "evolve.json");
  CHECK(e["snapshots"].size() == 3);
  for (const auto& s : e["snapshots"]) CHECK(fs::exists(dir / s["file"].get<std::string>()));

  CHECK(run("evolve", base + "[dynamics]\ndt = 0.1\nT = 1\n", scratch("evolve_unstable")).code == kExitConfig);

  const std::string sample = base + "[dynamics]\nT = 0.05\nparticles = 2000\nseed = 4\n";
  const fs::path a = scratch("sample_a"), b = scratch("sample_b");
  CHECK(run("sample", sample, a).code == kExitOk);
  CHECK(run("sample", sample, b).code == kExitOk);
  CHECK(slurp(a / "sample.json") == slurp(b / "sample.json"));
  CHECK(slurp(a / "histogram.csv") == slurp(b / "histogram.csv"));
}

TEST_CASE("unknown command") {
  std::ostringstream out, err;
  CHECK(runCommand("plot", RunConfig{}, out, err) == kExitConfig);
}

}  // TEST_SUITE
