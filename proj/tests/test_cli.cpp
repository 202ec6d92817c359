#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = DSIM_CLI_PATH;
const std::string kScenarios = DSIM_SCENARIO_DIR;

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli(const std::string& args, const std::string& env = "") {
  const fs::path log = fs::temp_directory_path() / "dsim_test_cli.log";
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + kCli + "' " + args + " > '" + log.string() + "' 2>&1";
  const int st = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  o.output = slurp(log);
  return o;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("validate reports the line and field of an undefined node") {
  const auto o = cli("validate --scenario '" + kScenarios + "/bad_undefined_node.yaml'");
  CHECK(o.code == 1);
  CHECK(o.output.find("bad_undefined_node.yaml:5:10: flows[0].dst: undefined node 'D9'") != std::string::npos);
}

TEST_CASE("validate accepts the shipped example") {
  const auto o = cli("validate --scenario '" + kScenarios + "/test_c_pq.yaml'");
  CHECK(o.code == 0);
  CHECK(o.output.find("ok") != std::string::npos);
}

TEST_CASE("usage errors exit 1, help exits 0") {
  CHECK(cli("run --scenario x.yaml --out /tmp/x --bogus").code == 1);
  CHECK(cli("").code == 1);
  CHECK(cli("experiment d --out /tmp/x").code == 1);
  CHECK(cli("experiment a --out /tmp/x --duration 5 --warmup 5").code == 1);
  CHECK(cli("experiment a --out /tmp/x --duration 5parsecs").code == 1);
  CHECK(cli("validate --scenario /nonexistent.yaml").code == 1);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("a zero-length run is a runtime error and writes nothing") {
  const auto out = fresh_dir("dsim_test_cli_zero");
  const auto o = cli("run --scenario '" + kScenarios + "/bad_zero_duration.yaml' --out '" + out.string() + "'");
  CHECK(o.code == 2);
  CHECK(o.output.find("no samples") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "summary.csv"));
}

TEST_CASE("run writes a summary, honoring DSIM_OUT_DIR") {
  const auto out = fresh_dir("dsim_test_cli_env");
  const auto o = cli("run --scenario '" + kScenarios + "/minimal.yaml'", "DSIM_OUT_DIR='" + out.string() + "'");
  CHECK(o.code == 0);
  const auto s = slurp(out / "summary.csv");
  CHECK(s.find("# seed: 1") != std::string::npos);
  CHECK(s.find("probe_owd,owd,") != std::string::npos);
  CHECK(fs::exists(out / "probe_ipdv_hist.csv"));
}

TEST_CASE("seed override changes a randomized run") {
  const auto a = fresh_dir("dsim_test_cli_s1");
  const auto b = fresh_dir("dsim_test_cli_s2");
  const std::string sc = "--scenario '" + kScenarios + "/test_c_wfq.yaml'";
  REQUIRE(cli("run " + sc + " --seed 1 --out '" + a.string() + "'").code == 0);
  REQUIRE(cli("run " + sc + " --seed 2 --out '" + b.string() + "'").code == 0);
  CHECK(slurp(a / "summary.csv") != slurp(b / "summary.csv"));
}

TEST_CASE("experiment a --seed 42 is byte-identical across runs") {
  const auto a = fresh_dir("dsim_test_cli_a1");
  const auto b = fresh_dir("dsim_test_cli_a2");
  REQUIRE(cli("experiment a --seed 42 --out '" + a.string() + "'").code == 0);
  REQUIRE(cli("experiment a --seed 42 --threads 1 --out '" + b.string() + "'").code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    CAPTURE(e.path().filename().string());
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    ++files;
  }
  CHECK(files == 3);
}
