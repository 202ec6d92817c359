// Command-line entry point: single scenario runs, the A/B/C experiment
// sweeps and scenario validation.
//
// Exit status: 0 success, 1 configuration or usage error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "dsim/core/error.hpp"
#include "dsim/experiments/harness.hpp"
#include "dsim/experiments/runner.hpp"
#include "dsim/experiments/scenario.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct DurationArg {
  std::string text;
  dsim::SimTime parse(const char* flag) const {
    try {
      return dsim::parse_duration(text);
    } catch (const std::exception& e) {
      throw dsim::ConfigError(std::string(flag) + ": " + e.what());
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DiffServ discrete-event simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run one scenario file and write its CSV outputs");
  run->add_option("--scenario", scenario_path, "Scenario YAML file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory")->envname("DSIM_OUT_DIR")->required();

  std::string test;
  dsim::HarnessOptions hopt;
  DurationArg duration{"200s"};
  DurationArg warmup{"10s"};
  DurationArg man_delay{"3.134ms"};
  std::string exp_out;
  auto* exp = app.add_subcommand("experiment", "Run the Test A, B or C sweep");
  exp->add_option("test", test, "a, b or c")->required()->check(CLI::IsMember({"a", "b", "c"}));
  exp->add_option("--out", exp_out, "Output directory")->envname("DSIM_OUT_DIR")->required();
  exp->add_option("--seed", hopt.seed, "Base seed (repeat k uses seed + k)")->capture_default_str();
  exp->add_option("--repeats", hopt.repeats, "Repetitions per sweep point")->capture_default_str()->check(
      CLI::PositiveNumber);
  exp->add_option("--duration", duration.text, "Simulated time per run")->capture_default_str();
  exp->add_option("--warmup", warmup.text, "Ignore packets created before this time")->capture_default_str();
  exp->add_option("--man-delay", man_delay.text, "Propagation delay of each MAN link")->capture_default_str();
  exp->add_option("--threads", hopt.threads, "Worker threads (0 = all cores)")->capture_default_str();

  auto* val = app.add_subcommand("validate", "Parse and check a scenario file");
  val->add_option("--scenario", scenario_path, "Scenario YAML file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*val) {
      const auto sc = dsim::load_scenario(scenario_path);
      std::cout << scenario_path << ": ok (" << sc.flows.size() << " flows, " << sc.backgrounds.size()
                << " background groups, " << sc.outputs.size() << " outputs)\n";
      return 0;
    }
    if (*run) {
      const auto sc = dsim::load_scenario(scenario_path);
      const auto result = dsim::run_scenario(sc, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt);
      for (const auto& p : dsim::write_run_csv(sc, result, out_dir)) std::cout << p.string() << '\n';
      if (!result.conserved) {
        std::cerr << "error: packet conservation violated\n";
        return kExitRuntime;
      }
      return 0;
    }
    hopt.duration = duration.parse("--duration");
    hopt.warmup = warmup.parse("--warmup");
    hopt.topology.man_delay = man_delay.parse("--man-delay");
    if (hopt.duration.ticks() > 0 && hopt.warmup >= hopt.duration) {
      throw dsim::ConfigError("--warmup must be shorter than --duration");
    }
    const auto id = static_cast<dsim::TestId>(test[0]);
    const auto result = dsim::run_test(id, hopt);
    for (const auto& p : dsim::write_csv(result, exp_out)) std::cout << p.string() << '\n';
    return 0;
  } catch (const dsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
