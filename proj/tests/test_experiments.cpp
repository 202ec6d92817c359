#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsim/core/error.hpp"
#include "dsim/experiments/harness.hpp"
#include "dsim/experiments/scenario.hpp"

using namespace dsim;
namespace fs = std::filesystem;

namespace {

const std::string kDir = DSIM_SCENARIO_DIR;

std::string error_of(const std::string& yaml) {
  try {
    parse_scenario(yaml, "t.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kValid = R"(schema_version: 1
flows:
  - {name: ef, src: S0, dst: D0, rate_bps: 300000, size_bytes: 512}
policies:
  - {match: [ef], aggregate_id: ef, in_dscp: EF}
queues:
  scheduler_kind: pq
  queues:
    - {queue_id: 0, dscp_set: [EF], priority_level: 0}
    - {queue_id: 1, dscp_set: [unmarked, BE-in, BE-out], priority_level: 1}
run:
  duration: 10s
  warmup: 1s
)";

HarnessOptions quick(SimTime duration) {
  HarnessOptions o;
  o.duration = duration;
  o.warmup = SimTime{};
  return o;
}

}  // namespace

TEST_CASE("STAR to weight") {
  CHECK(star_to_weight(300'000, 2'000'000, 1) == Share{3, 20});
  CHECK(star_to_weight(300'000, 2'000'000, 4) == Share{3, 5});
  CHECK(star_to_weight(300'000, 2'000'000, 1).value() == doctest::Approx(0.15));
  CHECK_THROWS_AS(star_to_weight(300'000, 2'000'000, 8), Infeasible);
  CHECK_THROWS_AS(star_to_weight(0, 2'000'000, 1), BadParam);
}

TEST_CASE("sweep grids") {
  CHECK(default_ef_sizes(TestId::a).size() * default_stars().size() == 24);
  CHECK(default_be_sizes().front() == 100);
  CHECK(default_be_sizes().back() == 1450);
  CHECK(default_be_sizes().size() == 28);
  CHECK(default_ef_sizes(TestId::c).size() == 14);
}

TEST_CASE("a valid scenario parses") {
  const Scenario sc = parse_scenario(kValid);
  CHECK(sc.flows.size() == 1);
  CHECK(sc.flows[0].rate_bps == 300'000);
  CHECK(sc.queues.scheduler == SchedulerKind::pq);
  CHECK(sc.run.duration == SimTime::s(10));
  CHECK(sc.run.warmup == SimTime::s(1));
  CHECK(sc.topology.man_rate_bps == 2'000'000);
}

TEST_CASE("scenario errors carry file, line, column and field") {
  std::string bad = kValid;
  bad.replace(bad.find("dst: D0"), 7, "dst: D7");
  CHECK(error_of(bad) == "t.yaml:3:30: flows[0].dst: undefined node 'D7'");

  bad = kValid;
  bad.replace(bad.find("duration: 10s"), 13, "durration: 10s");
  CHECK(error_of(bad).find("t.yaml:12:3: run.durration: unknown field") == 0);

  bad = kValid;
  bad.replace(bad.find("warmup: 1s"), 10, "warmup: 10s");
  CHECK(error_of(bad).find("run.warmup: warmup must be shorter than duration") != std::string::npos);

  bad = kValid;
  bad.replace(bad.find("[EF]"), 4, "[EF, BE-in]");
  CHECK(error_of(bad).find("codepoint already mapped") != std::string::npos);

  bad = kValid;
  bad.replace(bad.find("rate_bps: 300000"), 16, "rate_bps: -5");
  CHECK(error_of(bad).find("t.yaml:3:") == 0);

  CHECK(error_of("schema_version: 2\n").find("unsupported version") != std::string::npos);
  CHECK(error_of("[1, 2").find("t.yaml:") == 0);
}

TEST_CASE("a codepoint without a queue is rejected") {
  std::string bad = kValid;
  bad.replace(bad.find("[unmarked, BE-in, BE-out]"), 25, "[unmarked, BE-in]");
  // BE-out is unreachable here, so this still validates
  CHECK(error_of(bad).empty());
  bad.replace(bad.find("in_dscp: EF"), 11, "in_dscp: BE-out");
  CHECK(error_of(bad).find("BE-out") != std::string::npos);
}

TEST_CASE("shipped scenario files") {
  for (const auto* name : {"minimal.yaml", "test_c_pq.yaml", "test_c_wfq.yaml", "bad_zero_duration.yaml"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_scenario(kDir + "/" + name));
  }
  try {
    load_scenario(kDir + "/bad_undefined_node.yaml");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad_undefined_node.yaml:5:10: flows[0].dst: undefined node 'D9'") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario(kDir + "/missing.yaml"), ConfigError);
}

TEST_CASE("the shipped Test C files reproduce the harness runs") {
  HarnessOptions opt;
  opt.duration = SimTime::s(30);
  for (auto [file, kind] : {std::pair{"test_c_pq.yaml", SchedulerKind::pq}, std::pair{"test_c_wfq.yaml", SchedulerKind::scfq}}) {
    CAPTURE(file);
    Scenario from_file = load_scenario(kDir + "/" + file);
    from_file.run.duration = opt.duration;
    const auto a = run_scenario(from_file);
    const auto b = run_scenario(test_c_scenario(kind, 1024, opt));
    CHECK(a.metric("ef_owd").stats.exact_counts() == b.metric("ef_owd").stats.exact_counts());
    CHECK(a.metric("ef_ipdv").stats.exact_counts() == b.metric("ef_ipdv").stats.exact_counts());
    CHECK(a.counters.created == b.counters.created);
  }
}

TEST_CASE("EF deliveries follow the offered rate and packets are conserved") {
  for (std::uint32_t size : {128U, 512U, 1518U}) {
    CAPTURE(size);
    const auto r = run_scenario(test_c_scenario(SchedulerKind::pq, size, quick(SimTime::s(200))));
    CHECK(r.conserved);
    const double expected = 200.0 * 300'000.0 / (8.0 * size);
    const auto n = static_cast<double>(r.metric("ef_owd").stats.count());
    CHECK(n == doctest::Approx(expected).epsilon(0.01));
    CHECK(r.aggregates.at("ef").dropped == 0);
  }
}

TEST_CASE("runs are deterministic in the seed") {
  const auto sc = test_a_scenario(512, Share{3, 20}, quick(SimTime::s(20)));
  const auto a = run_scenario(sc, 5);
  const auto b = run_scenario(sc, 5);
  const auto c = run_scenario(sc, 6);
  CHECK(a.metric("ef_owd").stats.exact_counts() == b.metric("ef_owd").stats.exact_counts());
  CHECK(a.events == b.events);
  CHECK(a.metric("ef_owd").stats.exact_counts() != c.metric("ef_owd").stats.exact_counts());
  CHECK(group_seed(5, 0) == 5);
  CHECK(group_seed(5, 1) != group_seed(5, 2));
}

TEST_CASE("uncontended path delay equals the sum of serialization and propagation") {
  const Scenario sc = load_scenario(kDir + "/minimal.yaml");
  const auto r = run_scenario(sc);
  // 200 B: 2 LAN hops at 100 Mbit/s with 1 ms each, 2 MAN hops at 2 Mbit/s
  const std::int64_t want = 2 * (16'000 + 1'000'000) + 2 * 800'000;
  CHECK(r.metric("probe_owd").stats.min_ns() == want);
  CHECK(r.metric("probe_owd").stats.max_ns() == want);
  CHECK(r.metric("probe_ipdv").stats.max_ns() == 0);
}

TEST_CASE("Test A sweep has 24 points and writes its CSV set") {
  HarnessOptions opt = quick(SimTime::s(5));
  const auto r = run_test_a(opt);
  CHECK(r.points.size() == 24);
  for (const auto& p : r.points) {
    CHECK(p.applied.value() <= 0.75);
    if (p.star == 8) CHECK(p.applied == Share{3, 4});
  }
  const fs::path dir = fs::temp_directory_path() / "dsim_test_experiments_a";
  fs::remove_all(dir);
  const auto files = write_csv(r, dir);
  CHECK(files.size() == 3);
  for (const auto& f : files) CHECK(fs::file_size(f) > 0);
  std::ifstream in(dir / "owd_vs_size_per_star.csv");
  std::string line;
  std::size_t rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) continue;
    if (!header) {
      CHECK(line.rfind("star,ef_size_bytes,share_requested,share_applied,repeat,seed,count,mean_s", 0) == 0);
      header = true;
      continue;
    }
    ++rows;
  }
  CHECK(rows == 24);
}

TEST_CASE("parallel_for visits every index once and propagates errors") {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i]++; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw BadParam("x"); }), BadParam);
}

TEST_CASE("latency ceiling: head-of-line latency holds where enqueue-to-departure does not") {
  // 128 B EF at STAR 4: now and then an EF packet lands behind the previous
  // EF packet still on the wire, with the BE queue empty (V = 1)
  HarnessOptions opt;
  opt.warmup = SimTime{};
  const auto r = run_scenario(test_a_scenario(128, Share{3, 5}, opt), 42);
  REQUIRE(r.checks);
  CHECK(r.checks->probed > 50'000);
  CHECK(r.checks->violations_hol == 0);
  CHECK(r.checks->violations_arrival > 0);
  CHECK(r.checks->max_latency_hol <= r.checks->bound);
}
