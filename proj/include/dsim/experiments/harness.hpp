#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsim/experiments/runner.hpp"
#include "dsim/experiments/scenario.hpp"

namespace dsim {

/// Per-hop propagation delay of the two MAN links that places the Test C
/// minimum EF delays near the reference testbed measurements.
inline constexpr SimTime kCalibratedManDelay = SimTime::us(3134);

inline constexpr std::uint64_t kEfRateBps = 300'000;
inline constexpr std::uint64_t kLineRateBps = 2'000'000;
/// Largest EF share applied by the Test A harness (router reservable limit).
inline constexpr std::uint64_t kMaxShareNum = 3;
inline constexpr std::uint64_t kMaxShareDen = 4;

/// Fraction num/den of the line rate, in lowest terms.
struct Share {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Share&, const Share&) = default;
};

/// S_r = A_r * star / l_r. Throws Infeasible if that exceeds 1 and BadParam
/// on zero inputs.
Share star_to_weight(std::uint64_t arrival_bps, std::uint64_t line_bps, std::uint64_t star);

struct HarnessOptions {
  std::uint64_t seed = 1;
  std::uint32_t repeats = 1;
  SimTime duration = SimTime::s(200);
  SimTime warmup = SimTime::s(10);
  TopologyOverrides topology = [] {
    TopologyOverrides t;
    t.man_delay = kCalibratedManDelay;
    return t;
  }();
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
  /// Grid overrides; empty keeps the default grid.
  std::vector<std::uint32_t> ef_sizes;
  std::vector<std::uint32_t> be_sizes;
  std::vector<std::uint64_t> stars;
};

enum class TestId : char { a = 'a', b = 'b', c = 'c' };

struct SweepPoint {
  std::uint32_t ef_size = 0;
  std::uint32_t be_size = 0;
  std::uint64_t star = 0;
  Share requested;
  Share applied;
  SchedulerKind scheduler = SchedulerKind::scfq;
  std::uint32_t repeat = 0;
  std::uint64_t seed = 0;
  RunResult run;

  const DelayStats& owd() const { return run.metric("ef_owd").stats; }
  const DelayStats& ipdv() const { return run.metric("ef_ipdv").stats; }
};

struct SweepResult {
  TestId test = TestId::a;
  HarnessOptions options;
  std::vector<std::uint32_t> ef_sizes;
  std::vector<std::uint32_t> be_sizes;
  std::vector<std::uint64_t> stars;
  std::vector<SchedulerKind> schedulers;
  std::vector<SweepPoint> points;  // sweep order, repeat innermost
};

std::vector<std::uint32_t> default_ef_sizes(TestId t);
std::vector<std::uint32_t> default_be_sizes();
std::vector<std::uint64_t> default_stars();

/// Scenario of one sweep point. `be_size` is ignored by Test C and `sched`
/// by Tests A and B.
Scenario test_a_scenario(std::uint32_t ef_size, Share share, const HarnessOptions& opt);
Scenario test_b_scenario(std::uint32_t ef_size, std::uint32_t be_size, const HarnessOptions& opt);
Scenario test_c_scenario(SchedulerKind sched, std::uint32_t ef_size, const HarnessOptions& opt);

SweepResult run_test_a(const HarnessOptions& opt);
SweepResult run_test_b(const HarnessOptions& opt);
SweepResult run_test_c(const HarnessOptions& opt);
SweepResult run_test(TestId t, const HarnessOptions& opt);

/// Writes the CSV set of a sweep into `out_dir` and returns the file paths.
std::vector<std::filesystem::path> write_csv(const SweepResult& r, const std::filesystem::path& out_dir);

/// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency).
/// Rethrows the first exception after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace dsim
