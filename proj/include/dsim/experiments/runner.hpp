#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsim/diffserv/edge.hpp"
#include "dsim/experiments/scenario.hpp"
#include "dsim/metrics/delay_stats.hpp"
#include "dsim/net/network.hpp"

namespace dsim {

/// One attached metric after a run. For IPDV, `stats` holds |dOWD| and
/// `signed_stats` the signed differences; for OWD both are the same stream.
struct MetricResult {
  OutputSpec spec;
  DelayStats stats;
  DelayStats signed_stats;
  std::optional<std::int64_t> first_owd_ns;
  std::optional<std::int64_t> last_owd_ns;
};

/// Outcome of the per-packet checks on the probed bottleneck queue.
struct CheckResult {
  std::uint64_t probed = 0;
  /// Ceiling with V = number of bottleneck queues; each packet is checked
  /// against the ceiling for the sessions active during its own wait.
  SimTime bound;
  /// Enqueue to last bit on the wire. This also counts time spent behind
  /// earlier packets of the same session, which the ceiling does not cover,
  /// so it is reported for comparison only.
  std::uint64_t violations_arrival = 0;
  SimTime max_latency_arrival;
  /// Latency from the moment the packet reaches the head of its queue
  /// (enqueue, or the previous same-queue completion) to its last bit. This
  /// is the latency the ceiling bounds.
  std::uint64_t violations_hol = 0;
  SimTime max_latency_hol;
  std::uint64_t pq_violations = 0;
  std::uint32_t max_active_sessions = 0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<MetricResult> metrics;
  NetworkCounters counters;
  bool conserved = false;
  std::map<std::string, AggregateCounters> aggregates;
  std::optional<CheckResult> checks;
  std::uint64_t events = 0;
  /// Background sources actually drawn, per group name.
  std::map<std::string, std::vector<CbrSource>> background;
  /// Flow name -> assigned ids (flows first, then background groups).
  std::map<std::string, std::vector<FlowId>> flow_ids;

  const MetricResult& metric(const std::string& name) const;
};

/// Optional hook receiving every delivery (used by offline cross-checks).
using DeliveryLog = std::vector<DeliveryRecord>;

/// Builds the network described by `sc`, runs it for the configured
/// duration and collects the attached metrics. `seed` overrides sc.run.seed.
RunResult run_scenario(const Scenario& sc, std::optional<std::uint64_t> seed = {}, DeliveryLog* log = nullptr);

/// Writes summary.csv (one row per output) and <output>_hist.csv files.
/// Throws EmptyStats if an output recorded nothing.
std::vector<std::filesystem::path> write_run_csv(const Scenario& sc, const RunResult& r,
                                                 const std::filesystem::path& out_dir);

/// Seed of background group `g` derived from the run seed.
std::uint64_t group_seed(std::uint64_t run_seed, std::size_t g);

}  // namespace dsim
