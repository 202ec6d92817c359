#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsim/core/sim_time.hpp"
#include "dsim/diffserv/edge.hpp"
#include "dsim/diffserv/queue_set.hpp"
#include "dsim/net/topology.hpp"

namespace dsim {

inline constexpr int kScenarioSchemaVersion = 1;

struct FlowSpec {
  std::string name;
  std::string src;
  std::string dst;
  std::uint64_t rate_bps = 0;
  std::uint32_t size_bytes = 0;
  SimTime start;
  /// Defaults to the run duration.
  std::optional<SimTime> stop;
};

/// Randomized CBR population drawn from the run seed.
struct BackgroundGroup {
  std::string name;
  std::uint32_t count = 0;
  std::uint64_t target_load_bps = 0;
  std::uint64_t rate_lo_bps = 0;
  std::uint64_t rate_hi_bps = 0;
  SimTime start_lo;
  SimTime start_hi;
  std::vector<std::uint32_t> sizes;
  std::vector<std::string> src_nodes;
  std::vector<std::string> dst_nodes;
};

struct PolicySpec {
  std::vector<std::string> flows;  // flow or background-group names
  std::string aggregate;
  std::optional<MeterSpec> meter;
  Dscp in_dscp = Dscp::unmarked;
  Dscp out_dscp = Dscp::be_out;
  OutAction out_action = OutAction::drop;
};

enum class MetricKind : std::uint8_t { owd, ipdv };

/// How a histogram bin width is chosen.
struct BinRule {
  enum class Kind : std::uint8_t { min_value, fixed, tx_time } kind = Kind::min_value;
  SimTime fixed;
  std::uint32_t tx_size_bytes = 0;
  std::uint64_t tx_rate_bps = 0;

  /// Resolved width in ns; 0 means "smallest recorded value".
  std::int64_t unit_ns() const;
};

struct OutputSpec {
  std::string name;
  MetricKind kind = MetricKind::owd;
  std::vector<std::string> flows;
  BinRule bin;
};

struct RunSpec {
  SimTime duration = SimTime::s(200);
  std::uint64_t seed = 1;
  /// Deliveries of packets created before this instant are not measured.
  SimTime warmup;
};

/// Per-packet checks on the probed queue at the bottleneck egress.
struct CheckSpec {
  QueueId probe_queue = 0;
  /// SCFQ latency ceiling: the probed session's largest packet, the largest
  /// packet of any session and its rate share num/den of the link.
  bool scfq_bound = false;
  std::uint32_t session_max_bytes = 0;
  std::uint32_t global_max_bytes = 0;
  std::uint64_t share_num = 0;
  std::uint64_t share_den = 0;
  /// Non-preemptive priority: wait <= residual + packets ahead.
  bool pq_bound = false;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  TopologyOverrides topology;
  std::vector<FlowSpec> flows;
  std::vector<BackgroundGroup> backgrounds;
  std::vector<PolicySpec> policies;
  std::optional<PolicySpec> default_policy;
  QueueSetSpec queues;
  std::size_t fifo_capacity = 1000;
  RunSpec run;
  std::vector<OutputSpec> outputs;
  std::optional<CheckSpec> checks;
};

/// Structural checks beyond parsing: duration > warmup, names resolve,
/// every flow maps to a queue. Throws ConfigError.
void validate(const Scenario& sc);

/// Loads a YAML scenario. ConfigError messages start with
/// "<file>:<line>:<col>: <field path>:".
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& yaml_text, const std::string& origin = "<string>");

}  // namespace dsim
