#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dsim/diffserv/token_bucket.hpp"
#include "dsim/net/packet.hpp"

namespace dsim {

enum class OutAction : std::uint8_t { drop, mark };

struct MeterSpec {
  std::uint64_t cir_bps = 0;
  std::uint64_t cbs_bytes = 0;
};

/// One traffic aggregate: the flows it matches share a single meter.
struct PolicyEntry {
  std::set<FlowId> match;
  std::string aggregate_id;
  std::optional<MeterSpec> meter;
  Dscp in_dscp = Dscp::unmarked;
  Dscp out_dscp = Dscp::be_out;
  OutAction out_action = OutAction::drop;
};

enum class ConditionOutcome : std::uint8_t { enqueue, dropped };

struct ConditionResult {
  ConditionOutcome outcome = ConditionOutcome::enqueue;
  Dscp dscp = Dscp::unmarked;
};

struct AggregateCounters {
  std::uint64_t in_profile = 0;
  std::uint64_t out_profile = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_profile_bytes = 0;
};

/// Classifier + meter + in/out marker + out-of-profile dropper of the edge
/// router. Unmatched flows pass through unchanged unless a default policy is
/// installed.
class EdgeConditioner {
 public:
  /// Throws BadParam if a flow is matched by two entries or two entries share
  /// an aggregate id.
  explicit EdgeConditioner(std::vector<PolicyEntry> policies, std::optional<PolicyEntry> default_policy = {});

  /// Classifies, meters and marks `pkt` in place. Throws ClockRegression if
  /// the aggregate's meter has seen a later time.
  ConditionResult condition(Packet& pkt, SimTime t);

  const std::vector<PolicyEntry>& policies() const { return policies_; }
  const AggregateCounters& counters(const std::string& aggregate_id) const;
  std::uint64_t total_dropped() const { return total_dropped_; }

 private:
  ConditionResult apply(std::size_t entry, Packet& pkt, SimTime t);

  std::vector<PolicyEntry> policies_;
  std::vector<std::optional<TokenBucket>> meters_;
  std::vector<AggregateCounters> counters_;
  std::map<FlowId, std::size_t> by_flow_;
  std::optional<std::size_t> default_entry_;
  std::uint64_t total_dropped_ = 0;
};

/// Stand-alone meter step used by the conditioner: returns the meter verdict
/// for `size_bytes` at `t`.
inline MeterResult meter(TokenBucket& tb, std::uint32_t size_bytes, SimTime t) { return tb.meter(size_bytes, t); }

}  // namespace dsim
