#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "dsim/core/sim_time.hpp"
#include "dsim/net/packet.hpp"

namespace dsim {

/// What a sink reports for every packet it receives.
struct DeliveryRecord {
  FlowId flow_id = 0;
  std::uint64_t seq_no = 0;
  SimTime created_at;
  SimTime received_at;
};

struct HistogramBin {
  std::int64_t index = 0;       // floor(value / unit)
  std::int64_t lower_edge_ns = 0;
  double frequency = 0.0;
};

struct StatsReport {
  std::uint64_t count = 0;
  double mean_ns = 0.0;
  std::int64_t min_ns = 0;
  std::int64_t max_ns = 0;
  std::int64_t bin_unit_ns = 0;
  std::vector<HistogramBin> histogram;

  double mean_s() const { return mean_ns * 1e-9; }
};

/// Running count/sum/min/max plus an exact value -> count map, so the
/// histogram can be binned at export with any unit. Values are signed
/// nanoseconds.
class DelayStats {
 public:
  DelayStats() = default;
  explicit DelayStats(std::set<FlowId> flow_filter) : filter_(std::move(flow_filter)) {}

  bool accepts(FlowId f) const { return filter_.empty() || filter_.count(f) != 0; }
  const std::set<FlowId>& flow_filter() const { return filter_; }

  void add(std::int64_t value_ns);

  std::uint64_t count() const { return count_; }
  /// Exact sum of all values.
  __int128 sum_ns() const { return sum_; }
  double mean_ns() const;
  std::int64_t min_ns() const { return min_; }
  std::int64_t max_ns() const { return max_; }
  const std::map<std::int64_t, std::uint64_t>& exact_counts() const { return exact_; }

  /// Counts per half-open bin [k*unit, (k+1)*unit). Throws BadParam if unit <= 0.
  std::map<std::int64_t, std::uint64_t> histogram(std::int64_t unit_ns) const;

 private:
  std::set<FlowId> filter_;
  std::uint64_t count_ = 0;
  __int128 sum_ = 0;
  std::int64_t min_ = 0;
  std::int64_t max_ = 0;
  std::map<std::int64_t, std::uint64_t> exact_;
};

/// floor(value / unit) for unit > 0, rounding toward negative infinity.
std::int64_t bin_index(std::int64_t value_ns, std::int64_t unit_ns);

/// One-way delay of `rec` folded into `st`. Records outside the flow filter
/// are ignored. Throws NegativeDelay if received_at < created_at.
void record_owd(DelayStats& st, const DeliveryRecord& rec);

/// Consecutive-packet delay variation of the monitored aggregate: every
/// record after the first contributes owd - previous owd (signed) and its
/// magnitude (abs).
struct IpdvState {
  explicit IpdvState(std::set<FlowId> flow_filter = {})
      : stats_signed(flow_filter), stats_abs(flow_filter), filter(std::move(flow_filter)) {}

  std::optional<std::int64_t> last_owd;
  std::unordered_map<FlowId, std::uint64_t> last_seq;
  std::optional<std::int64_t> first_owd;
  DelayStats stats_signed;
  DelayStats stats_abs;
  std::set<FlowId> filter;
};

void record_ipdv(IpdvState& st, const DeliveryRecord& rec);

/// Normalized export. Bin unit `unit_ns` <= 0 means "use the smallest value
/// recorded" (the delay-unit convention). Throws EmptyStats if nothing was
/// recorded.
StatsReport export_stats(const DelayStats& st, std::int64_t unit_ns);

}  // namespace dsim
