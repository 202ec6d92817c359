#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "dsim/net/packet.hpp"
#include "dsim/sched/scheduler.hpp"

namespace dsim {

inline constexpr std::size_t kDefaultQueueCapacity = 50;

struct QueueSpec {
  QueueId id = 0;
  std::vector<Dscp> dscps;
  std::size_t capacity_packets = kDefaultQueueCapacity;
  std::uint64_t weight = 1;
  int priority = 0;
};

struct QueueSetSpec {
  SchedulerKind scheduler = SchedulerKind::pq;
  std::vector<QueueSpec> queues;
  std::optional<LlqParams> llq;
};

enum class EnqueueOutcome : std::uint8_t { queued, tail_dropped };

struct EnqueueResult {
  EnqueueOutcome outcome = EnqueueOutcome::queued;
  QueueId queue = 0;
};

struct DequeueResult {
  std::optional<Packet> packet;
  QueueId queue = 0;
  /// Packets discarded by a scheduler policer while selecting.
  std::vector<Packet> policed;
};

/// Physical FIFO queues of one egress interface plus the scheduler that
/// chooses among them. Queue ids are positions 0..n-1.
class QueueSet {
 public:
  /// Throws BadParam for ids that are not 0..n-1, a codepoint mapped twice,
  /// zero capacity or an invalid scheduler configuration.
  QueueSet(const QueueSetSpec& spec, std::uint64_t link_rate_bps);

  /// FIFO admission with tail drop. Throws UnmappedDscp.
  EnqueueResult enqueue(Packet pkt, SimTime t);
  /// Asks the scheduler for the next packet; empty result iff all queues are
  /// empty (after any policer drops).
  DequeueResult dequeue(SimTime t);

  QueueId queue_for(Dscp d) const;
  std::size_t occupancy(QueueId q) const { return queues_.at(q).size(); }
  std::size_t total_occupancy() const { return total_; }
  std::size_t num_queues() const { return queues_.size(); }
  std::uint64_t tail_drops(QueueId q) const { return tail_drops_.at(q); }
  std::uint64_t policer_drops(QueueId q) const { return policer_drops_.at(q); }
  const QueueSetSpec& spec() const { return spec_; }
  const Scheduler& scheduler() const { return *scheduler_; }

 private:
  QueueSetSpec spec_;
  std::unique_ptr<Scheduler> scheduler_;
  std::vector<std::deque<Packet>> queues_;
  std::vector<std::optional<QueueId>> dscp_map_;
  std::vector<std::uint64_t> tail_drops_;
  std::vector<std::uint64_t> policer_drops_;
  std::size_t total_ = 0;
};

/// Single FIFO queue carrying every codepoint (plain router or host egress).
QueueSetSpec fifo_queue_set(std::size_t capacity_packets);

}  // namespace dsim
