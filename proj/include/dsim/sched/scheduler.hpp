#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "dsim/core/sim_time.hpp"

namespace dsim {

using QueueId = std::uint32_t;

enum class SchedulerKind : std::uint8_t { pq, rr, wrr, wirr, scfq, pgps, wf2qplus, sfq, llq };

std::string_view to_string(SchedulerKind k);
std::optional<SchedulerKind> parse_scheduler_kind(std::string_view s);
/// All nine kinds, in declaration order.
const std::vector<SchedulerKind>& all_scheduler_kinds();

enum class Verdict : std::uint8_t { transmit, drop };

struct Decision {
  QueueId queue = 0;
  Verdict verdict = Verdict::transmit;
};

struct QueueParams {
  /// Relative rate share (fair queueing) or packets per round (WRR/WIRR).
  std::uint64_t weight = 1;
  /// Strict priority level for PQ; 0 is served first.
  int priority = 0;
};

enum class ExceedAction : std::uint8_t { drop, defer };

struct LlqParams {
  QueueId priority_queue = 0;
  std::uint64_t cir_bps = 0;
  std::uint32_t cbs_bytes = 0;
  ExceedAction exceed = ExceedAction::drop;
};

struct SchedulerConfig {
  SchedulerKind kind = SchedulerKind::pq;
  std::uint64_t link_rate_bps = 0;
  std::vector<QueueParams> queues;
  std::optional<LlqParams> llq;
};

/// Common interface of every packet scheduler. The scheduler mirrors the
/// sizes of the packets held in each physical queue; the owner reports every
/// enqueue and dequeue and consults pick_next() only when the link is free.
///
/// The base class checks the contract on every call: pick_next() must name a
/// backlogged queue whenever one exists (work conservation) and dequeues must
/// remove the head of the named queue (per-queue FIFO). Violations throw
/// InvariantViolation.
class Scheduler {
 public:
  explicit Scheduler(std::size_t num_queues);
  virtual ~Scheduler() = default;
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  virtual SchedulerKind kind() const = 0;

  void on_enqueue(QueueId q, std::uint32_t size_bytes, SimTime now);
  /// nullopt iff every queue is empty; the scheduler then treats the system
  /// as idle and resets its virtual clock.
  std::optional<Decision> pick_next(SimTime now);
  void on_dequeue(QueueId q, std::uint32_t size_bytes, SimTime now);

  /// Like pick_next() but throws EmptyQueue when nothing is backlogged.
  Decision require_pick(SimTime now);

  std::size_t num_queues() const { return sizes_.size(); }
  std::size_t backlog(QueueId q) const { return sizes_.at(q).size(); }
  bool backlogged(QueueId q) const { return !sizes_.at(q).empty(); }
  bool all_empty() const { return total_ == 0; }
  std::uint32_t head_size(QueueId q) const { return sizes_.at(q).front(); }

 protected:
  virtual void enqueued(QueueId q, std::uint32_t size_bytes, SimTime now) = 0;
  /// Called only when at least one queue is backlogged.
  virtual Decision pick(SimTime now) = 0;
  virtual void dequeued(QueueId q, std::uint32_t size_bytes, SimTime now) = 0;
  virtual void idle(SimTime /*now*/) {}

 private:
  std::vector<std::deque<std::uint32_t>> sizes_;
  std::size_t total_ = 0;
};

/// Throws BadParam on an empty queue list, zero link rate, zero weights,
/// duplicate PQ priorities or missing LLQ parameters.
std::unique_ptr<Scheduler> make_scheduler(const SchedulerConfig& cfg);

}  // namespace dsim
