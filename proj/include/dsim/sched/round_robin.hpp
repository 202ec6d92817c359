#pragma once

#include <vector>

#include "dsim/sched/scheduler.hpp"

namespace dsim {

/// Strict priority, non-preemptive: the lowest priority level among
/// backlogged queues is served; ties are impossible (levels are unique).
class PriorityScheduler final : public Scheduler {
 public:
  explicit PriorityScheduler(const std::vector<QueueParams>& queues);
  SchedulerKind kind() const override { return SchedulerKind::pq; }

 protected:
  void enqueued(QueueId, std::uint32_t, SimTime) override {}
  Decision pick(SimTime now) override;
  void dequeued(QueueId, std::uint32_t, SimTime) override {}

 private:
  std::vector<QueueId> order_;  // queue ids by ascending priority level
};

/// Plain round robin: next backlogged queue after the last one served.
class RoundRobinScheduler final : public Scheduler {
 public:
  explicit RoundRobinScheduler(std::size_t num_queues);
  SchedulerKind kind() const override { return SchedulerKind::rr; }

 protected:
  void enqueued(QueueId, std::uint32_t, SimTime) override {}
  Decision pick(SimTime now) override;
  void dequeued(QueueId q, std::uint32_t, SimTime) override { last_ = q; }

 private:
  QueueId last_;
};

/// Weighted round robin: a visited queue is served up to `weight` packets in
/// a row before the turn passes on (AAB AAB for weights 2:1).
class WrrScheduler final : public Scheduler {
 public:
  explicit WrrScheduler(const std::vector<QueueParams>& queues);
  SchedulerKind kind() const override { return SchedulerKind::wrr; }

 protected:
  void enqueued(QueueId, std::uint32_t, SimTime) override {}
  Decision pick(SimTime now) override;
  void dequeued(QueueId q, std::uint32_t, SimTime) override;

 private:
  std::vector<std::uint64_t> weights_;
  QueueId current_ = 0;
  std::uint64_t served_in_turn_ = 0;
  bool turn_open_ = false;
};

/// Weighted interleaved round robin: queues are visited cyclically, one
/// packet per visit; a round ends once every queue has used its weight or
/// run out of packets (ABA ABA for weights 2:1).
class WirrScheduler final : public Scheduler {
 public:
  explicit WirrScheduler(const std::vector<QueueParams>& queues);
  SchedulerKind kind() const override { return SchedulerKind::wirr; }

 protected:
  void enqueued(QueueId, std::uint32_t, SimTime) override {}
  Decision pick(SimTime now) override;
  void dequeued(QueueId q, std::uint32_t, SimTime) override;

 private:
  std::vector<std::uint64_t> weights_;
  std::vector<std::uint64_t> remaining_;
  QueueId cursor_ = 0;
};

}  // namespace dsim
