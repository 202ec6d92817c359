#pragma once

#include <deque>
#include <vector>

#include "dsim/diffserv/token_bucket.hpp"
#include "dsim/sched/rational.hpp"
#include "dsim/sched/scheduler.hpp"

namespace dsim {

/// Shared bookkeeping for the tag-based schedulers. Each queue i has the
/// guaranteed rate rho_i = w_i * r / sum(w); a packet of L bytes advances a
/// queue's tags by 8L / rho_i seconds of virtual time. All tags are exact
/// rationals and are reset to zero whenever the system goes idle.
class TaggedScheduler : public Scheduler {
 public:
  struct Tags {
    Rational start;
    Rational finish;
  };

  TaggedScheduler(std::uint64_t link_rate_bps, const std::vector<QueueParams>& queues);

  /// Virtual time increment 8L/rho_q for a packet of `size_bytes`.
  Rational tag_increment(QueueId q, std::uint32_t size_bytes) const;
  const Rational& virtual_time() const { return vtime_; }
  const Tags& head_tags(QueueId q) const { return tags_.at(q).front(); }
  const Rational& last_finish(QueueId q) const { return last_finish_.at(q); }
  std::uint64_t link_rate_bps() const { return link_rate_; }

 protected:
  void push_tags(QueueId q, Rational start, Rational finish);
  Tags pop_tags(QueueId q);
  void idle(SimTime now) override;
  /// Smallest head tag selected by `key`, ties to the lowest queue id; only
  /// queues for which `eligible(q)` holds are considered.
  template <typename Key, typename Eligible>
  QueueId argmin_head(Key key, Eligible eligible) const;

  Rational vtime_;
  std::vector<Rational> last_finish_;

 private:
  std::uint64_t link_rate_;
  std::vector<Rational> per_byte_;  // 8 * sum(w) / (w_i * r)
  std::vector<std::deque<Tags>> tags_;
};

/// Self-clocked fair queueing: F = max(v, F_prev) + 8L/rho, v = finish tag of
/// the packet in service; smallest F is served.
class ScfqScheduler final : public TaggedScheduler {
 public:
  using TaggedScheduler::TaggedScheduler;
  SchedulerKind kind() const override { return SchedulerKind::scfq; }

 protected:
  void enqueued(QueueId q, std::uint32_t size_bytes, SimTime now) override;
  Decision pick(SimTime now) override;
  void dequeued(QueueId q, std::uint32_t size_bytes, SimTime now) override;
};

/// Start-time fair queueing: same tags as SCFQ but v is the start tag of the
/// packet in service and the smallest start tag is served.
class SfqScheduler final : public TaggedScheduler {
 public:
  using TaggedScheduler::TaggedScheduler;
  SchedulerKind kind() const override { return SchedulerKind::sfq; }

 protected:
  void enqueued(QueueId q, std::uint32_t size_bytes, SimTime now) override;
  Decision pick(SimTime now) override;
  void dequeued(QueueId q, std::uint32_t size_bytes, SimTime now) override;
};

/// Packet-by-packet GPS (WFQ). The virtual time tracks the fluid GPS system:
/// it advances at rate sum(w) / sum(w_j, j GPS-backlogged) per real second,
/// where j is GPS-backlogged while V < F_last(j). S = max(V(arrival), F_prev),
/// F = S + 8L/rho; the smallest F is served.
class PgpsScheduler final : public TaggedScheduler {
 public:
  PgpsScheduler(std::uint64_t link_rate_bps, const std::vector<QueueParams>& queues);
  SchedulerKind kind() const override { return SchedulerKind::pgps; }

  /// GPS virtual time at real time `t` (advances internal state).
  const Rational& virtual_time_at(SimTime t);

 protected:
  void enqueued(QueueId q, std::uint32_t size_bytes, SimTime now) override;
  Decision pick(SimTime now) override;
  void dequeued(QueueId q, std::uint32_t size_bytes, SimTime now) override;
  void idle(SimTime now) override;

 private:
  void advance(SimTime t);

  std::vector<std::uint64_t> weights_;
  std::uint64_t weight_sum_ = 0;
  Rational last_update_ns_;
};

/// WF2Q+: among head packets with S <= V (eligible) the smallest F is
/// served. V = max(V, min S over backlogged heads) before each selection and
/// grows by 8L/r for each packet handed to the link.
class Wf2qPlusScheduler final : public TaggedScheduler {
 public:
  Wf2qPlusScheduler(std::uint64_t link_rate_bps, const std::vector<QueueParams>& queues);
  SchedulerKind kind() const override { return SchedulerKind::wf2qplus; }

 protected:
  void enqueued(QueueId q, std::uint32_t size_bytes, SimTime now) override;
  Decision pick(SimTime now) override;
  void dequeued(QueueId q, std::uint32_t size_bytes, SimTime now) override;

 private:
  void raise_to_min_start();
  Rational per_byte_link_;  // 8 / r
};

/// Low-latency queueing: one strict-priority queue guarded by a token-bucket
/// policer, all other queues shared by SCFQ. A priority head that exceeds the
/// policer is dropped (ExceedAction::drop) or waits behind the SCFQ classes
/// (ExceedAction::defer; still served if nothing else is backlogged).
class LlqScheduler final : public TaggedScheduler {
 public:
  LlqScheduler(std::uint64_t link_rate_bps, const std::vector<QueueParams>& queues, const LlqParams& llq);
  SchedulerKind kind() const override { return SchedulerKind::llq; }
  const TokenBucket& policer() const { return policer_; }
  QueueId priority_queue() const { return params_.priority_queue; }

 protected:
  void enqueued(QueueId q, std::uint32_t size_bytes, SimTime now) override;
  Decision pick(SimTime now) override;
  void dequeued(QueueId q, std::uint32_t size_bytes, SimTime now) override;

 private:
  static std::vector<QueueParams> without_priority_weight(std::vector<QueueParams> queues, QueueId prio);

  LlqParams params_;
  TokenBucket policer_;
  bool charged_ = false;  // head of the priority queue already admitted
};

}  // namespace dsim
