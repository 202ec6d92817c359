#include "dsim/sched/scheduler.hpp"

#include <set>
#include <string>

#include "dsim/core/error.hpp"
#include "dsim/sched/fair_queueing.hpp"
#include "dsim/sched/round_robin.hpp"

namespace dsim {

namespace {
struct KindName {
  SchedulerKind kind;
  std::string_view name;
};
constexpr KindName kKindNames[] = {
    {SchedulerKind::pq, "pq"},     {SchedulerKind::rr, "rr"},     {SchedulerKind::wrr, "wrr"},
    {SchedulerKind::wirr, "wirr"}, {SchedulerKind::scfq, "scfq"}, {SchedulerKind::pgps, "pgps"},
    {SchedulerKind::wf2qplus, "wf2qplus"}, {SchedulerKind::sfq, "sfq"}, {SchedulerKind::llq, "llq"},
};
}  // namespace

std::string_view to_string(SchedulerKind k) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == k) return kn.name;
  }
  return "?";
}

std::optional<SchedulerKind> parse_scheduler_kind(std::string_view s) {
  for (const auto& kn : kKindNames) {
    if (kn.name == s) return kn.kind;
  }
  // "wfq" is the common name for the SCFQ implementation in router configs
  if (s == "wfq") return SchedulerKind::scfq;
  return std::nullopt;
}

const std::vector<SchedulerKind>& all_scheduler_kinds() {
  static const std::vector<SchedulerKind> kinds = [] {
    std::vector<SchedulerKind> v;
    for (const auto& kn : kKindNames) v.push_back(kn.kind);
    return v;
  }();
  return kinds;
}

Scheduler::Scheduler(std::size_t num_queues) : sizes_(num_queues) {
  if (num_queues == 0) throw BadParam("scheduler needs at least one queue");
}

void Scheduler::on_enqueue(QueueId q, std::uint32_t size_bytes, SimTime now) {
  if (q >= sizes_.size()) throw BadParam("enqueue to unknown queue " + std::to_string(q));
  sizes_[q].push_back(size_bytes);
  ++total_;
  enqueued(q, size_bytes, now);
}

std::optional<Decision> Scheduler::pick_next(SimTime now) {
  if (total_ == 0) {
    idle(now);
    return std::nullopt;
  }
  const Decision d = pick(now);
  if (d.queue >= sizes_.size() || sizes_[d.queue].empty()) {
    throw InvariantViolation(std::string(to_string(kind())) + " picked empty queue " + std::to_string(d.queue) +
                             " while packets are waiting");
  }
  return d;
}

Decision Scheduler::require_pick(SimTime now) {
  if (total_ == 0) throw EmptyQueue("pick requested with every queue empty");
  return *pick_next(now);
}

void Scheduler::on_dequeue(QueueId q, std::uint32_t size_bytes, SimTime now) {
  if (q >= sizes_.size() || sizes_[q].empty()) {
    throw InvariantViolation("dequeue from empty queue " + std::to_string(q));
  }
  if (sizes_[q].front() != size_bytes) {
    throw InvariantViolation("dequeue out of FIFO order on queue " + std::to_string(q));
  }
  sizes_[q].pop_front();
  --total_;
  dequeued(q, size_bytes, now);
}

std::unique_ptr<Scheduler> make_scheduler(const SchedulerConfig& cfg) {
  if (cfg.queues.empty()) throw BadParam("scheduler needs at least one queue");
  if (cfg.link_rate_bps == 0) throw BadParam("scheduler link rate must be positive");
  for (const auto& q : cfg.queues) {
    if (q.weight == 0) throw BadParam("queue weights must be positive");
  }
  switch (cfg.kind) {
    case SchedulerKind::pq: {
      std::set<int> levels;
      for (const auto& q : cfg.queues) {
        if (!levels.insert(q.priority).second) throw BadParam("PQ priority levels must be unique");
      }
      return std::make_unique<PriorityScheduler>(cfg.queues);
    }
    case SchedulerKind::rr: return std::make_unique<RoundRobinScheduler>(cfg.queues.size());
    case SchedulerKind::wrr: return std::make_unique<WrrScheduler>(cfg.queues);
    case SchedulerKind::wirr: return std::make_unique<WirrScheduler>(cfg.queues);
    case SchedulerKind::scfq: return std::make_unique<ScfqScheduler>(cfg.link_rate_bps, cfg.queues);
    case SchedulerKind::sfq: return std::make_unique<SfqScheduler>(cfg.link_rate_bps, cfg.queues);
    case SchedulerKind::pgps: return std::make_unique<PgpsScheduler>(cfg.link_rate_bps, cfg.queues);
    case SchedulerKind::wf2qplus: return std::make_unique<Wf2qPlusScheduler>(cfg.link_rate_bps, cfg.queues);
    case SchedulerKind::llq:
      if (!cfg.llq) throw BadParam("LLQ requires priority queue parameters");
      if (cfg.llq->cir_bps == 0 || cfg.llq->cbs_bytes == 0) throw BadParam("LLQ policer needs positive CIR and CBS");
      return std::make_unique<LlqScheduler>(cfg.link_rate_bps, cfg.queues, *cfg.llq);
  }
  throw BadParam("unknown scheduler kind");
}

}  // namespace dsim
