#include "dsim/diffserv/queue_set.hpp"

#include <string>

#include "dsim/core/error.hpp"

namespace dsim {

namespace {
constexpr std::size_t kDscpCount = 4;

SchedulerConfig scheduler_config(const QueueSetSpec& spec, std::uint64_t rate) {
  SchedulerConfig cfg;
  cfg.kind = spec.scheduler;
  cfg.link_rate_bps = rate;
  cfg.llq = spec.llq;
  for (const auto& q : spec.queues) cfg.queues.push_back(QueueParams{q.weight, q.priority});
  return cfg;
}
}  // namespace

QueueSet::QueueSet(const QueueSetSpec& spec, std::uint64_t link_rate_bps)
    : spec_(spec), dscp_map_(kDscpCount) {
  for (std::size_t i = 0; i < spec_.queues.size(); ++i) {
    const auto& q = spec_.queues[i];
    if (q.id != i) throw BadParam("queue ids must be 0..n-1 in order");
    if (q.capacity_packets == 0) throw BadParam("queue capacity must be positive");
    for (Dscp d : q.dscps) {
      auto& slot = dscp_map_[static_cast<std::size_t>(d)];
      if (slot) throw BadParam("codepoint " + std::string(to_string(d)) + " mapped to two queues");
      slot = q.id;
    }
  }
  scheduler_ = make_scheduler(scheduler_config(spec_, link_rate_bps));
  queues_.resize(spec_.queues.size());
  tail_drops_.assign(spec_.queues.size(), 0);
  policer_drops_.assign(spec_.queues.size(), 0);
}

QueueId QueueSet::queue_for(Dscp d) const {
  const auto& slot = dscp_map_[static_cast<std::size_t>(d)];
  if (!slot) throw UnmappedDscp("codepoint " + std::string(to_string(d)) + " has no queue");
  return *slot;
}

EnqueueResult QueueSet::enqueue(Packet pkt, SimTime t) {
  const QueueId q = queue_for(pkt.dscp);
  if (queues_[q].size() >= spec_.queues[q].capacity_packets) {
    ++tail_drops_[q];
    return EnqueueResult{EnqueueOutcome::tail_dropped, q};
  }
  const auto size = pkt.size_bytes;
  queues_[q].push_back(std::move(pkt));
  ++total_;
  scheduler_->on_enqueue(q, size, t);
  return EnqueueResult{EnqueueOutcome::queued, q};
}

DequeueResult QueueSet::dequeue(SimTime t) {
  DequeueResult out;
  while (auto d = scheduler_->pick_next(t)) {
    Packet pkt = std::move(queues_[d->queue].front());
    queues_[d->queue].pop_front();
    --total_;
    scheduler_->on_dequeue(d->queue, pkt.size_bytes, t);
    if (d->verdict == Verdict::drop) {
      ++policer_drops_[d->queue];
      out.policed.push_back(std::move(pkt));
      continue;
    }
    out.packet = std::move(pkt);
    out.queue = d->queue;
    return out;
  }
  return out;
}

QueueSetSpec fifo_queue_set(std::size_t capacity_packets) {
  QueueSetSpec s;
  s.scheduler = SchedulerKind::pq;
  s.queues.push_back(QueueSpec{0, {Dscp::unmarked, Dscp::ef, Dscp::be_in, Dscp::be_out}, capacity_packets, 1, 0});
  return s;
}

}  // namespace dsim
