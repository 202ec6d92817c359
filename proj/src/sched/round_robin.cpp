#include "dsim/sched/round_robin.hpp"

#include <algorithm>
#include <numeric>

namespace dsim {

PriorityScheduler::PriorityScheduler(const std::vector<QueueParams>& queues) : Scheduler(queues.size()) {
  order_.resize(queues.size());
  std::iota(order_.begin(), order_.end(), QueueId{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](QueueId a, QueueId b) { return queues[a].priority < queues[b].priority; });
}

Decision PriorityScheduler::pick(SimTime) {
  for (QueueId q : order_) {
    if (backlogged(q)) return Decision{q};
  }
  return Decision{order_.front()};  // unreachable: base guarantees a backlog
}

RoundRobinScheduler::RoundRobinScheduler(std::size_t num_queues)
    : Scheduler(num_queues), last_(static_cast<QueueId>(num_queues - 1)) {}

Decision RoundRobinScheduler::pick(SimTime) {
  const auto n = static_cast<QueueId>(num_queues());
  for (QueueId k = 1; k <= n; ++k) {
    const QueueId q = (last_ + k) % n;
    if (backlogged(q)) return Decision{q};
  }
  return Decision{last_};
}

WrrScheduler::WrrScheduler(const std::vector<QueueParams>& queues) : Scheduler(queues.size()) {
  for (const auto& q : queues) weights_.push_back(q.weight);
}

Decision WrrScheduler::pick(SimTime) {
  if (turn_open_ && backlogged(current_) && served_in_turn_ < weights_[current_]) return Decision{current_};
  const auto n = static_cast<QueueId>(num_queues());
  // Without an open turn the scan starts at current_ itself.
  const QueueId first = turn_open_ ? 1 : 0;
  for (QueueId k = first; k < n + first; ++k) {
    const QueueId q = (current_ + k) % n;
    if (backlogged(q)) {
      current_ = q;
      served_in_turn_ = 0;
      turn_open_ = true;
      return Decision{q};
    }
  }
  return Decision{current_};
}

void WrrScheduler::dequeued(QueueId q, std::uint32_t, SimTime) {
  if (q != current_) {
    current_ = q;
    served_in_turn_ = 0;
  }
  turn_open_ = true;
  ++served_in_turn_;
}

WirrScheduler::WirrScheduler(const std::vector<QueueParams>& queues) : Scheduler(queues.size()) {
  for (const auto& q : queues) weights_.push_back(q.weight);
  remaining_ = weights_;
}

Decision WirrScheduler::pick(SimTime) {
  const auto n = static_cast<QueueId>(num_queues());
  for (int round = 0; round < 2; ++round) {
    for (QueueId k = 0; k < n; ++k) {
      const QueueId q = (cursor_ + k) % n;
      if (remaining_[q] > 0 && backlogged(q)) return Decision{q};
    }
    // Every backlogged queue has used its quota: start a new round.
    remaining_ = weights_;
    cursor_ = 0;
  }
  return Decision{cursor_};
}

void WirrScheduler::dequeued(QueueId q, std::uint32_t, SimTime) {
  if (remaining_[q] > 0) --remaining_[q];
  cursor_ = (q + 1) % static_cast<QueueId>(num_queues());
}

}  // namespace dsim
