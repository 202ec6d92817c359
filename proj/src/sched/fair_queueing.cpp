#include "dsim/sched/fair_queueing.hpp"

#include <numeric>

#include "dsim/core/error.hpp"

namespace dsim {

TaggedScheduler::TaggedScheduler(std::uint64_t link_rate_bps, const std::vector<QueueParams>& queues)
    : Scheduler(queues.size()), last_finish_(queues.size()), link_rate_(link_rate_bps), tags_(queues.size()) {
  std::uint64_t sum = 0;
  for (const auto& q : queues) sum += q.weight;
  if (sum == 0) throw BadParam("fair queueing needs a positive weight");
  per_byte_.reserve(queues.size());
  for (const auto& q : queues) {
    // weight 0 marks a queue that takes no part in tag arithmetic (LLQ priority)
    per_byte_.push_back(q.weight == 0 ? Rational(0) : make_rational(8 * sum, q.weight) / make_rational(link_rate_bps));
  }
}

Rational TaggedScheduler::tag_increment(QueueId q, std::uint32_t size_bytes) const {
  return per_byte_.at(q) * static_cast<unsigned long>(size_bytes);
}

void TaggedScheduler::push_tags(QueueId q, Rational start, Rational finish) {
  last_finish_[q] = finish;
  tags_[q].push_back(Tags{std::move(start), std::move(finish)});
}

TaggedScheduler::Tags TaggedScheduler::pop_tags(QueueId q) {
  Tags t = std::move(tags_[q].front());
  tags_[q].pop_front();
  return t;
}

void TaggedScheduler::idle(SimTime) {
  vtime_ = 0;
  for (auto& f : last_finish_) f = 0;
}

template <typename Key, typename Eligible>
QueueId TaggedScheduler::argmin_head(Key key, Eligible eligible) const {
  const Rational* best = nullptr;
  QueueId best_q = 0;
  for (QueueId q = 0; q < num_queues(); ++q) {
    if (tags_[q].empty() || !eligible(q)) continue;
    const Rational& k = key(tags_[q].front());
    if (best == nullptr || k < *best) {
      best = &k;
      best_q = q;
    }
  }
  return best_q;
}

namespace {
const Rational& finish_of(const TaggedScheduler::Tags& t) { return t.finish; }
const Rational& start_of(const TaggedScheduler::Tags& t) { return t.start; }
constexpr auto any_queue = [](QueueId) { return true; };
}  // namespace

// --- SCFQ -----------------------------------------------------------------

void ScfqScheduler::enqueued(QueueId q, std::uint32_t size_bytes, SimTime) {
  Rational start = vtime_ > last_finish_[q] ? vtime_ : last_finish_[q];
  Rational finish = start + tag_increment(q, size_bytes);
  push_tags(q, std::move(start), std::move(finish));
}

Decision ScfqScheduler::pick(SimTime) { return Decision{argmin_head(finish_of, any_queue)}; }

void ScfqScheduler::dequeued(QueueId q, std::uint32_t, SimTime) { vtime_ = pop_tags(q).finish; }

// --- SFQ ------------------------------------------------------------------

void SfqScheduler::enqueued(QueueId q, std::uint32_t size_bytes, SimTime) {
  Rational start = vtime_ > last_finish_[q] ? vtime_ : last_finish_[q];
  Rational finish = start + tag_increment(q, size_bytes);
  push_tags(q, std::move(start), std::move(finish));
}

Decision SfqScheduler::pick(SimTime) { return Decision{argmin_head(start_of, any_queue)}; }

void SfqScheduler::dequeued(QueueId q, std::uint32_t, SimTime) { vtime_ = pop_tags(q).start; }

// --- PGPS -----------------------------------------------------------------

PgpsScheduler::PgpsScheduler(std::uint64_t link_rate_bps, const std::vector<QueueParams>& queues)
    : TaggedScheduler(link_rate_bps, queues) {
  for (const auto& q : queues) {
    weights_.push_back(q.weight);
    weight_sum_ += q.weight;
  }
}

void PgpsScheduler::advance(SimTime t) {
  const Rational target = make_rational(t.ticks());
  while (last_update_ns_ < target) {
    std::uint64_t busy_weight = 0;
    const Rational* next_exit = nullptr;
    for (QueueId q = 0; q < num_queues(); ++q) {
      if (last_finish_[q] > vtime_) {
        busy_weight += weights_[q];
        if (next_exit == nullptr || last_finish_[q] < *next_exit) next_exit = &last_finish_[q];
      }
    }
    if (busy_weight == 0) {
      // fluid system empty: V holds still
      last_update_ns_ = target;
      break;
    }
    // dV/dt = sum(w) / (1e9 * busy_weight) per nanosecond
    const Rational ns_per_v = make_rational(1'000'000'000ULL * busy_weight, weight_sum_);
    const Rational to_exit = (*next_exit - vtime_) * ns_per_v;
    if (last_update_ns_ + to_exit <= target) {
      last_update_ns_ += to_exit;
      vtime_ = *next_exit;
    } else {
      vtime_ += (target - last_update_ns_) / ns_per_v;
      last_update_ns_ = target;
    }
  }
}

const Rational& PgpsScheduler::virtual_time_at(SimTime t) {
  advance(t);
  return vtime_;
}

void PgpsScheduler::enqueued(QueueId q, std::uint32_t size_bytes, SimTime now) {
  advance(now);
  Rational start = vtime_ > last_finish_[q] ? vtime_ : last_finish_[q];
  Rational finish = start + tag_increment(q, size_bytes);
  push_tags(q, std::move(start), std::move(finish));
}

Decision PgpsScheduler::pick(SimTime) { return Decision{argmin_head(finish_of, any_queue)}; }

void PgpsScheduler::dequeued(QueueId q, std::uint32_t, SimTime) { pop_tags(q); }

void PgpsScheduler::idle(SimTime now) {
  TaggedScheduler::idle(now);
  last_update_ns_ = make_rational(now.ticks());
}

// --- WF2Q+ ----------------------------------------------------------------

Wf2qPlusScheduler::Wf2qPlusScheduler(std::uint64_t link_rate_bps, const std::vector<QueueParams>& queues)
    : TaggedScheduler(link_rate_bps, queues), per_byte_link_(make_rational(8, link_rate_bps)) {}

void Wf2qPlusScheduler::raise_to_min_start() {
  const Rational* min_start = nullptr;
  for (QueueId q = 0; q < num_queues(); ++q) {
    if (!backlogged(q)) continue;
    const Rational& s = head_tags(q).start;
    if (min_start == nullptr || s < *min_start) min_start = &s;
  }
  if (min_start != nullptr && *min_start > vtime_) vtime_ = *min_start;
}

void Wf2qPlusScheduler::enqueued(QueueId q, std::uint32_t size_bytes, SimTime) {
  Rational start;
  if (backlog(q) > 1) {
    // joins a non-empty queue: starts where its predecessor finishes
    start = last_finish_[q];
  } else {
    // the base class already counts this packet, so exclude q from the min
    const Rational* min_start = nullptr;
    for (QueueId j = 0; j < num_queues(); ++j) {
      if (j == q || !backlogged(j)) continue;
      const Rational& s = head_tags(j).start;
      if (min_start == nullptr || s < *min_start) min_start = &s;
    }
    if (min_start != nullptr && *min_start > vtime_) vtime_ = *min_start;
    start = vtime_ > last_finish_[q] ? vtime_ : last_finish_[q];
  }
  Rational finish = start + tag_increment(q, size_bytes);
  push_tags(q, std::move(start), std::move(finish));
}

Decision Wf2qPlusScheduler::pick(SimTime) {
  raise_to_min_start();
  return Decision{argmin_head(finish_of, [this](QueueId q) { return head_tags(q).start <= vtime_; })};
}

void Wf2qPlusScheduler::dequeued(QueueId q, std::uint32_t size_bytes, SimTime) {
  pop_tags(q);
  vtime_ += per_byte_link_ * static_cast<unsigned long>(size_bytes);
}

// --- LLQ ------------------------------------------------------------------

std::vector<QueueParams> LlqScheduler::without_priority_weight(std::vector<QueueParams> queues, QueueId prio) {
  if (prio >= queues.size()) throw BadParam("LLQ priority queue out of range");
  if (queues.size() < 2) throw BadParam("LLQ needs at least one class besides the priority queue");
  queues[prio].weight = 0;
  return queues;
}

LlqScheduler::LlqScheduler(std::uint64_t link_rate_bps, const std::vector<QueueParams>& queues, const LlqParams& llq)
    : TaggedScheduler(link_rate_bps, without_priority_weight(queues, llq.priority_queue)),
      params_(llq),
      policer_(llq.cir_bps, llq.cbs_bytes) {}

void LlqScheduler::enqueued(QueueId q, std::uint32_t size_bytes, SimTime) {
  if (q == params_.priority_queue) return;
  Rational start = vtime_ > last_finish_[q] ? vtime_ : last_finish_[q];
  Rational finish = start + tag_increment(q, size_bytes);
  push_tags(q, std::move(start), std::move(finish));
}

Decision LlqScheduler::pick(SimTime now) {
  const QueueId prio = params_.priority_queue;
  const bool others = [&] {
    for (QueueId q = 0; q < num_queues(); ++q) {
      if (q != prio && backlogged(q)) return true;
    }
    return false;
  }();
  if (backlogged(prio)) {
    if (charged_) return Decision{prio};
    if (policer_.meter(head_size(prio), now) == MeterResult::in_profile) {
      charged_ = true;
      return Decision{prio};
    }
    if (params_.exceed == ExceedAction::drop) return Decision{prio, Verdict::drop};
    if (!others) return Decision{prio};
  }
  return Decision{argmin_head(finish_of, [prio](QueueId q) { return q != prio; })};
}

void LlqScheduler::dequeued(QueueId q, std::uint32_t, SimTime) {
  if (q == params_.priority_queue) {
    charged_ = false;
    return;
  }
  vtime_ = pop_tags(q).finish;
}

}  // namespace dsim
