#include "dsim/core/simulator.hpp"

#include <string>

#include "dsim/core/error.hpp"

namespace dsim {

EventHandle Simulator::schedule(SimTime at, Action action) {
  if (at < now_) {
    throw PastEvent("event scheduled at " + std::to_string(at.ticks()) + " ns, clock is " +
                    std::to_string(now_.ticks()) + " ns");
  }
  const std::uint64_t seq = next_seq_++;
  state_.push_back(State::pending);
  queue_.push(Entry{at, seq, std::move(action)});
  return EventHandle{seq};
}

bool Simulator::cancel(EventHandle h) {
  if (h.seq >= state_.size() || state_[h.seq] != State::pending) return false;
  state_[h.seq] = State::cancelled;
  ++cancelled_pending_;
  return true;
}

RunSummary Simulator::run_until(SimTime t_end) { return dispatch(t_end, true); }

RunSummary Simulator::run() { return dispatch(SimTime::max(), false); }

RunSummary Simulator::dispatch(SimTime limit, bool bounded) {
  if (running_) throw EngineBusy("run requested while the engine is already running");
  running_ = true;
  RunSummary summary;
  try {
    while (!queue_.empty() && queue_.top().fire_at <= limit) {
      // priority_queue::top is const; the entry is discarded right after.
      Entry e = std::move(const_cast<Entry&>(queue_.top()));
      queue_.pop();
      if (state_[e.seq] == State::cancelled) {
        --cancelled_pending_;
        continue;
      }
      state_[e.seq] = State::fired;
      now_ = e.fire_at;
      ++summary.events_processed;
      ++dispatched_;
      e.action();
    }
  } catch (...) {
    running_ = false;
    throw;
  }
  if (bounded && limit > now_) now_ = limit;
  running_ = false;
  summary.clock = now_;
  return summary;
}

}  // namespace dsim
