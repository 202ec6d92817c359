#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "dsim/core/sim_time.hpp"

namespace dsim {

struct EventHandle {
  std::uint64_t seq = 0;
};

struct RunSummary {
  std::uint64_t events_processed = 0;
  SimTime clock;
};

/// Single-threaded discrete-event engine. Events fire in (fire_at, seq) order,
/// where seq is the insertion counter, so equal-time events run FIFO.
class Simulator {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  /// Throws PastEvent if `at` precedes the current clock.
  EventHandle schedule(SimTime at, Action action);
  EventHandle schedule_in(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }

  /// Returns false if the event already fired or was cancelled.
  bool cancel(EventHandle h);

  /// Dispatches every event with fire_at <= t_end, then sets the clock to
  /// t_end. Throws EngineBusy when called re-entrantly from an event.
  RunSummary run_until(SimTime t_end);

  /// Runs until the queue is empty.
  RunSummary run();

  std::size_t pending() const { return queue_.size() - cancelled_pending_; }
  std::uint64_t total_dispatched() const { return dispatched_; }

 private:
  struct Entry {
    SimTime fire_at;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  RunSummary dispatch(SimTime limit, bool bounded);

  SimTime now_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  bool running_ = false;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  enum class State : std::uint8_t { pending, fired, cancelled };
  std::vector<State> state_;  // indexed by seq
  std::size_t cancelled_pending_ = 0;
};

}  // namespace dsim
