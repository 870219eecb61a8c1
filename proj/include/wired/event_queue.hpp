#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

namespace wired {

// Virtual time in integer microseconds. Every protocol constant in this
// simulator (slot, SIFS, DIFS, airtimes, jammer step) is a whole number of
// microseconds, so integer time keeps event ordering exact.
using Micros = std::int64_t;

struct EventHandle {
  std::uint64_t id = 0;
  bool valid() const { return id != 0; }
};

// Deterministic discrete-event scheduler. Events fire in (time, insertion
// sequence) order; ties at the same instant are FIFO. Cancellation is lazy:
// the heap entry stays behind and is skipped when popped.
class Engine {
 public:
  EventHandle schedule(Micros at, std::function<void()> fn) {
    if (at < now_) {
      throw std::logic_error("Engine::schedule: fire time is in the past");
    }
    const std::uint64_t id = ++next_seq_;
    live_.insert(id);
    heap_.push(Entry{at, id, std::move(fn)});
    return EventHandle{id};
  }

  EventHandle schedule_in(Micros delay, std::function<void()> fn) {
    return schedule(now_ + delay, std::move(fn));
  }

  // True iff the event was still pending and is now removed.
  bool cancel(EventHandle h) { return live_.erase(h.id) == 1; }

  bool pending(EventHandle h) const { return live_.count(h.id) != 0; }

  // Processes every event with fire time <= t_end, then advances now to
  // t_end. Events scheduled during processing at eligible times are
  // processed in the same pass.
  void run_until(Micros t_end) {
    if (t_end < now_) {
      throw std::logic_error("Engine::run_until: target is in the past");
    }
    while (!heap_.empty() && heap_.top().at <= t_end) {
      Entry e = std::move(const_cast<Entry&>(heap_.top()));
      heap_.pop();
      if (live_.erase(e.seq) == 0) {
        continue;  // cancelled
      }
      now_ = e.at;
      ++processed_;
      e.fn();
    }
    now_ = t_end;
  }

  Micros now() const { return now_; }
  std::uint64_t events_processed() const { return processed_; }

 private:
  struct Entry {
    Micros at;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::unordered_set<std::uint64_t> live_;
  Micros now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
};

}  // namespace wired
