#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "leangreen/error.hpp"
#include "leangreen/types.hpp"

namespace leangreen {

enum class EventKind : std::uint8_t {
  ArrivalAtStation,
  ServiceStart,
  ServiceEnd,
  TransferStart,
  TransferEnd,
  ReplicationEnd,
};

struct Event {
  SimTime time;
  std::uint64_t sequence = 0;  // assigned by the calendar
  EventKind kind = EventKind::ReplicationEnd;
  std::optional<std::size_t> entity;   // absent for ReplicationEnd
  std::optional<std::size_t> station;  // station index, or link index for transfers
};

/// Future event list ordered by (time, insertion sequence).
class EventCalendar {
 public:
  SimTime now() const { return clock_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  // Returns the sequence number assigned to the event.
  std::uint64_t schedule(Event event) {
    if (event.time < clock_) {
      throw SchedulingInPast("event at t=" + std::to_string(event.time.minutes) +
                             " precedes clock t=" + std::to_string(clock_.minutes));
    }
    event.sequence = next_sequence_++;
    heap_.push(event);
    return event.sequence;
  }

  // Removes the earliest event and advances the clock to it.
  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    clock_ = e.time;
    return e;
  }

  const Event& peek() const { return heap_.top(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  SimTime clock_{};
  std::uint64_t next_sequence_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
};

}  // namespace leangreen
