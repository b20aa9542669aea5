#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

namespace rescomm {

/// Min-queue on (time, insertion sequence). Simultaneous entries pop in the
/// order they were pushed.
template <typename Payload>
class EventQueue {
 public:
  struct Entry {
    double time;
    std::uint64_t seq;
    Payload payload;
  };

  void push(double time, Payload payload) { heap_.push(Entry{time, next_seq_++, std::move(payload)}); }

  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  const Entry& top() const { return heap_.top(); }

  Entry pop() {
    Entry e = heap_.top();
    heap_.pop();
    return e;
  }

  /// Pops the head if its time is <= `horizon`.
  std::optional<Entry> pop_until(double horizon) {
    if (heap_.empty() || heap_.top().time > horizon) return std::nullopt;
    return pop();
  }

 private:
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const noexcept {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace rescomm
