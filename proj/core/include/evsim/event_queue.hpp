#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "evsim/error.hpp"
#include "evsim/trace.hpp"

namespace evsim {

// Min-time event queue. Events at the same time pop in insertion order.
template <class Payload>
class EventQueue {
 public:
  struct Entry {
    Millis t;
    std::uint64_t seq;
    Payload payload;
  };

  void schedule(Millis t, Payload payload) {
    if (t < now_) throw HarnessError("cannot schedule an event in the past");
    heap_.push(Entry{t, next_seq_++, std::move(payload)});
  }

  std::optional<Entry> pop() {
    if (heap_.empty()) return std::nullopt;
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.t;
    return e;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  Millis now() const { return now_; }

 private:
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.t != b.t ? a.t > b.t : a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  Millis now_ = 0;
};

}  // namespace evsim
