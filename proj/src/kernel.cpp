#include "hetcell/kernel.hpp"

#include <limits>
#include <stdexcept>

namespace hetcell {

EventHandle Scheduler::schedule(SimTime at, StationId station, const char* name, Action action) {
  if (at < now_) {
    throw std::logic_error("scheduler: event '" + std::string(name) + "' at t=" + std::to_string(at) +
                           " lies before the clock t=" + std::to_string(now_));
  }
  const std::uint64_t seq = next_sequence_++;
  heap_.push(Entry{at, seq});
  actions_.emplace(seq, Pending{station, name, std::move(action)});
  return EventHandle{seq};
}

bool Scheduler::cancel(EventHandle& handle) {
  if (!handle.valid()) return false;
  const bool erased = actions_.erase(handle.sequence) > 0;
  handle = EventHandle{};
  return erased;
}

bool Scheduler::pending(const EventHandle& handle) const {
  return handle.valid() && actions_.count(handle.sequence) > 0;
}

SimTime Scheduler::run_until(SimTime t_end) {
  if (t_end < now_) {
    throw std::logic_error("scheduler: run_until target precedes the clock");
  }
  while (!heap_.empty() && heap_.top().at <= t_end) {
    const Entry top = heap_.top();
    heap_.pop();
    auto it = actions_.find(top.sequence);
    if (it == actions_.end()) continue;  // cancelled
    Pending p = std::move(it->second);
    actions_.erase(it);
    now_ = top.at;
    ++fired_;
    if (trace_) trace_(TraceRecord{now_, p.station, p.name});
    p.action();
  }
  now_ = t_end;
  return now_;
}

void Scheduler::note(StationId station, const std::string& name) const {
  if (trace_) trace_(TraceRecord{now_, station, name});
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(splitmix64(seed ^ splitmix64(stream_id))) {}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::logic_error("uniform_int: lo > hi");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::int64_t>(engine_());
  }
  const std::uint64_t range = span + 1;
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % range);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % range);
}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace hetcell
