#pragma once

// Discrete-event engine shared by every simulation module: integer-microsecond
// clock, a (time, sequence)-ordered queue with cancellation, and seeded
// per-purpose random streams.

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace hetcell {

/// Microseconds since the start of a run.
using SimTime = std::int64_t;

using StationId = int;
inline constexpr StationId kNoStation = -1;

struct EventHandle {
  std::uint64_t sequence = 0;  // 0 never names a live event
  bool valid() const { return sequence != 0; }
};

struct TraceRecord {
  SimTime time;
  StationId station;
  std::string name;
};

using TraceSink = std::function<void(const TraceRecord&)>;

class Scheduler {
 public:
  using Action = std::function<void()>;

  Scheduler() = default;
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  SimTime now() const { return now_; }

  /// Enqueue `action` at absolute time `at`. Throws std::logic_error when
  /// `at` lies in the past. `name` must outlive the scheduler (string literal).
  EventHandle schedule(SimTime at, StationId station, const char* name, Action action);
  EventHandle schedule_in(SimTime delay, StationId station, const char* name, Action action) {
    return schedule(now_ + delay, station, name, std::move(action));
  }

  /// Returns true if the event was still pending. Cancelling a fired or
  /// already cancelled event is a no-op.
  bool cancel(EventHandle& handle);
  bool pending(const EventHandle& handle) const;

  /// Fire every event with fire time <= t_end, then park the clock at t_end.
  SimTime run_until(SimTime t_end);

  std::uint64_t fired_count() const { return fired_; }
  std::size_t queued_count() const { return actions_.size(); }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }
  bool tracing() const { return static_cast<bool>(trace_); }
  /// Emit a trace line at the current time for something that is not an event.
  void note(StationId station, const std::string& name) const;

 private:
  struct Entry {
    SimTime at;
    std::uint64_t sequence;
    bool operator>(const Entry& o) const {
      return at != o.at ? at > o.at : sequence > o.sequence;
    }
  };
  struct Pending {
    StationId station;
    const char* name;
    Action action;
  };

  SimTime now_ = 0;
  std::uint64_t next_sequence_ = 1;
  std::uint64_t fired_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  std::unordered_map<std::uint64_t, Pending> actions_;
  TraceSink trace_;
};

/// Deterministic random stream keyed by (seed, stream_id). Draws are
/// reproducible across runs and platforms: the engine is the standardised
/// mt19937_64 and the bounded draw below does not depend on the library's
/// distribution implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform integer in [lo, hi]. Throws std::logic_error when lo > hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform double in [0, 1).
  double uniform01();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// Stream ids used by the simulator. One stream per station per purpose.
enum class StreamPurpose : std::uint64_t { Backoff = 1, Traffic = 2, Misc = 3 };

inline std::uint64_t stream_id(StationId station, StreamPurpose purpose) {
  return (static_cast<std::uint64_t>(station + 1) << 8) | static_cast<std::uint64_t>(purpose);
}

}  // namespace hetcell
