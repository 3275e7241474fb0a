#pragma once

// Traffic sources, the reliable-transport ACK generator, and the loose-mode
// multipath subflow chooser.

#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_set>

#include "hetcell/kernel.hpp"

namespace hetcell {

enum class FlowDirection { Uplink, Downlink, Bidirectional };
enum class SourceKind { Saturated, ConstantRate };
enum class TransportKind { None, Reliable };

struct FlowSpec {
  FlowDirection direction = FlowDirection::Bidirectional;
  SourceKind source = SourceKind::Saturated;
  double rate_mbps = 0.0;  // ConstantRate only
  int segment_bytes = 1500;
  TransportKind transport = TransportKind::None;
  bool operator==(const FlowSpec&) const = default;

  bool has_uplink() const { return direction != FlowDirection::Downlink; }
  bool has_downlink() const { return direction != FlowDirection::Uplink; }
};

struct AckPolicy {
  int segments_per_ack = 2;
  int ack_bytes = 40;
  bool operator==(const AckPolicy&) const = default;
};

struct Segment {
  std::uint64_t seq = 0;
  int bytes = 0;
  SimTime created_at = 0;
};

/// Per-flow segment supply. Saturated sources always have a segment; paced
/// sources release one every segment_bits / rate microseconds and buffer at
/// most `queue_limit` undelivered segments (overflow is counted, not queued).
class SegmentSource {
 public:
  SegmentSource(const FlowSpec& spec, SimTime start, std::size_t queue_limit = 1000);

  /// Next segment available at `now`, if any.
  std::optional<Segment> next_segment(SimTime now);
  bool available(SimTime now);
  /// Time the next paced segment is released (meaningless when saturated).
  SimTime next_release() const { return next_release_; }
  SimTime interval_us() const { return interval_us_; }
  std::uint64_t generated() const { return next_seq_ - 1; }
  std::uint64_t overflow() const { return overflow_; }

 private:
  void release_until(SimTime now);

  FlowSpec spec_;
  SimTime interval_us_ = 0;
  SimTime next_release_ = 0;
  std::size_t ready_ = 0;
  std::size_t queue_limit_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t overflow_ = 0;
};

/// Receiver half of the simplified reliable transport: counts unique
/// deliveries and says when to emit a transport ACK.
class TransportReceiver {
 public:
  explicit TransportReceiver(const AckPolicy& policy) : policy_(policy) {}

  /// Returns true when this delivery triggers a transport ACK.
  bool on_segment_delivered();
  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t acks_emitted() const { return acks_; }

 private:
  AckPolicy policy_;
  std::uint64_t delivered_ = 0;
  std::uint64_t acks_ = 0;
};

/// Sequence-number filter: the first copy of each sequence number passes.
class DuplicateFilter {
 public:
  bool accept(std::uint64_t seq) { return seen_.insert(seq).second; }
  std::uint64_t duplicates() const { return dups_; }
  bool accept_counting(std::uint64_t seq) {
    const bool ok = accept(seq);
    if (!ok) ++dups_;
    return ok;
  }

 private:
  std::unordered_set<std::uint64_t> seen_;
  std::uint64_t dups_ = 0;
};

enum class Subflow { WiFi, Lte };
const char* to_string(Subflow s);

inline constexpr double kSubflowDown = std::numeric_limits<double>::infinity();

struct SubflowInputs {
  double cost = 0.0;  // kSubflowDown marks an unavailable subflow
  double rtt_us = 0.0;
  double bandwidth_mbps = 0.0;
};

struct SubflowMetrics {
  SubflowInputs wifi;
  SubflowInputs lte;
};

/// Weights of the subflow score: cost + rtt_weight * rtt/rtt_ref - bw_weight * bw/bw_ref.
struct SubflowPolicy {
  double wifi_ul_cost = 10.0;
  double lte_ul_cost = 1.0;
  double wifi_dl_cost = 0.0;
  double lte_dl_cost = 1.0;
  double rtt_weight = 0.0;
  double bw_weight = 0.0;
  double rtt_ref_us = 10000.0;
  double bw_ref_mbps = 10.0;
  bool operator==(const SubflowPolicy&) const = default;
};

double subflow_score(const SubflowInputs& in, const SubflowPolicy& policy);
/// Lower score wins. Ties go to LTE for uplink segments and to Wi-Fi for
/// downlink segments. A down subflow loses unconditionally.
Subflow choose_subflow(const SubflowMetrics& metrics, const SubflowPolicy& policy, bool uplink_segment);

}  // namespace hetcell
