#include "hetcell/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace hetcell {

SegmentSource::SegmentSource(const FlowSpec& spec, SimTime start, std::size_t queue_limit)
    : spec_(spec), next_release_(start), queue_limit_(queue_limit) {
  if (spec.segment_bytes <= 0) throw std::invalid_argument("SegmentSource: segment_bytes must be positive");
  if (spec.source == SourceKind::ConstantRate) {
    if (spec.rate_mbps <= 0.0) throw std::invalid_argument("SegmentSource: rate must be positive");
    interval_us_ = static_cast<SimTime>(std::llround(8.0 * spec.segment_bytes / spec.rate_mbps));
    if (interval_us_ < 1) interval_us_ = 1;
  }
}

void SegmentSource::release_until(SimTime now) {
  while (next_release_ <= now) {
    if (ready_ < queue_limit_) ++ready_; else ++overflow_;
    next_release_ += interval_us_;
  }
}

bool SegmentSource::available(SimTime now) {
  if (spec_.source == SourceKind::Saturated) return true;
  release_until(now);
  return ready_ > 0;
}

std::optional<Segment> SegmentSource::next_segment(SimTime now) {
  if (!available(now)) return std::nullopt;
  if (spec_.source == SourceKind::ConstantRate) --ready_;
  return Segment{next_seq_++, spec_.segment_bytes, now};
}

bool TransportReceiver::on_segment_delivered() {
  ++delivered_;
  if (delivered_ % static_cast<std::uint64_t>(policy_.segments_per_ack) == 0) {
    ++acks_;
    return true;
  }
  return false;
}

const char* to_string(Subflow s) { return s == Subflow::WiFi ? "wifi" : "lte"; }

double subflow_score(const SubflowInputs& in, const SubflowPolicy& policy) {
  if (std::isinf(in.cost)) return in.cost;
  return in.cost + policy.rtt_weight * (in.rtt_us / policy.rtt_ref_us) -
         policy.bw_weight * (in.bandwidth_mbps / policy.bw_ref_mbps);
}

Subflow choose_subflow(const SubflowMetrics& metrics, const SubflowPolicy& policy, bool uplink_segment) {
  const bool wifi_down = std::isinf(metrics.wifi.cost);
  const bool lte_down = std::isinf(metrics.lte.cost);
  if (wifi_down && !lte_down) return Subflow::Lte;
  if (lte_down && !wifi_down) return Subflow::WiFi;
  const double w = subflow_score(metrics.wifi, policy);
  const double l = subflow_score(metrics.lte, policy);
  if (w < l) return Subflow::WiFi;
  if (l < w) return Subflow::Lte;
  return uplink_segment ? Subflow::Lte : Subflow::WiFi;
}

}  // namespace hetcell
