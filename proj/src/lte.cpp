#include "hetcell/lte.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace hetcell {

double lte_capacity(const LteConfig& config, LinkDirection direction) {
  if (config.duplex == Duplex::FDD) {
    return direction == LinkDirection::Uplink ? config.ul_capacity_mbps : config.dl_capacity_mbps;
  }
  const double share = direction == LinkDirection::Uplink ? config.ul_fraction : 1.0 - config.ul_fraction;
  return config.total_capacity_mbps * share;
}

LteScheduler::LteScheduler(Scheduler& scheduler, double capacity_mbps, SimTime epoch_us, DeliverFn on_delivered)
    : sched_(scheduler), capacity_mbps_(capacity_mbps), epoch_us_(epoch_us), on_delivered_(std::move(on_delivered)) {
  if (epoch_us_ <= 0) throw std::invalid_argument("LteScheduler: epoch must be positive");
  if (capacity_mbps_ < 0.0) throw std::invalid_argument("LteScheduler: negative capacity");
}

void LteScheduler::enqueue(StationId station, LteUnit unit) {
  if (unit.bytes <= 0) throw std::invalid_argument("LteScheduler: empty unit");
  unit.enqueued_at = sched_.now();
  Queue& q = queues_[station];
  q.backlog += unit.bytes;
  q.units.push_back(unit);
  ensure_tick();
}

std::int64_t LteScheduler::backlog_bytes(StationId station) const {
  auto it = queues_.find(station);
  return it == queues_.end() ? 0 : it->second.backlog;
}

std::int64_t LteScheduler::total_backlog_bytes() const {
  std::int64_t total = 0;
  for (const auto& [id, q] : queues_) total += q.backlog;
  return total;
}

void LteScheduler::ensure_tick() {
  if (tick_armed_) return;
  const SimTime now = sched_.now();
  const SimTime boundary = ((now + epoch_us_ - 1) / epoch_us_) * epoch_us_;
  tick_armed_ = true;
  sched_.schedule(boundary, kNoStation, "lte_epoch", [this] { on_tick(); });
}

void LteScheduler::on_tick() {
  // Units granted during the epoch that just closed complete now. Callbacks
  // may enqueue more; those join this epoch's allocation.
  std::vector<std::pair<StationId, LteUnit>> done;
  done.swap(completing_);
  for (const auto& [station, unit] : done) {
    delivered_bytes_ += unit.bytes;
    on_delivered_(station, unit);
  }

  const double bits = capacity_mbps_ * static_cast<double>(epoch_us_) + carry_bits_;
  std::int64_t budget = static_cast<std::int64_t>(std::floor(bits / 8.0));
  carry_bits_ = bits - 8.0 * static_cast<double>(budget);

  std::vector<StationId> hungry;
  for (const auto& [id, q] : queues_) {
    if (q.backlog > 0) hungry.push_back(id);
  }
  if (!hungry.empty()) {
    std::rotate(hungry.begin(), hungry.begin() + static_cast<std::ptrdiff_t>(rr_start_ % hungry.size()), hungry.end());
  }
  ++rr_start_;

  std::map<StationId, std::int64_t> grants;
  while (budget > 0 && !hungry.empty()) {
    const auto k = static_cast<std::int64_t>(hungry.size());
    const std::int64_t share = budget / k;
    const std::int64_t extra = budget % k;
    std::vector<StationId> still;
    for (std::int64_t i = 0; i < k; ++i) {
      const StationId id = hungry[static_cast<std::size_t>(i)];
      const std::int64_t offer = share + (i < extra ? 1 : 0);
      const std::int64_t want = queues_[id].backlog - grants[id];
      const std::int64_t take = std::min(offer, want);
      grants[id] += take;
      budget -= take;
      if (want > take) still.push_back(id);
    }
    hungry.swap(still);
  }

  for (auto& [id, grant] : grants) {
    Queue& q = queues_[id];
    std::int64_t g = grant;
    granted_bytes_ += g;
    q.backlog -= g;
    while (g > 0 && !q.units.empty()) {
      const std::int64_t remaining = q.units.front().bytes - q.head_served;
      const std::int64_t take = std::min(g, remaining);
      q.head_served += take;
      g -= take;
      if (q.head_served == q.units.front().bytes) {
        completing_.emplace_back(id, q.units.front());
        q.units.pop_front();
        q.head_served = 0;
      }
    }
  }

  tick_armed_ = false;
  if (!completing_.empty() || total_backlog_bytes() > 0) {
    tick_armed_ = true;
    sched_.schedule_in(epoch_us_, kNoStation, "lte_epoch", [this] { on_tick(); });
  }
}

Tunnel::Tunnel(Scheduler& scheduler, LteScheduler& uplink, const TunnelConfig& config, IngestFn on_ingest)
    : sched_(scheduler), uplink_(uplink), config_(config), on_ingest_(std::move(on_ingest)) {}

void Tunnel::send(StationId client, int payload_bytes, std::uint64_t tag) {
  if ((tag & kTunnelTagBit) != 0) throw std::invalid_argument("Tunnel: tag uses the reserved bit");
  sent_bytes_ += payload_bytes;
  pending_.emplace(next_id_, Pending{tag, payload_bytes, sched_.now()});
  uplink_.enqueue(client, LteUnit{payload_bytes + config_.per_packet_overhead_bytes, kTunnelTagBit | next_id_, 0});
  ++next_id_;
}

void Tunnel::on_lte_delivered(StationId client, const LteUnit& unit) {
  auto it = pending_.find(unit.tag & ~kTunnelTagBit);
  if (it == pending_.end()) throw std::logic_error("Tunnel: unknown unit delivered");
  const Pending p = it->second;
  pending_.erase(it);
  const SimTime lte_done = sched_.now();
  sched_.schedule_in(config_.one_way_latency_us(), client, "tunnel_arrival", [this, client, p, lte_done] {
    ingested_bytes_ += p.payload_bytes;
    ++ingested_frames_;
    latency_sum_us_ += static_cast<double>(sched_.now() - p.sent_at);
    queueing_sum_us_ += static_cast<double>(lte_done - p.sent_at);
    on_ingest_(client, p.tag, p.sent_at);
  });
}

double Tunnel::mean_latency_us() const {
  return ingested_frames_ == 0 ? 0.0 : latency_sum_us_ / static_cast<double>(ingested_frames_);
}

double Tunnel::mean_queueing_us() const {
  return ingested_frames_ == 0 ? 0.0 : queueing_sum_us_ / static_cast<double>(ingested_frames_);
}

}  // namespace hetcell
