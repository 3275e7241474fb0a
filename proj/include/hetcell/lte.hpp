#pragma once

// Contention-free LTE capacity pipe. Grants are issued per scheduler epoch
// and split equally among backlogged stations; each station drains FIFO.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <vector>

#include "hetcell/kernel.hpp"

namespace hetcell {

enum class Duplex { FDD, TDD };
enum class LinkDirection { Uplink, Downlink };

struct LteConfig {
  Duplex duplex = Duplex::FDD;
  double dl_capacity_mbps = 50.0;  // FDD
  double ul_capacity_mbps = 50.0;  // FDD
  double total_capacity_mbps = 100.0;  // TDD
  double ul_fraction = 0.5;            // TDD
  SimTime scheduler_epoch_us = 1000;
  bool operator==(const LteConfig&) const = default;
};

double lte_capacity(const LteConfig& config, LinkDirection direction);

enum class TunnelPath { ViaCore, DirectEnbAp };

struct TunnelConfig {
  TunnelPath path = TunnelPath::ViaCore;
  SimTime via_core_latency_us = 10000;
  SimTime direct_latency_us = 2000;
  int per_packet_overhead_bytes = 40;

  SimTime one_way_latency_us() const {
    return path == TunnelPath::ViaCore ? via_core_latency_us : direct_latency_us;
  }
  bool operator==(const TunnelConfig&) const = default;
};

/// Unit of LTE transfer: `bytes` are charged against grants; `tag` is returned
/// to the owner on delivery.
struct LteUnit {
  std::int64_t bytes = 0;
  std::uint64_t tag = 0;
  SimTime enqueued_at = 0;
};

/// One direction of the LTE link.
class LteScheduler {
 public:
  using DeliverFn = std::function<void(StationId, const LteUnit&)>;

  LteScheduler(Scheduler& scheduler, double capacity_mbps, SimTime epoch_us, DeliverFn on_delivered);

  void enqueue(StationId station, LteUnit unit);
  std::int64_t backlog_bytes(StationId station) const;
  std::int64_t total_backlog_bytes() const;
  std::int64_t delivered_bytes() const { return delivered_bytes_; }
  std::int64_t granted_bytes() const { return granted_bytes_; }
  double capacity_mbps() const { return capacity_mbps_; }

 private:
  struct Queue {
    std::deque<LteUnit> units;
    std::int64_t head_served = 0;  // bytes of the head unit already granted
    std::int64_t backlog = 0;      // not yet granted
  };

  void ensure_tick();
  void on_tick();

  Scheduler& sched_;
  double capacity_mbps_;
  SimTime epoch_us_;
  DeliverFn on_delivered_;
  std::map<StationId, Queue> queues_;
  std::vector<std::pair<StationId, LteUnit>> completing_;
  double carry_bits_ = 0.0;
  std::size_t rr_start_ = 0;
  bool tick_armed_ = false;
  std::int64_t delivered_bytes_ = 0;
  std::int64_t granted_bytes_ = 0;
};

/// Uplink tunnel from a hybrid client to the AP: the frame rides the LTE
/// uplink (payload + overhead) and then the fixed one-way path latency.
class Tunnel {
 public:
  using IngestFn = std::function<void(StationId client, std::uint64_t tag, SimTime sent_at)>;

  Tunnel(Scheduler& scheduler, LteScheduler& uplink, const TunnelConfig& config, IngestFn on_ingest);

  void send(StationId client, int payload_bytes, std::uint64_t tag);
  /// Hook for the owner's LTE uplink delivery callback.
  void on_lte_delivered(StationId client, const LteUnit& unit);

  std::int64_t sent_bytes() const { return sent_bytes_; }
  std::int64_t ingested_bytes() const { return ingested_bytes_; }
  std::int64_t in_flight_bytes() const { return sent_bytes_ - ingested_bytes_; }
  std::uint64_t ingested_frames() const { return ingested_frames_; }
  double mean_latency_us() const;
  double mean_queueing_us() const;
  const TunnelConfig& config() const { return config_; }

 private:
  Scheduler& sched_;
  LteScheduler& uplink_;
  TunnelConfig config_;
  IngestFn on_ingest_;
  std::int64_t sent_bytes_ = 0;
  std::int64_t ingested_bytes_ = 0;
  std::uint64_t ingested_frames_ = 0;
  double latency_sum_us_ = 0.0;
  double queueing_sum_us_ = 0.0;

  struct Pending {
    std::uint64_t tag;
    int payload_bytes;
    SimTime sent_at;
  };
  std::map<std::uint64_t, Pending> pending_;
  std::uint64_t next_id_ = 1;
};

/// Tunnel units carry this bit in their LTE tag so the owner can demultiplex.
inline constexpr std::uint64_t kTunnelTagBit = 1ull << 63;

}  // namespace hetcell
