#pragma once

// CSMA/CA DCF over a shared single-channel medium: per-station carrier sense
// and NAV, binary exponential backoff with freeze/resume, MAC ACKs after SIFS,
// retries, SINR-based reception, and AP downlink-only bursts reserved with
// CTS-to-Self.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hetcell/kernel.hpp"
#include "hetcell/radio.hpp"

namespace hetcell {

inline constexpr int kMacAckBytes = 14;
inline constexpr int kCtsSelfBytes = 14;
inline constexpr SimTime kMaxCtsReservationUs = 32000;
inline constexpr int kUnlimitedRetries = -1;
inline constexpr StationId kBroadcast = -2;

struct MacParams {
  int slot_us = 9;
  int sifs_us = 16;
  int difs_us = 34;
  int cw_min = 15;
  int cw_max = 1023;
  int retry_limit = 7;  // kUnlimitedRetries disables dropping
  int ack_timeout_us = 0;  // 0: sifs + ack airtime + 2 slots
  double cs_threshold_dbm = -82.0;

  SimTime ack_timeout(const PhyParams& phy) const;
  bool unlimited_retries() const { return retry_limit < 0; }
  bool operator==(const MacParams&) const = default;
};

bool is_pow2_minus_one(int v);
/// Window after a failed attempt: (cw + 1) * 2 - 1, capped at cw_max.
int next_contention_window(int cw, const MacParams& mac);

enum class FrameKind { Data, MacAck, CtsSelf, Mgmt, TransportAck, Noise };
const char* to_string(FrameKind kind);

struct Frame {
  FrameKind kind = FrameKind::Data;
  StationId src = kNoStation;
  StationId dst = kNoStation;
  int payload_bytes = 0;
  SimTime airtime_us = 0;  // filled by the MAC at transmission time
  bool requires_mac_ack = false;
  SimTime nav_duration_us = 0;
  double tx_power_dbm = 0.0;  // filled by the MAC at transmission time
  std::uint64_t seq = 0;      // per (src, dst) sequence number for duplicate suppression
  std::uint64_t tag = 0;      // opaque upper-layer cookie
  SimTime created_at = 0;
};

enum class DcfPhase { Idle, Deferring, BackingOff, Transmitting, AwaitingAck };
enum class ChannelState { Idle, Busy };
enum class StationRole { AccessPoint, Client, Interferer };

struct DcfState {
  int backoff_counter = 0;
  int current_cw = 0;
  int retry_count = 0;
  SimTime nav_until = 0;
  std::optional<Frame> head;
  DcfPhase phase = DcfPhase::Idle;
};

struct MacCounters {
  std::uint64_t attempts = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t successes = 0;
  std::uint64_t drops = 0;
  std::uint64_t ack_timeouts = 0;
  std::uint64_t collisions = 0;  // frames that overlapped another transmission and were not decoded by their addressee
  bool operator==(const MacCounters&) const = default;
};

/// Airtime classes: direction is uplink for clients, downlink for the AP.
enum class AirClass {
  UlData, UlTransportAck, UlMacAck, UlMgmt,
  DlData, DlTransportAck, DlMacAck, DlCtsSelf,
  Interference,
};
inline constexpr std::size_t kAirClassCount = 9;
const char* to_string(AirClass c);
bool is_uplink(AirClass c);

/// Two views of Wi-Fi channel time. `ota_us` sums every completed frame's
/// airtime (overlaps counted once per frame). `exclusive_us`, `overlap_us`
/// and `idle_us` partition the timeline and add up to the elapsed time exactly.
struct AirtimeLedger {
  std::array<SimTime, kAirClassCount> ota_us{};
  std::array<std::uint64_t, kAirClassCount> ota_count{};
  std::array<SimTime, kAirClassCount> exclusive_us{};
  SimTime overlap_us = 0;
  SimTime idle_us = 0;

  SimTime uplink_ota_us() const;
  SimTime partition_total() const;
};

/// Upper-layer hooks. The MAC pulls frames, reports outcomes, and asks the
/// receiver whether to answer a decoded frame with an on-air MAC ACK.
class MacListener {
 public:
  virtual ~MacListener() = default;
  virtual std::optional<Frame> pull_frame(StationId station) = 0;
  /// Return false to suppress the on-air MAC ACK (it travels another way).
  virtual bool on_frame_received(StationId receiver, const Frame& frame) = 0;
  virtual void on_tx_success(StationId station, const Frame& frame) = 0;
  virtual void on_tx_dropped(StationId station, const Frame& frame) = 0;
  virtual double tx_power_dbm(StationId src, StationId dst) const = 0;
};

class WifiMac {
 public:
  WifiMac(Scheduler& scheduler, const MacParams& mac, const PhyParams& phy, const LinkBudget& receiver,
          const PathLossModel& path_loss, std::uint64_t seed, MacListener& listener);

  /// Stations must all be added before the first event fires. `outdoor`
  /// stations see the wall term on links to indoor stations.
  StationId add_station(const Position& pos, StationRole role, bool outdoor = false);
  std::size_t station_count() const { return stations_.size(); }

  ChannelState sense_channel(StationId station) const;
  /// Kick DCF for a station that was idle and now has something to send.
  void notify_pending(StationId station);
  /// Queue a CTS-to-Self reservation. The AP takes the channel after PIFS
  /// (no backoff) and then serves downlink back-to-back until the window closes.
  /// Throws std::invalid_argument above 32 ms.
  void reserve_downlink_period(StationId ap, SimTime duration_us);
  /// Raw emission that ignores carrier sense (co-channel interferer).
  void emit_noise(StationId station, SimTime duration_us, double power_dbm);

  const DcfState& state(StationId station) const { return stations_.at(station).dcf; }
  const MacCounters& counters(StationId station) const { return stations_.at(station).counters; }
  const AirtimeLedger& ledger() const { return ledger_; }
  double rx_power_dbm(StationId from, StationId to, double tx_power_dbm) const;
  bool in_burst(StationId station) const { return stations_.at(station).in_burst; }
  SimTime ack_airtime() const { return ack_airtime_; }

  /// Close the occupancy partition at the end of the run.
  void finish(SimTime t_end);

 private:
  struct Reception {
    std::uint64_t tx_id;
    double rx_mw;
    double min_sinr;  // linear
  };
  struct Station {
    Station(Position p, StationRole r, bool o, RngStream g) : pos(p), role(r), outdoor(o), rng(g) {}
    Position pos;
    StationRole role;
    bool outdoor;
    DcfState dcf;
    MacCounters counters;
    RngStream rng;
    int cs_count = 0;
    bool transmitting = false;
    bool busy = false;
    SimTime idle_since = 0;
    SimTime busy_since = 0;
    SimTime anchor = 0;
    SimTime access_at = 0;
    EventHandle access;
    EventHandle ack_timer;
    EventHandle nav_timer;
    std::vector<Reception> receptions;
    SimTime cts_pending = 0;
    bool in_burst = false;
    bool pulling = false;  // inside listener_.pull_frame for this station
    SimTime burst_end = 0;
    std::uint64_t current_tx = 0;
  };
  struct ActiveTx {
    std::uint64_t id;
    StationId src;
    Frame frame;
    SimTime end;
    AirClass air_class;
    bool overlapped;
    std::vector<double> rx_mw;
  };

  Station& st(StationId id) { return stations_.at(static_cast<std::size_t>(id)); }
  AirClass classify(const Station& src, const Frame& f) const;

  void start_transmission(StationId s, Frame frame);
  void end_transmission(std::uint64_t tx_id);
  void update_medium(StationId s);
  void on_medium_busy(StationId s);
  void on_medium_idle(StationId s);
  void schedule_access(StationId s);
  void on_access(StationId s);
  void on_ack_timeout(StationId s);
  void on_exchange_success(StationId s);
  void after_exchange(StationId s);
  void start_next(StationId s);
  void draw_backoff(StationId s);
  std::optional<Frame> pull(StationId s);
  void burst_step(StationId s);
  void end_burst(StationId s);
  void send_mac_ack(StationId from, const Frame& data);
  void set_nav(StationId s, SimTime until);
  void account_occupancy();
  double sinr_at(StationId r, const Reception& rec) const;

  Scheduler& sched_;
  MacParams mac_;
  PhyParams phy_;
  LinkBudget rx_;
  PathLossModel path_loss_;
  std::uint64_t seed_;
  MacListener& listener_;
  SimTime ack_airtime_;
  SimTime ack_timeout_;
  double noise_mw_;
  double cs_threshold_mw_;
  double sensitivity_mw_;

  std::vector<Station> stations_;
  std::vector<std::vector<double>> loss_db_;
  std::vector<ActiveTx> active_;
  std::uint64_t next_tx_id_ = 1;

  AirtimeLedger ledger_;
  SimTime ledger_mark_ = 0;
};

}  // namespace hetcell
