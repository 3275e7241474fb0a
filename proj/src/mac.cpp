#include "hetcell/mac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hetcell {

SimTime MacParams::ack_timeout(const PhyParams& phy) const {
  if (ack_timeout_us > 0) return ack_timeout_us;
  return sifs_us + frame_airtime_us(kMacAckBytes, phy.control_rate_mbps, phy) + 2 * slot_us;
}

bool is_pow2_minus_one(int v) {
  if (v < 0) return false;
  const unsigned u = static_cast<unsigned>(v) + 1u;
  return (u & (u - 1u)) == 0u;
}

int next_contention_window(int cw, const MacParams& mac) {
  return std::min(2 * (cw + 1) - 1, mac.cw_max);
}

const char* to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::Data: return "data";
    case FrameKind::MacAck: return "mac_ack";
    case FrameKind::CtsSelf: return "cts_self";
    case FrameKind::Mgmt: return "mgmt";
    case FrameKind::TransportAck: return "transport_ack";
    case FrameKind::Noise: return "noise";
  }
  return "?";
}

const char* to_string(AirClass c) {
  switch (c) {
    case AirClass::UlData: return "ul_data";
    case AirClass::UlTransportAck: return "ul_transport_ack";
    case AirClass::UlMacAck: return "ul_mac_ack";
    case AirClass::UlMgmt: return "ul_mgmt";
    case AirClass::DlData: return "dl_data";
    case AirClass::DlTransportAck: return "dl_transport_ack";
    case AirClass::DlMacAck: return "dl_mac_ack";
    case AirClass::DlCtsSelf: return "dl_cts_self";
    case AirClass::Interference: return "interference";
  }
  return "?";
}

bool is_uplink(AirClass c) {
  return c == AirClass::UlData || c == AirClass::UlTransportAck || c == AirClass::UlMacAck ||
         c == AirClass::UlMgmt;
}

SimTime AirtimeLedger::uplink_ota_us() const {
  SimTime total = 0;
  for (std::size_t i = 0; i < kAirClassCount; ++i) {
    if (is_uplink(static_cast<AirClass>(i))) total += ota_us[i];
  }
  return total;
}

SimTime AirtimeLedger::partition_total() const {
  SimTime total = overlap_us + idle_us;
  for (SimTime t : exclusive_us) total += t;
  return total;
}

WifiMac::WifiMac(Scheduler& scheduler, const MacParams& mac, const PhyParams& phy, const LinkBudget& receiver,
                 const PathLossModel& path_loss, std::uint64_t seed, MacListener& listener)
    : sched_(scheduler),
      mac_(mac),
      phy_(phy),
      rx_(receiver),
      path_loss_(path_loss),
      seed_(seed),
      listener_(listener),
      ack_airtime_(frame_airtime_us(kMacAckBytes, phy.control_rate_mbps, phy)),
      ack_timeout_(mac.ack_timeout(phy)),
      noise_mw_(dbm_to_mw(receiver.noise_floor_dbm)),
      cs_threshold_mw_(dbm_to_mw(mac.cs_threshold_dbm)),
      sensitivity_mw_(dbm_to_mw(receiver.sensitivity_dbm)) {}

StationId WifiMac::add_station(const Position& pos, StationRole role, bool outdoor) {
  const auto id = static_cast<StationId>(stations_.size());
  Station s(pos, role, outdoor, RngStream(seed_, stream_id(id, StreamPurpose::Backoff)));
  s.dcf.current_cw = mac_.cw_min;
  stations_.push_back(std::move(s));
  for (std::size_t i = 0; i < loss_db_.size(); ++i) {
    const Station& other = stations_[i];
    loss_db_[i].push_back(path_loss_db(path_loss_, distance_m(other.pos, pos), other.outdoor != outdoor));
  }
  std::vector<double> row;
  row.reserve(stations_.size());
  for (std::size_t i = 0; i < loss_db_.size(); ++i) row.push_back(loss_db_[i].back());
  row.push_back(path_loss_db(path_loss_, 0.0));
  loss_db_.push_back(std::move(row));
  return id;
}

double WifiMac::rx_power_dbm(StationId from, StationId to, double tx_power_dbm) const {
  return tx_power_dbm - loss_db_.at(static_cast<std::size_t>(from)).at(static_cast<std::size_t>(to));
}

ChannelState WifiMac::sense_channel(StationId station) const {
  const Station& s = stations_.at(static_cast<std::size_t>(station));
  const bool busy = s.transmitting || s.cs_count > 0 || s.dcf.nav_until > sched_.now();
  return busy ? ChannelState::Busy : ChannelState::Idle;
}

AirClass WifiMac::classify(const Station& src, const Frame& f) const {
  if (src.role == StationRole::Interferer || f.kind == FrameKind::Noise) return AirClass::Interference;
  const bool down = src.role == StationRole::AccessPoint;
  switch (f.kind) {
    case FrameKind::Data: return down ? AirClass::DlData : AirClass::UlData;
    case FrameKind::TransportAck: return down ? AirClass::DlTransportAck : AirClass::UlTransportAck;
    case FrameKind::MacAck: return down ? AirClass::DlMacAck : AirClass::UlMacAck;
    case FrameKind::CtsSelf: return down ? AirClass::DlCtsSelf : AirClass::UlMgmt;
    case FrameKind::Mgmt: return down ? AirClass::DlData : AirClass::UlMgmt;
    case FrameKind::Noise: break;
  }
  return AirClass::Interference;
}

void WifiMac::account_occupancy() {
  const SimTime now = sched_.now();
  const SimTime elapsed = now - ledger_mark_;
  if (elapsed > 0) {
    if (active_.empty()) {
      ledger_.idle_us += elapsed;
    } else if (active_.size() == 1) {
      ledger_.exclusive_us[static_cast<std::size_t>(active_.front().air_class)] += elapsed;
    } else {
      ledger_.overlap_us += elapsed;
    }
  }
  ledger_mark_ = now;
}

void WifiMac::finish(SimTime t_end) {
  if (t_end != sched_.now()) throw std::logic_error("WifiMac::finish: clock not at t_end");
  account_occupancy();
}

double WifiMac::sinr_at(StationId r, const Reception& rec) const {
  double denom = noise_mw_;
  for (const ActiveTx& tx : active_) {
    if (tx.id != rec.tx_id) denom += tx.rx_mw[static_cast<std::size_t>(r)];
  }
  return rec.rx_mw / denom;
}

void WifiMac::start_transmission(StationId s, Frame frame) {
  Station& src = st(s);
  if (frame.kind != FrameKind::Noise) {
    frame.tx_power_dbm = listener_.tx_power_dbm(s, frame.dst);
    const bool control = frame.kind == FrameKind::MacAck || frame.kind == FrameKind::CtsSelf;
    frame.airtime_us = frame_airtime_us(frame.payload_bytes, control ? phy_.control_rate_mbps : phy_.data_rate_mbps, phy_);
  }
  account_occupancy();

  ActiveTx tx{next_tx_id_++, s, frame, sched_.now() + frame.airtime_us, classify(src, frame), !active_.empty(), {}};
  for (ActiveTx& other : active_) other.overlapped = true;
  const std::size_t n = stations_.size();
  tx.rx_mw.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    if (static_cast<StationId>(r) != s) tx.rx_mw[r] = dbm_to_mw(frame.tx_power_dbm - loss_db_[static_cast<std::size_t>(s)][r]);
  }

  src.transmitting = true;
  src.current_tx = tx.id;
  src.receptions.clear();  // half duplex
  active_.push_back(std::move(tx));
  const ActiveTx& added = active_.back();

  for (std::size_t r = 0; r < n; ++r) {
    if (static_cast<StationId>(r) == s) continue;
    Station& rx = stations_[r];
    if (added.rx_mw[r] >= cs_threshold_mw_) ++rx.cs_count;
    if (rx.transmitting) continue;
    if (frame.kind != FrameKind::Noise && added.rx_mw[r] >= sensitivity_mw_) {
      rx.receptions.push_back(Reception{added.id, added.rx_mw[r], std::numeric_limits<double>::infinity()});
    }
    for (Reception& rec : rx.receptions) {
      rec.min_sinr = std::min(rec.min_sinr, sinr_at(static_cast<StationId>(r), rec));
    }
  }

  if (sched_.tracing()) sched_.note(s, std::string("tx_") + to_string(frame.kind));
  const std::uint64_t id = added.id;
  const SimTime end = added.end;
  for (std::size_t r = 0; r < n; ++r) update_medium(static_cast<StationId>(r));
  sched_.schedule(end, s, "tx_end", [this, id] { end_transmission(id); });
}

void WifiMac::end_transmission(std::uint64_t tx_id) {
  account_occupancy();
  auto it = std::find_if(active_.begin(), active_.end(), [&](const ActiveTx& t) { return t.id == tx_id; });
  if (it == active_.end()) throw std::logic_error("WifiMac: unknown transmission ended");
  const ActiveTx tx = std::move(*it);
  active_.erase(it);

  const auto cls = static_cast<std::size_t>(tx.air_class);
  ledger_.ota_us[cls] += tx.frame.airtime_us;
  ++ledger_.ota_count[cls];

  const StationId s = tx.src;
  Station& src = st(s);
  src.transmitting = false;
  src.current_tx = 0;

  const double threshold = std::pow(10.0, rx_.capture_threshold_db / 10.0);
  std::vector<StationId> decoded;
  bool addressee_decoded = false;
  for (std::size_t r = 0; r < stations_.size(); ++r) {
    if (static_cast<StationId>(r) == s) continue;
    Station& rx = stations_[r];
    if (tx.rx_mw[r] >= cs_threshold_mw_) --rx.cs_count;
    auto rec = std::find_if(rx.receptions.begin(), rx.receptions.end(),
                            [&](const Reception& x) { return x.tx_id == tx_id; });
    if (rec == rx.receptions.end()) continue;
    if (rec->min_sinr >= threshold) {
      decoded.push_back(static_cast<StationId>(r));
      if (static_cast<StationId>(r) == tx.frame.dst) addressee_decoded = true;
    }
    rx.receptions.erase(rec);
  }

  const Frame& f = tx.frame;
  const bool dcf_frame = f.kind == FrameKind::Data || f.kind == FrameKind::Mgmt || f.kind == FrameKind::TransportAck;
  if (dcf_frame && tx.overlapped && !addressee_decoded) ++src.counters.collisions;

  if (f.kind == FrameKind::CtsSelf) {
    for (StationId r : decoded) {
      set_nav(r, sched_.now() + f.nav_duration_us);
      if (sched_.tracing()) sched_.note(r, "nav_cts");
    }
  }
  for (std::size_t r = 0; r < stations_.size(); ++r) update_medium(static_cast<StationId>(r));

  // Sender side.
  switch (f.kind) {
    case FrameKind::Noise:
    case FrameKind::MacAck:
      break;
    case FrameKind::CtsSelf:
      src.in_burst = true;
      src.burst_end = sched_.now() + f.nav_duration_us;
      src.dcf.phase = DcfPhase::Transmitting;
      sched_.schedule_in(mac_.sifs_us, s, "burst_next", [this, s] { burst_step(s); });
      break;
    case FrameKind::Data:
    case FrameKind::Mgmt:
    case FrameKind::TransportAck:
      if (f.requires_mac_ack && f.dst >= 0) {
        src.dcf.phase = DcfPhase::AwaitingAck;
        src.ack_timer = sched_.schedule_in(ack_timeout_, s, "ack_timeout", [this, s] { on_ack_timeout(s); });
      } else {
        on_exchange_success(s);
      }
      break;
  }

  // Receivers.
  for (StationId r : decoded) {
    Station& rx = st(r);
    switch (f.kind) {
      case FrameKind::MacAck:
        if (r == f.dst && rx.dcf.phase == DcfPhase::AwaitingAck && rx.dcf.head && rx.dcf.head->seq == f.seq &&
            rx.dcf.head->dst == s) {
          sched_.cancel(rx.ack_timer);
          on_exchange_success(r);
        }
        break;
      case FrameKind::Data:
      case FrameKind::Mgmt:
      case FrameKind::TransportAck:
        if (r == f.dst) {
          const bool answer = listener_.on_frame_received(r, f);
          if (answer && f.requires_mac_ack) send_mac_ack(r, f);
        }
        break;
      case FrameKind::CtsSelf:
      case FrameKind::Noise:
        break;
    }
  }
}

void WifiMac::update_medium(StationId s) {
  Station& station = st(s);
  const SimTime now = sched_.now();
  const bool busy = station.transmitting || station.cs_count > 0 || station.dcf.nav_until > now;
  if (busy && !station.busy) {
    station.busy = true;
    station.busy_since = now;
    on_medium_busy(s);
  } else if (!busy && station.busy) {
    station.busy = false;
    station.idle_since = now;
    on_medium_idle(s);
  }
}

void WifiMac::on_medium_busy(StationId s) {
  Station& station = st(s);
  if (station.dcf.phase != DcfPhase::BackingOff) return;
  const SimTime now = sched_.now();
  // A station whose countdown expires in this very instant cannot have
  // sensed the other transmission yet: both go out and collide.
  if (station.access_at == now) return;
  sched_.cancel(station.access);
  if (now > station.anchor) {
    const auto elapsed = static_cast<int>((now - station.anchor) / mac_.slot_us);
    station.dcf.backoff_counter = std::max(0, station.dcf.backoff_counter - elapsed);
  }
  station.dcf.phase = DcfPhase::Deferring;
}

void WifiMac::on_medium_idle(StationId s) {
  if (st(s).dcf.phase == DcfPhase::Deferring) schedule_access(s);
}

void WifiMac::schedule_access(StationId s) {
  Station& station = st(s);
  const SimTime now = sched_.now();
  if (station.cts_pending > 0) {
    // PIFS access: the reservation goes out ahead of every DIFS station.
    station.anchor = std::max(now, station.idle_since + mac_.sifs_us + mac_.slot_us);
    station.access_at = station.anchor;
    station.dcf.phase = DcfPhase::BackingOff;
    station.access = sched_.schedule(station.access_at, s, "access", [this, s] { on_access(s); });
    return;
  }
  const SimTime base = station.idle_since + mac_.difs_us;
  SimTime anchor = base;
  if (now > base) {
    const SimTime slots = (now - base + mac_.slot_us - 1) / mac_.slot_us;
    anchor = base + slots * mac_.slot_us;
  }
  station.anchor = anchor;
  station.access_at = anchor + static_cast<SimTime>(station.dcf.backoff_counter) * mac_.slot_us;
  station.dcf.phase = DcfPhase::BackingOff;
  station.access = sched_.schedule(station.access_at, s, "access", [this, s] { on_access(s); });
}

void WifiMac::on_access(StationId s) {
  Station& station = st(s);
  station.access = EventHandle{};
  const SimTime now = sched_.now();
  if (station.transmitting || (station.busy && station.busy_since < now)) {
    // Our own SIFS response grabbed the medium at this instant.
    station.dcf.backoff_counter = 0;
    station.dcf.phase = DcfPhase::Deferring;
    return;
  }
  station.dcf.phase = DcfPhase::Transmitting;
  if (station.cts_pending > 0) {
    Frame cts;
    cts.kind = FrameKind::CtsSelf;
    cts.src = s;
    cts.dst = kBroadcast;
    cts.payload_bytes = kCtsSelfBytes;
    cts.nav_duration_us = station.cts_pending;
    cts.created_at = now;
    station.cts_pending = 0;
    start_transmission(s, cts);
    return;
  }
  if (!station.dcf.head) {
    station.dcf.phase = DcfPhase::Idle;
    return;
  }
  ++station.counters.attempts;
  if (station.dcf.retry_count > 0) ++station.counters.retransmissions;
  start_transmission(s, *station.dcf.head);
}

void WifiMac::on_ack_timeout(StationId s) {
  Station& station = st(s);
  station.ack_timer = EventHandle{};
  ++station.counters.ack_timeouts;
  ++station.dcf.retry_count;
  if (!mac_.unlimited_retries() && station.dcf.retry_count > mac_.retry_limit) {
    ++station.counters.drops;
    const Frame dropped = *station.dcf.head;
    station.dcf.head.reset();
    station.dcf.retry_count = 0;
    station.dcf.current_cw = mac_.cw_min;
    listener_.on_tx_dropped(s, dropped);
    after_exchange(s);
    return;
  }
  if (station.in_burst) {
    after_exchange(s);
    return;
  }
  station.dcf.current_cw = next_contention_window(station.dcf.current_cw, mac_);
  draw_backoff(s);
  station.dcf.phase = DcfPhase::Deferring;
  if (!station.busy) schedule_access(s);
}

void WifiMac::on_exchange_success(StationId s) {
  Station& station = st(s);
  ++station.counters.successes;
  const Frame done = *station.dcf.head;
  station.dcf.head.reset();
  station.dcf.retry_count = 0;
  station.dcf.current_cw = mac_.cw_min;
  listener_.on_tx_success(s, done);
  after_exchange(s);
}

void WifiMac::after_exchange(StationId s) {
  Station& station = st(s);
  if (station.in_burst) {
    station.dcf.phase = DcfPhase::Transmitting;
    sched_.schedule_in(mac_.sifs_us, s, "burst_next", [this, s] { burst_step(s); });
    return;
  }
  station.dcf.phase = DcfPhase::Idle;
  start_next(s);
}

void WifiMac::start_next(StationId s) {
  Station& station = st(s);
  if (!station.dcf.head) station.dcf.head = pull(s);
  if (!station.dcf.head && station.cts_pending == 0) {
    station.dcf.phase = DcfPhase::Idle;
    station.dcf.backoff_counter = 0;
    return;
  }
  draw_backoff(s);
  station.dcf.phase = DcfPhase::Deferring;
  if (!station.busy) schedule_access(s);
}

std::optional<Frame> WifiMac::pull(StationId s) {
  Station& station = st(s);
  station.pulling = true;
  std::optional<Frame> f = listener_.pull_frame(s);
  station.pulling = false;
  return f;
}

void WifiMac::draw_backoff(StationId s) {
  Station& station = st(s);
  station.dcf.backoff_counter = static_cast<int>(station.rng.uniform_int(0, station.dcf.current_cw));
}

void WifiMac::notify_pending(StationId s) {
  Station& station = st(s);
  if (station.pulling) return;  // refilled from inside pull_frame
  if (station.dcf.phase == DcfPhase::Idle && !station.in_burst) start_next(s);
}

void WifiMac::reserve_downlink_period(StationId ap, SimTime duration_us) {
  if (duration_us <= 0 || duration_us > kMaxCtsReservationUs) {
    throw std::invalid_argument("CTS-to-Self reservation must be in (0, 32000] us");
  }
  Station& station = st(ap);
  station.cts_pending = duration_us;
  if (station.in_burst) return;
  if (station.dcf.phase == DcfPhase::Idle) {
    start_next(ap);
  } else if (station.dcf.phase == DcfPhase::BackingOff && station.access_at > sched_.now()) {
    // Keep the slots already counted down for the frame behind the CTS.
    sched_.cancel(station.access);
    const SimTime now = sched_.now();
    if (now > station.anchor) {
      const auto elapsed = static_cast<int>((now - station.anchor) / mac_.slot_us);
      station.dcf.backoff_counter = std::max(0, station.dcf.backoff_counter - elapsed);
    }
    schedule_access(ap);
  }
}

void WifiMac::burst_step(StationId s) {
  Station& station = st(s);
  const SimTime now = sched_.now();
  if (now >= station.burst_end) {
    end_burst(s);
    return;
  }
  if (!station.dcf.head) station.dcf.head = pull(s);
  if (!station.dcf.head) {
    end_burst(s);
    return;
  }
  const Frame& f = *station.dcf.head;
  const bool control = f.kind == FrameKind::MacAck || f.kind == FrameKind::CtsSelf;
  SimTime need = frame_airtime_us(f.payload_bytes, control ? phy_.control_rate_mbps : phy_.data_rate_mbps, phy_);
  if (f.requires_mac_ack) need += mac_.sifs_us + ack_airtime_;
  if (now + need > station.burst_end) {
    end_burst(s);
    return;
  }
  station.dcf.phase = DcfPhase::Transmitting;
  ++station.counters.attempts;
  if (station.dcf.retry_count > 0) ++station.counters.retransmissions;
  start_transmission(s, f);
}

void WifiMac::end_burst(StationId s) {
  Station& station = st(s);
  station.in_burst = false;
  station.dcf.phase = DcfPhase::Idle;
  start_next(s);
}

void WifiMac::send_mac_ack(StationId from, const Frame& data) {
  Frame ack;
  ack.kind = FrameKind::MacAck;
  ack.src = from;
  ack.dst = data.src;
  ack.payload_bytes = kMacAckBytes;
  ack.seq = data.seq;
  ack.created_at = sched_.now();
  sched_.schedule_in(mac_.sifs_us, from, "ack_tx", [this, from, ack] {
    if (st(from).transmitting) return;
    start_transmission(from, ack);
  });
}

void WifiMac::set_nav(StationId s, SimTime until) {
  Station& station = st(s);
  if (until <= station.dcf.nav_until) return;
  station.dcf.nav_until = until;
  sched_.cancel(station.nav_timer);
  station.nav_timer = sched_.schedule(until, s, "nav_end", [this, s] {
    st(s).nav_timer = EventHandle{};
    update_medium(s);
  });
}

void WifiMac::emit_noise(StationId station, SimTime duration_us, double power_dbm) {
  if (st(station).transmitting) return;
  Frame noise;
  noise.kind = FrameKind::Noise;
  noise.src = station;
  noise.dst = kNoStation;
  noise.airtime_us = duration_us;
  noise.tx_power_dbm = power_dbm;
  noise.created_at = sched_.now();
  start_transmission(station, noise);
}

}  // namespace hetcell
