#include "hetcell/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "hetcell/lte.hpp"

namespace hetcell {

namespace {

// Frame.tag values for management frames.
constexpr std::uint64_t kAssocRequest = 1;
constexpr std::uint64_t kAssocResponse = 2;
constexpr std::uint64_t kPeriodicMgmt = 3;

// Sequence space for non-data frames, kept apart from segment numbers.
constexpr std::uint64_t kCtrlSeqBit = 1ull << 62;

struct Packet {
  FrameKind kind = FrameKind::Data;
  StationId client = kNoStation;
  bool uplink = true;
  std::uint64_t seq = 0;
  std::uint64_t tag = 0;
  int bytes = 0;
  SimTime created_at = 0;
  FrameKind acked = FrameKind::Data;  // MAC ACK packets only
};

struct HybridPending {
  EventHandle timer;
  std::uint64_t attempt = 0;
  bool awaiting = false;
  int retries = 0;
};

struct PathStats {
  std::int64_t bytes = 0;
  double delay_ewma_us = 0.0;
  bool seeded = false;

  void record(int b, SimTime delay) {
    bytes += b;
    const auto d = static_cast<double>(delay);
    delay_ewma_us = seeded ? 0.875 * delay_ewma_us + 0.125 * d : d;
    seeded = true;
  }
};

struct Client {
  StationId id = kNoStation;
  ClientSpec spec;
  double distance = 0.0;
  std::optional<Mode> mode;  // nullopt: LTE-only, no Wi-Fi presence

  bool associated = false;     // client side, after the association response
  bool ap_associated = false;  // AP side, after the association request
  SimTime associated_at = -1;
  bool assoc_req_queued = false;
  std::uint64_t ctrl_seq = 0;

  std::optional<SegmentSource> ul_src;
  std::optional<SegmentSource> dl_src;
  bool ul_release_armed = false;
  bool dl_release_armed = false;

  std::deque<Frame> ul_ctrl, ul_data;  // client Wi-Fi queues
  std::deque<Frame> dl_ctrl, dl_data;  // AP Wi-Fi queues toward this client
  std::int64_t lte_ul_outstanding = 0;
  std::int64_t lte_dl_outstanding = 0;

  std::optional<TransportReceiver> dl_rx;  // downlink flow receiver (client)
  DuplicateFilter ul_dup, dl_dup;

  std::int64_t ul_wifi = 0, ul_lte = 0, ul_tunnel = 0, dl_wifi = 0, dl_lte = 0;
  PathStats ul_path_wifi, ul_path_lte, dl_path_wifi, dl_path_lte;

  std::map<std::uint64_t, HybridPending> hybrid;

  // tight bearer splitter
  double est_wifi_mbps = 0.0;
  double est_lte_mbps = 0.0;
  std::int64_t wifi_drained = 0;
  std::int64_t lte_drained = 0;
  bool wifi_starved = false;
  bool lte_starved = false;
};

class Cell final : public MacListener {
 public:
  Cell(const ScenarioConfig& config, const TraceSink& trace);
  MetricsReport run();

  // MacListener
  std::optional<Frame> pull_frame(StationId station) override;
  bool on_frame_received(StationId receiver, const Frame& frame) override;
  void on_tx_success(StationId station, const Frame& frame) override;
  void on_tx_dropped(StationId station, const Frame& frame) override;
  double tx_power_dbm(StationId src, StationId dst) const override;

 private:
  Client& client(StationId id) { return clients_.at(static_cast<std::size_t>(id - 1)); }
  bool is_client(StationId id) const { return id >= 1 && id <= static_cast<StationId>(clients_.size()); }

  void setup();
  void start_association(Client& c);
  void send_assoc_request(Client& c);
  void on_client_associated(Client& c);
  void on_ap_associated(Client& c);
  void send_periodic_mgmt(Client& c);

  // uplink from a client, class routed per mode
  void send_uplink_ctrl(Client& c, FrameKind kind, TrafficClass cls, int bytes, std::uint64_t tag, std::uint64_t seq,
                        FrameKind acked = FrameKind::Data);
  void fill_uplink(Client& c);
  void fill_downlink(Client& c);
  void arm_release(Client& c, bool uplink);
  std::int64_t lte_ul_target() const;
  std::int64_t lte_dl_target() const;
  Subflow choose(const Client& c, bool uplink) const;

  void lte_ul_delivered(StationId station, const LteUnit& unit);
  void lte_dl_delivered(StationId station, const LteUnit& unit);
  void tunnel_ingest(StationId station, std::uint64_t tag, SimTime sent_at);

  // network-side handling of uplink packets, however they arrived
  enum class Arrival { WiFi, LteNative, Tunnel };
  void network_receive_data(Client& c, std::uint64_t seq, int bytes, SimTime created, Arrival via);
  void client_receive_data(Client& c, std::uint64_t seq, int bytes, SimTime created, bool via_wifi);
  void hybrid_ack(Client& c, std::uint64_t seq, std::uint64_t attempt);
  void hybrid_timeout(StationId id, std::uint64_t seq);

  void tight_epoch(StationId id);
  void dl_only_tick();
  void interferer_tick();

  std::uint64_t store(Packet p);
  Packet take(std::uint64_t id);
  Frame make_frame(FrameKind kind, StationId src, StationId dst, int bytes, std::uint64_t seq, std::uint64_t tag) const;

  MetricsReport build_report() const;

  ScenarioConfig cfg_;
  Scheduler sched_;
  WifiMac mac_;
  LteScheduler lte_ul_;
  LteScheduler lte_dl_;
  Tunnel tunnel_;
  std::vector<Client> clients_;
  StationId interferer_ = kNoStation;
  std::size_t ap_rr_ = 0;
  int lte_ul_users_ = 0;
  int lte_dl_users_ = 0;

  std::unordered_map<std::uint64_t, Packet> packets_;
  std::uint64_t next_packet_ = 1;

  std::array<std::int64_t, 5> lte_ul_bytes_{};
  std::int64_t lte_dl_bytes_ = 0;
  std::int64_t ap_tunnel_bytes_ = 0;
  std::uint64_t hybrid_retx_ = 0;
  std::uint64_t late_acks_ = 0;
  std::uint64_t transport_acks_ = 0;
};

std::size_t class_index(TrafficClass c) { return static_cast<std::size_t>(c); }

Cell::Cell(const ScenarioConfig& config, const TraceSink& trace)
    : cfg_(config),
      mac_(sched_, config.mac, config.phy, config.budget, config.path_loss, config.seed, *this),
      lte_ul_(sched_, lte_capacity(config.lte, LinkDirection::Uplink), config.lte.scheduler_epoch_us,
              [this](StationId s, const LteUnit& u) { lte_ul_delivered(s, u); }),
      lte_dl_(sched_, lte_capacity(config.lte, LinkDirection::Downlink), config.lte.scheduler_epoch_us,
              [this](StationId s, const LteUnit& u) { lte_dl_delivered(s, u); }),
      tunnel_(sched_, lte_ul_, config.tunnel,
              [this](StationId s, std::uint64_t tag, SimTime sent) { tunnel_ingest(s, tag, sent); }) {
  if (trace) sched_.set_trace(trace);
  setup();
}

Frame Cell::make_frame(FrameKind kind, StationId src, StationId dst, int bytes, std::uint64_t seq,
                       std::uint64_t tag) const {
  Frame f;
  f.kind = kind;
  f.src = src;
  f.dst = dst;
  f.payload_bytes = bytes;
  f.requires_mac_ack = true;
  f.seq = seq;
  f.tag = tag;
  f.created_at = sched_.now();
  return f;
}

std::uint64_t Cell::store(Packet p) {
  const std::uint64_t id = next_packet_++;
  packets_.emplace(id, p);
  return id;
}

Packet Cell::take(std::uint64_t id) {
  auto it = packets_.find(id);
  if (it == packets_.end()) throw std::logic_error("Cell: unknown packet");
  Packet p = it->second;
  packets_.erase(it);
  return p;
}

void Cell::setup() {
  const bool outdoor_split = cfg_.indoor_radius_m > 0.0;
  auto outdoor = [&](const Position& p) { return outdoor_split && distance_m(p, cfg_.ap) > cfg_.indoor_radius_m; };

  mac_.add_station(cfg_.ap, StationRole::AccessPoint, false);
  const std::vector<ClientSpec> specs = cfg_.resolved_clients();
  clients_.resize(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Client& c = clients_[i];
    c.spec = specs[i];
    c.id = mac_.add_station(specs[i].pos, StationRole::Client, outdoor(specs[i].pos));
    c.distance = distance_m(specs[i].pos, cfg_.ap);
  }
  if (cfg_.interferer.enabled()) {
    interferer_ = mac_.add_station(cfg_.interferer.pos, StationRole::Interferer, outdoor(cfg_.interferer.pos));
  }

  // Connection manager: which SSIDs each client can decode decides its mode.
  for (Client& c : clients_) {
    std::vector<SsidAdvert> heard;
    const double sens = cfg_.budget.sensitivity_dbm;
    if (mac_.rx_power_dbm(kApStation, c.id, cfg_.ap_standard_ssid_dbm) >= sens) {
      heard.push_back({SsidKind::StandardAccess, cfg_.ap_standard_ssid_dbm});
    }
    if (cfg_.mode != Mode::Standard && mac_.rx_power_dbm(kApStation, c.id, cfg_.ap_integrated_ssid_dbm) >= sens) {
      heard.push_back({SsidKind::IntegratedAccess, cfg_.ap_integrated_ssid_dbm});
    }
    c.mode = select_mode(heard, c.spec.capable, cfg_.mode, cfg_.prefer_integrated);
    if (!c.mode) continue;
    if (*c.mode != Mode::Standard) ++lte_ul_users_;
    if (*c.mode == Mode::Loose || *c.mode == Mode::Tight) ++lte_dl_users_;
    const auto src_start = SimTime{0};
    if (cfg_.flow.has_uplink()) c.ul_src.emplace(cfg_.flow, src_start);
    if (cfg_.flow.has_downlink()) c.dl_src.emplace(cfg_.flow, src_start);
    if (cfg_.flow.transport == TransportKind::Reliable) {
      c.dl_rx.emplace(cfg_.ack);
    }
    const double n = std::max(1, static_cast<int>(clients_.size()));
    c.est_wifi_mbps = cfg_.phy.data_rate_mbps / (2.0 * n);
    c.est_lte_mbps = lte_capacity(cfg_.lte, LinkDirection::Downlink) / n;
  }

  for (Client& c : clients_) {
    if (c.mode) {
      const StationId id = c.id;
      sched_.schedule(0, id, "assoc_start", [this, id] { start_association(client(id)); });
    }
  }
  if (cfg_.dl_only_period_us > 0) {
    sched_.schedule(cfg_.dl_only_period_us, kApStation, "dl_only", [this] { dl_only_tick(); });
  }
  if (interferer_ != kNoStation) {
    sched_.schedule(cfg_.interferer.start_us, interferer_, "jam", [this] { interferer_tick(); });
  }
}

double Cell::tx_power_dbm(StationId src, StationId dst) const {
  if (src != kApStation) return cfg_.client_tx_dbm;
  if (is_client(dst)) {
    const Client& c = clients_[static_cast<std::size_t>(dst - 1)];
    const bool integrated = c.mode && *c.mode != Mode::Standard;
    return integrated ? cfg_.ap_integrated_ssid_dbm : cfg_.ap_standard_ssid_dbm;
  }
  return cfg_.mode != Mode::Standard ? cfg_.ap_integrated_ssid_dbm : cfg_.ap_standard_ssid_dbm;
}

// ---------------------------------------------------------------- association

void Cell::start_association(Client& c) {
  if (c.associated) return;
  send_assoc_request(c);
  const StationId id = c.id;
  sched_.schedule_in(cfg_.assoc_retry_us, id, "assoc_retry", [this, id] { start_association(client(id)); });
}

void Cell::send_assoc_request(Client& c) {
  if (c.assoc_req_queued) return;
  if (route(*c.mode, TrafficClass::WifiMgmt) == Iface::WiFi) c.assoc_req_queued = true;
  send_uplink_ctrl(c, FrameKind::Mgmt, TrafficClass::WifiMgmt, cfg_.mgmt_bytes, kAssocRequest,
                   kCtrlSeqBit | ++c.ctrl_seq);
}

void Cell::on_ap_associated(Client& c) {
  // The AP answers every request; a repeated request means the response was lost.
  Frame resp = make_frame(FrameKind::Mgmt, kApStation, c.id, cfg_.mgmt_bytes, kCtrlSeqBit | ++c.ctrl_seq, kAssocResponse);
  resp.requires_mac_ack = *c.mode != Mode::Hybrid;
  c.dl_ctrl.push_back(resp);
  if (!c.ap_associated) {
    c.ap_associated = true;
    if (*c.mode == Mode::Tight && c.dl_src) {
      const StationId id = c.id;
      sched_.schedule_in(0, id, "tight_epoch", [this, id] { tight_epoch(id); });
    } else {
      fill_downlink(c);
    }
  }
  mac_.notify_pending(kApStation);
}

void Cell::on_client_associated(Client& c) {
  if (c.associated) return;
  c.associated = true;
  c.associated_at = sched_.now();
  fill_uplink(c);
  if (cfg_.mgmt_interval_us > 0) {
    const StationId id = c.id;
    sched_.schedule_in(cfg_.mgmt_interval_us, id, "mgmt", [this, id] { send_periodic_mgmt(client(id)); });
  }
}

void Cell::send_periodic_mgmt(Client& c) {
  send_uplink_ctrl(c, FrameKind::Mgmt, TrafficClass::WifiMgmt, cfg_.mgmt_bytes, kPeriodicMgmt,
                   kCtrlSeqBit | ++c.ctrl_seq);
  const StationId id = c.id;
  sched_.schedule_in(cfg_.mgmt_interval_us, id, "mgmt", [this, id] { send_periodic_mgmt(client(id)); });
}

// ------------------------------------------------------------------- uplink

std::int64_t Cell::lte_ul_target() const {
  const double cap = lte_capacity(cfg_.lte, LinkDirection::Uplink);
  const double per_epoch = cap * static_cast<double>(cfg_.lte.scheduler_epoch_us) / 8.0 / std::max(1, lte_ul_users_);
  const std::int64_t one = cfg_.flow.segment_bytes + cfg_.tunnel.per_packet_overhead_bytes;
  return std::max(one, static_cast<std::int64_t>(2.0 * per_epoch));
}

std::int64_t Cell::lte_dl_target() const {
  const double cap = lte_capacity(cfg_.lte, LinkDirection::Downlink);
  const double per_epoch = cap * static_cast<double>(cfg_.lte.scheduler_epoch_us) / 8.0 / std::max(1, lte_dl_users_);
  return std::max<std::int64_t>(cfg_.flow.segment_bytes, static_cast<std::int64_t>(2.0 * per_epoch));
}

Subflow Cell::choose(const Client& c, bool uplink) const {
  const SubflowPolicy& p = cfg_.subflow;
  const PathStats& w = uplink ? c.ul_path_wifi : c.dl_path_wifi;
  const PathStats& l = uplink ? c.ul_path_lte : c.dl_path_lte;
  const double elapsed = static_cast<double>(std::max<SimTime>(1, sched_.now() - c.associated_at));
  SubflowMetrics m;
  m.wifi = {uplink ? p.wifi_ul_cost : p.wifi_dl_cost, w.delay_ewma_us, 8.0 * static_cast<double>(w.bytes) / elapsed};
  m.lte = {uplink ? p.lte_ul_cost : p.lte_dl_cost, l.delay_ewma_us, 8.0 * static_cast<double>(l.bytes) / elapsed};
  return choose_subflow(m, p, uplink);
}

void Cell::arm_release(Client& c, bool uplink) {
  SegmentSource& src = uplink ? *c.ul_src : *c.dl_src;
  bool& armed = uplink ? c.ul_release_armed : c.dl_release_armed;
  // The tight splitter polls its source every control epoch instead.
  if (cfg_.flow.source != SourceKind::ConstantRate || armed || (!uplink && *c.mode == Mode::Tight)) return;
  armed = true;
  const StationId id = c.id;
  sched_.schedule(std::max(src.next_release(), sched_.now()), id, "source_release", [this, id, uplink] {
    Client& cc = client(id);
    (uplink ? cc.ul_release_armed : cc.dl_release_armed) = false;
    if (uplink) fill_uplink(cc);
    else fill_downlink(cc);
  });
}

void Cell::fill_uplink(Client& c) {
  if (!c.associated || !c.ul_src) return;
  const Mode mode = *c.mode;
  const SimTime now = sched_.now();
  while (true) {
    if (!c.ul_src->available(now)) {
      arm_release(c, true);
      return;
    }
    Iface iface = route(mode, TrafficClass::UlData);
    if (iface == Iface::PerScheduler) iface = choose(c, true) == Subflow::WiFi ? Iface::WiFi : Iface::LteNative;
    if (iface == Iface::WiFi) {
      if (!c.ul_data.empty()) return;
      const Segment s = *c.ul_src->next_segment(now);
      c.ul_data.push_back(make_frame(FrameKind::Data, c.id, kApStation, s.bytes, s.seq, 0));
      mac_.notify_pending(c.id);
    } else {
      if (c.lte_ul_outstanding >= lte_ul_target()) return;
      const Segment s = *c.ul_src->next_segment(now);
      Packet p{FrameKind::Data, c.id, true, s.seq, 0, s.bytes, now, FrameKind::Data};
      const std::uint64_t id = store(p);
      if (iface == Iface::LteTunnel) {
        c.lte_ul_outstanding += s.bytes + cfg_.tunnel.per_packet_overhead_bytes;
        lte_ul_bytes_[class_index(TrafficClass::UlData)] += s.bytes + cfg_.tunnel.per_packet_overhead_bytes;
        tunnel_.send(c.id, s.bytes, id);
      } else {
        c.lte_ul_outstanding += s.bytes;
        lte_ul_bytes_[class_index(TrafficClass::UlData)] += s.bytes;
        lte_ul_.enqueue(c.id, LteUnit{s.bytes, id, 0});
      }
    }
  }
}

void Cell::send_uplink_ctrl(Client& c, FrameKind kind, TrafficClass cls, int bytes, std::uint64_t tag,
                            std::uint64_t seq, FrameKind acked) {
  const Iface iface = route(*c.mode, cls);
  if (iface == Iface::WiFi) {
    if (kind == FrameKind::MacAck) throw std::logic_error("Cell: on-air MAC ACKs are sent by the MAC");
    c.ul_ctrl.push_back(make_frame(kind, c.id, kApStation, bytes, seq, tag));
    mac_.notify_pending(c.id);
    return;
  }
  const Packet p{kind, c.id, true, seq, tag, bytes, sched_.now(), acked};
  const std::uint64_t id = store(p);
  if (iface == Iface::LteTunnel) {
    c.lte_ul_outstanding += bytes + cfg_.tunnel.per_packet_overhead_bytes;
    lte_ul_bytes_[class_index(cls)] += bytes + cfg_.tunnel.per_packet_overhead_bytes;
    tunnel_.send(c.id, bytes, id);
  } else if (iface == Iface::LteNative) {
    c.lte_ul_outstanding += bytes;
    lte_ul_bytes_[class_index(cls)] += bytes;
    lte_ul_.enqueue(c.id, LteUnit{bytes, id, 0});
  } else {
    throw std::logic_error("Cell: control traffic has no scheduler route");
  }
}

void Cell::lte_ul_delivered(StationId station, const LteUnit& unit) {
  Client& c = client(station);
  c.lte_ul_outstanding -= unit.bytes;
  if ((unit.tag & kTunnelTagBit) != 0) {
    tunnel_.on_lte_delivered(station, unit);
  } else {
    const Packet p = take(unit.tag);
    if (p.kind == FrameKind::Data) {
      network_receive_data(c, p.seq, p.bytes, p.created_at, Arrival::LteNative);
    } else if (p.kind == FrameKind::TransportAck) {
      // sender side of the simplified transport keeps no state
    }
  }
  fill_uplink(c);
}

void Cell::tunnel_ingest(StationId station, std::uint64_t tag, SimTime) {
  Client& c = client(station);
  const Packet p = take(tag);
  ap_tunnel_bytes_ += p.bytes;
  // From here on the AP treats the packet as if its radio had decoded it.
  switch (p.kind) {
    case FrameKind::Data:
      network_receive_data(c, p.seq, p.bytes, p.created_at, Arrival::Tunnel);
      break;
    case FrameKind::MacAck:
      if (p.acked == FrameKind::Data) hybrid_ack(c, p.seq, p.tag);
      break;
    case FrameKind::Mgmt:
      if (p.tag == kAssocRequest) on_ap_associated(c);
      break;
    default:
      break;
  }
}

void Cell::network_receive_data(Client& c, std::uint64_t seq, int bytes, SimTime created, Arrival via) {
  if (!c.ul_dup.accept_counting(seq)) return;
  const SimTime delay = sched_.now() - created;
  switch (via) {
    case Arrival::WiFi:
      c.ul_wifi += bytes;
      c.ul_path_wifi.record(bytes, delay);
      break;
    case Arrival::LteNative:
      c.ul_lte += bytes;
      c.ul_path_lte.record(bytes, delay);
      break;
    case Arrival::Tunnel:
      c.ul_tunnel += bytes;
      c.ul_path_lte.record(bytes, delay);
      break;
  }
  // Transport ACKs are modelled for downlink flows only; see TrafficClass.
}

// ----------------------------------------------------------------- downlink

void Cell::fill_downlink(Client& c) {
  if (!c.ap_associated || !c.dl_src || *c.mode == Mode::Tight) return;
  const SimTime now = sched_.now();
  bool queued_wifi = false;
  while (true) {
    if (!c.dl_src->available(now)) {
      arm_release(c, false);
      break;
    }
    Iface iface = route(*c.mode, TrafficClass::DlData);
    if (iface == Iface::PerScheduler) iface = choose(c, false) == Subflow::WiFi ? Iface::WiFi : Iface::LteNative;
    if (iface == Iface::WiFi) {
      if (c.dl_data.size() >= 2) break;
      const Segment s = *c.dl_src->next_segment(now);
      Frame f = make_frame(FrameKind::Data, kApStation, c.id, s.bytes, s.seq, 0);
      f.requires_mac_ack = *c.mode != Mode::Hybrid;
      c.dl_data.push_back(f);
      queued_wifi = true;
    } else {
      if (c.lte_dl_outstanding >= lte_dl_target()) break;
      const Segment s = *c.dl_src->next_segment(now);
      const std::uint64_t id = store(Packet{FrameKind::Data, c.id, false, s.seq, 0, s.bytes, now, FrameKind::Data});
      c.lte_dl_outstanding += s.bytes;
      lte_dl_bytes_ += s.bytes;
      lte_dl_.enqueue(c.id, LteUnit{s.bytes, id, 0});
    }
  }
  if (queued_wifi) mac_.notify_pending(kApStation);
}

void Cell::lte_dl_delivered(StationId station, const LteUnit& unit) {
  Client& c = client(station);
  c.lte_dl_outstanding -= unit.bytes;
  const Packet p = take(unit.tag);
  if (p.kind == FrameKind::Data) {
    c.lte_drained += p.bytes;
    if (c.lte_dl_outstanding == 0) c.lte_starved = true;
    client_receive_data(c, p.seq, p.bytes, p.created_at, false);
    fill_downlink(c);
  }
}

void Cell::client_receive_data(Client& c, std::uint64_t seq, int bytes, SimTime created, bool via_wifi) {
  if (!c.dl_dup.accept_counting(seq)) return;
  const SimTime delay = sched_.now() - created;
  if (via_wifi) {
    c.dl_wifi += bytes;
    c.dl_path_wifi.record(bytes, delay);
  } else {
    c.dl_lte += bytes;
    c.dl_path_lte.record(bytes, delay);
  }
  if (!c.dl_rx || !c.dl_rx->on_segment_delivered()) return;
  ++transport_acks_;
  send_uplink_ctrl(c, FrameKind::TransportAck, TrafficClass::TransportAckForDl, cfg_.ack.ack_bytes, 0,
                   kCtrlSeqBit | ++c.ctrl_seq);
}

void Cell::tight_epoch(StationId id) {
  Client& c = client(id);
  const double epoch = static_cast<double>(cfg_.tight_epoch_us);
  const double wifi_meas = 8.0 * static_cast<double>(c.wifi_drained) / epoch;
  const double lte_meas = 8.0 * static_cast<double>(c.lte_drained) / epoch;
  // A queue that ran dry only bounds its drain rate from below.
  c.est_wifi_mbps = c.wifi_starved ? std::max(c.est_wifi_mbps, wifi_meas) : wifi_meas;
  c.est_lte_mbps = c.lte_starved ? std::max(c.est_lte_mbps, lte_meas) : lte_meas;
  c.wifi_drained = 0;
  c.lte_drained = 0;

  std::int64_t wifi_backlog = 0;
  for (const Frame& f : c.dl_data) wifi_backlog += f.payload_bytes;
  const auto target = static_cast<std::int64_t>(std::ceil(2.0 * epoch * (c.est_wifi_mbps + c.est_lte_mbps) / 8.0));
  BearerSplit split = split_downlink_bearer(target, c.est_wifi_mbps, c.est_lte_mbps);
  const std::int64_t seg = cfg_.flow.segment_bytes;
  if (c.est_wifi_mbps > 0.0) split.to_wifi = std::max(split.to_wifi, seg);
  if (c.est_lte_mbps > 0.0) split.to_lte = std::max(split.to_lte, seg);
  // Probe an interface whose estimate collapsed once its queue has drained.
  if (c.est_wifi_mbps == 0.0 && c.dl_data.empty()) split.to_wifi = 1;
  if (c.est_lte_mbps == 0.0 && c.lte_dl_outstanding == 0 && lte_capacity(cfg_.lte, LinkDirection::Downlink) > 0.0) {
    split.to_lte = 1;
  }

  const SimTime now = sched_.now();
  bool queued_wifi = false;
  while (wifi_backlog < split.to_wifi && c.dl_src->available(now)) {
    const Segment s = *c.dl_src->next_segment(now);
    c.dl_data.push_back(make_frame(FrameKind::Data, kApStation, c.id, s.bytes, s.seq, 0));
    wifi_backlog += s.bytes;
    queued_wifi = true;
  }
  while (c.lte_dl_outstanding < split.to_lte && c.dl_src->available(now)) {
    const Segment s = *c.dl_src->next_segment(now);
    const std::uint64_t pid = store(Packet{FrameKind::Data, c.id, false, s.seq, 0, s.bytes, now, FrameKind::Data});
    c.lte_dl_outstanding += s.bytes;
    lte_dl_bytes_ += s.bytes;
    lte_dl_.enqueue(c.id, LteUnit{s.bytes, pid, 0});
  }
  c.wifi_starved = c.dl_data.empty();
  c.lte_starved = c.lte_dl_outstanding == 0;
  if (queued_wifi) mac_.notify_pending(kApStation);
  sched_.schedule_in(cfg_.tight_epoch_us, id, "tight_epoch", [this, id] { tight_epoch(id); });
}

// ------------------------------------------------------------- hybrid ACKs

void Cell::hybrid_ack(Client& c, std::uint64_t seq, std::uint64_t attempt) {
  auto it = c.hybrid.find(seq);
  if (it == c.hybrid.end()) return;  // copy of an already settled frame
  HybridPending& h = it->second;
  if (attempt != h.attempt || !h.awaiting) ++late_acks_;
  sched_.cancel(h.timer);
  c.hybrid.erase(it);
}

void Cell::hybrid_timeout(StationId id, std::uint64_t seq) {
  Client& c = client(id);
  auto it = c.hybrid.find(seq);
  if (it == c.hybrid.end()) return;
  HybridPending& h = it->second;
  h.timer = EventHandle{};
  h.awaiting = false;
  ++h.retries;
  if (!cfg_.mac.unlimited_retries() && h.retries > cfg_.mac.retry_limit) {
    c.hybrid.erase(it);
    return;
  }
  ++hybrid_retx_;
  ++h.attempt;
  Frame f = make_frame(FrameKind::Data, kApStation, id, cfg_.flow.segment_bytes, seq, h.attempt);
  f.requires_mac_ack = false;
  c.dl_data.push_front(f);
  mac_.notify_pending(kApStation);
}

// ------------------------------------------------------------ MAC listener

std::optional<Frame> Cell::pull_frame(StationId station) {
  if (station == kApStation) {
    const std::size_t n = clients_.size();
    for (std::size_t k = 0; k < n; ++k) {
      Client& c = clients_[(ap_rr_ + k) % n];
      if (!c.dl_ctrl.empty()) {
        Frame f = c.dl_ctrl.front();
        c.dl_ctrl.pop_front();
        ap_rr_ = (ap_rr_ + k + 1) % n;
        return f;
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      Client& c = clients_[(ap_rr_ + k) % n];
      if (!c.dl_data.empty()) {
        Frame f = c.dl_data.front();
        c.dl_data.pop_front();
        ap_rr_ = (ap_rr_ + k + 1) % n;
        if (*c.mode == Mode::Tight) {
          if (c.dl_data.empty()) c.wifi_starved = true;
        } else {
          fill_downlink(c);
        }
        f.created_at = std::min(f.created_at, sched_.now());
        return f;
      }
    }
    return std::nullopt;
  }
  if (!is_client(station)) return std::nullopt;
  Client& c = client(station);
  if (!c.ul_ctrl.empty()) {
    Frame f = c.ul_ctrl.front();
    c.ul_ctrl.pop_front();
    return f;
  }
  if (!c.ul_data.empty()) {
    Frame f = c.ul_data.front();
    c.ul_data.pop_front();
    fill_uplink(c);
    return f;
  }
  return std::nullopt;
}

bool Cell::on_frame_received(StationId receiver, const Frame& f) {
  if (receiver == kApStation) {
    if (!is_client(f.src)) return true;
    Client& c = client(f.src);
    switch (f.kind) {
      case FrameKind::Data:
        network_receive_data(c, f.seq, f.payload_bytes, f.created_at, Arrival::WiFi);
        break;
      case FrameKind::Mgmt:
        if (f.tag == kAssocRequest) on_ap_associated(c);
        break;
      default:
        break;
    }
    return true;
  }
  if (!is_client(receiver)) return false;
  Client& c = client(receiver);
  if (!c.mode) return false;
  switch (f.kind) {
    case FrameKind::Data:
      client_receive_data(c, f.seq, f.payload_bytes, f.created_at, true);
      break;
    case FrameKind::Mgmt:
      if (f.tag == kAssocResponse) on_client_associated(c);
      break;
    default:
      break;
  }
  if (route(*c.mode, TrafficClass::WifiMacAck) == Iface::WiFi) return true;
  // Hybrid: the acknowledgement rides the tunnel instead of the air.
  send_uplink_ctrl(c, FrameKind::MacAck, TrafficClass::WifiMacAck, kMacAckBytes, f.tag, f.seq, f.kind);
  return false;
}

void Cell::on_tx_success(StationId station, const Frame& f) {
  if (station == kApStation && is_client(f.dst)) {
    Client& c = client(f.dst);
    if (f.kind != FrameKind::Data) return;
    c.wifi_drained += f.payload_bytes;
    if (*c.mode == Mode::Hybrid) {
      auto [it, fresh] = c.hybrid.try_emplace(f.seq);
      HybridPending& h = it->second;
      if (fresh) h.attempt = f.tag;
      if (h.attempt != f.tag) return;
      h.awaiting = true;
      const StationId id = c.id;
      const std::uint64_t seq = f.seq;
      h.timer = sched_.schedule_in(cfg_.effective_hybrid_ack_timeout_us(), kApStation, "hybrid_ack_timeout",
                                   [this, id, seq] { hybrid_timeout(id, seq); });
    }
    return;
  }
  if (is_client(station) && f.kind == FrameKind::Mgmt && f.tag == kAssocRequest) {
    client(station).assoc_req_queued = false;
  }
}

void Cell::on_tx_dropped(StationId station, const Frame& f) {
  if (is_client(station) && f.kind == FrameKind::Mgmt && f.tag == kAssocRequest) {
    client(station).assoc_req_queued = false;
  }
}

// ------------------------------------------------------------ periodic jobs

void Cell::dl_only_tick() {
  mac_.reserve_downlink_period(kApStation, cfg_.dl_only_window_us);
  sched_.schedule_in(cfg_.dl_only_period_us, kApStation, "dl_only", [this] { dl_only_tick(); });
}

void Cell::interferer_tick() {
  const SimTime now = sched_.now();
  if (now >= cfg_.interferer.stop_us) return;
  const SimTime burst = std::min(cfg_.interferer.burst_us, cfg_.interferer.stop_us - now);
  mac_.emit_noise(interferer_, burst, cfg_.interferer.tx_power_dbm);
  sched_.schedule_in(burst + cfg_.interferer.gap_us, interferer_, "jam", [this] { interferer_tick(); });
}

// ------------------------------------------------------------------ report

MetricsReport Cell::run() {
  const SimTime end = cfg_.duration_us();
  sched_.run_until(end);
  mac_.finish(end);
  return build_report();
}

MetricsReport Cell::build_report() const {
  MetricsReport r;
  const double dur = static_cast<double>(cfg_.duration_us());
  auto mbps = [dur](std::int64_t bytes) { return 8.0 * static_cast<double>(bytes) / dur; };
  r.mode = to_string(cfg_.mode);
  r.seed = cfg_.seed;
  r.duration_s = cfg_.duration_s;
  r.clients = static_cast<int>(clients_.size());

  auto add_mac = [&r](const MacCounters& m) {
    r.attempts += m.attempts;
    r.successes += m.successes;
    r.collisions += m.collisions;
    r.retransmissions += m.retransmissions;
    r.drops += m.drops;
    r.ack_timeouts += m.ack_timeouts;
  };

  StationReport ap;
  ap.id = kApStation;
  ap.role = "ap";
  ap.mac = mac_.counters(kApStation);
  add_mac(ap.mac);
  r.stations.push_back(ap);

  std::int64_t ul_wifi = 0, ul_lte = 0, ul_tunnel = 0, dl_wifi = 0, dl_lte = 0;
  for (const Client& c : clients_) {
    StationReport s;
    s.id = c.id;
    s.role = "client";
    s.mode = c.mode ? to_string(*c.mode) : "lte_only";
    s.associated = c.associated;
    s.associated_at_us = c.associated_at;
    s.distance_m = c.distance;
    s.ul_wifi_mbps = mbps(c.ul_wifi);
    s.ul_lte_mbps = mbps(c.ul_lte);
    s.ul_tunnel_mbps = mbps(c.ul_tunnel);
    s.dl_wifi_mbps = mbps(c.dl_wifi);
    s.dl_lte_mbps = mbps(c.dl_lte);
    s.mac = mac_.counters(c.id);
    add_mac(s.mac);
    if (c.associated) ++r.associated;
    if (!c.mode) ++r.lte_only;
    ul_wifi += c.ul_wifi;
    ul_lte += c.ul_lte;
    ul_tunnel += c.ul_tunnel;
    dl_wifi += c.dl_wifi;
    dl_lte += c.dl_lte;
    r.duplicates += c.ul_dup.duplicates() + c.dl_dup.duplicates();
    r.stations.push_back(s);
  }
  if (interferer_ != kNoStation) {
    StationReport s;
    s.id = interferer_;
    s.role = "interferer";
    s.distance_m = distance_m(cfg_.interferer.pos, cfg_.ap);
    r.stations.push_back(s);
  }

  r.ul_wifi_mbps = mbps(ul_wifi);
  r.ul_lte_mbps = mbps(ul_lte);
  r.ul_tunnel_mbps = mbps(ul_tunnel);
  r.dl_wifi_mbps = mbps(dl_wifi);
  r.dl_lte_mbps = mbps(dl_lte);
  r.ul_total_mbps = mbps(ul_wifi + ul_lte + ul_tunnel);
  r.dl_total_mbps = mbps(dl_wifi + dl_lte);
  r.total_mbps = mbps(ul_wifi + ul_lte + ul_tunnel + dl_wifi + dl_lte);

  r.hybrid_retransmissions = hybrid_retx_;
  r.late_acks = late_acks_;
  r.transport_acks = transport_acks_;

  const AirtimeLedger& led = mac_.ledger();
  r.airtime_us = led.ota_us;
  r.frames = led.ota_count;
  r.exclusive_us = led.exclusive_us;
  r.overlap_us = led.overlap_us;
  r.idle_us = led.idle_us;
  r.wifi_ul_airtime_us = led.uplink_ota_us();
  for (std::size_t i = 0; i < kAirClassCount; ++i) {
    const auto cls = static_cast<AirClass>(i);
    if (!is_uplink(cls) && cls != AirClass::Interference) r.wifi_dl_airtime_us += led.ota_us[i];
  }

  r.lte_ul_bytes = lte_ul_bytes_;
  r.lte_dl_bytes = lte_dl_bytes_;
  const double ul_cap = lte_capacity(cfg_.lte, LinkDirection::Uplink);
  const double dl_cap = lte_capacity(cfg_.lte, LinkDirection::Downlink);
  r.lte_ul_utilization = ul_cap > 0.0 ? 8.0 * static_cast<double>(lte_ul_.delivered_bytes()) / (ul_cap * dur) : 0.0;
  r.lte_dl_utilization = dl_cap > 0.0 ? 8.0 * static_cast<double>(lte_dl_.delivered_bytes()) / (dl_cap * dur) : 0.0;
  r.lte_ul_backlog_bytes = lte_ul_.total_backlog_bytes();

  r.tunnel_sent_bytes = tunnel_.sent_bytes();
  r.tunnel_ingested_bytes = tunnel_.ingested_bytes();
  r.tunnel_in_flight_bytes = tunnel_.in_flight_bytes();
  r.ap_tunnel_delivered_bytes = ap_tunnel_bytes_;
  r.tunnel_mean_latency_us = tunnel_.mean_latency_us();
  r.tunnel_mean_queueing_us = tunnel_.mean_queueing_us();
  r.config_yaml = to_yaml(cfg_);
  return r;
}

}  // namespace

MetricsReport run_scenario(const ScenarioConfig& config, const TraceSink& trace) {
  const std::vector<std::string> errors = validate(config);
  if (!errors.empty()) throw std::invalid_argument("run_scenario: invalid configuration: " + errors.front());
  Cell cell(config, trace);
  return cell.run();
}

}  // namespace hetcell
