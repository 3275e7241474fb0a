#include "hetcell/integration.hpp"

#include <cmath>
#include <stdexcept>

namespace hetcell {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Standard: return "standard";
    case Mode::Loose: return "loose";
    case Mode::Tight: return "tight";
    case Mode::Hybrid: return "hybrid";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view s) {
  for (Mode m : kAllModes) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

const char* to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::UlData: return "ul_data";
    case TrafficClass::DlData: return "dl_data";
    case TrafficClass::TransportAckForDl: return "transport_ack_for_dl";
    case TrafficClass::WifiMacAck: return "wifi_mac_ack";
    case TrafficClass::WifiMgmt: return "wifi_mgmt";
  }
  return "?";
}

const char* to_string(Iface i) {
  switch (i) {
    case Iface::WiFi: return "wifi";
    case Iface::LteTunnel: return "lte_tunnel";
    case Iface::LteNative: return "lte_native";
    case Iface::PerScheduler: return "per_scheduler";
  }
  return "?";
}

Iface route(Mode mode, TrafficClass cls) {
  switch (mode) {
    case Mode::Standard:
      return Iface::WiFi;
    case Mode::Loose:
      switch (cls) {
        case TrafficClass::UlData:
        case TrafficClass::DlData: return Iface::PerScheduler;
        case TrafficClass::TransportAckForDl:
        case TrafficClass::WifiMacAck:
        case TrafficClass::WifiMgmt: return Iface::WiFi;
      }
      break;
    case Mode::Tight:
      switch (cls) {
        case TrafficClass::UlData:
        case TrafficClass::TransportAckForDl: return Iface::LteNative;
        case TrafficClass::WifiMacAck:
        case TrafficClass::WifiMgmt: return Iface::WiFi;
        case TrafficClass::DlData: return Iface::PerScheduler;
      }
      break;
    case Mode::Hybrid:
      return cls == TrafficClass::DlData ? Iface::WiFi : Iface::LteTunnel;
  }
  throw std::logic_error("route: invalid mode/class");
}

BearerSplit split_downlink_bearer(std::int64_t backlog_bytes, double wifi_drain_mbps, double lte_drain_mbps) {
  if (backlog_bytes < 0 || wifi_drain_mbps < 0.0 || lte_drain_mbps < 0.0) {
    throw std::invalid_argument("split_downlink_bearer: negative input");
  }
  const double total = wifi_drain_mbps + lte_drain_mbps;
  if (total <= 0.0) return {};
  const auto to_wifi = static_cast<std::int64_t>(std::llround(static_cast<double>(backlog_bytes) * wifi_drain_mbps / total));
  return {to_wifi, backlog_bytes - to_wifi};
}

std::optional<Mode> select_mode(std::span<const SsidAdvert> decodable, bool integration_capable, Mode offered,
                                bool prefer_integrated) {
  bool standard = false;
  bool integrated = false;
  for (const SsidAdvert& ad : decodable) {
    if (ad.kind == SsidKind::StandardAccess) standard = true;
    // Legacy devices do not recognise the integrated SSID.
    if (ad.kind == SsidKind::IntegratedAccess && integration_capable) integrated = true;
  }
  if (integrated && !standard) return Mode::Hybrid;  // beyond the standard SSID's reach only hybrid works
  if (integrated && standard) return prefer_integrated ? offered : Mode::Standard;
  if (standard) return Mode::Standard;
  return std::nullopt;
}

}  // namespace hetcell
