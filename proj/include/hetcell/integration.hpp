#pragma once

// Per-mode routing of uplink/downlink traffic classes, the tight-mode bearer
// splitter and the dual-SSID connection manager.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

namespace hetcell {

enum class Mode { Standard, Loose, Tight, Hybrid };
inline constexpr std::array<Mode, 4> kAllModes{Mode::Standard, Mode::Loose, Mode::Tight, Mode::Hybrid};
const char* to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

enum class TrafficClass { UlData, DlData, TransportAckForDl, WifiMacAck, WifiMgmt };
inline constexpr std::array<TrafficClass, 5> kAllTrafficClasses{
    TrafficClass::UlData, TrafficClass::DlData, TrafficClass::TransportAckForDl, TrafficClass::WifiMacAck,
    TrafficClass::WifiMgmt};
const char* to_string(TrafficClass c);

enum class Iface { WiFi, LteTunnel, LteNative, PerScheduler };
const char* to_string(Iface i);

/// Fixed policy table. "PerScheduler" means the loose-mode subflow chooser or
/// the tight-mode bearer splitter decides per segment.
Iface route(Mode mode, TrafficClass cls);

struct BearerSplit {
  std::int64_t to_wifi = 0;
  std::int64_t to_lte = 0;
};

/// Proportional split of `backlog_bytes` by drain rate. Both drains zero:
/// nothing moves.
BearerSplit split_downlink_bearer(std::int64_t backlog_bytes, double wifi_drain_mbps, double lte_drain_mbps);

enum class SsidKind { StandardAccess, IntegratedAccess };

struct SsidAdvert {
  SsidKind kind = SsidKind::StandardAccess;
  double tx_power_dbm = 16.0;
};

/// Connection manager decision at association time. `offered` is the cell's
/// integrated mode. nullopt means the client has no usable SSID and runs
/// LTE-only.
std::optional<Mode> select_mode(std::span<const SsidAdvert> decodable, bool integration_capable, Mode offered,
                                bool prefer_integrated);

}  // namespace hetcell
