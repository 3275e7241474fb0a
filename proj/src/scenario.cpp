#include "hetcell/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace hetcell {

SimTime ScenarioConfig::duration_us() const { return static_cast<SimTime>(std::llround(duration_s * 1e6)); }

SimTime ScenarioConfig::effective_hybrid_ack_timeout_us() const {
  if (hybrid_ack_timeout_us > 0) return hybrid_ack_timeout_us;
  return 2 * tunnel.one_way_latency_us() + 4000;
}

std::vector<ClientSpec> ScenarioConfig::resolved_clients() const {
  if (!client_list.empty()) return client_list;
  std::vector<ClientSpec> out;
  out.reserve(static_cast<std::size_t>(std::max(clients, 0)));
  for (int i = 0; i < clients; ++i) {
    const double a = 2.0 * std::numbers::pi * i / clients;
    out.push_back({{ap.x + client_radius_m * std::cos(a), ap.y + client_radius_m * std::sin(a)}, true});
  }
  return out;
}

namespace {

struct Field {
  const char* key;
  std::function<std::optional<std::string>(const YAML::Node&, ScenarioConfig&)> read;
  std::function<void(YAML::Emitter&, const ScenarioConfig&)> write;
};

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "boolean";
  else if constexpr (std::is_integral_v<T>) return "integer";
  else return "number";
}

template <class T, class Ref>
Field scalar(const char* key, Ref ref) {
  return Field{
      key,
      [ref](const YAML::Node& n, ScenarioConfig& c) -> std::optional<std::string> {
        T v{};
        if (!n.IsScalar() || !YAML::convert<T>::decode(n, v)) return std::string("expected ") + type_name<T>();
        ref(c) = v;
        return std::nullopt;
      },
      [ref](YAML::Emitter& out, const ScenarioConfig& c) { out << ref(const_cast<ScenarioConfig&>(c)); }};
}

template <class E>
struct EnumNames {
  std::vector<std::pair<E, const char*>> names;

  std::optional<E> parse(const std::string& s) const {
    for (const auto& [e, n] : names) {
      if (s == n) return e;
    }
    return std::nullopt;
  }
  const char* name(E e) const {
    for (const auto& [x, n] : names) {
      if (x == e) return n;
    }
    return "?";
  }
  std::string choices() const {
    std::string s;
    for (const auto& [e, n] : names) s += (s.empty() ? "" : "|") + std::string(n);
    return s;
  }
};

template <class E, class Ref>
Field enumerated(const char* key, EnumNames<E> names, Ref ref) {
  return Field{
      key,
      [names, ref](const YAML::Node& n, ScenarioConfig& c) -> std::optional<std::string> {
        if (!n.IsScalar()) return "expected one of " + names.choices();
        auto v = names.parse(n.Scalar());
        if (!v) return "expected one of " + names.choices();
        ref(c) = *v;
        return std::nullopt;
      },
      [names, ref](YAML::Emitter& out, const ScenarioConfig& c) { out << names.name(ref(const_cast<ScenarioConfig&>(c))); }};
}

#define REF(expr) [](ScenarioConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    const EnumNames<Mode> modes{{{Mode::Standard, "standard"}, {Mode::Loose, "loose"}, {Mode::Tight, "tight"}, {Mode::Hybrid, "hybrid"}}};
    const EnumNames<Duplex> duplex{{{Duplex::FDD, "fdd"}, {Duplex::TDD, "tdd"}}};
    const EnumNames<TunnelPath> paths{{{TunnelPath::ViaCore, "via_core"}, {TunnelPath::DirectEnbAp, "direct"}}};
    const EnumNames<FlowDirection> dirs{{{FlowDirection::Uplink, "uplink"}, {FlowDirection::Downlink, "downlink"}, {FlowDirection::Bidirectional, "bidirectional"}}};
    const EnumNames<SourceKind> sources{{{SourceKind::Saturated, "saturated"}, {SourceKind::ConstantRate, "constant_rate"}}};
    const EnumNames<TransportKind> transports{{{TransportKind::None, "none"}, {TransportKind::Reliable, "reliable"}}};

    std::vector<Field> t;
    t.push_back(scalar<int>("clients", REF(clients)));
    t.push_back(scalar<double>("client_radius_m", REF(client_radius_m)));
    t.push_back(Field{
        "client_list",
        [](const YAML::Node& n, ScenarioConfig& c) -> std::optional<std::string> {
          if (!n.IsSequence()) return "expected a list of {x, y, capable}";
          std::vector<ClientSpec> list;
          for (std::size_t i = 0; i < n.size(); ++i) {
            const YAML::Node& e = n[i];
            const std::string where = "[" + std::to_string(i) + "]";
            if (!e.IsMap()) return where + ": expected a map";
            ClientSpec spec;
            for (const auto& kv : e) {
              const std::string k = kv.first.as<std::string>();
              bool ok = kv.second.IsScalar();
              if (k == "x") ok = ok && YAML::convert<double>::decode(kv.second, spec.pos.x);
              else if (k == "y") ok = ok && YAML::convert<double>::decode(kv.second, spec.pos.y);
              else if (k == "capable") ok = ok && YAML::convert<bool>::decode(kv.second, spec.capable);
              else return where + "." + k + ": unknown key";
              if (!ok) return where + "." + k + ": bad value";
            }
            list.push_back(spec);
          }
          c.client_list = std::move(list);
          return std::nullopt;
        },
        [](YAML::Emitter& out, const ScenarioConfig& c) {
          out << YAML::Flow << YAML::BeginSeq;
          for (const ClientSpec& s : c.client_list) {
            out << YAML::BeginMap << YAML::Key << "x" << YAML::Value << s.pos.x << YAML::Key << "y" << YAML::Value
                << s.pos.y << YAML::Key << "capable" << YAML::Value << s.capable << YAML::EndMap;
          }
          out << YAML::EndSeq;
        }});
    t.push_back(scalar<double>("ap_x", REF(ap.x)));
    t.push_back(scalar<double>("ap_y", REF(ap.y)));
    t.push_back(scalar<double>("ap_standard_ssid_dbm", REF(ap_standard_ssid_dbm)));
    t.push_back(scalar<double>("ap_integrated_ssid_dbm", REF(ap_integrated_ssid_dbm)));
    t.push_back(scalar<double>("client_tx_dbm", REF(client_tx_dbm)));
    t.push_back(scalar<double>("indoor_radius_m", REF(indoor_radius_m)));
    t.push_back(enumerated("mode", modes, REF(mode)));
    t.push_back(scalar<bool>("prefer_integrated", REF(prefer_integrated)));

    t.push_back(scalar<int>("slot_us", REF(mac.slot_us)));
    t.push_back(scalar<int>("sifs_us", REF(mac.sifs_us)));
    t.push_back(scalar<int>("difs_us", REF(mac.difs_us)));
    t.push_back(scalar<int>("cw_min", REF(mac.cw_min)));
    t.push_back(scalar<int>("cw_max", REF(mac.cw_max)));
    t.push_back(Field{
        "retry_limit",
        [](const YAML::Node& n, ScenarioConfig& c) -> std::optional<std::string> {
          if (n.IsScalar() && n.Scalar() == "unlimited") {
            c.mac.retry_limit = kUnlimitedRetries;
            return std::nullopt;
          }
          int v = 0;
          if (!n.IsScalar() || !YAML::convert<int>::decode(n, v)) return "expected integer or \"unlimited\"";
          if (v < 0) return "must be >= 0 (use \"unlimited\" to disable dropping)";
          c.mac.retry_limit = v;
          return std::nullopt;
        },
        [](YAML::Emitter& out, const ScenarioConfig& c) {
          if (c.mac.unlimited_retries()) out << "unlimited"; else out << c.mac.retry_limit;
        }});
    t.push_back(scalar<int>("ack_timeout_us", REF(mac.ack_timeout_us)));
    t.push_back(scalar<double>("cs_threshold_dbm", REF(mac.cs_threshold_dbm)));

    t.push_back(scalar<double>("data_rate_mbps", REF(phy.data_rate_mbps)));
    t.push_back(scalar<double>("control_rate_mbps", REF(phy.control_rate_mbps)));
    t.push_back(scalar<int>("preamble_us", REF(phy.preamble_us)));
    t.push_back(scalar<int>("symbol_us", REF(phy.symbol_us)));

    t.push_back(scalar<double>("path_loss_exponent", REF(path_loss.exponent)));
    t.push_back(scalar<double>("reference_loss_db", REF(path_loss.reference_loss_db)));
    t.push_back(scalar<double>("reference_distance_m", REF(path_loss.reference_distance_m)));
    t.push_back(scalar<double>("wall_penetration_db", REF(path_loss.wall_penetration_db)));
    t.push_back(scalar<double>("noise_floor_dbm", REF(budget.noise_floor_dbm)));
    t.push_back(scalar<double>("sensitivity_dbm", REF(budget.sensitivity_dbm)));
    t.push_back(scalar<double>("capture_threshold_db", REF(budget.capture_threshold_db)));

    t.push_back(enumerated("lte_duplex", duplex, REF(lte.duplex)));
    t.push_back(scalar<double>("lte_dl_mbps", REF(lte.dl_capacity_mbps)));
    t.push_back(scalar<double>("lte_ul_mbps", REF(lte.ul_capacity_mbps)));
    t.push_back(scalar<double>("lte_total_mbps", REF(lte.total_capacity_mbps)));
    t.push_back(scalar<double>("lte_ul_fraction", REF(lte.ul_fraction)));
    t.push_back(scalar<SimTime>("lte_epoch_us", REF(lte.scheduler_epoch_us)));

    t.push_back(enumerated("tunnel_path", paths, REF(tunnel.path)));
    t.push_back(scalar<SimTime>("tunnel_via_core_latency_us", REF(tunnel.via_core_latency_us)));
    t.push_back(scalar<SimTime>("tunnel_direct_latency_us", REF(tunnel.direct_latency_us)));
    t.push_back(scalar<int>("tunnel_overhead_bytes", REF(tunnel.per_packet_overhead_bytes)));
    t.push_back(scalar<SimTime>("hybrid_ack_timeout_us", REF(hybrid_ack_timeout_us)));

    t.push_back(enumerated("direction", dirs, REF(flow.direction)));
    t.push_back(enumerated("source", sources, REF(flow.source)));
    t.push_back(scalar<double>("rate_mbps", REF(flow.rate_mbps)));
    t.push_back(scalar<int>("segment_bytes", REF(flow.segment_bytes)));
    t.push_back(enumerated("transport", transports, REF(flow.transport)));
    t.push_back(scalar<int>("segments_per_ack", REF(ack.segments_per_ack)));
    t.push_back(scalar<int>("ack_bytes", REF(ack.ack_bytes)));

    t.push_back(scalar<double>("wifi_ul_cost", REF(subflow.wifi_ul_cost)));
    t.push_back(scalar<double>("lte_ul_cost", REF(subflow.lte_ul_cost)));
    t.push_back(scalar<double>("wifi_dl_cost", REF(subflow.wifi_dl_cost)));
    t.push_back(scalar<double>("lte_dl_cost", REF(subflow.lte_dl_cost)));
    t.push_back(scalar<double>("rtt_weight", REF(subflow.rtt_weight)));
    t.push_back(scalar<double>("bw_weight", REF(subflow.bw_weight)));
    t.push_back(scalar<double>("rtt_ref_us", REF(subflow.rtt_ref_us)));
    t.push_back(scalar<double>("bw_ref_mbps", REF(subflow.bw_ref_mbps)));
    t.push_back(scalar<SimTime>("tight_epoch_us", REF(tight_epoch_us)));

    t.push_back(scalar<int>("mgmt_bytes", REF(mgmt_bytes)));
    t.push_back(scalar<SimTime>("mgmt_interval_us", REF(mgmt_interval_us)));
    t.push_back(scalar<SimTime>("assoc_retry_us", REF(assoc_retry_us)));
    t.push_back(scalar<SimTime>("dl_only_period_us", REF(dl_only_period_us)));
    t.push_back(scalar<SimTime>("dl_only_window_us", REF(dl_only_window_us)));

    t.push_back(scalar<SimTime>("interferer_start_us", REF(interferer.start_us)));
    t.push_back(scalar<SimTime>("interferer_stop_us", REF(interferer.stop_us)));
    t.push_back(scalar<double>("interferer_x", REF(interferer.pos.x)));
    t.push_back(scalar<double>("interferer_y", REF(interferer.pos.y)));
    t.push_back(scalar<double>("interferer_dbm", REF(interferer.tx_power_dbm)));
    t.push_back(scalar<SimTime>("interferer_burst_us", REF(interferer.burst_us)));
    t.push_back(scalar<SimTime>("interferer_gap_us", REF(interferer.gap_us)));

    t.push_back(scalar<double>("duration_s", REF(duration_s)));
    t.push_back(scalar<std::uint64_t>("seed", REF(seed)));
    return t;
  }();
  return table;
}

#undef REF

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> e;
  auto need = [&e](bool ok, const char* field, const std::string& msg) {
    if (!ok) e.push_back(std::string(field) + ": " + msg);
  };
  const bool finite_ok = std::isfinite(c.ap.x) && std::isfinite(c.ap.y);
  need(finite_ok, "ap_x", "must be finite");
  if (c.client_list.empty()) {
    need(c.clients >= 1, "clients", "must be >= 1");
    need(c.client_radius_m >= 0.0 && std::isfinite(c.client_radius_m), "client_radius_m", "must be finite and >= 0");
  }
  for (std::size_t i = 0; i < c.client_list.size(); ++i) {
    const Position& p = c.client_list[i].pos;
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      e.push_back("client_list[" + std::to_string(i) + "]: position must be finite");
    }
  }
  need(c.ap_integrated_ssid_dbm >= c.ap_standard_ssid_dbm, "ap_integrated_ssid_dbm",
       "must be >= ap_standard_ssid_dbm");
  need(c.indoor_radius_m >= 0.0, "indoor_radius_m", "must be >= 0");

  need(c.mac.slot_us > 0, "slot_us", "must be positive");
  need(c.mac.sifs_us > 0, "sifs_us", "must be positive");
  need(c.mac.difs_us == c.mac.sifs_us + 2 * c.mac.slot_us, "difs_us", "must equal sifs_us + 2 * slot_us");
  need(is_pow2_minus_one(c.mac.cw_min) && c.mac.cw_min >= 1, "cw_min", "must be 2^k - 1");
  need(is_pow2_minus_one(c.mac.cw_max) && c.mac.cw_max >= 1, "cw_max", "must be 2^k - 1");
  need(c.mac.cw_min <= c.mac.cw_max, "cw_max", "must be >= cw_min");
  need(c.mac.ack_timeout_us >= 0, "ack_timeout_us", "must be >= 0 (0 selects the default)");

  need(c.phy.data_rate_mbps > 0.0, "data_rate_mbps", "must be positive");
  need(c.phy.control_rate_mbps > 0.0, "control_rate_mbps", "must be positive");
  need(c.phy.preamble_us > 0, "preamble_us", "must be positive");
  need(c.phy.symbol_us > 0, "symbol_us", "must be positive");
  if (c.phy.data_rate_mbps > 0.0 && c.phy.symbol_us > 0) {
    need(c.phy.bits_per_symbol(c.phy.data_rate_mbps) > 0, "data_rate_mbps", "too low for one bit per symbol");
  }
  if (c.phy.control_rate_mbps > 0.0 && c.phy.symbol_us > 0) {
    need(c.phy.bits_per_symbol(c.phy.control_rate_mbps) > 0, "control_rate_mbps", "too low for one bit per symbol");
  }

  need(c.path_loss.exponent > 0.0, "path_loss_exponent", "must be positive");
  need(c.path_loss.reference_loss_db >= 0.0, "reference_loss_db", "must be >= 0");
  need(c.path_loss.reference_distance_m > 0.0, "reference_distance_m", "must be positive");
  need(c.path_loss.wall_penetration_db >= 0.0, "wall_penetration_db", "must be >= 0");
  need(c.budget.sensitivity_dbm > c.budget.noise_floor_dbm, "sensitivity_dbm", "must exceed noise_floor_dbm");

  need(c.lte.dl_capacity_mbps >= 0.0, "lte_dl_mbps", "must be >= 0");
  need(c.lte.ul_capacity_mbps >= 0.0, "lte_ul_mbps", "must be >= 0");
  need(c.lte.total_capacity_mbps >= 0.0, "lte_total_mbps", "must be >= 0");
  need(c.lte.ul_fraction >= 0.0 && c.lte.ul_fraction <= 1.0, "lte_ul_fraction", "must be in [0, 1]");
  need(c.lte.scheduler_epoch_us > 0, "lte_epoch_us", "must be positive");
  need(c.tunnel.via_core_latency_us >= 0, "tunnel_via_core_latency_us", "must be >= 0");
  need(c.tunnel.direct_latency_us >= 0, "tunnel_direct_latency_us", "must be >= 0");
  need(c.tunnel.per_packet_overhead_bytes >= 0, "tunnel_overhead_bytes", "must be >= 0");
  need(c.hybrid_ack_timeout_us >= 0, "hybrid_ack_timeout_us", "must be >= 0 (0 selects the default)");

  need(c.flow.segment_bytes > 0, "segment_bytes", "must be positive");
  if (c.flow.source == SourceKind::ConstantRate) need(c.flow.rate_mbps > 0.0, "rate_mbps", "must be positive for constant_rate");
  need(c.ack.segments_per_ack >= 1, "segments_per_ack", "must be >= 1");
  need(c.ack.ack_bytes > 0, "ack_bytes", "must be positive");
  need(c.subflow.wifi_ul_cost >= 0.0, "wifi_ul_cost", "must be >= 0");
  need(c.subflow.lte_ul_cost >= 0.0, "lte_ul_cost", "must be >= 0");
  need(c.subflow.wifi_dl_cost >= 0.0, "wifi_dl_cost", "must be >= 0");
  need(c.subflow.lte_dl_cost >= 0.0, "lte_dl_cost", "must be >= 0");
  need(c.subflow.rtt_ref_us > 0.0, "rtt_ref_us", "must be positive");
  need(c.subflow.bw_ref_mbps > 0.0, "bw_ref_mbps", "must be positive");
  need(c.tight_epoch_us > 0, "tight_epoch_us", "must be positive");

  need(c.mgmt_bytes > 0, "mgmt_bytes", "must be positive");
  need(c.mgmt_interval_us >= 0, "mgmt_interval_us", "must be >= 0 (0 disables)");
  need(c.assoc_retry_us > 0, "assoc_retry_us", "must be positive");

  need(c.dl_only_period_us >= 0, "dl_only_period_us", "must be >= 0 (0 disables)");
  if (c.dl_only_period_us > 0) {
    need(c.dl_only_window_us > 0, "dl_only_window_us", "must be positive when dl_only_period_us is set");
    need(c.dl_only_window_us < c.dl_only_period_us, "dl_only_window_us", "must be shorter than dl_only_period_us");
  }
  need(c.dl_only_window_us <= kMaxCtsReservationUs, "dl_only_window_us",
       "CTS-to-Self reservation is limited to 32000 us (32 ms)");
  need(c.dl_only_window_us >= 0, "dl_only_window_us", "must be >= 0");

  if (c.interferer.enabled()) {
    need(c.interferer.stop_us > c.interferer.start_us, "interferer_stop_us", "must be after interferer_start_us");
    need(c.interferer.burst_us > 0, "interferer_burst_us", "must be positive");
    need(c.interferer.gap_us >= 0, "interferer_gap_us", "must be >= 0");
  }

  need(c.duration_s > 0.0 && std::isfinite(c.duration_s), "duration_s", "must be positive");
  return e;
}

ParseResult parse_scenario(const std::string& text) {
  ParseResult result;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    result.errors.push_back(std::string("<document>: ") + ex.what());
    return result;
  }
  ScenarioConfig config;
  if (root.IsNull()) {
    // empty document: all defaults
  } else if (!root.IsMap()) {
    result.errors.push_back("<document>: expected a mapping of key: value pairs");
    return result;
  } else {
    std::set<std::string> seen;
    for (const auto& kv : root) {
      const std::string key = kv.first.as<std::string>();
      if (!seen.insert(key).second) {
        result.errors.push_back(key + ": duplicate key");
        continue;
      }
      const Field* f = nullptr;
      for (const Field& cand : fields()) {
        if (key == cand.key) f = &cand;
      }
      if (f == nullptr) {
        result.errors.push_back(key + ": unknown key");
        continue;
      }
      if (auto err = f->read(kv.second, config)) result.errors.push_back(key + ": " + *err);
    }
  }
  // Fields that failed to read keep their defaults; only report constraint
  // problems for the others so one mistake is not reported twice.
  for (std::string& e : validate(config)) {
    const std::string field = e.substr(0, e.find(':'));
    const bool already = std::any_of(result.errors.begin(), result.errors.end(),
                                     [&](const std::string& x) { return x.rfind(field + ":", 0) == 0; });
    if (!already) result.errors.push_back(std::move(e));
  }
  if (result.errors.empty()) result.config = std::move(config);
  return result;
}

ParseResult load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return ParseResult{std::nullopt, {path + ": cannot open file"}};
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string to_yaml(const ScenarioConfig& config) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  for (const Field& f : fields()) {
    out << YAML::Key << f.key << YAML::Value;
    f.write(out, config);
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace hetcell
