#include "hetcell/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hetcell {

double distance_m(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

int PhyParams::bits_per_symbol(double rate_mbps) const {
  return static_cast<int>(std::lround(rate_mbps * symbol_us));
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double path_loss_db(const PathLossModel& model, double distance, bool crosses_wall) {
  const double d = std::max(distance, model.reference_distance_m);
  double loss = model.reference_loss_db + 10.0 * model.exponent * std::log10(d / model.reference_distance_m);
  if (crosses_wall) loss += model.wall_penetration_db;
  return loss;
}

double sinr_db(double target_rx_dbm, std::span<const double> interferer_rx_dbm, double noise_floor_dbm) {
  double denom_mw = dbm_to_mw(noise_floor_dbm);
  for (double p : interferer_rx_dbm) denom_mw += dbm_to_mw(p);
  return target_rx_dbm - mw_to_dbm(denom_mw);
}

std::optional<std::size_t> capture_decision(std::span<const double> rx_dbm, const LinkBudget& budget) {
  if (rx_dbm.empty()) return std::nullopt;
  const auto strongest = static_cast<std::size_t>(
      std::distance(rx_dbm.begin(), std::max_element(rx_dbm.begin(), rx_dbm.end())));
  if (rx_dbm[strongest] < budget.sensitivity_dbm) return std::nullopt;
  double denom_mw = dbm_to_mw(budget.noise_floor_dbm);
  for (std::size_t i = 0; i < rx_dbm.size(); ++i) {
    if (i != strongest) denom_mw += dbm_to_mw(rx_dbm[i]);
  }
  if (rx_dbm[strongest] - mw_to_dbm(denom_mw) < budget.capture_threshold_db) return std::nullopt;
  return strongest;
}

SimTime frame_airtime_us(int payload_bytes, double rate_mbps, const PhyParams& phy) {
  if (payload_bytes < 0) throw std::invalid_argument("frame_airtime_us: negative payload");
  const std::int64_t bits = PhyParams::kServiceBits + 8LL * payload_bytes + PhyParams::kTailBits;
  const std::int64_t per_symbol = phy.bits_per_symbol(rate_mbps);
  const std::int64_t symbols = (bits + per_symbol - 1) / per_symbol;
  return phy.preamble_us + symbols * phy.symbol_us;
}

double max_range_m(const LinkBudget& budget, const PathLossModel& model, bool crosses_wall) {
  double margin_db = budget.tx_power_dbm - budget.sensitivity_dbm - model.reference_loss_db;
  if (crosses_wall) margin_db -= model.wall_penetration_db;
  if (margin_db < 0.0) return 0.0;
  return model.reference_distance_m * std::pow(10.0, margin_db / (10.0 * model.exponent));
}

double range_ratio(double p_high_mw, double p_low_mw, double exponent) {
  if (p_high_mw <= 0.0 || p_low_mw <= 0.0) throw std::invalid_argument("range_ratio: powers must be positive");
  return std::pow(p_high_mw / p_low_mw, 1.0 / exponent);
}

}  // namespace hetcell
