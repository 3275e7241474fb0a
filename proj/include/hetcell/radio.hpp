#pragma once

// Propagation, SINR, capture, frame airtime and link-budget coverage math.
// Everything here is a pure function over value inputs.

#include <optional>
#include <span>

#include "hetcell/kernel.hpp"

namespace hetcell {

struct Position {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Position&) const = default;
};

double distance_m(const Position& a, const Position& b);

/// Log-distance path loss with an optional wall term.
struct PathLossModel {
  double exponent = 4.0;
  double reference_loss_db = 40.0;
  double reference_distance_m = 1.0;
  double wall_penetration_db = 0.0;
  bool operator==(const PathLossModel&) const = default;
};

struct LinkBudget {
  double tx_power_dbm = 16.0;  // EIRP
  double sensitivity_dbm = -76.0;
  double noise_floor_dbm = -95.0;
  double capture_threshold_db = 10.0;
  bool operator==(const LinkBudget&) const = default;
};

struct PhyParams {
  double data_rate_mbps = 54.0;
  double control_rate_mbps = 24.0;
  int preamble_us = 20;
  int symbol_us = 4;
  static constexpr int kServiceBits = 16;
  static constexpr int kTailBits = 6;

  /// OFDM data bits carried per symbol at `rate_mbps`.
  int bits_per_symbol(double rate_mbps) const;
  bool operator==(const PhyParams&) const = default;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Distances below the reference distance are clamped to it.
double path_loss_db(const PathLossModel& model, double distance_m, bool crosses_wall = false);

double sinr_db(double target_rx_dbm, std::span<const double> interferer_rx_dbm, double noise_floor_dbm);

/// Overlap group decision: index of the single decodable frame, or nullopt when
/// every frame in the group is lost. The strongest frame is decoded iff its
/// SINR against all the others is at least the capture threshold and its
/// received power reaches sensitivity.
std::optional<std::size_t> capture_decision(std::span<const double> rx_dbm, const LinkBudget& budget);

SimTime frame_airtime_us(int payload_bytes, double rate_mbps, const PhyParams& phy);

/// Largest distance at which tx_power - path_loss >= sensitivity. Returns 0
/// when the link fails even at the reference distance.
double max_range_m(const LinkBudget& budget, const PathLossModel& model, bool crosses_wall = false);

double range_ratio(double p_high_mw, double p_low_mw, double exponent);
inline double area_ratio(double p_high_mw, double p_low_mw, double exponent) {
  const double r = range_ratio(p_high_mw, p_low_mw, exponent);
  return r * r;
}

}  // namespace hetcell
