#pragma once

// Analytic saturation-throughput model of DCF basic access (two-dimensional
// Markov chain fixed point). Used to validate the MAC simulator independently
// of the simulator itself.

#include "hetcell/radio.hpp"

namespace hetcell {

struct MacParams;

struct BianchiParams {
  int n = 1;                 // saturated stations
  int w = 16;                // initial window, cw_min + 1
  int m = 6;                 // backoff stages
  double payload_bits = 12000.0;
  double slot_us = 9.0;
  double sifs_us = 16.0;
  double difs_us = 34.0;
  double t_success_us = 0.0;    // busy period of a successful exchange, trailing DIFS included
  double t_collision_us = 0.0;  // busy period of a collision, trailing DIFS included
};

struct ThroughputEstimate {
  double tau = 0.0;
  double p = 0.0;
  double s_mbps = 0.0;
};

/// Derive oracle parameters from the same MAC/PHY configuration the simulator
/// uses, so only the access dynamics differ between the two.
BianchiParams bianchi_params(int n, const MacParams& mac, const PhyParams& phy, int payload_bytes);

/// tau as a function of p (right-hand side of the fixed point).
double tau_of_p(double p, int w, int m);
/// Fixed point solved by bisection on tau.
ThroughputEstimate solve_tau(const BianchiParams& params);
double saturation_throughput(const BianchiParams& params);

/// Convenience: solve and fill s_mbps in one call.
ThroughputEstimate estimate(const BianchiParams& params);

}  // namespace hetcell
