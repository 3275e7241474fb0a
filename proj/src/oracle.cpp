#include "hetcell/oracle.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "hetcell/mac.hpp"

namespace hetcell {

BianchiParams bianchi_params(int n, const MacParams& mac, const PhyParams& phy, int payload_bytes) {
  BianchiParams b;
  b.n = n;
  b.w = mac.cw_min + 1;
  b.m = static_cast<int>(std::lround(std::log2(static_cast<double>(mac.cw_max + 1) / (mac.cw_min + 1))));
  b.payload_bits = 8.0 * payload_bytes;
  b.slot_us = mac.slot_us;
  b.sifs_us = mac.sifs_us;
  b.difs_us = mac.difs_us;
  const double data = static_cast<double>(frame_airtime_us(payload_bytes, phy.data_rate_mbps, phy));
  const double ack = static_cast<double>(frame_airtime_us(kMacAckBytes, phy.control_rate_mbps, phy));
  b.t_success_us = data + mac.sifs_us + ack + mac.difs_us;
  b.t_collision_us = data + mac.difs_us;
  return b;
}

double tau_of_p(double p, int w, int m) {
  // 2(1-2p) / ((1-2p)(w+1) + p w (1-(2p)^m)), rewritten with the finite
  // geometric sum so that p = 1/2 is not a removable singularity.
  double geometric = 0.0;
  double term = 1.0;
  for (int i = 0; i < m; ++i) {
    geometric += term;
    term *= 2.0 * p;
  }
  return 2.0 / ((w + 1) + p * w * geometric);
}

ThroughputEstimate solve_tau(const BianchiParams& params) {
  if (params.n < 1 || params.w < 1 || params.m < 0) throw std::invalid_argument("solve_tau: invalid parameters");
  const auto p_of_tau = [&](double tau) { return 1.0 - std::pow(1.0 - tau, params.n - 1); };
  // f is strictly increasing in tau: tau grows, p grows, tau_of_p shrinks.
  const auto f = [&](double tau) { return tau - tau_of_p(p_of_tau(tau), params.w, params.m); };

  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = f(mid);
    if (r == 0.0) break;
    if (r < 0.0) lo = mid; else hi = mid;
    if (hi - lo < 1e-16) break;
  }
  ThroughputEstimate e;
  e.tau = mid;
  e.p = p_of_tau(mid);
  if (std::abs(f(mid)) >= 1e-12) throw std::runtime_error("solve_tau: bisection did not converge");
  return e;
}

double saturation_throughput(const BianchiParams& params) {
  if (params.payload_bits <= 0.0) return 0.0;
  const ThroughputEstimate e = solve_tau(params);
  const double p_tr = 1.0 - std::pow(1.0 - e.tau, params.n);
  const double p_s = params.n * e.tau * std::pow(1.0 - e.tau, params.n - 1) / p_tr;
  const double mean_slot_us = (1.0 - p_tr) * params.slot_us + p_tr * p_s * params.t_success_us +
                              p_tr * (1.0 - p_s) * params.t_collision_us;
  return p_s * p_tr * params.payload_bits / mean_slot_us;  // bits per microsecond == Mbps
}

ThroughputEstimate estimate(const BianchiParams& params) {
  ThroughputEstimate e = solve_tau(params);
  e.s_mbps = saturation_throughput(params);
  return e;
}

}  // namespace hetcell
