#pragma once

// Reference arithmetic for the tests, written from the protocol definitions
// and never calling the library code it checks. Plus a tiny seeded generator
// for the property tests.

#include <cmath>
#include <cstdint>
#include <string>

#include "hetcell/scenario.hpp"

namespace ref {

inline std::int64_t ofdm_airtime_us(int payload_bytes, double rate_mbps) {
  const std::int64_t bits_per_symbol = std::llround(rate_mbps * 4.0);  // 4 us symbols
  const std::int64_t bits = 16 + 8LL * payload_bytes + 6;
  return 20 + 4 * ((bits + bits_per_symbol - 1) / bits_per_symbol);
}

// One saturated station, no losses: DIFS + mean backoff + data + SIFS + ACK per frame.
inline double single_station_mbps(int payload_bytes, int cw_min = 15) {
  const double cycle = 34.0 + 9.0 * cw_min / 2.0 + static_cast<double>(ofdm_airtime_us(payload_bytes, 54.0)) + 16.0 +
                       static_cast<double>(ofdm_airtime_us(14, 24.0));
  return 8.0 * payload_bytes / cycle;
}

// Saturation fixed point solved by bisection on p rather than tau.
struct Fixed {
  double tau = 0.0;
  double p = 0.0;
};

inline double tau_given_p(double p, int w, int m) {
  double sum = 0.0;
  for (int k = 0; k < m; ++k) sum += std::pow(2.0 * p, k);
  return 2.0 / (1.0 + w + p * w * sum);
}

inline Fixed bianchi_by_p(int n, int w, int m) {
  if (n == 1) return {tau_given_p(0.0, w, m), 0.0};
  auto g = [&](double p) { return p - (1.0 - std::pow(1.0 - tau_given_p(p, w, m), n - 1)); };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  const double p = 0.5 * (lo + hi);
  return {tau_given_p(p, w, m), p};
}

inline double bianchi_mbps(int n, int cw_min, int cw_max, int payload_bytes) {
  const int w = cw_min + 1;
  const int m = static_cast<int>(std::lround(std::log2((cw_max + 1.0) / w)));
  const Fixed f = bianchi_by_p(n, w, m);
  const double data = static_cast<double>(ofdm_airtime_us(payload_bytes, 54.0));
  const double ack = static_cast<double>(ofdm_airtime_us(14, 24.0));
  const double ts = data + 16.0 + ack + 34.0;
  const double tc = data + 34.0;
  const double ptr = 1.0 - std::pow(1.0 - f.tau, n);
  const double ps = n * f.tau * std::pow(1.0 - f.tau, n - 1) / ptr;
  return ps * ptr * 8.0 * payload_bytes / ((1.0 - ptr) * 9.0 + ptr * ps * ts + ptr * (1.0 - ps) * tc);
}

// splitmix64: small, seeded, good enough to drive property-test cases.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double real(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool coin() { return (next() & 1u) != 0; }

 private:
  std::uint64_t s_;
};

}  // namespace ref

namespace testcfg {

// Short run with the given client count; everything else at defaults.
inline hetcell::ScenarioConfig cell(int clients, hetcell::Mode mode, double seconds = 1.0) {
  hetcell::ScenarioConfig c;
  c.clients = clients;
  c.mode = mode;
  c.duration_s = seconds;
  return c;
}

}  // namespace testcfg
