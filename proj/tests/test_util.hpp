#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "perfmodel/profile.hpp"

namespace testutil {

// Deterministic, implementation-independent generator (splitmix64).
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + std::int64_t(next() % std::uint64_t(hi - lo + 1));
  }

  double real(double lo, double hi) {
    return lo + (hi - lo) * double(next() >> 11) / double(std::uint64_t(1) << 53);
  }
};

// Bare profile with empty calibration tables (= contention-free factors).
inline perfmodel::MachineProfile stub_profile(double latency, double beta) {
  perfmodel::MachineProfile p;
  p.name = "stub";
  p.latency_s = latency;
  p.inv_bandwidth_s_per_word = beta;
  p.peak_flops_per_core = 8.4e9;
  p.cores_per_process = 6;
  return p;
}

inline void add_kernel_sample(perfmodel::MachineProfile& p, const std::string& name, int threads,
                              std::int64_t dim, double time_s) {
  for (auto& c : p.kernels) {
    if (c.kernel == name && c.threads == threads) {
      c.samples.push_back({dim, time_s});
      std::sort(c.samples.begin(), c.samples.end(),
                [](const perfmodel::CurveSample& a, const perfmodel::CurveSample& b) {
                  return a.dim < b.dim;
                });
      return;
    }
  }
  p.kernels.push_back({name, threads, {{dim, time_s}}});
}

// Constant maximum factor for every (p, d); single clamped sample.
inline void set_constant_cmax(perfmodel::MachineProfile& p, double factor) {
  p.calib_max.samples = {{1, 1, factor}};
}

inline void set_constant_cavg(perfmodel::MachineProfile& p, double factor) {
  p.calib_avg.samples = {{1, factor}};
}

// Random valid profile: monotone calibration tables with max >= avg at the
// shared sample points, plus dgemm/dtrsm curves with nondecreasing times.
inline perfmodel::MachineProfile random_profile(Rng& rng) {
  perfmodel::MachineProfile p = stub_profile(rng.real(1e-7, 1e-5), rng.real(1e-10, 1e-8));
  p.name = "random";

  double avg = 1.0;
  for (std::int64_t d = 1; d <= (1 << 16); d *= 4) {
    p.calib_avg.samples.push_back({d, avg});
    avg += rng.real(0.0, 1.0);
  }
  for (std::int64_t pc = 64; pc <= (1 << 16); pc *= 8) {
    double extra = rng.real(0.0, 2.0);
    for (const auto& s : p.calib_avg.samples) {
      p.calib_max.samples.push_back({pc, s.distance, s.factor + extra});
      extra += rng.real(0.0, 3.0);
    }
  }
  p.calib_avg.sort();
  p.calib_max.sort();

  for (const char* kernel : {"dgemm", "dtrsm"}) {
    const int threads = 6;
    double rate = rng.real(1e8, 1e9);  // dim^3 per second at the smallest size
    for (std::int64_t dim = 16; dim <= 16384; dim *= 2) {
      const double cube = double(dim) * double(dim) * double(dim);
      add_kernel_sample(p, kernel, threads, dim, cube / rate);
      rate *= rng.real(1.0, 2.0);  // efficiency never falls, time never shrinks
    }
  }
  return p;
}

}  // namespace testutil
