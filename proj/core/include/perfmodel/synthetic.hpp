#pragma once

#include "perfmodel/profile.hpp"

namespace perfmodel {

/// Knobs for the synthetic profile generator. Defaults describe a
/// 3D-torus-class machine (8.4 Gflops/core, 6 cores per NUMA domain,
/// microsecond latency) with contention factors that grow with distance
/// and with the number of concurrently communicating processes. The
/// parametric forms are plausible shapes for such machines, not measured
/// data; see the README.
struct SyntheticProfileParams {
  std::string name = "synthetic-torus";
  double latency_s = 1.5e-6;
  double inv_bandwidth_s_per_word = 1.2e-9;  // 8-byte words, ~6.7 GB/s
  double peak_flops_per_core = 8.4e9;
  std::int64_t cores_per_process = 6;
  int threads = 6;  // thread count of the generated kernel curves

  std::int64_t max_distance = 1 << 16;    // calibration tables cover d = 1..max
  std::int64_t min_processes = 64;        // calib_max rows cover p = min..max
  std::int64_t max_processes = 1 << 16;
  std::int64_t min_kernel_dim = 64;       // kernel curves cover dim = min..max
  std::int64_t max_kernel_dim = 16384;

  // calib_avg(d) = 1 + avg_slope * log2(d)
  double avg_slope = 0.3;
  // calib_max(p, d) = calib_avg(d) + max_slope * log2(p) * (1 + log2(d)) / 8
  double max_slope = 4.0;
  // kernel efficiency rises then saturates: eff(dim) = peak_fraction * dim / (dim + half_dim)
  double kernel_peak_fraction = 0.92;
  double kernel_half_dim = 150.0;
};

/// Deterministic synthetic machine profile: average factors grow with
/// distance, maximum factors grow with both process count and distance and
/// dominate the average everywhere, and kernel efficiency rises then
/// saturates with matrix size. Always passes validate_profile.
MachineProfile gen_synthetic_profile(const SyntheticProfileParams& params = {});

}  // namespace perfmodel
