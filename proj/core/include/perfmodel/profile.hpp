#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace perfmodel {

/// One measured point of a kernel efficiency curve: time to run the kernel
/// on a square matrix of the given dimension.
struct CurveSample {
  std::int64_t dim = 0;
  double time_s = 0.0;
};

/// Achieved-time samples for one numerical kernel at a fixed thread count.
struct EfficiencyCurve {
  std::string kernel;
  int threads = 1;
  std::vector<CurveSample> samples;  // sorted by dim, strictly increasing
};

struct CalibAvgSample {
  std::int64_t distance = 1;
  double factor = 1.0;
};

struct CalibMaxSample {
  std::int64_t processes = 1;
  std::int64_t distance = 1;
  double factor = 1.0;
};

/// Average calibration factors keyed by communication distance.
/// Lookups interpolate linearly in log2(distance) and clamp at the edges.
struct CalibAvgTable {
  std::vector<CalibAvgSample> samples;  // sorted by distance, unique

  void sort();
  double lookup(std::int64_t distance) const;
};

/// Maximum calibration factors keyed by (process count, distance).
/// Lookups are bilinear in (log2 p, log2 d) with per-axis clamping.
struct CalibMaxTable {
  std::vector<CalibMaxSample> samples;  // sorted by (processes, distance), unique

  void sort();
  double lookup(std::int64_t processes, std::int64_t distance) const;
  std::vector<std::int64_t> process_counts() const;
  std::vector<std::int64_t> distances() const;
};

/// Everything the cost models need to know about one target machine:
/// point-to-point latency and inverse bandwidth, kernel efficiency curves,
/// network-contention calibration tables and peak-flops constants.
///
/// Profiles are immutable after load; all lookups are pure and safe for
/// unrestricted concurrent reads.
struct MachineProfile {
  std::string name;
  double latency_s = 0.0;                  // seconds per message
  double inv_bandwidth_s_per_word = 0.0;   // seconds per 8-byte word
  double peak_flops_per_core = 0.0;
  std::int64_t cores_per_process = 1;      // cores per NUMA domain driving one process
  std::vector<EfficiencyCurve> kernels;
  CalibAvgTable calib_avg;
  CalibMaxTable calib_max;

  /// Average calibration factor at the given communication distance.
  /// distance 0 is a local copy and meets no contention: exactly 1.
  double calibration_avg(std::int64_t distance) const;

  /// Maximum calibration factor for `processes` concurrent transfers at the
  /// given distance. Clamped below by calibration_avg so the max/avg
  /// ordering holds pointwise.
  double calibration_max(std::int64_t processes, std::int64_t distance) const;

  /// Time for one call of `kernel` on a square matrix of size dim x dim
  /// with `threads` underlying threads. Between samples the implied
  /// throughput dim^3/time is interpolated linearly in log2(dim); a curve
  /// measured at a different thread count t0 is scaled by t0/threads.
  double kernel_time(std::string_view kernel, std::int64_t dim, int threads) const;

  bool has_kernel(std::string_view kernel) const;

  /// Curve with the exact thread count, else the one with the nearest
  /// log2 thread count (ties toward more threads). Null if the kernel is
  /// unknown.
  const EfficiencyCurve* find_curve(std::string_view kernel, int threads) const;
};

/// All violated profile invariants, empty when the profile is valid.
std::vector<std::string> profile_violations(const MachineProfile& profile);

/// Throws ValidationError listing every violated invariant.
void validate_profile(const MachineProfile& profile);

}  // namespace perfmodel
