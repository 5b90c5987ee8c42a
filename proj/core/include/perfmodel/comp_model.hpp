#pragma once

#include <cstdint>
#include <string_view>

#include "perfmodel/profile.hpp"

namespace perfmodel {

/// Time of one square kernel call of the given dimension; 0 for dim == 0.
double square_kernel_time(const MachineProfile& profile, std::string_view kernel,
                          std::int64_t dim, int threads);

/// A rows x cols rectangular operation charged as ceil(max/min) consecutive
/// square calls of the smaller dimension. Zero if either dimension is zero.
double rect_kernel_time(const MachineProfile& profile, std::string_view kernel, std::int64_t rows,
                        std::int64_t cols, int threads);

/// Scales a kernel or collective time by an expected per-process workload
/// count, which the models allow to be fractional. factor must be >= 0.
double workload_scale(double seconds, double factor);

}  // namespace perfmodel
