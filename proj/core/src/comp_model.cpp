#include "perfmodel/comp_model.hpp"

#include <algorithm>

#include "perfmodel/errors.hpp"

namespace perfmodel {

double square_kernel_time(const MachineProfile& profile, std::string_view kernel,
                          std::int64_t dim, int threads) {
  if (dim < 0) throw ModelError("kernel dimension must be >= 0");
  if (dim == 0) return 0.0;
  return profile.kernel_time(kernel, dim, threads);
}

double rect_kernel_time(const MachineProfile& profile, std::string_view kernel, std::int64_t rows,
                        std::int64_t cols, int threads) {
  if (rows < 0 || cols < 0) throw ModelError("kernel dimensions must be >= 0");
  if (rows == 0 || cols == 0) return 0.0;
  const std::int64_t small = std::min(rows, cols);
  const std::int64_t large = std::max(rows, cols);
  const std::int64_t calls = (large + small - 1) / small;  // partial panels charged in full
  return double(calls) * square_kernel_time(profile, kernel, small, threads);
}

double workload_scale(double seconds, double factor) {
  if (factor < 0) throw ModelError("workload factor must be >= 0");
  return seconds * factor;
}

}  // namespace perfmodel
