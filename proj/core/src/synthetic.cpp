#include "perfmodel/synthetic.hpp"

#include <cmath>

#include "perfmodel/errors.hpp"

namespace perfmodel {

namespace {

double synthetic_avg(const SyntheticProfileParams& g, std::int64_t d) {
  return 1.0 + g.avg_slope * std::log2(double(d));
}

double synthetic_max(const SyntheticProfileParams& g, std::int64_t p, std::int64_t d) {
  return synthetic_avg(g, d) +
         g.max_slope * std::log2(double(p)) * (1.0 + std::log2(double(d))) / 8.0;
}

double kernel_efficiency(const SyntheticProfileParams& g, std::int64_t dim) {
  return g.kernel_peak_fraction * double(dim) / (double(dim) + g.kernel_half_dim);
}

EfficiencyCurve make_curve(const SyntheticProfileParams& g, const std::string& kernel,
                           double flops_per_dim3, double eff_scale) {
  EfficiencyCurve c;
  c.kernel = kernel;
  c.threads = g.threads;
  const double process_peak = double(g.threads) * g.peak_flops_per_core;
  for (std::int64_t dim = g.min_kernel_dim; dim <= g.max_kernel_dim; dim *= 2) {
    const double eff = eff_scale * kernel_efficiency(g, dim);
    const double flops = flops_per_dim3 * double(dim) * double(dim) * double(dim);
    c.samples.push_back({dim, flops / (eff * process_peak)});
  }
  return c;
}

}  // namespace

MachineProfile gen_synthetic_profile(const SyntheticProfileParams& params) {
  if (params.latency_s <= 0 || params.inv_bandwidth_s_per_word <= 0 ||
      params.peak_flops_per_core <= 0 || params.cores_per_process < 1 || params.threads < 1 ||
      params.max_distance < 1 || params.min_processes < 2 ||
      params.max_processes < params.min_processes || params.min_kernel_dim < 1 ||
      params.max_kernel_dim < 2 * params.min_kernel_dim || params.avg_slope < 0 ||
      params.max_slope < 0 || params.kernel_peak_fraction <= 0 || params.kernel_half_dim <= 0)
    throw ModelError("gen_synthetic_profile: parameters must be positive");

  MachineProfile p;
  p.name = params.name;
  p.latency_s = params.latency_s;
  p.inv_bandwidth_s_per_word = params.inv_bandwidth_s_per_word;
  p.peak_flops_per_core = params.peak_flops_per_core;
  p.cores_per_process = params.cores_per_process;

  p.kernels.push_back(make_curve(params, "dgemm", 2.0, 1.0));
  p.kernels.push_back(make_curve(params, "dtrsm", 1.0, 0.9));

  for (std::int64_t d = 1; d <= params.max_distance; d *= 2)
    p.calib_avg.samples.push_back({d, synthetic_avg(params, d)});

  for (std::int64_t pc = params.min_processes; pc <= params.max_processes; pc *= 4)
    for (std::int64_t d = 1; d <= params.max_distance; d *= 2)
      p.calib_max.samples.push_back({pc, d, synthetic_max(params, pc, d)});

  p.calib_avg.sort();
  p.calib_max.sort();
  return p;
}

}  // namespace perfmodel
