#include "perfmodel/profile.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "perfmodel/errors.hpp"

namespace perfmodel {

namespace {

// Linear interpolation in log2 of the key. Callers guarantee lo < x < hi.
double lerp_log2(double x, double x_lo, double y_lo, double x_hi, double y_hi) {
  const double t = (std::log2(x) - std::log2(x_lo)) / (std::log2(x_hi) - std::log2(x_lo));
  return y_lo + t * (y_hi - y_lo);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void CalibAvgTable::sort() {
  std::sort(samples.begin(), samples.end(),
            [](const CalibAvgSample& a, const CalibAvgSample& b) { return a.distance < b.distance; });
}

double CalibAvgTable::lookup(std::int64_t distance) const {
  if (samples.empty()) return 1.0;  // no table: contention-free
  if (distance <= samples.front().distance) return samples.front().factor;
  if (distance >= samples.back().distance) return samples.back().factor;
  auto hi = std::lower_bound(
      samples.begin(), samples.end(), distance,
      [](const CalibAvgSample& s, std::int64_t d) { return s.distance < d; });
  if (hi->distance == distance) return hi->factor;
  auto lo = hi - 1;
  return lerp_log2(double(distance), double(lo->distance), lo->factor,
                   double(hi->distance), hi->factor);
}

void CalibMaxTable::sort() {
  std::sort(samples.begin(), samples.end(),
            [](const CalibMaxSample& a, const CalibMaxSample& b) {
              if (a.processes != b.processes) return a.processes < b.processes;
              return a.distance < b.distance;
            });
}

std::vector<std::int64_t> CalibMaxTable::process_counts() const {
  std::vector<std::int64_t> out;
  for (const auto& s : samples)
    if (out.empty() || out.back() != s.processes) out.push_back(s.processes);
  return out;
}

std::vector<std::int64_t> CalibMaxTable::distances() const {
  std::vector<std::int64_t> out;
  for (const auto& s : samples) out.push_back(s.distance);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// Interpolate one process row of a max table over distance.
double row_lookup(const CalibMaxSample* begin, const CalibMaxSample* end, std::int64_t distance) {
  if (distance <= begin->distance) return begin->factor;
  if (distance >= (end - 1)->distance) return (end - 1)->factor;
  auto hi = std::lower_bound(begin, end, distance,
                             [](const CalibMaxSample& s, std::int64_t d) { return s.distance < d; });
  if (hi->distance == distance) return hi->factor;
  auto lo = hi - 1;
  return lerp_log2(double(distance), double(lo->distance), lo->factor,
                   double(hi->distance), hi->factor);
}

}  // namespace

double CalibMaxTable::lookup(std::int64_t processes, std::int64_t distance) const {
  if (samples.empty()) return 1.0;
  const CalibMaxSample* base = samples.data();
  const CalibMaxSample* end = base + samples.size();

  auto row_begin = [&](std::int64_t p) {
    return std::lower_bound(base, end, p, [](const CalibMaxSample& s, std::int64_t v) {
      return s.processes < v;
    });
  };
  auto row_end = [&](const CalibMaxSample* b) {
    const CalibMaxSample* e = b;
    while (e != end && e->processes == b->processes) ++e;
    return e;
  };

  const std::int64_t p_min = samples.front().processes;
  const std::int64_t p_max = samples.back().processes;
  if (processes <= p_min) {
    auto b = row_begin(p_min);
    return row_lookup(b, row_end(b), distance);
  }
  if (processes >= p_max) {
    auto b = row_begin(p_max);
    return row_lookup(b, row_end(b), distance);
  }
  auto hi_b = row_begin(processes);
  if (hi_b->processes == processes)
    return row_lookup(hi_b, row_end(hi_b), distance);
  // bracket rows around the query process count
  auto lo_b = row_begin((hi_b - 1)->processes);
  const double v_lo = row_lookup(lo_b, row_end(lo_b), distance);
  const double v_hi = row_lookup(hi_b, row_end(hi_b), distance);
  return lerp_log2(double(processes), double(lo_b->processes), v_lo,
                   double(hi_b->processes), v_hi);
}

double MachineProfile::calibration_avg(std::int64_t distance) const {
  assert(distance >= 0);
  if (distance == 0) return 1.0;  // self-copy, no network
  return calib_avg.lookup(distance);
}

double MachineProfile::calibration_max(std::int64_t processes, std::int64_t distance) const {
  assert(processes >= 1 && distance >= 0);
  if (distance == 0 || processes <= 1) return 1.0;
  const double raw = calib_max.lookup(processes, distance);
  return std::max(raw, calibration_avg(distance));
}

const EfficiencyCurve* MachineProfile::find_curve(std::string_view kernel, int threads) const {
  const EfficiencyCurve* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& c : kernels) {
    if (c.kernel != kernel) continue;
    if (c.threads == threads) return &c;
    const double dist = std::fabs(std::log2(double(c.threads)) - std::log2(double(threads)));
    if (best == nullptr || dist < best_dist ||
        (dist == best_dist && c.threads > best->threads)) {
      best = &c;
      best_dist = dist;
    }
  }
  return best;
}

bool MachineProfile::has_kernel(std::string_view kernel) const {
  for (const auto& c : kernels)
    if (c.kernel == kernel) return true;
  return false;
}

double MachineProfile::kernel_time(std::string_view kernel, std::int64_t dim, int threads) const {
  assert(dim >= 0 && threads >= 1);
  if (dim == 0) return 0.0;
  const EfficiencyCurve* curve = find_curve(kernel, threads);
  if (curve == nullptr || curve->samples.empty())
    throw ModelError("unknown kernel: " + std::string(kernel));

  const auto& s = curve->samples;
  const double cube = double(dim) * double(dim) * double(dim);
  auto rate_at = [](const CurveSample& cs) {
    return double(cs.dim) * double(cs.dim) * double(cs.dim) / cs.time_s;
  };

  double time;
  if (dim <= s.front().dim) {
    time = cube / rate_at(s.front());
  } else if (dim >= s.back().dim) {
    time = cube / rate_at(s.back());
  } else {
    auto hi = std::lower_bound(s.begin(), s.end(), dim,
                               [](const CurveSample& cs, std::int64_t d) { return cs.dim < d; });
    if (hi->dim == dim) {
      time = hi->time_s;
    } else {
      auto lo = hi - 1;
      const double rate = lerp_log2(double(dim), double(lo->dim), rate_at(*lo),
                                    double(hi->dim), rate_at(*hi));
      time = cube / rate;
    }
  }
  if (curve->threads != threads) time *= double(curve->threads) / double(threads);
  return time;
}

std::vector<std::string> profile_violations(const MachineProfile& p) {
  std::vector<std::string> v;
  auto note = [&](std::string msg) { v.push_back(std::move(msg)); };

  if (!finite_positive(p.latency_s)) note("latency_s must be > 0");
  if (!finite_positive(p.inv_bandwidth_s_per_word)) note("inv_bandwidth_s_per_word must be > 0");
  if (!finite_positive(p.peak_flops_per_core)) note("peak_flops_per_core must be > 0");
  if (p.cores_per_process < 1) note("cores_per_process must be >= 1");

  for (const auto& c : p.kernels) {
    const std::string tag = "kernel '" + c.kernel + "' (threads=" + std::to_string(c.threads) + ")";
    if (c.kernel.empty()) note("kernel with empty name");
    if (c.threads < 1) note(tag + ": threads must be >= 1");
    if (c.samples.size() < 2) note(tag + ": needs at least 2 samples");
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      if (c.samples[i].dim < 1) note(tag + ": sample dim must be >= 1");
      if (!finite_positive(c.samples[i].time_s))
        note(tag + ": sample time must be > 0");
      if (i > 0 && c.samples[i].dim <= c.samples[i - 1].dim)
        note(tag + ": sample dims must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < p.kernels.size(); ++i)
    for (std::size_t j = i + 1; j < p.kernels.size(); ++j)
      if (p.kernels[i].kernel == p.kernels[j].kernel &&
          p.kernels[i].threads == p.kernels[j].threads)
        note("duplicate curve for kernel '" + p.kernels[i].kernel + "' at threads=" +
             std::to_string(p.kernels[i].threads));

  if (p.calib_avg.samples.empty()) note("calib_avg: needs at least one sample");
  for (std::size_t i = 0; i < p.calib_avg.samples.size(); ++i) {
    const auto& s = p.calib_avg.samples[i];
    const std::string tag = "calib_avg[" + std::to_string(i) + "] (d=" + std::to_string(s.distance) + ")";
    if (s.distance < 1) note(tag + ": distance must be >= 1");
    if (!(std::isfinite(s.factor) && s.factor >= 1.0))
      note(tag + ": factor " + std::to_string(s.factor) + " < 1");
    if (i > 0 && s.distance == p.calib_avg.samples[i - 1].distance)
      note(tag + ": duplicate distance key");
  }

  if (p.calib_max.samples.empty()) note("calib_max: needs at least one sample");
  for (std::size_t i = 0; i < p.calib_max.samples.size(); ++i) {
    const auto& s = p.calib_max.samples[i];
    const std::string tag = "calib_max[" + std::to_string(i) + "] (p=" + std::to_string(s.processes) +
                            ", d=" + std::to_string(s.distance) + ")";
    if (s.processes < 1) note(tag + ": process count must be >= 1");
    if (s.distance < 1) note(tag + ": distance must be >= 1");
    if (!(std::isfinite(s.factor) && s.factor >= 1.0))
      note(tag + ": factor " + std::to_string(s.factor) + " < 1");
    if (i > 0 && s.distance == p.calib_max.samples[i - 1].distance &&
        s.processes == p.calib_max.samples[i - 1].processes)
      note(tag + ": duplicate (p, d) key");
  }

  // max/avg ordering at every distance sampled in both tables
  for (const auto& ms : p.calib_max.samples)
    for (const auto& as : p.calib_avg.samples)
      if (ms.distance == as.distance && ms.factor < as.factor)
        note("calib_max(p=" + std::to_string(ms.processes) + ", d=" + std::to_string(ms.distance) +
             ") = " + std::to_string(ms.factor) + " below calib_avg(d) = " + std::to_string(as.factor));

  return v;
}

void validate_profile(const MachineProfile& profile) {
  auto v = profile_violations(profile);
  if (!v.empty()) throw ValidationError(std::move(v));
}

}  // namespace perfmodel
