#include "perfmodel/comm_model.hpp"

#include <bit>
#include <cassert>
#include <string>

#include "perfmodel/errors.hpp"

namespace perfmodel {

namespace {

int log2_exact(std::int64_t q) {
  if (q < 1 || !std::has_single_bit(std::uint64_t(q)))
    throw ModelError("collective participant count must be a power of two, got " +
                     std::to_string(q));
  return std::countr_zero(std::uint64_t(q));
}

double final_step_words(std::int64_t q, double words, const CommOptions& options) {
  const double numerator = options.final_step_words == CommOptions::FinalStepWords::kThreads
                               ? double(options.threads)
                               : double(q);
  return words * numerator / double(std::int64_t(1) << (log2_exact(q) - 1));
}

}  // namespace

double comm_ideal_time(const MachineProfile& profile, double words) {
  assert(words >= 0);
  return profile.latency_s + profile.inv_bandwidth_s_per_word * words;
}

double comm_time(const MachineProfile& profile, double words, std::int64_t distance) {
  return profile.calibration_avg(distance) * comm_ideal_time(profile, words);
}

double comm_sync_time(const MachineProfile& profile, std::int64_t processes, double words,
                      std::int64_t distance) {
  return profile.calibration_max(processes, distance) * comm_ideal_time(profile, words);
}

double initial_replication_time(const MachineProfile& profile, std::int64_t processes,
                                double words, std::int64_t layers) {
  if (layers < 1 || processes % layers != 0)
    throw ModelError("layer count " + std::to_string(layers) + " must divide process count " +
                     std::to_string(processes));
  if (layers == 1) return 0.0;  // single layer, nothing to replicate
  const std::int64_t distance = (layers - 1) * (processes / layers);
  return 2.0 * profile.calibration_max(processes, distance) * comm_ideal_time(profile, words);
}

double gather_time(const MachineProfile& profile, std::int64_t q, double words,
                   std::int64_t distance) {
  const int steps = log2_exact(q);
  double total = 0.0;
  for (int i = 0; i < steps; ++i)
    total += profile.calibration_avg((std::int64_t(1) << i) * distance) *
             comm_ideal_time(profile, (words / double(q)) * double(std::int64_t(1) << i));
  return total;
}

double reduce_scatter_sync_time(const MachineProfile& profile, std::int64_t processes,
                                std::int64_t q, double words, std::int64_t distance,
                                const CommOptions& options) {
  const int steps = log2_exact(q);
  if (steps == 0) return 0.0;
  double total = 0.0;
  for (int i = 0; i < steps - 1; ++i)
    total += profile.calibration_avg((std::int64_t(1) << i) * distance) *
             comm_ideal_time(profile, words * double(q) / double(std::int64_t(1) << i));
  total += profile.calibration_max(processes, (std::int64_t(1) << (steps - 1)) * distance) *
           comm_ideal_time(profile, final_step_words(q, words, options));
  return total;
}

double reduce_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                   double words, std::int64_t distance, const CommOptions& options) {
  return reduce_scatter_sync_time(profile, processes, q, words, distance, options) +
         gather_time(profile, q, words, distance);
}

double scatter_sync_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                         double words, std::int64_t distance, const CommOptions& options) {
  return reduce_scatter_sync_time(profile, processes, q, words, distance, options);
}

double all_gather_time(const MachineProfile& profile, std::int64_t q, double words,
                       std::int64_t distance) {
  return gather_time(profile, q, words, distance);
}

double all_gather_sync_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                            double words, std::int64_t distance) {
  const int steps = log2_exact(q);
  if (steps == 0) return 0.0;
  double total = 0.0;
  for (int i = 0; i < steps - 1; ++i)
    total += profile.calibration_avg((std::int64_t(1) << i) * distance) *
             comm_ideal_time(profile, (words / double(q)) * double(std::int64_t(1) << i));
  total += profile.calibration_max(processes, (std::int64_t(1) << (steps - 1)) * distance) *
           comm_ideal_time(profile, (words / double(q)) * double(std::int64_t(1) << (steps - 1)));
  return total;
}

double bcast_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                  double words, std::int64_t distance, const CommOptions& options) {
  return scatter_sync_time(profile, processes, q, words, distance, options) +
         all_gather_time(profile, q, words, distance);
}

double bcast_sync_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                       double words, std::int64_t distance, const CommOptions& options) {
  return scatter_sync_time(profile, processes, q, words, distance, options) +
         all_gather_sync_time(profile, processes, q, words, distance);
}

}  // namespace perfmodel
