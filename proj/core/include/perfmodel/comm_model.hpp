#pragma once

#include <cstdint>

#include "perfmodel/profile.hpp"

namespace perfmodel {

/// Collective-model switches. Message sizes are in 8-byte words throughout.
struct CommOptions {
  /// The final reduce-scatter/scatter step transfers w*q/2^(log2(q)-1)
  /// words. kThreads instead sizes that one step with the thread count in
  /// place of the participant count.
  enum class FinalStepWords { kParticipants, kThreads };
  FinalStepWords final_step_words = FinalStepWords::kParticipants;
  int threads = 1;  // only read under kThreads
};

/// Contention-free point-to-point transfer: latency + words / bandwidth.
double comm_ideal_time(const MachineProfile& profile, double words);

/// Point-to-point transfer scaled by the average calibration factor at the
/// given communication distance.
double comm_time(const MachineProfile& profile, double words, std::int64_t distance);

/// Synchronized transfer: all processes wait for the slowest one, so the
/// maximum calibration factor applies.
double comm_sync_time(const MachineProfile& profile, std::int64_t processes, double words,
                      std::int64_t distance);

/// Replicating a block from the first layer onto the other layers-1 layers;
/// charged at the worst-case distance (to the last layer), twice (one block
/// of each input matrix). Zero when layers == 1.
double initial_replication_time(const MachineProfile& profile, std::int64_t processes,
                                double words, std::int64_t layers);

/// Binomial-tree gather over q participants, average factors, per-step
/// distance doubling. q must be a power of two; q == 1 costs nothing.
double gather_time(const MachineProfile& profile, std::int64_t q, double words,
                   std::int64_t distance);

/// Recursive-halving reduce-scatter whose last step carries the maximum
/// factor (synchronization with the operation that follows).
double reduce_scatter_sync_time(const MachineProfile& profile, std::int64_t processes,
                                std::int64_t q, double words, std::int64_t distance,
                                const CommOptions& options = {});

/// Reduce-scatter followed by a gather to the root.
double reduce_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                   double words, std::int64_t distance, const CommOptions& options = {});

/// Scatter and all-gather share the reduce-scatter/gather cost shapes.
double scatter_sync_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                         double words, std::int64_t distance, const CommOptions& options = {});
double all_gather_time(const MachineProfile& profile, std::int64_t q, double words,
                       std::int64_t distance);

/// All-gather whose final step carries the maximum factor.
double all_gather_sync_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                            double words, std::int64_t distance);

/// Broadcast as scatter + all-gather; the sync variant also promotes the
/// final all-gather step to the maximum factor.
double bcast_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                  double words, std::int64_t distance, const CommOptions& options = {});
double bcast_sync_time(const MachineProfile& profile, std::int64_t processes, std::int64_t q,
                       double words, std::int64_t distance, const CommOptions& options = {});

}  // namespace perfmodel
