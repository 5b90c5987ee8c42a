#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "perfmodel/algo_model.hpp"
#include "perfmodel/profile.hpp"

namespace perfmodel {

enum class StepKind { kComm, kCompute, kOverlapMerge };

std::string_view step_kind_name(StepKind k);

/// One scheduled event. Overlap regions appear as a single merge step whose
/// seconds is the maximum over its branches (each branch kept for
/// inspection); everything else contributes its seconds sequentially.
struct TraceStep {
  std::int64_t iteration = 0;  // -1 for setup, loop index, one-past-last for teardown
  std::string label;
  StepKind kind = StepKind::kComm;
  double seconds = 0.0;
  std::vector<TraceStep> branches;  // only for kOverlapMerge
};

struct StepTrace {
  std::vector<TraceStep> steps;
  double total_s = 0.0;  // fold of the steps: sums, with max inside merges
};

/// Walks the algorithm's schedule event by event: every shift, collective
/// step, kernel call and overlap merge, evaluated straight from the profile
/// lookups. Serves as the brute-force reference for the closed-form models.
StepTrace trace_scenario(const MachineProfile& profile, const Scenario& scenario,
                         const ModelOptions& options = {});

enum class CollectiveKind {
  kGather,
  kReduceScatterSync,
  kReduce,
  kScatterSync,
  kAllGather,
  kAllGatherSync,
  kBcast,
  kBcastSync,
};

/// Stage-by-stage expansion of one collective in isolation, for checking
/// the closed-form collective costs term by term.
StepTrace trace_collective(const MachineProfile& profile, CollectiveKind kind,
                           std::int64_t processes, std::int64_t q, double words,
                           std::int64_t distance, const ModelOptions& options = {},
                           int threads = 1);

/// CSV rows "iteration,label,kind,seconds" plus a footer row with the total.
void write_trace_csv(const StepTrace& trace, std::ostream& out);

}  // namespace perfmodel
