#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perfmodel/comm_model.hpp"
#include "perfmodel/profile.hpp"

namespace perfmodel {

enum class Algorithm { kCannon, kTrsm };
enum class Variant { k2d, k2dOverlap, k25d, k25dOverlap };

std::string_view algorithm_name(Algorithm a);
std::string_view variant_name(Variant v);
std::optional<Algorithm> parse_algorithm(std::string_view s);
std::optional<Variant> parse_variant(std::string_view s);
bool variant_is_25d(Variant v);
bool variant_is_overlap(Variant v);

/// One prediction request.
///   n  matrix dimension
///   p  total process count
///   c  replication layer count (1 for 2D variants)
///   r  block-cyclic blocks per process per dimension (1 for Cannon)
///   t  threads per process
struct Scenario {
  Algorithm algorithm = Algorithm::kCannon;
  Variant variant = Variant::k2d;
  std::int64_t n = 0;
  std::int64_t p = 1;
  std::int64_t c = 1;
  std::int64_t r = 1;
  int t = 1;

  /// Per-layer process grid dimension sqrt(p/c). Valid scenarios only.
  std::int64_t grid_dim() const;
  /// n/grid for Cannon, n/(r*grid) for TRSM. Valid scenarios only.
  std::int64_t block_dim() const;
};

/// All violated scenario invariants (divisibility, power-of-two collective
/// group sizes, thread requirements), empty when valid.
std::vector<std::string> scenario_violations(const Scenario& s);
void validate_scenario(const Scenario& s);  // throws ValidationError

/// Model switches for the ambiguities the cost equations leave open.
struct ModelOptions {
  /// Word count of the final reduce-scatter/scatter step (see CommOptions).
  CommOptions::FinalStepWords final_step_words = CommOptions::FinalStepWords::kParticipants;

  /// Group size of the per-iteration U broadcast in the 2.5D TRSM model:
  /// the per-layer grid sqrt(p/c) (default) or the full-grid sqrt(p).
  enum class Trsm25dBcastGroup { kLayerGrid, kTotalGrid };
  Trsm25dBcastGroup trsm25d_bcast_group = Trsm25dBcastGroup::kLayerGrid;
};

struct Phase {
  std::string label;
  double seconds = 0.0;
};

struct Prediction {
  double total_s = 0.0;
  std::vector<Phase> phases;  // sums to total_s
  double flops = 0.0;
  double percent_peak = 0.0;
};

/// Total flop count of a scenario: 2n^3 for Cannon, n^3 for TRSM.
double scenario_flops(const Scenario& s);

/// flops / (total_s * p * cores_per_process * peak_flops_per_core) * 100.
double percent_of_peak(const MachineProfile& profile, const Scenario& s, double total_s);

Prediction predict_cannon_2d(const MachineProfile&, const Scenario&, const ModelOptions& = {});
Prediction predict_cannon_2d_ovlp(const MachineProfile&, const Scenario&, const ModelOptions& = {});
Prediction predict_cannon_25d(const MachineProfile&, const Scenario&, const ModelOptions& = {});
Prediction predict_cannon_25d_ovlp(const MachineProfile&, const Scenario&, const ModelOptions& = {});
Prediction predict_trsm_2d(const MachineProfile&, const Scenario&, const ModelOptions& = {});
Prediction predict_trsm_2d_ovlp(const MachineProfile&, const Scenario&, const ModelOptions& = {});
Prediction predict_trsm_25d(const MachineProfile&, const Scenario&, const ModelOptions& = {});
Prediction predict_trsm_25d_ovlp(const MachineProfile&, const Scenario&, const ModelOptions& = {});

/// Dispatches on (algorithm, variant) after validating the scenario.
Prediction predict(const MachineProfile& profile, const Scenario& s, const ModelOptions& = {});

}  // namespace perfmodel
