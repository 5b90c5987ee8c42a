#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "perfmodel/profile.hpp"

namespace perfmodel {

/// Least-squares polynomial fit of the given degree; returns coefficients
/// c0..c_degree with y ~ sum c_k x^k. Requires at least degree+1 distinct
/// x values.
std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree);

double polyval(std::span<const double> coeffs, double x);

/// Per-distance polynomials (in log2 of the process count) fitted to the
/// profile's maximum-calibration table. Keyed by distance.
/// Throws ModelError when some distance has fewer than degree+1 distinct
/// process counts.
std::map<std::int64_t, std::vector<double>> fit_calibration_max(const MachineProfile& profile,
                                                                int degree);

/// Evaluates a fit at an arbitrary process count, clamped below by the
/// profile's average factor at that distance.
double eval_calibration_fit(const MachineProfile& profile,
                            const std::map<std::int64_t, std::vector<double>>& fits,
                            std::int64_t distance, std::int64_t processes);

/// The profile's max-calibration table augmented with fitted factors at
/// p_target, one per sampled distance. p_target must lie beyond the largest
/// sampled process count.
CalibMaxTable extrapolate_calibration_max(const MachineProfile& profile, std::int64_t p_target,
                                          int degree = 2);

}  // namespace perfmodel
