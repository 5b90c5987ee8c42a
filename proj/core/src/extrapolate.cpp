#include "perfmodel/extrapolate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "perfmodel/errors.hpp"

namespace perfmodel {

std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, int degree) {
  if (degree < 0) throw ModelError("polyfit: degree must be >= 0");
  if (x.size() != y.size()) throw ModelError("polyfit: x/y size mismatch");
  std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() < std::size_t(degree) + 1)
    throw ModelError("polyfit: insufficient samples: need " + std::to_string(degree + 1) +
                     " distinct x values, have " + std::to_string(distinct.size()));

  // normal equations A c = b with A[i][j] = sum x^(i+j), b[i] = sum y x^i
  const int m = degree + 1;
  std::vector<double> a(std::size_t(m) * m, 0.0), b(m, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    double xi = 1.0;
    std::vector<double> pow(2 * m - 1);
    for (int i = 0; i < 2 * m - 1; ++i) {
      pow[i] = xi;
      xi *= x[k];
    }
    for (int i = 0; i < m; ++i) {
      b[i] += y[k] * pow[i];
      for (int j = 0; j < m; ++j) a[std::size_t(i) * m + j] += pow[i + j];
    }
  }

  // Gaussian elimination with partial pivoting
  std::vector<int> piv(m);
  for (int i = 0; i < m; ++i) piv[i] = i;
  for (int col = 0; col < m; ++col) {
    int best = col;
    for (int row = col + 1; row < m; ++row)
      if (std::fabs(a[std::size_t(row) * m + col]) > std::fabs(a[std::size_t(best) * m + col]))
        best = row;
    if (best != col) {
      for (int j = 0; j < m; ++j)
        std::swap(a[std::size_t(col) * m + j], a[std::size_t(best) * m + j]);
      std::swap(b[col], b[best]);
    }
    const double pivot = a[std::size_t(col) * m + col];
    if (pivot == 0.0) throw ModelError("polyfit: singular system");
    for (int row = col + 1; row < m; ++row) {
      const double f = a[std::size_t(row) * m + col] / pivot;
      if (f == 0.0) continue;
      for (int j = col; j < m; ++j) a[std::size_t(row) * m + j] -= f * a[std::size_t(col) * m + j];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> coeffs(m, 0.0);
  for (int i = m - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < m; ++j) s -= a[std::size_t(i) * m + j] * coeffs[j];
    coeffs[i] = s / a[std::size_t(i) * m + i];
  }
  return coeffs;
}

double polyval(std::span<const double> coeffs, double x) {
  double v = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
  return v;
}

std::map<std::int64_t, std::vector<double>> fit_calibration_max(const MachineProfile& profile,
                                                                int degree) {
  std::map<std::int64_t, std::pair<std::vector<double>, std::vector<double>>> by_distance;
  for (const auto& s : profile.calib_max.samples) {
    auto& [xs, ys] = by_distance[s.distance];
    xs.push_back(std::log2(double(s.processes)));
    ys.push_back(s.factor);
  }
  if (by_distance.empty()) throw ModelError("calib_max table is empty");

  std::map<std::int64_t, std::vector<double>> fits;
  for (auto& [d, xy] : by_distance) {
    try {
      fits[d] = polyfit(xy.first, xy.second, degree);
    } catch (const ModelError& e) {
      throw ModelError("insufficient samples: distance " + std::to_string(d) + ": " + e.what());
    }
  }
  return fits;
}

double eval_calibration_fit(const MachineProfile& profile,
                            const std::map<std::int64_t, std::vector<double>>& fits,
                            std::int64_t distance, std::int64_t processes) {
  auto it = fits.find(distance);
  if (it == fits.end()) throw ModelError("no fit for distance " + std::to_string(distance));
  const double fitted = polyval(it->second, std::log2(double(processes)));
  return std::max(fitted, profile.calibration_avg(distance));
}

CalibMaxTable extrapolate_calibration_max(const MachineProfile& profile, std::int64_t p_target,
                                          int degree) {
  const auto ps = profile.calib_max.process_counts();
  if (ps.empty()) throw ModelError("calib_max table is empty");
  if (p_target <= ps.back())
    throw ModelError("target not beyond sampled range: p_target " + std::to_string(p_target) +
                     " <= max sampled p " + std::to_string(ps.back()));

  const auto fits = fit_calibration_max(profile, degree);
  CalibMaxTable out = profile.calib_max;
  for (const auto& [d, coeffs] : fits)
    out.samples.push_back({p_target, d, eval_calibration_fit(profile, fits, d, p_target)});
  out.sort();
  return out;
}

}  // namespace perfmodel
