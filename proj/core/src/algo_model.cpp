#include "perfmodel/algo_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "perfmodel/comp_model.hpp"
#include "perfmodel/errors.hpp"

namespace perfmodel {

std::string_view algorithm_name(Algorithm a) {
  return a == Algorithm::kCannon ? "cannon" : "trsm";
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::k2d: return "2d";
    case Variant::k2dOverlap: return "2d_ovlp";
    case Variant::k25d: return "25d";
    case Variant::k25dOverlap: return "25d_ovlp";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view s) {
  if (s == "cannon") return Algorithm::kCannon;
  if (s == "trsm") return Algorithm::kTrsm;
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "2d") return Variant::k2d;
  if (s == "2d_ovlp") return Variant::k2dOverlap;
  if (s == "25d") return Variant::k25d;
  if (s == "25d_ovlp") return Variant::k25dOverlap;
  return std::nullopt;
}

bool variant_is_25d(Variant v) { return v == Variant::k25d || v == Variant::k25dOverlap; }
bool variant_is_overlap(Variant v) {
  return v == Variant::k2dOverlap || v == Variant::k25dOverlap;
}

namespace {

bool is_pow2(std::int64_t v) { return v >= 1 && std::has_single_bit(std::uint64_t(v)); }

// exact integer square root, or -1 when v is not a perfect square
std::int64_t isqrt_exact(std::int64_t v) {
  if (v < 0) return -1;
  auto g = std::int64_t(std::llround(std::sqrt(double(v))));
  for (std::int64_t cand = std::max<std::int64_t>(0, g - 2); cand <= g + 2; ++cand)
    if (cand * cand == v) return cand;
  return -1;
}

}  // namespace

std::int64_t Scenario::grid_dim() const {
  const std::int64_t g = isqrt_exact(p / std::max<std::int64_t>(c, 1));
  return g > 0 ? g : 1;
}

std::int64_t Scenario::block_dim() const {
  const std::int64_t denom = algorithm == Algorithm::kTrsm ? r * grid_dim() : grid_dim();
  return denom > 0 ? n / denom : 0;
}

std::vector<std::string> scenario_violations(const Scenario& s) {
  std::vector<std::string> v;
  auto note = [&](std::string msg) { v.push_back(std::move(msg)); };

  if (s.n < 1) note("n must be >= 1");
  if (s.p < 1) note("p must be >= 1");
  if (s.c < 1) note("c must be >= 1");
  if (s.r < 1) note("r must be >= 1");
  if (s.t < 1) note("t must be >= 1");
  if (!v.empty()) return v;

  if (s.algorithm == Algorithm::kCannon && s.r != 1)
    note("Cannon's algorithm requires r = 1, got r=" + std::to_string(s.r));

  if (!variant_is_25d(s.variant) && s.c != 1)
    note("2D variants require c = 1, got c=" + std::to_string(s.c));

  if (variant_is_25d(s.variant)) {
    if (s.p % s.c != 0)
      note("layer count c=" + std::to_string(s.c) + " must divide p=" + std::to_string(s.p));
    if (s.c > 1 && !is_pow2(s.c))
      note("c=" + std::to_string(s.c) + " feeds the layer collectives and must be a power of two");
  }

  const std::int64_t pc = (variant_is_25d(s.variant) && s.p % s.c == 0) ? s.p / s.c : s.p;
  const std::int64_t g = isqrt_exact(pc);
  if (g < 1) {
    note(variant_is_25d(s.variant)
             ? "p/c=" + std::to_string(pc) + " must be a perfect square (integer grid)"
             : "p=" + std::to_string(s.p) + " must be a perfect square (integer sqrt(p) grid)");
    return v;
  }

  if (s.algorithm == Algorithm::kTrsm && g > 1 && !is_pow2(g))
    note("grid dimension " + std::to_string(g) +
         " feeds the broadcast collectives and must be a power of two");

  const std::int64_t denom = s.algorithm == Algorithm::kTrsm ? s.r * g : g;
  if (s.n % denom != 0)
    note("n=" + std::to_string(s.n) + " must be divisible by " +
         (s.algorithm == Algorithm::kTrsm ? "r*sqrt(p/c)=" : "sqrt(p/c)=") +
         std::to_string(denom) + " (integral block size)");

  if (s.algorithm == Algorithm::kTrsm && variant_is_overlap(s.variant) && s.t < 2)
    note("overlap requires a dedicated communication thread (t >= 2), got t=" +
         std::to_string(s.t));

  return v;
}

void validate_scenario(const Scenario& s) {
  auto v = scenario_violations(s);
  if (!v.empty()) throw ValidationError(std::move(v));
}

double scenario_flops(const Scenario& s) {
  const double n = double(s.n);
  return s.algorithm == Algorithm::kCannon ? 2.0 * n * n * n : n * n * n;
}

double percent_of_peak(const MachineProfile& profile, const Scenario& s, double total_s) {
  if (total_s <= 0) throw ModelError("total_s must be > 0");
  const double machine_peak =
      double(s.p) * double(profile.cores_per_process) * profile.peak_flops_per_core;
  return scenario_flops(s) / (total_s * machine_peak) * 100.0;
}

namespace {

CommOptions comm_options(const Scenario& s, const ModelOptions& opt) {
  return CommOptions{opt.final_step_words, s.t};
}

Prediction finish(const MachineProfile& profile, const Scenario& s, std::vector<Phase> phases) {
  Prediction out;
  out.phases = std::move(phases);
  for (const auto& ph : out.phases) out.total_s += ph.seconds;
  out.flops = scenario_flops(s);
  out.percent_peak = percent_of_peak(profile, s, out.total_s);
  return out;
}

void check(const Scenario& s, Algorithm a, Variant v) {
  if (s.algorithm != a || s.variant != v)
    throw ModelError(std::string("scenario is ") + std::string(algorithm_name(s.algorithm)) + "/" +
                     std::string(variant_name(s.variant)) + ", expected " +
                     std::string(algorithm_name(a)) + "/" + std::string(variant_name(v)));
  validate_scenario(s);
}

// The initial transfer of a 2.5D Cannon run: replication onto the c layers,
// or the plain 2D skew (at average factors, like the loop shifts) when the
// layer count degenerates to 1.
Phase cannon_setup_phase(const MachineProfile& prof, const Scenario& s, double w,
                         std::int64_t g) {
  if (s.c > 1) return {"replication", initial_replication_time(prof, s.p, w, s.c)};
  if (s.p > 1) return {"initial_shift", comm_time(prof, w, 1) + comm_time(prof, w, g)};
  return {"initial_shift", 0.0};
}

}  // namespace

Prediction predict_cannon_2d(const MachineProfile& prof, const Scenario& s,
                             const ModelOptions&) {
  check(s, Algorithm::kCannon, Variant::k2d);
  const std::int64_t g = s.grid_dim();
  const std::int64_t bs = s.block_dim();
  const double w = double(bs) * double(bs);
  const double shift_row = s.p > 1 ? comm_sync_time(prof, s.p, w, 1) : 0.0;
  const double shift_col = s.p > 1 ? comm_sync_time(prof, s.p, w, g) : 0.0;
  const double gemm = square_kernel_time(prof, "dgemm", bs, s.t);
  return finish(prof, s,
                {{"shift_row", double(g) * shift_row},
                 {"shift_col", double(g) * shift_col},
                 {"dgemm", double(g) * gemm}});
}

Prediction predict_cannon_2d_ovlp(const MachineProfile& prof, const Scenario& s,
                                  const ModelOptions&) {
  check(s, Algorithm::kCannon, Variant::k2dOverlap);
  const std::int64_t g = s.grid_dim();
  const std::int64_t bs = s.block_dim();
  const double w = double(bs) * double(bs);
  const double shift_row = s.p > 1 ? comm_sync_time(prof, s.p, w, 1) : 0.0;
  const double shift_col = s.p > 1 ? comm_sync_time(prof, s.p, w, g) : 0.0;
  const double gemm = square_kernel_time(prof, "dgemm", bs, s.t);
  const double loop = double(g - 1) * std::max(shift_row + shift_col, gemm);
  return finish(prof, s,
                {{"initial_shift_row", shift_row},
                 {"initial_shift_col", shift_col},
                 {"dgemm", gemm},
                 {"overlap_loop", loop}});
}

Prediction predict_cannon_25d(const MachineProfile& prof, const Scenario& s,
                              const ModelOptions& opt) {
  check(s, Algorithm::kCannon, Variant::k25d);
  const std::int64_t g = s.grid_dim();
  const std::int64_t bs = s.block_dim();
  const double w = double(bs) * double(bs);
  const double shift_row = g > 1 ? comm_time(prof, w, 1) : 0.0;
  const double shift_col = g > 1 ? comm_time(prof, w, g) : 0.0;
  const double gemm = square_kernel_time(prof, "dgemm", bs, s.t);
  const double reduce =
      reduce_time(prof, s.p, s.c, w, s.p / s.c, comm_options(s, opt));
  return finish(prof, s,
                {cannon_setup_phase(prof, s, w, g),
                 {"shift_row", double(g - 1) * shift_row},
                 {"shift_col", double(g - 1) * shift_col},
                 {"dgemm", double(g) * gemm},
                 {"reduce", reduce}});
}

Prediction predict_cannon_25d_ovlp(const MachineProfile& prof, const Scenario& s,
                                   const ModelOptions& opt) {
  check(s, Algorithm::kCannon, Variant::k25dOverlap);
  const std::int64_t g = s.grid_dim();
  const std::int64_t bs = s.block_dim();
  const double w = double(bs) * double(bs);
  const double shift_pair =
      g > 1 ? comm_time(prof, w, 1) + comm_time(prof, w, g) : 0.0;
  const double gemm = square_kernel_time(prof, "dgemm", bs, s.t);
  const double loop = double(g - 1) * std::max(shift_pair, gemm);
  const double reduce =
      reduce_time(prof, s.p, s.c, w, s.p / s.c, comm_options(s, opt));
  return finish(prof, s,
                {cannon_setup_phase(prof, s, w, g),
                 {"overlap_loop", loop},
                 {"dgemm", gemm},
                 {"reduce", reduce}});
}

Prediction predict_trsm_2d(const MachineProfile& prof, const Scenario& s,
                           const ModelOptions& opt) {
  check(s, Algorithm::kTrsm, Variant::k2d);
  const std::int64_t g = s.grid_dim();
  const std::int64_t bs = s.block_dim();
  const double w = double(bs) * double(bs);
  const auto comm = comm_options(s, opt);
  const double iters = double(s.r) * double(g);

  const double bcast_u = bcast_sync_time(prof, s.p, g, w, g, comm);
  const double bcast_x = bcast_time(prof, s.p, g, w, 1, comm);
  const double trsm = square_kernel_time(prof, "dtrsm", bs, s.t);
  const double gemm = square_kernel_time(prof, "dgemm", bs, s.t);

  // sum_{i=0}^{rg-1} (rg-i)/g = r(rg+1)/2 and sum (rg-i-1)/g = r(rg-1)/2
  const double u_weight = double(s.r) * (iters + 1.0) / 2.0;
  const double update_weight = double(s.r) * (iters - 1.0) / 2.0;

  return finish(prof, s,
                {{"bcast_u", workload_scale(bcast_u, u_weight)},
                 {"dtrsm", iters * double(s.r) * trsm},
                 {"bcast_x", iters * double(s.r) * bcast_x},
                 {"update", workload_scale(gemm, update_weight)},
                 {"final_dtrsm", double(s.r) * trsm},
                 {"final_bcast_u", bcast_u}});
}

Prediction predict_trsm_2d_ovlp(const MachineProfile& prof, const Scenario& s,
                                const ModelOptions& opt) {
  check(s, Algorithm::kTrsm, Variant::k2dOverlap);
  const std::int64_t g = s.grid_dim();
  const std::int64_t bs = s.block_dim();
  const double w = double(bs) * double(bs);
  const auto comm = comm_options(s, opt);
  const double iters = double(s.r) * double(g);

  const double bcast_u = bcast_sync_time(prof, s.p, g, w, g, comm);
  const double bcast_x = bcast_time(prof, s.p, g, w, 1, comm);
  const double trsm = square_kernel_time(prof, "dtrsm", bs, s.t - 1);
  const double gemm = square_kernel_time(prof, "dgemm", bs, s.t - 1);

  const double update_weight = double(s.r) * (iters - 1.0) / 2.0;
  const double merged = std::max(bcast_u, double(s.r) * gemm);

  return finish(prof, s,
                {{"bcast_u_hoisted", double(s.r) * bcast_u},
                 {"dtrsm", iters * double(s.r) * trsm},
                 {"bcast_x", iters * double(s.r) * bcast_x},
                 {"overlap_update", workload_scale(merged, update_weight)},
                 {"final_dtrsm", double(s.r) * trsm}});
}

namespace {

std::int64_t trsm25d_bcast_group_dim(const Scenario& s, const ModelOptions& opt,
                                     std::int64_t g) {
  if (opt.trsm25d_bcast_group == ModelOptions::Trsm25dBcastGroup::kLayerGrid) return g;
  const std::int64_t full = isqrt_exact(s.p);
  if (full < 1 || (full > 1 && !std::has_single_bit(std::uint64_t(full))))
    throw ModelError("full-grid broadcast group needs sqrt(p) to be a power of two, p=" +
                     std::to_string(s.p));
  return full;
}

}  // namespace

Prediction predict_trsm_25d(const MachineProfile& prof, const Scenario& s,
                            const ModelOptions& opt) {
  check(s, Algorithm::kTrsm, Variant::k25d);
  const std::int64_t g = s.grid_dim();
  const std::int64_t bs = s.block_dim();
  const double w = double(bs) * double(bs);
  const auto comm = comm_options(s, opt);
  const double iters = double(s.r) * double(g);
  const double r2 = double(s.r) * double(s.r);
  const double solves = double(s.r) / double(s.c);  // per-iteration solve count

  const std::int64_t qu = trsm25d_bcast_group_dim(s, opt, g);
  const double bcast_u = bcast_sync_time(prof, s.p, qu, w, g, comm);
  const double bcast_u_final = bcast_sync_time(prof, s.p, g, w, g, comm);
  const double bcast_x = bcast_time(prof, s.p, g, w, 1, comm);
  const double trsm = square_kernel_time(prof, "dtrsm", bs, s.t);
  const double gemm = square_kernel_time(prof, "dgemm", bs, s.t);

  const double u_weight = double(s.r) * (iters + 1.0) / 2.0;
  const double update_weight = double(s.r) * (iters - 1.0) / 2.0;

  const double setup_bcast = r2 * 0.75 * bcast_time(prof, s.p, s.c, w, s.p / s.c, comm);
  const double setup_scatter =
      r2 * scatter_sync_time(prof, s.p, s.c, w / double(s.c), s.p / s.c, comm);
  const double gather_x = r2 * gather_time(prof, s.c, w, s.p / s.c);

  return finish(prof, s,
                {{"setup_bcast_u", setup_bcast},
                 {"setup_scatter_x", setup_scatter},
                 {"bcast_u", workload_scale(bcast_u, u_weight)},
                 {"dtrsm", iters * solves * trsm},
                 {"bcast_x", iters * solves * bcast_x},
                 {"update", workload_scale(gemm, solves * update_weight)},
                 {"final_bcast_u", bcast_u_final},
                 {"final_dtrsm", solves * trsm},
                 {"gather_x", gather_x}});
}

Prediction predict_trsm_25d_ovlp(const MachineProfile& prof, const Scenario& s,
                                 const ModelOptions& opt) {
  check(s, Algorithm::kTrsm, Variant::k25dOverlap);
  const std::int64_t g = s.grid_dim();
  const std::int64_t bs = s.block_dim();
  const double w = double(bs) * double(bs);
  const auto comm = comm_options(s, opt);
  const double iters = double(s.r) * double(g);
  const double r2 = double(s.r) * double(s.r);
  const double solves = double(s.r) / double(s.c);

  const double bcast_u = bcast_sync_time(prof, s.p, g, w, g, comm);
  const double bcast_x = bcast_time(prof, s.p, g, w, 1, comm);
  const double trsm = square_kernel_time(prof, "dtrsm", bs, s.t - 1);
  const double gemm = square_kernel_time(prof, "dgemm", bs, s.t - 1);

  const double update_weight = double(s.r) * (iters - 1.0) / 2.0;
  const double merged = std::max(bcast_u, solves * gemm);

  const double setup_bcast = r2 * 0.75 * bcast_time(prof, s.p, s.c, w, s.p / s.c, comm);
  const double setup_scatter =
      r2 * scatter_sync_time(prof, s.p, s.c, w / double(s.c), s.p / s.c, comm);
  const double gather_x = r2 * gather_time(prof, s.c, w, s.p / s.c);

  return finish(prof, s,
                {{"setup_bcast_u", setup_bcast},
                 {"setup_scatter_x", setup_scatter},
                 {"bcast_u_hoisted", double(s.r) * bcast_u},
                 {"dtrsm", iters * solves * trsm},
                 {"bcast_x", iters * solves * bcast_x},
                 {"overlap_update", workload_scale(merged, update_weight)},
                 {"final_dtrsm", solves * trsm},
                 {"gather_x", gather_x}});
}

Prediction predict(const MachineProfile& profile, const Scenario& s, const ModelOptions& opt) {
  if (s.algorithm == Algorithm::kCannon) {
    switch (s.variant) {
      case Variant::k2d: return predict_cannon_2d(profile, s, opt);
      case Variant::k2dOverlap: return predict_cannon_2d_ovlp(profile, s, opt);
      case Variant::k25d: return predict_cannon_25d(profile, s, opt);
      case Variant::k25dOverlap: return predict_cannon_25d_ovlp(profile, s, opt);
    }
  } else {
    switch (s.variant) {
      case Variant::k2d: return predict_trsm_2d(profile, s, opt);
      case Variant::k2dOverlap: return predict_trsm_2d_ovlp(profile, s, opt);
      case Variant::k25d: return predict_trsm_25d(profile, s, opt);
      case Variant::k25dOverlap: return predict_trsm_25d_ovlp(profile, s, opt);
    }
  }
  throw ModelError("unknown algorithm/variant");
}

}  // namespace perfmodel
