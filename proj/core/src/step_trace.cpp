#include "perfmodel/step_trace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "perfmodel/errors.hpp"

namespace perfmodel {

std::string_view step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::kComm: return "comm";
    case StepKind::kCompute: return "compute";
    case StepKind::kOverlapMerge: return "overlap-merge";
  }
  return "?";
}

namespace {

// Expands the log2-structured collectives into one step per stage, costed
// straight off the profile lookups. Shared by the scenario tracer and the
// isolated-collective traces; deliberately does not call the closed-form
// comm model.
class CollectiveExpander {
 public:
  CollectiveExpander(const MachineProfile& prof, std::int64_t processes, int threads,
                     CommOptions::FinalStepWords final_step_words, std::vector<TraceStep>* sink)
      : prof_(prof),
        processes_(processes),
        threads_(threads),
        final_step_words_(final_step_words),
        sink_(sink) {}

  double ideal(double words) const {
    return prof_.latency_s + prof_.inv_bandwidth_s_per_word * words;
  }

  static int stages(std::int64_t q) {
    if (q < 1 || !std::has_single_bit(std::uint64_t(q)))
      throw ModelError("collective participant count must be a power of two, got " +
                       std::to_string(q));
    return std::countr_zero(std::uint64_t(q));
  }

  double gather(std::int64_t iter, const std::string& prefix, std::int64_t q, double w,
                std::int64_t d, double weight, bool emit = true) {
    double sum = 0.0;
    for (int i = 0; i < stages(q); ++i) {
      const double sec = weight * prof_.calibration_avg(step_distance(d, i)) *
                         ideal((w / double(q)) * double(std::int64_t(1) << i));
      if (emit) add(iter, prefix + "[" + std::to_string(i) + "]", sec);
      sum += sec;
    }
    return sum;
  }

  double scatter_like(std::int64_t iter, const std::string& prefix, std::int64_t q, double w,
                      std::int64_t d, double weight, bool emit = true) {
    const int n = stages(q);
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      const double sec = weight * prof_.calibration_avg(step_distance(d, i)) *
                         ideal(w * double(q) / double(std::int64_t(1) << i));
      if (emit) add(iter, prefix + "[" + std::to_string(i) + "]", sec);
      sum += sec;
    }
    const double sec = weight * prof_.calibration_max(processes_, step_distance(d, n - 1)) *
                       ideal(final_words(q, w));
    if (emit) add(iter, prefix + "_sync", sec);
    return sum + sec;
  }

  double gather_sync(std::int64_t iter, const std::string& prefix, std::int64_t q, double w,
                     std::int64_t d, double weight, bool emit = true) {
    const int n = stages(q);
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      const double sec = weight * prof_.calibration_avg(step_distance(d, i)) *
                         ideal((w / double(q)) * double(std::int64_t(1) << i));
      if (emit) add(iter, prefix + "[" + std::to_string(i) + "]", sec);
      sum += sec;
    }
    const double sec = weight * prof_.calibration_max(processes_, step_distance(d, n - 1)) *
                       ideal((w / double(q)) * double(std::int64_t(1) << (n - 1)));
    if (emit) add(iter, prefix + "_sync", sec);
    return sum + sec;
  }

  double bcast(std::int64_t iter, const std::string& prefix, std::int64_t q, double w,
               std::int64_t d, double weight, bool emit = true) {
    return scatter_like(iter, prefix + "/scatter", q, w, d, weight, emit) +
           gather(iter, prefix + "/allgather", q, w, d, weight, emit);
  }

  double bcast_sync(std::int64_t iter, const std::string& prefix, std::int64_t q, double w,
                    std::int64_t d, double weight, bool emit = true) {
    return scatter_like(iter, prefix + "/scatter", q, w, d, weight, emit) +
           gather_sync(iter, prefix + "/allgather", q, w, d, weight, emit);
  }

 private:
  static std::int64_t step_distance(std::int64_t d, int i) {
    return (std::int64_t(1) << i) * d;
  }

  double final_words(std::int64_t q, double w) const {
    const double num = final_step_words_ == CommOptions::FinalStepWords::kThreads
                           ? double(threads_)
                           : double(q);
    return w * num / double(std::int64_t(1) << (stages(q) - 1));
  }

  void add(std::int64_t iter, std::string label, double seconds) {
    if (sink_) sink_->push_back({iter, std::move(label), StepKind::kComm, seconds, {}});
  }

  const MachineProfile& prof_;
  std::int64_t processes_;
  int threads_;
  CommOptions::FinalStepWords final_step_words_;
  std::vector<TraceStep>* sink_;
};

// Literal event-by-event walk of one algorithm schedule.
class Tracer {
 public:
  Tracer(const MachineProfile& prof, const Scenario& s, const ModelOptions& opt)
      : prof_(prof), s_(s), opt_(opt),
        coll_(prof, s.p, s.t, opt.final_step_words, &steps_) {}

  StepTrace run() {
    switch (s_.algorithm) {
      case Algorithm::kCannon: cannon(); break;
      case Algorithm::kTrsm: trsm(); break;
    }
    StepTrace out;
    out.steps = std::move(steps_);
    for (const auto& st : out.steps) out.total_s += st.seconds;
    return out;
  }

 private:
  double ideal(double words) const { return coll_.ideal(words); }

  void add(std::int64_t iter, std::string label, StepKind kind, double seconds) {
    steps_.push_back({iter, std::move(label), kind, seconds, {}});
  }

  void add_merge(std::int64_t iter, std::string label, double weight, std::string comm_label,
                 double comm_seconds, std::string compute_label, double compute_seconds) {
    TraceStep st;
    st.iteration = iter;
    st.label = std::move(label);
    st.kind = StepKind::kOverlapMerge;
    st.branches.push_back({iter, std::move(comm_label), StepKind::kComm, comm_seconds, {}});
    st.branches.push_back(
        {iter, std::move(compute_label), StepKind::kCompute, compute_seconds, {}});
    st.seconds = weight * std::max(comm_seconds, compute_seconds);
    steps_.push_back(std::move(st));
  }

  void cannon() {
    const std::int64_t g = s_.grid_dim();
    const std::int64_t bs = s_.block_dim();
    const double w = double(bs) * double(bs);
    const double gemm = prof_.kernel_time("dgemm", bs, s_.t);
    const bool overlap = variant_is_overlap(s_.variant);

    if (variant_is_25d(s_.variant)) {
      const double shift_row = prof_.calibration_avg(1) * ideal(w);
      const double shift_col = prof_.calibration_avg(g) * ideal(w);
      if (s_.c > 1) {
        const std::int64_t repl_d = (s_.c - 1) * (s_.p / s_.c);
        const double repl = prof_.calibration_max(s_.p, repl_d) * ideal(w);
        add(-1, "replicate_a", StepKind::kComm, repl);
        add(-1, "replicate_b", StepKind::kComm, repl);
      } else if (s_.p > 1) {
        add(-1, "initial_shift_row", StepKind::kComm, shift_row);
        add(-1, "initial_shift_col", StepKind::kComm, shift_col);
      }
      for (std::int64_t k = 0; k + 1 < g; ++k) {
        if (overlap) {
          add_merge(k, "overlap", 1.0, "shift_pair", shift_row + shift_col, "dgemm", gemm);
        } else {
          add(k, "shift_row", StepKind::kComm, shift_row);
          add(k, "shift_col", StepKind::kComm, shift_col);
          add(k, "dgemm", StepKind::kCompute, gemm);
        }
      }
      add(g - 1, "final_dgemm", StepKind::kCompute, gemm);
      coll_.scatter_like(g - 1, "reduce/redsca", s_.c, w, s_.p / s_.c, 1.0);
      coll_.gather(g - 1, "reduce/gather", s_.c, w, s_.p / s_.c, 1.0);
      return;
    }

    const double shift_row = s_.p > 1 ? prof_.calibration_max(s_.p, 1) * ideal(w) : 0.0;
    const double shift_col = s_.p > 1 ? prof_.calibration_max(s_.p, g) * ideal(w) : 0.0;
    if (!overlap) {
      for (std::int64_t k = 0; k < g; ++k) {
        if (s_.p > 1) {
          add(k, "shift_row", StepKind::kComm, shift_row);
          add(k, "shift_col", StepKind::kComm, shift_col);
        }
        add(k, "dgemm", StepKind::kCompute, gemm);
      }
      return;
    }
    if (s_.p > 1) {
      add(0, "shift_row", StepKind::kComm, shift_row);
      add(0, "shift_col", StepKind::kComm, shift_col);
    }
    add(0, "dgemm", StepKind::kCompute, gemm);
    for (std::int64_t k = 1; k < g; ++k)
      add_merge(k, "overlap", 1.0, "shift_pair", shift_row + shift_col, "dgemm", gemm);
  }

  void trsm() {
    const std::int64_t g = s_.grid_dim();
    const std::int64_t bs = s_.block_dim();
    const double w = double(bs) * double(bs);
    const std::int64_t iters = s_.r * g;
    const bool overlap = variant_is_overlap(s_.variant);
    const bool is_25d = variant_is_25d(s_.variant);
    const int kernel_threads = overlap ? s_.t - 1 : s_.t;
    const double trsm_t = prof_.kernel_time("dtrsm", bs, kernel_threads);
    const double gemm_t = prof_.kernel_time("dgemm", bs, kernel_threads);
    const double solves = double(s_.r) / double(s_.c);
    // the 2.5D equation folds the update into the per-solve factor; 2D keeps it outside
    const double update_mult = is_25d ? solves : 1.0;
    const double r2 = double(s_.r) * double(s_.r);

    std::int64_t qu = g;
    if (is_25d && !overlap &&
        opt_.trsm25d_bcast_group == ModelOptions::Trsm25dBcastGroup::kTotalGrid) {
      const auto full = std::int64_t(std::llround(std::sqrt(double(s_.p))));
      if (full * full != s_.p || (full > 1 && !std::has_single_bit(std::uint64_t(full))))
        throw ModelError("full-grid broadcast group needs sqrt(p) to be a power of two, p=" +
                         std::to_string(s_.p));
      qu = full;
    }

    if (is_25d) {
      coll_.bcast(-1, "setup_bcast_u", s_.c, w, s_.p / s_.c, r2 * 0.75);
      coll_.scatter_like(-1, "setup_scatter_x", s_.c, w / double(s_.c), s_.p / s_.c, r2);
    }
    if (overlap) coll_.bcast_sync(-1, "bcast_u_hoisted", g, w, g, double(s_.r));

    for (std::int64_t i = 0; i < iters; ++i) {
      const double u_weight = double(iters - i) / double(g);
      const double update_weight = double(iters - i - 1) / double(g);
      if (!overlap) coll_.bcast_sync(i, "bcast_u", qu, w, g, u_weight);
      add(i, "dtrsm", StepKind::kCompute, solves * trsm_t);
      coll_.bcast(i, "bcast_x", g, w, 1, solves);
      if (overlap) {
        if (update_weight > 0) {
          const double next_u = coll_.bcast_sync(i, "bcast_u_next", g, w, g, 1.0, /*emit=*/false);
          add_merge(i, "overlap_update", update_weight, "bcast_u_next", next_u, "update",
                    solves * gemm_t);
        }
      } else if (update_weight > 0) {
        add(i, "update", StepKind::kCompute, update_mult * update_weight * gemm_t);
      }
    }

    if (!overlap) coll_.bcast_sync(iters, "final_bcast_u", g, w, g, 1.0);
    add(iters, "final_dtrsm", StepKind::kCompute, solves * trsm_t);
    if (is_25d) coll_.gather(iters, "gather_x", s_.c, w, s_.p / s_.c, r2);
  }

  const MachineProfile& prof_;
  const Scenario& s_;
  const ModelOptions& opt_;
  std::vector<TraceStep> steps_;
  CollectiveExpander coll_;
};

}  // namespace

StepTrace trace_scenario(const MachineProfile& profile, const Scenario& scenario,
                         const ModelOptions& options) {
  validate_scenario(scenario);
  return Tracer(profile, scenario, options).run();
}

StepTrace trace_collective(const MachineProfile& profile, CollectiveKind kind,
                           std::int64_t processes, std::int64_t q, double words,
                           std::int64_t distance, const ModelOptions& options, int threads) {
  StepTrace out;
  CollectiveExpander coll(profile, processes, threads, options.final_step_words, &out.steps);
  switch (kind) {
    case CollectiveKind::kGather:
    case CollectiveKind::kAllGather:
      coll.gather(0, "gather", q, words, distance, 1.0);
      break;
    case CollectiveKind::kReduceScatterSync:
    case CollectiveKind::kScatterSync:
      coll.scatter_like(0, "redsca", q, words, distance, 1.0);
      break;
    case CollectiveKind::kAllGatherSync:
      coll.gather_sync(0, "allgather", q, words, distance, 1.0);
      break;
    case CollectiveKind::kReduce:
      coll.scatter_like(0, "redsca", q, words, distance, 1.0);
      coll.gather(0, "gather", q, words, distance, 1.0);
      break;
    case CollectiveKind::kBcast:
      coll.bcast(0, "bcast", q, words, distance, 1.0);
      break;
    case CollectiveKind::kBcastSync:
      coll.bcast_sync(0, "bcast", q, words, distance, 1.0);
      break;
  }
  for (const auto& st : out.steps) out.total_s += st.seconds;
  return out;
}

void write_trace_csv(const StepTrace& trace, std::ostream& out) {
  out << "iteration,label,kind,seconds\n";
  char buf[64];
  for (const auto& st : trace.steps) {
    std::snprintf(buf, sizeof(buf), "%.17g", st.seconds);
    out << st.iteration << ',' << st.label << ',' << step_kind_name(st.kind) << ',' << buf
        << '\n';
  }
  std::snprintf(buf, sizeof(buf), "%.17g", trace.total_s);
  out << ",total,," << buf << '\n';
}

}  // namespace perfmodel
