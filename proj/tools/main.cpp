// Command-line front end: profile management, single predictions, scenario
// sweeps with variant ranking, calibration extrapolation and trace dumps.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perfmodel/algo_model.hpp"
#include "perfmodel/errors.hpp"
#include "perfmodel/extrapolate.hpp"
#include "perfmodel/profile_io.hpp"
#include "perfmodel/step_trace.hpp"
#include "perfmodel/synthetic.hpp"

namespace {

using namespace perfmodel;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string fmt_seconds(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_percent(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  fn(out);
  if (!out) throw IoError("failed writing output file: " + path);
}

struct ScenarioFlags {
  std::string profile_path;
  std::string algo = "cannon";
  std::string variant = "2d";
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::int64_t c = 1;
  std::int64_t r = 1;
  int t = 1;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--profile", profile_path, "machine profile JSON")->required();
    cmd.add_option("--algo", algo, "algorithm")
        ->check(CLI::IsMember({"cannon", "trsm"}))
        ->required();
    cmd.add_option("--variant", variant, "algorithm variant")
        ->check(CLI::IsMember({"2d", "2d_ovlp", "25d", "25d_ovlp"}))
        ->required();
    cmd.add_option("--n", n, "matrix dimension")->required();
    cmd.add_option("--p", p, "total process count")->required();
    cmd.add_option("--c", c, "replication layer count");
    cmd.add_option("--r", r, "block-cyclic blocks per process per dimension");
    cmd.add_option("--t", t, "threads per process")->required();
  }

  Scenario scenario() const {
    Scenario s;
    s.algorithm = *parse_algorithm(algo);
    s.variant = *parse_variant(variant);
    s.n = n;
    s.p = p;
    s.c = c;
    s.r = r;
    s.t = t;
    return s;
  }
};

void print_prediction_text(std::ostream& out, const Scenario& s, const Prediction& pred) {
  out << "algorithm:    " << algorithm_name(s.algorithm) << '\n'
      << "variant:      " << variant_name(s.variant) << '\n'
      << "n=" << s.n << " p=" << s.p << " c=" << s.c << " r=" << s.r << " t=" << s.t << '\n'
      << "total_s:      " << fmt_seconds(pred.total_s) << '\n'
      << "percent_peak: " << fmt_percent(pred.percent_peak) << '\n'
      << "phases:\n";
  for (const auto& ph : pred.phases) {
    out << "  " << ph.label;
    for (std::size_t pad = ph.label.size(); pad < 18; ++pad) out << ' ';
    out << fmt_seconds(ph.seconds) << "  ("
        << fmt_percent(pred.total_s > 0 ? 100.0 * ph.seconds / pred.total_s : 0.0) << "%)\n";
  }
}

void print_prediction_csv(std::ostream& out, const Scenario& s, const Prediction& pred) {
  out << "algorithm,variant,n,p,c,r,t,total_s,percent_peak";
  for (const auto& ph : pred.phases) out << ",phase:" << ph.label;
  out << '\n';
  out << algorithm_name(s.algorithm) << ',' << variant_name(s.variant) << ',' << s.n << ','
      << s.p << ',' << s.c << ',' << s.r << ',' << s.t << ',' << fmt_seconds(pred.total_s)
      << ',' << fmt_percent(pred.percent_peak);
  for (const auto& ph : pred.phases) out << ',' << fmt_seconds(ph.seconds);
  out << '\n';
}

int cmd_predict(const ScenarioFlags& flags, const std::string& format,
                const std::string& out_path) {
  const MachineProfile profile = load_profile_file(flags.profile_path);
  const Scenario s = flags.scenario();
  const Prediction pred = predict(profile, s);
  with_output(out_path, [&](std::ostream& out) {
    if (format == "csv")
      print_prediction_csv(out, s, pred);
    else
      print_prediction_text(out, s, pred);
  });
  return kExitOk;
}

// ---- rank ----------------------------------------------------------------

struct RankCell {
  bool valid = false;
  std::int64_t c = 1;  // chosen layer count for the 2.5D variants
  double total_s = 0.0;
  double percent_peak = 0.0;
};

struct RankRow {
  std::int64_t n = 0;
  std::int64_t p = 0;
  RankCell cells[4];  // indexed in variant order: 2d, 2d_ovlp, 25d, 25d_ovlp
  int winner = -1;    // strictly-best time; the lower-memory variant wins ties
};

constexpr Variant kVariantOrder[4] = {Variant::k2d, Variant::k2dOverlap, Variant::k25d,
                                      Variant::k25dOverlap};

std::vector<std::int64_t> candidate_layers(const std::string& c_spec, std::int64_t p) {
  std::vector<std::int64_t> out;
  if (c_spec == "auto") {
    // genuine replication only: c=1 is the 2D algorithm, already ranked
    for (std::int64_t c = 2; c <= p; c *= 2) out.push_back(c);
    return out;
  }
  std::stringstream ss(c_spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (...) {
      throw ModelError("bad layer count '" + item + "' in --c");
    }
  }
  if (out.empty()) throw ModelError("empty --c list");
  return out;
}

RankRow rank_cell(const MachineProfile& profile, Algorithm algo, std::int64_t n, std::int64_t p,
                  const std::string& c_spec, std::int64_t r, int t, std::ostream& diag) {
  RankRow row;
  row.n = n;
  row.p = p;
  for (int vi = 0; vi < 4; ++vi) {
    const Variant variant = kVariantOrder[vi];
    Scenario s;
    s.algorithm = algo;
    s.variant = variant;
    s.n = n;
    s.p = p;
    s.r = algo == Algorithm::kCannon ? 1 : r;
    s.t = t;
    RankCell& cell = row.cells[vi];
    const auto layers = variant_is_25d(variant) ? candidate_layers(c_spec, p)
                                                : std::vector<std::int64_t>{1};
    for (std::int64_t c : layers) {
      s.c = c;
      const auto violations = scenario_violations(s);
      if (!violations.empty()) {
        if (!variant_is_25d(variant) || layers.size() == 1)
          diag << "skipped " << algorithm_name(algo) << '/' << variant_name(variant)
               << " n=" << n << " p=" << p << " c=" << c << ": " << violations.front() << '\n';
        continue;
      }
      const Prediction pred = predict(profile, s);
      if (!cell.valid || pred.total_s < cell.total_s) {
        cell.valid = true;
        cell.c = c;
        cell.total_s = pred.total_s;
        cell.percent_peak = pred.percent_peak;
      }
    }
    if (variant_is_25d(variant) && !cell.valid && layers.size() > 1)
      diag << "skipped " << algorithm_name(algo) << '/' << variant_name(variant) << " n=" << n
           << " p=" << p << ": no valid layer count\n";
  }
  for (int vi = 0; vi < 4; ++vi)
    if (row.cells[vi].valid &&
        (row.winner < 0 || row.cells[vi].total_s < row.cells[row.winner].total_s))
      row.winner = vi;
  return row;
}

int cmd_rank(const std::string& profile_path, const std::string& algo_name,
             const std::vector<std::int64_t>& ns, const std::vector<std::int64_t>& ps,
             const std::string& c_spec, std::int64_t r, int t, const std::string& format,
             const std::string& out_path) {
  const MachineProfile profile = load_profile_file(profile_path);
  const Algorithm algo = *parse_algorithm(algo_name);
  if (ns.empty() || ps.empty()) throw ModelError("--n and --p need at least one value");

  std::vector<RankRow> rows;
  for (std::int64_t n : ns)
    for (std::int64_t p : ps) rows.push_back(rank_cell(profile, algo, n, p, c_spec, r, t, std::cerr));

  with_output(out_path, [&](std::ostream& out) {
    if (format == "csv") {
      out << "algorithm,n,p,variant,c,total_s,percent_peak,best\n";
      for (const auto& row : rows)
        for (int vi = 0; vi < 4; ++vi) {
          if (!row.cells[vi].valid) continue;
          out << algorithm_name(algo) << ',' << row.n << ',' << row.p << ','
              << variant_name(kVariantOrder[vi]) << ',' << row.cells[vi].c << ','
              << fmt_seconds(row.cells[vi].total_s) << ','
              << fmt_percent(row.cells[vi].percent_peak) << ',' << (row.winner == vi ? 1 : 0)
              << '\n';
        }
      return;
    }
    out << "percent of machine peak (* marks the winner)\n";
    std::int64_t last_n = -1;
    char buf[48];
    for (const auto& row : rows) {
      if (row.n != last_n) {
        last_n = row.n;
        out << "\nalgorithm: " << algorithm_name(algo) << "  n=" << row.n << '\n';
        out << "         p          2d     2d_ovlp         25d    25d_ovlp\n";
      }
      std::snprintf(buf, sizeof(buf), "%10lld", static_cast<long long>(row.p));
      out << buf;
      for (int vi = 0; vi < 4; ++vi) {
        std::string cell = "-";
        if (row.cells[vi].valid) {
          cell = fmt_percent(row.cells[vi].percent_peak);
          if (variant_is_25d(kVariantOrder[vi]))
            cell += "(c=" + std::to_string(row.cells[vi].c) + ")";
          if (row.winner == vi) cell += "*";
        }
        std::snprintf(buf, sizeof(buf), "%12s", cell.c_str());
        out << buf;
      }
      out << '\n';
    }
  });
  return kExitOk;
}

int cmd_extrapolate(const std::string& profile_path, const std::vector<std::int64_t>& targets,
                    int degree, const std::string& out_path) {
  const MachineProfile profile = load_profile_file(profile_path);
  if (targets.empty()) throw ModelError("--p needs at least one target process count");

  const auto fits = fit_calibration_max(profile, degree);
  const auto sampled = profile.calib_max.process_counts();
  MachineProfile augmented = profile;
  for (std::int64_t target : targets) {
    if (target <= sampled.back())
      throw ModelError("target not beyond sampled range: p_target " + std::to_string(target) +
                       " <= max sampled p " + std::to_string(sampled.back()));
    for (const auto& [d, coeffs] : fits)
      augmented.calib_max.samples.push_back(
          {target, d, eval_calibration_fit(profile, fits, d, target)});
  }
  augmented.calib_max.sort();
  validate_profile(augmented);
  with_output(out_path, [&](std::ostream& out) { write_profile(augmented, out); });
  return kExitOk;
}

int cmd_trace(const ScenarioFlags& flags, const std::string& out_path) {
  const MachineProfile profile = load_profile_file(flags.profile_path);
  const StepTrace trace = trace_scenario(profile, flags.scenario());
  with_output(out_path, [&](std::ostream& out) { write_trace_csv(trace, out); });
  return kExitOk;
}

int cmd_gen_profile(const SyntheticProfileParams& params, const std::string& out_path) {
  const MachineProfile profile = gen_synthetic_profile(params);
  validate_profile(profile);
  with_output(out_path, [&](std::ostream& out) { write_profile(profile, out); });
  return kExitOk;
}

int cmd_validate(const std::string& profile_path) {
  const MachineProfile profile = load_profile_file(profile_path);
  std::cout << "ok: " << profile.name << " (" << profile.kernels.size() << " kernel curves, "
            << profile.calib_avg.samples.size() << " avg factors, "
            << profile.calib_max.samples.size() << " max factors)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analytic performance models for distributed dense linear algebra"};
  app.require_subcommand(1);

  auto* predict_cmd = app.add_subcommand("predict", "predict one scenario");
  ScenarioFlags predict_flags;
  predict_flags.add_to(*predict_cmd);
  std::string predict_format = "text", predict_out;
  predict_cmd->add_option("--format", predict_format, "output format")
      ->check(CLI::IsMember({"text", "csv"}));
  predict_cmd->add_option("--out", predict_out, "output path (default stdout)");

  auto* rank_cmd = app.add_subcommand("rank", "rank the four variants over an (n, p) sweep");
  std::string rank_profile, rank_algo, rank_c = "auto", rank_format = "text", rank_out;
  std::vector<std::int64_t> rank_n, rank_p;
  std::int64_t rank_r = 1;
  int rank_t = 1;
  rank_cmd->add_option("--profile", rank_profile, "machine profile JSON")->required();
  rank_cmd->add_option("--algo", rank_algo, "algorithm")
      ->check(CLI::IsMember({"cannon", "trsm"}))
      ->required();
  rank_cmd->add_option("--n", rank_n, "matrix dimensions")->required()->delimiter(',');
  rank_cmd->add_option("--p", rank_p, "process counts")->required()->delimiter(',');
  rank_cmd->add_option("--c", rank_c, "layer counts, or 'auto' for every valid divisor");
  rank_cmd->add_option("--r", rank_r, "blocks per process per dimension (TRSM)");
  rank_cmd->add_option("--t", rank_t, "threads per process")->required();
  rank_cmd->add_option("--format", rank_format, "output format")
      ->check(CLI::IsMember({"text", "csv"}));
  rank_cmd->add_option("--out", rank_out, "output path (default stdout)");

  auto* extr_cmd =
      app.add_subcommand("extrapolate", "extend the max-calibration table to larger machines");
  std::string extr_profile, extr_out;
  std::vector<std::int64_t> extr_p;
  int extr_degree = 2;
  extr_cmd->add_option("--profile", extr_profile, "machine profile JSON")->required();
  extr_cmd->add_option("--p", extr_p, "target process counts")->required()->delimiter(',');
  extr_cmd->add_option("--degree", extr_degree, "polynomial degree of the fit in log2(p)");
  extr_cmd->add_option("--out", extr_out, "output path (default stdout)");

  auto* trace_cmd = app.add_subcommand("trace", "dump the step-by-step schedule as CSV");
  ScenarioFlags trace_flags;
  trace_flags.add_to(*trace_cmd);
  std::string trace_out;
  trace_cmd->add_option("--out", trace_out, "output path (default stdout)");

  auto* gen_cmd = app.add_subcommand("gen-profile", "write a synthetic machine profile");
  SyntheticProfileParams gen;
  std::string gen_out;
  gen_cmd->add_option("--name", gen.name, "profile name");
  gen_cmd->add_option("--latency", gen.latency_s, "latency in seconds");
  gen_cmd->add_option("--beta", gen.inv_bandwidth_s_per_word, "seconds per 8-byte word");
  gen_cmd->add_option("--peak", gen.peak_flops_per_core, "peak flops per core");
  gen_cmd->add_option("--cores", gen.cores_per_process, "cores per process");
  gen_cmd->add_option("--threads", gen.threads, "thread count of the kernel curves");
  gen_cmd->add_option("--max-p", gen.max_processes, "largest process count in calib_max");
  gen_cmd->add_option("--max-d", gen.max_distance, "largest sampled distance");
  gen_cmd->add_option("--avg-slope", gen.avg_slope, "growth of the average factor per log2(d)");
  gen_cmd->add_option("--max-slope", gen.max_slope, "growth rate of the maximum factor");
  gen_cmd->add_option("--out", gen_out, "output path (default stdout)");

  auto* val_cmd = app.add_subcommand("validate-profile", "load and validate a profile");
  std::string val_profile;
  val_cmd->add_option("--profile", val_profile, "machine profile JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (predict_cmd->parsed()) return cmd_predict(predict_flags, predict_format, predict_out);
    if (rank_cmd->parsed())
      return cmd_rank(rank_profile, rank_algo, rank_n, rank_p, rank_c, rank_r, rank_t,
                      rank_format, rank_out);
    if (extr_cmd->parsed()) return cmd_extrapolate(extr_profile, extr_p, extr_degree, extr_out);
    if (trace_cmd->parsed()) return cmd_trace(trace_flags, trace_out);
    if (gen_cmd->parsed()) return cmd_gen_profile(gen, gen_out);
    if (val_cmd->parsed()) return cmd_validate(val_profile);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
