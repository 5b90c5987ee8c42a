#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#ifndef PERFMODEL_CLI_PATH
#error "PERFMODEL_CLI_PATH must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

// runs the CLI with stderr folded into the captured stream when asked
CmdResult run_cli(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(PERFMODEL_CLI_PATH) + " " + args +
                          (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) res.output.append(buf, got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("perfmodel-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int count_lines(const std::string& text) {
  int n = 0;
  for (char ch : text)
    if (ch == '\n') ++n;
  return n;
}

std::string csv_field(const std::string& line, int index) {
  std::istringstream in(line);
  std::string field;
  for (int i = 0; i <= index; ++i)
    if (!std::getline(in, field, ',')) return {};
  return field;
}

std::string second_line(const std::string& text) {
  std::istringstream in(text);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  return second;
}

}  // namespace

TEST_CASE("cli round trip: gen-profile, validate, predict, trace, rank") {
  TempDir tmp;
  const std::string profile = tmp.file("synth.json");

  REQUIRE(run_cli("gen-profile --out " + profile).exit_code == 0);
  auto validated = run_cli("validate-profile --profile " + profile);
  CHECK(validated.exit_code == 0);
  CHECK(validated.output.rfind("ok:", 0) == 0);

  SUBCASE("predict text output") {
    auto res = run_cli("predict --profile " + profile +
                       " --algo cannon --variant 2d --n 4096 --p 64 --t 6");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("total_s:") != std::string::npos);
    CHECK(res.output.find("percent_peak:") != std::string::npos);
    CHECK(res.output.find("shift_col") != std::string::npos);
  }

  SUBCASE("predict csv is a header plus one row") {
    auto res = run_cli("predict --profile " + profile +
                       " --algo cannon --variant 2d --n 4096 --p 64 --t 6 --format csv");
    CHECK(res.exit_code == 0);
    CHECK(count_lines(res.output) == 2);
    CHECK(res.output.rfind("algorithm,variant,n,p,c,r,t,total_s,percent_peak", 0) == 0);
  }

  SUBCASE("invalid scenarios exit 1 and name the constraint") {
    auto res = run_cli("predict --profile " + profile +
                           " --algo cannon --variant 2d --n 4096 --p 60 --t 6",
                       /*merge_stderr=*/true);
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("error:") != std::string::npos);
    CHECK(res.output.find("perfect square") != std::string::npos);
  }

  SUBCASE("missing profile file exits 2") {
    auto res = run_cli("predict --profile " + tmp.file("nope.json") +
                       " --algo cannon --variant 2d --n 4096 --p 64 --t 6");
    CHECK(res.exit_code == 2);
  }

  SUBCASE("trace rows match the schedule and the footer matches predict") {
    auto trace = run_cli("trace --profile " + profile +
                         " --algo cannon --variant 2d --n 4096 --p 4 --t 6");
    CHECK(trace.exit_code == 0);
    CHECK(count_lines(trace.output) == 8);  // header + 6 steps + footer

    std::istringstream in(trace.output);
    std::string line, last;
    while (std::getline(in, line)) last = line;
    REQUIRE(last.rfind(",total,,", 0) == 0);
    const double footer_total = std::stod(last.substr(8));

    auto pred = run_cli("predict --profile " + profile +
                        " --algo cannon --variant 2d --n 4096 --p 4 --t 6 --format csv");
    const double predict_total = std::stod(csv_field(second_line(pred.output), 7));
    CHECK(footer_total == doctest::Approx(predict_total).epsilon(1e-5));
  }

  SUBCASE("rank cells agree with predict and runs are bit-identical") {
    const std::string args =
        "rank --profile " + profile + " --algo cannon --n 4096 --p 16,64 --t 6 --format csv";
    auto first = run_cli(args);
    auto second = run_cli(args);
    CHECK(first.exit_code == 0);
    CHECK(first.output == second.output);  // determinism, bit for bit

    // rows: algorithm,n,p,variant,c,total_s,percent_peak,best
    std::istringstream in(first.output);
    std::string line;
    std::getline(in, line);  // header
    int rows = 0, winners = 0;
    while (std::getline(in, line)) {
      ++rows;
      if (csv_field(line, 7) == "1") ++winners;
      auto pred = run_cli("predict --profile " + profile + " --algo " + csv_field(line, 0) +
                          " --variant " + csv_field(line, 3) + " --n " + csv_field(line, 1) +
                          " --p " + csv_field(line, 2) + " --c " + csv_field(line, 4) +
                          " --t 6 --format csv");
      REQUIRE(pred.exit_code == 0);
      CHECK(csv_field(second_line(pred.output), 7) == csv_field(line, 5));
    }
    CHECK(rows == 8);     // 2 cells x 4 variants
    CHECK(winners == 2);  // exactly one winner per cell
  }

  SUBCASE("extrapolate writes a profile that reloads, original untouched") {
    const std::string out = tmp.file("extr.json");
    std::string original;
    {
      std::ifstream in(profile);
      std::stringstream ss;
      ss << in.rdbuf();
      original = ss.str();
    }
    auto res = run_cli("extrapolate --profile " + profile + " --p 262144 --degree 1 --out " + out);
    CHECK(res.exit_code == 0);
    {
      std::ifstream in(profile);
      std::stringstream ss;
      ss << in.rdbuf();
      CHECK(ss.str() == original);
    }
    CHECK(run_cli("validate-profile --profile " + out).exit_code == 0);

    auto bad = run_cli(
        "extrapolate --profile " + profile + " --p 1024 --out " + tmp.file("bad.json"),
        /*merge_stderr=*/true);
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("not beyond sampled range") != std::string::npos);
  }

  SUBCASE("gen-profile writes to stdout when no path is given") {
    auto res = run_cli("gen-profile");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("\"calib_max\"") != std::string::npos);
  }
}

TEST_CASE("rank with negligible communication keeps all threads on compute") {
  TempDir tmp;
  const std::string profile = tmp.file("nocomm.json");
  {
    std::ofstream out(profile);
    out << R"({
      "name": "nocomm",
      "latency_s": 1e-300,
      "inv_bandwidth_s_per_word": 1e-300,
      "peak_flops_per_core": 8.4e9,
      "cores_per_process": 6,
      "kernels": [
        {"kernel": "dgemm", "threads": 6, "samples": [[64, 0.01], [128, 0.08], [256, 0.64]]},
        {"kernel": "dtrsm", "threads": 6, "samples": [[64, 0.005], [128, 0.04], [256, 0.32]]}
      ],
      "calib_avg": [[1, 1.0]],
      "calib_max": [[1, 1, 1.0]]
    })";
  }
  // overlap buys nothing without communication; for TRSM it even costs a
  // compute thread, so the plain 2d variant wins both rankings
  for (const char* algo : {"cannon", "trsm"}) {
    auto res = run_cli("rank --profile " + profile + " --algo " + std::string(algo) +
                       " --n 512 --p 16 --t 6 --format csv");
    REQUIRE(res.exit_code == 0);
    std::istringstream in(res.output);
    std::string line, winner;
    std::getline(in, line);
    while (std::getline(in, line))
      if (csv_field(line, 7) == "1") winner = csv_field(line, 3);
    CHECK(winner == "2d");
  }
}
