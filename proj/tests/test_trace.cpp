#include <sstream>

#include <doctest.h>

#include "perfmodel/algo_model.hpp"
#include "perfmodel/step_trace.hpp"
#include "test_util.hpp"

using namespace perfmodel;

namespace {

Scenario cannon_scenario(Variant v, std::int64_t n, std::int64_t p, std::int64_t c) {
  Scenario s;
  s.algorithm = Algorithm::kCannon;
  s.variant = v;
  s.n = n;
  s.p = p;
  s.c = c;
  s.t = 6;
  return s;
}

}  // namespace

TEST_CASE("cannon 2d trace enumerates sqrt(p) iterations of three steps") {
  MachineProfile p = testutil::stub_profile(0.0, 1.0);
  testutil::add_kernel_sample(p, "dgemm", 6, 2, 10.0);
  StepTrace t = trace_scenario(p, cannon_scenario(Variant::k2d, 4, 4, 1));
  REQUIRE(t.steps.size() == 6);  // 2 iterations x (2 shifts + dgemm)
  CHECK(t.steps[0].label == "shift_row");
  CHECK(t.steps[0].kind == StepKind::kComm);
  CHECK(t.steps[2].label == "dgemm");
  CHECK(t.steps[2].kind == StepKind::kCompute);
  CHECK(t.total_s == doctest::Approx(36.0));
}

TEST_CASE("reduce expands into log2(q) halving steps plus log2(q) gather steps") {
  MachineProfile p = testutil::stub_profile(0.0, 1.0);
  StepTrace t = trace_collective(p, CollectiveKind::kReduce, 64, 4, 4.0, 1);
  REQUIRE(t.steps.size() == 4);  // 2 reduce-scatter + 2 gather
  CHECK(t.steps[0].label == "redsca[0]");
  CHECK(t.steps[1].label == "redsca_sync");
  CHECK(t.steps[2].label == "gather[0]");
  CHECK(t.steps[3].label == "gather[1]");
  CHECK(t.total_s == doctest::Approx(27.0));
}

TEST_CASE("overlap regions appear as merge steps carrying their branches") {
  MachineProfile p = testutil::stub_profile(0.0, 1.0);
  testutil::add_kernel_sample(p, "dgemm", 6, 2, 10.0);
  StepTrace t = trace_scenario(p, cannon_scenario(Variant::k2dOverlap, 4, 4, 1));
  REQUIRE(t.steps.size() == 4);  // first shifts + dgemm + one merge
  const TraceStep& merge = t.steps.back();
  CHECK(merge.kind == StepKind::kOverlapMerge);
  REQUIRE(merge.branches.size() == 2);
  CHECK(merge.seconds == doctest::Approx(10.0));  // max(8, 10)
  CHECK(merge.branches[0].seconds == doctest::Approx(8.0));
  CHECK(merge.branches[1].seconds == doctest::Approx(10.0));
  CHECK(t.total_s == doctest::Approx(28.0));
}

TEST_CASE("trsm 2d trace has the hand-counted step structure") {
  MachineProfile p = testutil::stub_profile(0.5, 0.0);
  testutil::add_kernel_sample(p, "dtrsm", 6, 64, 1.0);
  testutil::add_kernel_sample(p, "dgemm", 6, 64, 1.0);
  Scenario s;
  s.algorithm = Algorithm::kTrsm;
  s.variant = Variant::k2d;
  s.n = 128;
  s.p = 4;
  s.t = 6;
  StepTrace t = trace_scenario(p, s);
  // per iteration: bcast_u (2 stages) + dtrsm + bcast_x (2 stages) + update
  // (absent on the last iteration); tail: final bcast_u (2) + final dtrsm
  CHECK(t.steps.size() == 14);
  CHECK(t.total_s == doctest::Approx(8.0));
}

TEST_CASE("labels are unique per iteration") {
  testutil::Rng rng(19);
  MachineProfile p = testutil::random_profile(rng);
  Scenario s;
  s.algorithm = Algorithm::kTrsm;
  s.variant = Variant::k25d;
  s.n = 512;
  s.p = 16;
  s.c = 4;
  s.r = 2;
  s.t = 6;
  StepTrace t = trace_scenario(p, s);
  for (std::size_t i = 0; i < t.steps.size(); ++i)
    for (std::size_t j = i + 1; j < t.steps.size(); ++j)
      CHECK((t.steps[i].iteration != t.steps[j].iteration ||
             t.steps[i].label != t.steps[j].label));
}

TEST_CASE("csv export: header, one row per step, footer with the total") {
  MachineProfile p = testutil::stub_profile(0.0, 1.0);
  testutil::add_kernel_sample(p, "dgemm", 6, 2, 10.0);
  StepTrace t = trace_scenario(p, cannon_scenario(Variant::k2d, 4, 4, 1));
  std::ostringstream out;
  write_trace_csv(t, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,label,kind,seconds");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    last = line;
    ++rows;
  }
  CHECK(rows == 7);  // 6 steps + footer
  CHECK(last.substr(0, 8) == ",total,,");
  CHECK(std::stod(last.substr(8)) == doctest::Approx(t.total_s).epsilon(1e-15));
}

TEST_CASE("trace totals equal closed forms across all variants") {
  testutil::Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    MachineProfile p = testutil::random_profile(rng);
    const std::int64_t g = std::int64_t(1) << rng.uniform(1, 3);
    const std::int64_t c = std::int64_t(1) << rng.uniform(0, 2);
    const std::int64_t r = std::int64_t(1) << rng.uniform(0, 2);
    const std::int64_t bs = std::int64_t(1) << rng.uniform(4, 7);
    const int t = int(rng.uniform(2, 8));
    for (Algorithm a : {Algorithm::kCannon, Algorithm::kTrsm}) {
      for (Variant v : {Variant::k2d, Variant::k2dOverlap, Variant::k25d, Variant::k25dOverlap}) {
        Scenario s;
        s.algorithm = a;
        s.variant = v;
        s.c = variant_is_25d(v) ? c : 1;
        s.r = a == Algorithm::kTrsm ? r : 1;
        s.p = s.c * g * g;
        s.n = bs * s.r * g;
        s.t = t;
        const double closed = predict(p, s).total_s;
        const double oracle = trace_scenario(p, s).total_s;
        CHECK(closed == doctest::Approx(oracle).epsilon(1e-12));
      }
    }
  }
}
