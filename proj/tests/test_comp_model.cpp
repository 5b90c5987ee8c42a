#include <doctest.h>

#include "perfmodel/comp_model.hpp"
#include "perfmodel/errors.hpp"
#include "test_util.hpp"

using namespace perfmodel;

namespace {

MachineProfile kernels_profile() {
  MachineProfile p = testutil::stub_profile(1e-6, 1e-9);
  testutil::add_kernel_sample(p, "dgemm", 6, 1024, 0.1);
  testutil::add_kernel_sample(p, "dtrsm", 6, 512, 0.04);
  return p;
}

}  // namespace

TEST_CASE("square kernel time delegates to the profile curve") {
  MachineProfile p = kernels_profile();
  CHECK(square_kernel_time(p, "dgemm", 1024, 6) == 0.1);
  CHECK(square_kernel_time(p, "dgemm", 0, 6) == 0.0);
  CHECK(square_kernel_time(p, "dtrsm", 512, 5) == doctest::Approx(0.04 * 6.0 / 5.0));
  CHECK_THROWS_AS(square_kernel_time(p, "dsyrk", 64, 6), ModelError);
}

TEST_CASE("rectangular operations decompose into square calls") {
  MachineProfile p = kernels_profile();
  CHECK(rect_kernel_time(p, "dtrsm", 512, 512, 6) == square_kernel_time(p, "dtrsm", 512, 6));
  CHECK(rect_kernel_time(p, "dtrsm", 512, 2048, 6) ==
        doctest::Approx(4.0 * square_kernel_time(p, "dtrsm", 512, 6)));
  CHECK(rect_kernel_time(p, "dtrsm", 0, 2048, 6) == 0.0);
  // partial panels are charged as a full square call
  CHECK(rect_kernel_time(p, "dtrsm", 512, 1300, 6) ==
        doctest::Approx(3.0 * square_kernel_time(p, "dtrsm", 512, 6)));
  // symmetry in (rows, cols)
  CHECK(rect_kernel_time(p, "dgemm", 2048, 1024, 6) ==
        rect_kernel_time(p, "dgemm", 1024, 2048, 6));
  CHECK(rect_kernel_time(p, "dgemm", 1024, 3072, 6) >= square_kernel_time(p, "dgemm", 1024, 6));
}

TEST_CASE("workload scaling handles fractional expected counts") {
  CHECK(workload_scale(0.1, 1.0) == 0.1);
  CHECK(workload_scale(0.1, 0.0) == 0.0);
  CHECK(workload_scale(0.1, 1.5) == doctest::Approx(0.15));
  CHECK_THROWS_AS(workload_scale(0.1, -0.5), ModelError);
}
