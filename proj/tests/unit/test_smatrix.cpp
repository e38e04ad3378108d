#include <doctest.h>

#include "nlsd/smatrix.hpp"

using namespace nlsd;

namespace {
cd s_scalar(double k) { return (k - kI) / (k + kI); }
}  // namespace

TEST_CASE("bulk s block") {
  CHECK(std::abs(build_s_block({1, 1.0}, 2.0)(0, 0) - cd(0.6, -0.8)) < 1e-15);
  CHECK(max_abs(build_s_block({2, 0.7}, 0.0) + flip(2)) < 1e-15);
  CHECK(max_abs(build_s_block({2, 1.0}, 1e9) - CMatrix::Identity(4, 4)) < 1e-8);
  CHECK_THROWS_AS(build_s_block({2, 0.0}, 1.0), ParameterError);
  CHECK(max_abs(build_s_block({2, 0.0, true}, 1.0) - CMatrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("doubled layout") {
  const DoubledSMatrix S({1, 1.0});
  const CMatrix m = S.s12(3.0, 1.0);
  CHECK(max_abs(m - CMatrix(CVector{{s_scalar(2), s_scalar(4), s_scalar(-4), s_scalar(-2)}}.asDiagonal())) < 1e-15);

  const DoubledSMatrix S2({2, 0.6});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(max_abs(S2.block(a, b, 0.0, 0.0) + flip(2)) < 1e-15);
  CHECK(max_abs(S2.block(0, 0, 1.3, 0.4) - S2.block(1, 1, 0.4, 1.3)) < 1e-15);
}

TEST_CASE("unitarity and Yang-Baxter") {
  for (int N : {1, 2, 3})
    for (double g : {1.0, -1.0, 0.37}) {
      const DoubledSMatrix S({N, g});
      CHECK(check_unitarity(S, smatrix_samples(S, 100 + N, 50, 2)).max_residual < 1e-12);
      CHECK(check_yang_baxter(S, smatrix_samples(S, 200 + N, 20, 3)).max_residual < 1e-12);
    }
  const DoubledSMatrix S1({1, 1.0});
  CHECK(check_unitarity(S1, {{1.0, 0.0}}).max_residual < 1e-12);
  CHECK(check_yang_baxter(S1, smatrix_samples(S1, 3, 10, 3)).max_residual < 1e-14);
  const DoubledSMatrix S2({2, 1.0});
  CHECK(check_yang_baxter(S2, {{0.8, 0.8, 0.8}}).max_residual < 1e-12);
  const DoubledSMatrix F({2, 0.0, true});
  CHECK(check_unitarity(F, smatrix_samples(F, 4, 10, 2)).max_residual == 0.0);
}

TEST_CASE("corrupted layout is caught") {
  const DoubledSMatrix S({2, 1.0}, BlockRule::corrupted);
  CHECK(check_unitarity(S, smatrix_samples(S, 7, 20, 2)).max_residual > 1e-3);
}

TEST_CASE("reports carry the worst sample") {
  const DoubledSMatrix S({2, 1.0}, BlockRule::corrupted);
  const auto samples = smatrix_samples(S, 8, 10, 2);
  const auto r = check_unitarity(S, samples);
  CHECK(r.n_samples == 10);
  CHECK(r.worst_sample.size() == 2);
  CHECK(r.identity_name == "unitarity");
}

TEST_CASE("sampling is seeded") {
  CHECK(draw_samples(42, 5, 2) == draw_samples(42, 5, 2));
  CHECK(draw_samples(42, 5, 2) != draw_samples(43, 5, 2));
}
