#include <doctest.h>

#include <cmath>
#include <random>

#include "nlsd/breaking.hpp"

using namespace nlsd;

namespace {

const cd I = kI;
const double kPi = std::acos(-1.0);

std::vector<double> real_samples(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  std::vector<double> ks;
  while (static_cast<int>(ks.size()) < n) {
    const double k = u(rng);
    if (std::abs(k) > 1e-3) ks.push_back(k);
  }
  return ks;
}

BreakingParams diag_e(int N, double a) {
  BreakingParams bp;
  bp.N = N;
  bp.a_dil = a;
  bp.E = Eigen::VectorXi::Ones(N);
  bp.E(N - 1) = -1;
  return bp;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("lambda identities") {
  const BreakingParams bp = diag_e(2, 1.0);
  CHECK(max_abs(build_lambda(bp).evaluate(0.0) - CMatrix::Identity(2, 2)) < 1e-15);
  CHECK(max_abs(build_Lambda(bp).evaluate(0.0) - CMatrix::Identity(2, 2)) < 1e-15);
  const cd l22 = build_lambda(bp).evaluate(1.0)(1, 1);
  CHECK(std::abs(l22 * l22 - (1.0 - I) / (1.0 + I)) < 1e-15);
  CHECK(std::abs(l22 * l22 + I) < 1e-15);

  BreakingParams ident;
  ident.N = 2;
  ident.a_dil = 0.8;
  for (double k : {0.3, -2.0, 7.5}) CHECK(max_abs(build_lambda(ident).evaluate(k) - CMatrix::Identity(2, 2)) == 0.0);

  for (double a : {0.5, 1.0, 2.0})
    for (int N : {2, 3})
      for (std::uint64_t seed : {1u, 2u}) {
        BreakingParams p;
        p.N = N;
        p.a_dil = a;
        p.E = random_signs(N, seed);
        for (const auto& r : check_lambda(p, real_samples(seed, 50))) {
          CAPTURE(r.identity_name);
          CHECK(r.max_residual < 1e-12);
        }
      }

  BreakingParams inf = diag_e(2, 0.0);
  inf.a_dil = Dilation::infinity();
  CHECK_THROWS_AS(build_lambda(inf), InfinityCase);
}

TEST_CASE("dressed S-matrix") {
  const DoubledSMatrix S({2, 1.0});
  BreakingParams ident;
  ident.N = 2;
  ident.a_dil = 1.0;
  const DoubledSMatrix same = build_tilde_s(S, ident);
  for (auto [k1, k2] : {std::pair{2.0, 1.0}, {-0.4, 1.7}}) CHECK(max_abs(same.s12(k1, k2) - S.s12(k1, k2)) < 1e-15);

  const BreakingParams bp = diag_e(2, 1.0);
  const DoubledSMatrix St = build_tilde_s(S, bp);
  CHECK(check_unitarity(St, smatrix_samples(St, 4, 50, 2)).max_residual < 1e-12);
  CHECK(check_yang_baxter(St, smatrix_samples(St, 5, 10, 3)).max_residual < 1e-12);
  CHECK(max_abs(S.block(0, 0, 2.0, 1.0) - S.block(0, 0, 3.0, 2.0)) < 1e-15);
  CHECK(max_abs(St.block(0, 0, 2.0, 1.0) - St.block(0, 0, 3.0, 2.0)) > 1e-3);

  for (int N : {2, 3}) {
    BreakingParams p = diag_e(N, 0.5);
    p.M = random_unitary(N, 9);
    const DoubledSMatrix SN({N, 0.37});
    const DoubledSMatrix T = build_tilde_s(SN, p);
    CHECK(check_unitarity(T, smatrix_samples(T, 6, 20, 2)).max_residual < 1e-12);
    CHECK(check_yang_baxter(T, smatrix_samples(T, 7, 10, 3)).max_residual < 1e-12);
  }
}

TEST_CASE("Gamma for the rotation example") {
  const double a = 1.0;
  for (double k : {0.4, -1.5}) {
    const cd beta = (1.0 - I * a * k) / (1.0 + I * a * k);
    CHECK(max_abs(gamma_matrix(0.7, 0.0, a, k) - CMatrix(CVector{{1.0, beta}}.asDiagonal())) < 1e-15);
  }
  CHECK(max_abs(gamma_matrix(0.7, 0.4, a, 0.0) - CMatrix::Identity(2, 2)) < 1e-15);
  CMatrix expect(2, 2);
  expect << (1.0 - I) / 2.0, (-1.0 - I) / 2.0, (-1.0 - I) / 2.0, (1.0 - I) / 2.0;
  CHECK(max_abs(gamma_matrix(0.7, kPi / 4, 1.0, 1.0) - expect) < 1e-15);
  CHECK_THROWS_AS(gamma_matrix(0.7, 0.4, 2.0, cd(0.0, 0.5)), PoleError);

  // Gamma is M Lambda M^-1 of the breaking representation.
  const BreakingParams bp = rotation_example(0.7, 0.4, 0.8);
  const DefectPair dp = build_breaking_rep(bp);
  for (double k : {0.6, -2.2})
    CHECK(max_abs(dp.Rplus().evaluate(k) - std::cos(0.7) * gamma_matrix(0.7, 0.4, 0.8, k)) < 1e-15);
}

TEST_CASE("breaking representation satisfies the representation identities") {
  const BreakingParams bp = rotation_example(0.7, 0.4, 0.8);
  const DefectPair dp = build_breaking_rep(bp);
  const DoubledSMatrix S({2, 1.0});
  for (const auto& r : check_rep_constraints(dp, real_samples(3, 30))) CHECK(r.max_residual < 1e-12);
  for (const auto& r : check_rt_equations(dp, S, smatrix_samples(S, 3, 20, 2))) CHECK(r.max_residual < 1e-12);
}

TEST_CASE("tilde vacuum expectation values") {
  const double th = 0.7;
  const BreakingParams bp = rotation_example(th, 0.4, 0.8);
  const DefectPair dp = build_breaking_rep(bp);
  const auto ks = real_samples(11, 20);
  const TildeScalars v = tilde_vevs(dp, bp, ks);
  const DefectPair tilde = tilde_pair(dp, bp);
  for (double k : ks) {
    CHECK(std::abs(v.rho_plus(k) - std::cos(th)) < 1e-12);
    CHECK(std::abs(v.rho_minus(k) + std::cos(th)) < 1e-12);
    CHECK(std::abs(v.tau_plus(k) - std::sin(th)) < 1e-12);
    CHECK(std::abs(v.tau_minus(k) - std::sin(th)) < 1e-12);
    for (const CMatrix& m : {tilde.Rplus().evaluate(k), tilde.Rminus().evaluate(k), tilde.Tplus().evaluate(k),
                             tilde.Tminus().evaluate(k)}) {
      // Zero up to the rounding of M^-1 M.
      CHECK(std::abs(m(0, 1)) < 1e-15);
      CHECK(std::abs(m(1, 0)) < 1e-15);
    }
  }

  const BreakingParams half = rotation_example(kPi / 2, 0.4, 0.8);
  const TildeScalars h = tilde_vevs(build_breaking_rep(half), half, ks);
  for (double k : ks) {
    CHECK(std::abs(h.rho_plus(k)) < 1e-12);
    CHECK(std::abs(h.rho_minus(k)) < 1e-12);
    CHECK(std::abs(h.tau_plus(k) - 1.0) < 1e-12);
    CHECK(std::abs(h.tau_minus(k) - 1.0) < 1e-12);
  }

  // Mismatched dressing leaves a non-scalar block.
  const BreakingParams other = rotation_example(th, 1.1, 0.8);
  CHECK_THROWS_AS(tilde_vevs(dp, other, ks), NotScalar);

  // Plain data with M = I, E = I are their own tilde data.
  BreakingParams plain;
  plain.N = 2;
  plain.a_dil = 0.5;
  plain.rho_plus = 0.3;
  plain.rho_minus = 0.3;
  plain.tau_plus = 0.2;
  plain.tau_minus = 0.2;
  const DefectPair pp = build_breaking_rep(plain);
  const DefectPair pt = tilde_pair(pp, plain);
  for (double k : ks) CHECK(max_abs(pt.R(k) - pp.R(k)) < 1e-15);
}

TEST_CASE("undoing the dressing recovers the representation") {
  const BreakingParams bp = rotation_example(0.7, 0.4, 0.8);
  const DefectPair dp = build_breaking_rep(bp);
  const DefectPair back = untilde_pair(tilde_pair(dp, bp), bp);
  for (double k : real_samples(12, 20)) {
    CHECK(max_abs(back.R(k) - dp.R(k)) < 1e-12);
    CHECK(max_abs(back.T(k) - dp.T(k)) < 1e-12);
  }
}

TEST_CASE("reflection-only dressed data satisfy the reflection relation with the dressed S") {
  const BreakingParams bp = rotation_example(0.0, 0.4, 0.8);
  const DefectPair tilde = tilde_pair(build_breaking_rep(bp), bp);
  const DoubledSMatrix St = build_tilde_s(DoubledSMatrix({2, 1.0}), bp);
  for (const auto& r : check_rt_equations(tilde, St, smatrix_samples(St, 13, 20, 2))) {
    CAPTURE(r.identity_name);
    CHECK(r.max_residual < 1e-12);
  }
}

TEST_CASE("rotation example coefficients") {
  for (double th : {0.7, 1.2})
    for (double mu : {0.4, 1.0})
      for (double a : {0.8, 2.0}) {
        const BreakingParams bp = rotation_example(th, mu, a);
        const BreakingClassification c = expand_and_classify(build_breaking_rep(bp), 6);
        for (char kind : {'r', 't'})
          for (int sign : {1, -1})
            for (int n = 1; n <= 6; ++n)
              for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                  const GeneratorRecord* g = c.find(kind, sign, n, i, j);
                  REQUIRE(g != nullptr);
                  const cd printed = rotation_example_coefficient(kind, sign, n, i, j, th, mu, a);
                  CHECK(std::abs(g->vev_coefficient - printed) < 1e-10);
                  CHECK(g->broken);
                }
        // Independent oracle: beta = -1 + 2/(1 + iak) has k^-n coefficient -2 (i/a)^n.
        const double s2 = std::sin(mu) * std::sin(mu), c2 = std::cos(mu) * std::cos(mu), sc = std::sin(mu) * std::cos(mu);
        for (int n = 1; n <= 6; ++n) {
          const cd b = -2.0 * std::pow(I / a, n);
          const cd bm = -2.0 * std::pow(-I / a, n);
          CHECK(std::abs(c.find('r', 1, n, 0, 0)->vev_coefficient - std::cos(th) * s2 * b) < 1e-10);
          CHECK(std::abs(c.find('r', 1, n, 1, 1)->vev_coefficient - std::cos(th) * c2 * b) < 1e-10);
          CHECK(std::abs(c.find('r', 1, n, 0, 1)->vev_coefficient - std::cos(th) * sc * b) < 1e-10);
          CHECK(std::abs(c.find('r', -1, n, 0, 0)->vev_coefficient + std::cos(th) * s2 * bm) < 1e-10);
          CHECK(std::abs(c.find('t', -1, n, 1, 1)->vev_coefficient - std::sin(th) * c2 * bm) < 1e-10);
        }
        const BreakingClassification tc =
            expand_and_classify(tilde_pair(build_breaking_rep(bp), bp), 6, 1e-10, GeneratorBasis::tilde);
        CHECK(tc.broken().empty());
      }
  const BreakingClassification z = expand_and_classify(build_breaking_rep(rotation_example(0.7, 0.0, 1.0)), 4);
  CHECK_FALSE(z.find('r', 1, 2, 0, 1)->broken);
  CHECK_FALSE(z.find('r', 1, 2, 0, 0)->broken);
  CHECK(z.find('r', 1, 2, 1, 1)->broken);
}

TEST_CASE("constant data break nothing") {
  NLSDefectParams p;
  p.N = 2;
  p.alpha = std::polar(1.0, 0.3);
  const BreakingClassification c = expand_and_classify(build_nls_defect(p), 6);
  CHECK(c.broken().empty());
  CHECK(c.generators.size() == 2 * 2 * 6 * 4);
  BreakingParams k;
  k.N = 3;
  k.rho_plus = 0.6;
  k.rho_minus = 0.6;
  k.tau_plus = 0.8;
  k.tau_minus = 0.8;
  CHECK(expand_and_classify(build_breaking_rep(k), 4).broken().empty());
}

TEST_CASE("cos/sin example: coefficients are the Taylor coefficients") {
  for (double th : {0.3, 1.0}) {
    const BreakingClassification c = expand_and_classify(cos_sin_example(2, th), 6);
    for (int n = 1; n <= 6; ++n) {
      const double m = std::floor(n / 2.0);
      const double sgn = static_cast<int>(m) % 2 ? -1.0 : 1.0;
      const double r = n % 2 ? 0.0 : sgn * std::pow(th, n) / factorial(n);
      const double t = n % 2 ? sgn * std::pow(th, n) / factorial(n) : 0.0;
      for (int sign : {1, -1})
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(c.find('r', sign, n, i, j)->vev_coefficient - (i == j ? r : 0.0)) < 1e-12);
            CHECK(std::abs(c.find('t', sign, n, i, j)->vev_coefficient - (i == j ? t : 0.0)) < 1e-12);
            CHECK(c.find('r', sign, n, i, j)->broken == (i == j && n % 2 == 0));
            CHECK(c.find('t', sign, n, i, j)->broken == (i == j && n % 2 == 1));
          }
    }
    for (const auto& comb : c.combinations) {
      CAPTURE(comb.description);
      if (comb.description != "trace") CHECK_FALSE(comb.broken);
      else CHECK(comb.broken == ((comb.kind == 'r') == (comb.order % 2 == 0)));
    }
  }
}

// The closed form as printed has no factorials; kept as a faithful check.
TEST_CASE("cos/sin example: printed closed form" * doctest::should_fail()) {
  const double th = 0.3;
  const BreakingClassification c = expand_and_classify(cos_sin_example(2, th), 7);
  for (int n = 1; n <= 3; ++n) {
    const double sgn = n % 2 ? -1.0 : 1.0;
    CHECK(std::abs(c.find('r', 1, 2 * n, 0, 0)->vev_coefficient - sgn * std::pow(th, 2 * n)) < 1e-10);
    CHECK(std::abs(c.find('t', 1, 2 * n + 1, 0, 0)->vev_coefficient - sgn * std::pow(th, 2 * n + 1)) < 1e-10);
  }
}

TEST_CASE("generator labels") {
  GeneratorLabel l{'r', 1, 1, 0, 0, GeneratorBasis::plain};
  CHECK(l.to_string() == "r+^(1),11");
  l.basis = GeneratorBasis::tilde;
  l.sign = -1;
  l.kind = 't';
  l.order = 3;
  l.j = 1;
  CHECK(l.to_string() == "t~-^(3),12");
}
