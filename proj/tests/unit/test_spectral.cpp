#include <doctest.h>

#include <cmath>
#include <random>

#include "nlsd/spectral.hpp"

using namespace nlsd;

namespace {

using GR = GaussianRational;
using EPoly = Polynomial<GR>;

ExactRational exact(std::vector<GR> num, std::vector<GR> den) { return ExactRational(EPoly(std::move(num)), EPoly(std::move(den))); }

const GR I = GR::i();

// (1 - i a k)/(1 + i a k)
ExactRational cayley(long long a) { return exact({1, -I * GR(a)}, {1, I * GR(a)}); }

NumericRational random_rational(std::mt19937_64& rng, int deg) {
  std::normal_distribution<double> nd;
  std::vector<cd> num, den;
  for (int i = 0; i <= deg; ++i) num.emplace_back(nd(rng), nd(rng));
  for (int i = 0; i <= deg; ++i) den.emplace_back(nd(rng), nd(rng));
  return NumericRational(Polynomial<cd>(num), Polynomial<cd>(den));
}

}  // namespace

TEST_CASE("evaluation") {
  const ExactRational f = exact({-I, 1}, {I, 1});
  CHECK(f.eval_exact(GR(2)) == GR(BigRational(3, 5), BigRational(-4, 5)));
  CHECK(std::abs(to_numeric(f)(2.0) - cd(0.6, -0.8)) < 1e-15);
  CHECK(ExactRational(GR(1)).eval_exact(GR(BigRational(7, 3))) == GR(1));
  const NumericRational pole(Polynomial<cd>(cd(1.0)), Polynomial<cd>(std::vector<cd>{kI, 1.0}));
  CHECK_THROWS_AS(pole(-kI), PoleError);
  CHECK_THROWS_AS(exact({1}, {I, 1}).eval_exact(-I), PoleError);
}

TEST_CASE("reflect") {
  CHECK(ExactRational::k().reflect() == ExactRational(EPoly(std::vector<GR>{0, -1})));
  const ExactRational k2(EPoly(std::vector<GR>{0, 0, 1}));
  CHECK(k2.reflect() == k2);
  const ExactRational f = cayley(3);
  CHECK(f.reflect() == exact({1, I * GR(3)}, {1, -I * GR(3)}));
  CHECK(f.reflect().reflect() == f);
}

TEST_CASE("conjugation on the real axis") {
  CHECK(ExactRational(EPoly(std::vector<GR>{0, I})).conj() == ExactRational(EPoly(std::vector<GR>{0, -I})));
  CHECK(exact({-I, 1}, {I, 1}).conj() == exact({I, 1}, {-I, 1}));
  CHECK(ExactRational(GR(3)).conj() == ExactRational(GR(3)));
}

TEST_CASE("Laurent coefficients of the Cayley factor") {
  const auto c = cayley(1).laurent(2);
  CHECK(c[0] == GR(-1));
  CHECK(c[1] == GR(0, -2));
  CHECK(c[2] == GR(2));

  // Independent oracle: long-double polynomial fit in 1/k over k in [50, 120].
  using ld = long double;
  using LMat = Eigen::Matrix<std::complex<ld>, Eigen::Dynamic, Eigen::Dynamic>;
  const int deg = 7;
  LMat V(deg + 1, deg + 1), y(deg + 1, 1);
  for (int r = 0; r <= deg; ++r) {
    const ld k = 50.0L + 10.0L * r, x = 1.0L / k;
    const std::complex<ld> z(0, k);
    y(r, 0) = (ld(1) - z) / (ld(1) + z);
    for (int j = 0; j <= deg; ++j) V(r, j) = std::pow(x, j);
  }
  const LMat fit = V.fullPivLu().solve(y);
  const auto c3 = cayley(1).laurent(3);
  for (int n = 0; n <= 3; ++n)
    CHECK(std::abs(std::complex<double>(fit(n, 0)) - c3[static_cast<std::size_t>(n)].to_complex()) < 1e-6);

  const auto one = ExactRational(GR(1)).laurent(4);
  CHECK(one[0] == GR(1));
  for (std::size_t n = 1; n < one.size(); ++n) CHECK(one[n] == GR(0));
  CHECK_THROWS_AS(ExactRational::k().laurent(2), DivergesAtInfinity);
  CHECK_THROWS_AS(SpectralScalar::k().laurent(2), DivergesAtInfinity);
}

TEST_CASE("cos and sin of theta0/k carry factorials") {
  const double th = 0.3;
  const SpectralScalar arg = SpectralScalar(th) / SpectralScalar::k();
  const auto c = cos(arg).laurent(8), s = sin(arg).laurent(8);
  double fact = 1.0;
  for (int n = 0; n <= 8; ++n) {
    if (n) fact *= n;
    const double sgn = (n / 2) % 2 ? -1.0 : 1.0;
    const double ce = n % 2 ? 0.0 : sgn * std::pow(th, n) / fact;
    const double se = n % 2 ? sgn * std::pow(th, n) / fact : 0.0;
    CHECK(std::abs(c[static_cast<std::size_t>(n)] - ce) < 1e-15);
    CHECK(std::abs(s[static_cast<std::size_t>(n)] - se) < 1e-15);
  }
  CHECK(std::abs(cos(arg)(2.0) - std::cos(0.15)) < 1e-15);
}

TEST_CASE("matrix helpers") {
  CHECK(max_abs(SMat::identity(2).kron(SMat::identity(3)).evaluate(1.7) - CMatrix::Identity(6, 6)) == 0.0);
  SMat d(2);
  d(0, 0) = SpectralScalar(kI) * SpectralScalar::k();
  d(1, 1) = SpectralScalar(-kI) * SpectralScalar::k();
  const CMatrix dd = d.dagger_real_axis().evaluate(0.8);
  CHECK(std::abs(dd(0, 0) - cd(0, -0.8)) < 1e-15);
  CHECK(std::abs(dd(1, 1) - cd(0, 0.8)) < 1e-15);
  SMat m(2);
  m(0, 1) = SpectralScalar(cayley(2));
  m(1, 0) = SpectralScalar::k();
  for (double k : {0.3, -1.1, 4.0}) CHECK(max_abs(m.reflect().reflect().evaluate(k) - m.evaluate(k)) == 0.0);
  CHECK_THROWS_AS(SMat(2) * SMat(3), DimensionMismatch);
}

TEST_CASE("rational algebra matches pointwise evaluation") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SpectralScalar f(random_rational(rng, 2)), g(random_rational(rng, 1));
    for (double k : {0.37, -2.2, 5.9}) {
      const cd fk = f(k), gk = g(k);
      const double s = 1.0 + std::abs(fk) * std::abs(gk);
      CHECK(std::abs((f * g)(k) - fk * gk) < 1e-9 * s);
      CHECK(std::abs((f + g)(k) - (fk + gk)) < 1e-9 * s);
      CHECK(std::abs((f / g)(k) - fk / gk) < 1e-9 * (1.0 + std::abs(fk / gk)));
      CHECK(std::abs(f.reflect()(k) - f(-k)) < 1e-12 * s);
      CHECK(std::abs(f.conj_real_axis()(k) - std::conj(fk)) < 1e-12 * s);
    }
  }
}

TEST_CASE("Laurent series of a product is the series product") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const SpectralScalar f(random_rational(rng, 2)), g(random_rational(rng, 2));
    const auto lhs = (f * g).laurent(5);
    const auto rhs = series::multiply(f.laurent(5), g.laurent(5));
    for (std::size_t n = 0; n < lhs.size(); ++n) CHECK(std::abs(lhs[n] - rhs[n]) < 1e-8 * (1.0 + std::abs(rhs[n])));
  }
}

TEST_CASE("text form") {
  const NumericRational f(Polynomial<cd>(std::vector<cd>{cd(1, -2), 0.5}), Polynomial<cd>(std::vector<cd>{2.0, 1.0}));
  const NumericRational g = NumericRational::parse(f.to_string());
  CHECK(g == f);
  const ExactRational e = cayley(5);
  CHECK(ExactRational::parse(e.to_string()) == e);
  CHECK_THROWS_AS(NumericRational::parse("1 2"), ParseError);
}
