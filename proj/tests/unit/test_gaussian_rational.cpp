#include <doctest.h>

#include <random>

#include "nlsd/gaussian_rational.hpp"

using nlsd::GaussianRational;

TEST_CASE("arithmetic is exact") {
  const GaussianRational a(nlsd::BigRational(1, 3), nlsd::BigRational(-2, 5));
  const GaussianRational b(nlsd::BigRational(7, 2), 1);
  CHECK((a + b) - b == a);
  CHECK((a * b) / b == a);
  CHECK(GaussianRational::i() * GaussianRational::i() == GaussianRational(-1));
  CHECK((a * a.conj()).imag() == 0);
  CHECK((a * a.conj()).real() == a.norm());
}

TEST_CASE("(k - i)/(k + i) at k = 2 is (3 - 4i)/5") {
  const GaussianRational k(2);
  const GaussianRational v = (k - GaussianRational::i()) / (k + GaussianRational::i());
  CHECK(v == GaussianRational(nlsd::BigRational(3, 5), nlsd::BigRational(-4, 5)));
}

TEST_CASE("text round trip") {
  for (const char* s : {"0", "3", "-1/2", "1/3+2/7i", "0-5i", "-4/9-1i"}) {
    const GaussianRational g = GaussianRational::parse(s);
    CHECK(GaussianRational::parse(g.to_string()) == g);
  }
  CHECK_THROWS(GaussianRational::parse("abc"));
}

TEST_CASE("field axioms on seeded values") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> d(-9, 9);
  auto draw = [&] {
    return GaussianRational(nlsd::BigRational(d(rng), 1 + std::abs(d(rng))), nlsd::BigRational(d(rng), 1 + std::abs(d(rng))));
  };
  for (int n = 0; n < 50; ++n) {
    const auto x = draw(), y = draw(), z = draw();
    CHECK((x + y) * z == x * z + y * z);
    CHECK(x * y == y * x);
    if (!y.is_zero()) CHECK((x / y) * y == x);
    CHECK((x * y).conj() == x.conj() * y.conj());
  }
}
