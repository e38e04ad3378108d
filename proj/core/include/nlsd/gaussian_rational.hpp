#pragma once

#include <complex>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace nlsd {

using BigRational = boost::multiprecision::cpp_rational;

/// Exact complex number p + q i with arbitrary-precision rational parts.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long long re) : re_(re) {}  // NOLINT: implicit from integers
  GaussianRational(BigRational re, BigRational im = 0) : re_(std::move(re)), im_(std::move(im)) {}

  static GaussianRational i() { return {0, 1}; }
  static GaussianRational fraction(long long p, long long q) { return {BigRational(p, q)}; }

  const BigRational& real() const { return re_; }
  const BigRational& imag() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  GaussianRational conj() const { return {re_, -im_}; }
  BigRational norm() const { return re_ * re_ + im_ * im_; }
  std::complex<double> to_complex() const;

  GaussianRational operator-() const { return {-re_, -im_}; }
  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// "p/q+r/s i" form; parts without denominators print as integers.
  std::string to_string() const;
  static GaussianRational parse(const std::string& text);

 private:
  BigRational re_{0};
  BigRational im_{0};
};

}  // namespace nlsd
