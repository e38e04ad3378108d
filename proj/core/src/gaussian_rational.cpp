#include "nlsd/gaussian_rational.hpp"

#include <regex>

#include "nlsd/errors.hpp"

namespace nlsd {

std::complex<double> GaussianRational::to_complex() const {
  return {static_cast<double>(re_), static_cast<double>(im_)};
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  BigRational re = re_ * o.re_ - im_ * o.im_;
  BigRational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  const BigRational n = o.norm();
  if (n == 0) throw std::domain_error("GaussianRational: division by zero");
  *this *= o.conj();
  re_ /= n;
  im_ /= n;
  return *this;
}

std::string GaussianRational::to_string() const {
  std::string im = im_.str();
  if (im.front() != '-') im = "+" + im;
  return re_.str() + im + "i";
}

GaussianRational GaussianRational::parse(const std::string& text) {
  static const std::regex full(R"(^\s*([+-]?\d+(?:/\d+)?)([+-]\d+(?:/\d+)?)i\s*$)");
  static const std::regex real(R"(^\s*([+-]?\d+(?:/\d+)?)\s*$)");
  static const std::regex imag(R"(^\s*([+-]?\d+(?:/\d+)?)i\s*$)");
  auto part = [](std::string s) {
    if (s.front() == '+') s.erase(0, 1);
    return BigRational(s);
  };
  std::smatch m;
  if (std::regex_match(text, m, full)) return {part(m[1].str()), part(m[2].str())};
  if (std::regex_match(text, m, real)) return {part(m[1].str()), BigRational(0)};
  if (std::regex_match(text, m, imag)) return {BigRational(0), part(m[1].str())};
  throw ParseError("not a Gaussian rational: '" + text + "'");
}

}  // namespace nlsd
