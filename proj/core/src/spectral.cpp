#include "nlsd/spectral.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace nlsd {

std::string FieldTraits<cd>::format(const cd& x) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", x.real() == 0.0 ? 0.0 : x.real(), x.imag() == 0.0 ? 0.0 : x.imag());
  return buf;
}

cd FieldTraits<cd>::parse(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double re = std::strtod(begin, &end);
  if (end == begin) throw ParseError("not a complex number: '" + s + "'");
  const char* mid = end;
  if (*mid == '\0') return {re, 0.0};
  if (*mid != '+' && *mid != '-') throw ParseError("not a complex number: '" + s + "'");
  const double im = std::strtod(mid, &end);
  if (end == mid || *end != 'i' || *(end + 1) != '\0') throw ParseError("not a complex number: '" + s + "'");
  return {re, im};
}

NumericRational to_numeric(const ExactRational& r) {
  auto conv = [](const Polynomial<GaussianRational>& p) {
    std::vector<cd> c;
    c.reserve(p.coefficients().size());
    for (const auto& x : p.coefficients()) c.push_back(x.to_complex());
    return Polynomial<cd>(std::move(c));
  };
  return NumericRational(conv(r.numerator()), conv(r.denominator()));
}

// ---------------------------------------------------------------------------

namespace series {

Series add(const Series& a, const Series& b) {
  Series c(std::min(a.size(), b.size()));
  for (std::size_t n = 0; n < c.size(); ++n) c[n] = a[n] + b[n];
  return c;
}

Series multiply(const Series& a, const Series& b) {
  Series c(std::min(a.size(), b.size()), 0.0);
  for (std::size_t n = 0; n < c.size(); ++n)
    for (std::size_t j = 0; j <= n; ++j) c[n] += a[j] * b[n - j];
  return c;
}

Series scale(const Series& a, cd s) {
  Series c = a;
  for (auto& x : c) x *= s;
  return c;
}

Series divide(const Series& a, const Series& b) {
  const std::size_t len = std::min(a.size(), b.size());
  double bmax = 0.0;
  for (const auto& x : b) bmax = std::max(bmax, std::abs(x));
  std::size_t shift = 0;
  while (shift < len && std::abs(b[shift]) <= 1e-14 * bmax) ++shift;
  if (shift == len) throw DivergesAtInfinity("series division by a vanishing series");
  for (std::size_t n = 0; n < shift; ++n)
    if (std::abs(a[n]) > 1e-14 * std::max(bmax, 1.0)) throw DivergesAtInfinity("quotient grows at infinity");
  const std::size_t out_len = len - shift;
  Series c(out_len, 0.0);
  for (std::size_t n = 0; n < out_len; ++n) {
    cd acc = a[n + shift];
    for (std::size_t j = 1; j <= n; ++j) acc -= b[j + shift] * c[n - j];
    c[n] = acc / b[shift];
  }
  return c;
}

namespace {
// cos(b), sin(b) for a series b with vanishing constant term.
std::pair<Series, Series> cos_sin_nilpotent(const Series& b) {
  const std::size_t len = b.size();
  Series cs(len, 0.0), sn(len, 0.0);
  Series power(len, 0.0);
  if (len) power[0] = 1.0;
  double factorial = 1.0;
  for (std::size_t j = 0; j < len; ++j) {
    if (j > 0) {
      power = multiply(power, b);
      factorial *= static_cast<double>(j);
    }
    const cd term_scale = 1.0 / factorial;
    switch (j % 4) {
      case 0: for (std::size_t n = 0; n < len; ++n) cs[n] += power[n] * term_scale; break;
      case 1: for (std::size_t n = 0; n < len; ++n) sn[n] += power[n] * term_scale; break;
      case 2: for (std::size_t n = 0; n < len; ++n) cs[n] -= power[n] * term_scale; break;
      default: for (std::size_t n = 0; n < len; ++n) sn[n] -= power[n] * term_scale; break;
    }
  }
  return {cs, sn};
}
}  // namespace

Series cos(const Series& a) {
  if (a.empty()) return {};
  Series b = a;
  const cd a0 = b[0];
  b[0] = 0.0;
  auto [cb, sb] = cos_sin_nilpotent(b);
  return add(scale(cb, std::cos(a0)), scale(sb, -std::sin(a0)));
}

Series sin(const Series& a) {
  if (a.empty()) return {};
  Series b = a;
  const cd a0 = b[0];
  b[0] = 0.0;
  auto [cb, sb] = cos_sin_nilpotent(b);
  return add(scale(sb, std::cos(a0)), scale(cb, std::sin(a0)));
}

}  // namespace series

// ---------------------------------------------------------------------------

std::string Dilation::to_string() const {
  if (is_infinite()) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *value_);
  return buf;
}

// ---------------------------------------------------------------------------

namespace {
// Extra terms requested from operands so that quotients may shed leading zeros.
constexpr int kSeriesHeadroom = 4;

series::Series truncate(series::Series s, int order_max) {
  s.resize(static_cast<std::size_t>(order_max) + 1, 0.0);
  return s;
}
}  // namespace

SpectralScalar SpectralScalar::opaque(std::string name, Evaluator eval, Expander expand) {
  SpectralScalar s;
  s.rational_.reset();
  s.opaque_ = std::make_shared<const Opaque>(Opaque{std::move(name), std::move(eval), std::move(expand)});
  return s;
}

const NumericRational& SpectralScalar::rational() const {
  if (!rational_) throw NotPolynomial("spectral function '" + name() + "' is not rational");
  return *rational_;
}

const std::string& SpectralScalar::name() const {
  static const std::string rational_name = "rational";
  return opaque_ ? opaque_->name : rational_name;
}

cd SpectralScalar::operator()(cd k) const {
  if (rational_) return (*rational_)(k);
  const cd v = opaque_->eval(k);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw PoleError("non-finite value of " + opaque_->name + " at k=" + FieldTraits<cd>::format(k));
  return v;
}

series::Series SpectralScalar::laurent(int order_max) const {
  if (rational_) return rational_->laurent(order_max);
  if (!opaque_->expand) throw DivergesAtInfinity("no expansion available for " + opaque_->name);
  return truncate(opaque_->expand(order_max), order_max);
}

SpectralScalar SpectralScalar::reflect() const {
  if (rational_) return SpectralScalar(rational_->reflect());
  auto self = *this;
  Expander ex;
  if (opaque_->expand)
    ex = [self](int n) {
      auto c = self.laurent(n);
      for (std::size_t j = 1; j < c.size(); j += 2) c[j] = -c[j];
      return c;
    };
  return opaque(opaque_->name + "(-k)", [self](cd k) { return self(-k); }, ex);
}

SpectralScalar SpectralScalar::conj_real_axis() const {
  if (rational_) return SpectralScalar(rational_->conj());
  auto self = *this;
  Expander ex;
  if (opaque_->expand)
    ex = [self](int n) {
      auto c = self.laurent(n);
      for (auto& x : c) x = std::conj(x);
      return c;
    };
  return opaque("conj(" + opaque_->name + ")", [self](cd k) { return std::conj(self(std::conj(k))); }, ex);
}

SpectralScalar SpectralScalar::apply(std::string fname, std::function<cd(cd)> fn,
                                     std::function<series::Series(const series::Series&)> series_fn) const {
  auto self = *this;
  Expander ex;
  if (series_fn) ex = [self, series_fn](int n) { return series_fn(self.laurent(n)); };
  return opaque(fname + "(" + to_string() + ")", [self, fn](cd k) { return fn(self(k)); }, ex);
}

SpectralScalar SpectralScalar::operator-() const {
  if (rational_) return SpectralScalar(-*rational_);
  return apply("-", [](cd x) { return -x; }, [](const series::Series& s) { return series::scale(s, -1.0); });
}

namespace {
template <class Op, class SeriesOp>
SpectralScalar combine(const SpectralScalar& a, const SpectralScalar& b, const char* sym, Op op, SeriesOp sop,
                       int headroom = 0) {
  auto ex = [a, b, sop, headroom](int n) {
    return truncate(sop(a.laurent(n + headroom), b.laurent(n + headroom)), n);
  };
  return SpectralScalar::opaque("(" + a.to_string() + " " + sym + " " + b.to_string() + ")",
                                [a, b, op](cd k) { return op(a(k), b(k)); }, ex);
}
}  // namespace

SpectralScalar operator+(const SpectralScalar& a, const SpectralScalar& b) {
  if (a.rational_ && b.rational_) return SpectralScalar(*a.rational_ + *b.rational_);
  return combine(a, b, "+", std::plus<cd>{}, series::add);
}

SpectralScalar operator-(const SpectralScalar& a, const SpectralScalar& b) {
  if (a.rational_ && b.rational_) return SpectralScalar(*a.rational_ - *b.rational_);
  return a + (-b);
}

SpectralScalar operator*(const SpectralScalar& a, const SpectralScalar& b) {
  if (a.rational_ && b.rational_) return SpectralScalar(*a.rational_ * *b.rational_);
  return combine(a, b, "*", std::multiplies<cd>{}, series::multiply);
}

SpectralScalar operator/(const SpectralScalar& a, const SpectralScalar& b) {
  if (a.rational_ && b.rational_) return SpectralScalar(*a.rational_ / *b.rational_);
  return combine(a, b, "/", std::divides<cd>{}, series::divide, kSeriesHeadroom);
}

std::string SpectralScalar::to_string() const {
  if (rational_) return rational_->to_string();
  return opaque_->name;
}

SpectralScalar cos(const SpectralScalar& f) {
  return f.apply("cos", [](cd x) { return std::cos(x); }, [](const series::Series& s) { return series::cos(s); });
}

SpectralScalar sin(const SpectralScalar& f) {
  return f.apply("sin", [](cd x) { return std::sin(x); }, [](const series::Series& s) { return series::sin(s); });
}

SeriesExpansion laurent_expand(const SpectralScalar& f, int order_max) {
  SeriesExpansion out;
  out.order_max = order_max;
  for (const auto& c : f.laurent(order_max)) out.coefficients.push_back(CMatrix::Constant(1, 1, c));
  return out;
}

std::string format_matrix(const CMatrix& m) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) os << ", ";
    os << '[';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ", ";
      os << FieldTraits<cd>::format(m(i, j));
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace nlsd
