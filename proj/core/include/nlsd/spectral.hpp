#pragma once

// Rational functions of the spectral parameter k, scalar and matrix valued.
//
// Two coefficient backends share one interface: std::complex<double> for
// sampled residual checks and GaussianRational for exact identities.
// SpectralScalar additionally carries opaque numeric evaluators (cos(c/k),
// square roots, ...) that only support evaluation and k^-1 expansion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlsd/errors.hpp"
#include "nlsd/gaussian_rational.hpp"

namespace nlsd {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cd kI{0.0, 1.0};

/// Relative pole threshold: |den(k)| < kPoleTolerance * (1 + |k|^deg) is a pole.
inline constexpr double kPoleTolerance = 1e-10;

// ---------------------------------------------------------------------------
// Coefficient field traits.

template <class F>
struct FieldTraits;

template <>
struct FieldTraits<cd> {
  static constexpr bool exact = false;
  static double magnitude(const cd& x) { return std::abs(x); }
  static bool is_zero(const cd& x, double scale) { return std::abs(x) <= 1e-12 * std::max(scale, 1e-300); }
  static cd to_complex(const cd& x) { return x; }
  static cd conj(const cd& x) { return std::conj(x); }
  static cd imaginary_unit() { return kI; }
  static std::string format(const cd& x);
  static cd parse(const std::string& s);
};

template <>
struct FieldTraits<GaussianRational> {
  static constexpr bool exact = true;
  static double magnitude(const GaussianRational& x) { return std::abs(x.to_complex()); }
  static bool is_zero(const GaussianRational& x, double) { return x.is_zero(); }
  static cd to_complex(const GaussianRational& x) { return x.to_complex(); }
  static GaussianRational conj(const GaussianRational& x) { return x.conj(); }
  static GaussianRational imaginary_unit() { return GaussianRational::i(); }
  static std::string format(const GaussianRational& x) { return x.to_string(); }
  static GaussianRational parse(const std::string& s) { return GaussianRational::parse(s); }
};

// ---------------------------------------------------------------------------
// Polynomial in k, coefficients in ascending powers.

template <class F>
class Polynomial {
 public:
  using Traits = FieldTraits<F>;

  Polynomial() = default;
  Polynomial(F constant) : c_{std::move(constant)} { trim(); }  // NOLINT: constants promote
  explicit Polynomial(std::vector<F> ascending) : c_(std::move(ascending)) { trim(); }

  static Polynomial monomial(int power, F coeff = F(1)) {
    std::vector<F> c(static_cast<std::size_t>(power) + 1, F(0));
    c.back() = std::move(coeff);
    return Polynomial(std::move(c));
  }
  static Polynomial k() { return monomial(1); }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<F>& coefficients() const { return c_; }
  F coeff(int n) const { return (n >= 0 && n <= degree()) ? c_[static_cast<std::size_t>(n)] : F(0); }
  const F& leading() const { return c_.back(); }

  double max_magnitude() const {
    double m = 0.0;
    for (const auto& x : c_) m = std::max(m, Traits::magnitude(x));
    return m;
  }

  cd operator()(cd k) const {
    cd acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * k + Traits::to_complex(*it);
    return acc;
  }

  F eval_exact(const F& k) const {
    F acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * k + *it;
    return acc;
  }

  /// p(-k).
  Polynomial reflect() const {
    std::vector<F> c = c_;
    for (std::size_t n = 1; n < c.size(); n += 2) c[n] = -c[n];
    return Polynomial(std::move(c));
  }

  /// Coefficient-wise conjugation: equals conj(p(k)) for real k.
  Polynomial conj() const {
    std::vector<F> c = c_;
    for (auto& x : c) x = Traits::conj(x);
    return Polynomial(std::move(c));
  }

  Polynomial operator-() const {
    std::vector<F> c = c_;
    for (auto& x : c) x = -x;
    return Polynomial(std::move(c));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<F> c(std::max(a.c_.size(), b.c_.size()), F(0));
    for (std::size_t n = 0; n < a.c_.size(); ++n) c[n] += a.c_[n];
    for (std::size_t n = 0; n < b.c_.size(); ++n) c[n] += b.c_[n];
    return Polynomial(std::move(c), a.scale_hint(b));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<F> c(a.c_.size() + b.c_.size() - 1, F(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c), a.max_magnitude() * b.max_magnitude());
  }

  /// Euclidean division: *this = q * d + r with deg r < deg d.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
    if (d.is_zero()) throw std::domain_error("Polynomial: division by zero polynomial");
    std::vector<F> r = c_;
    const int dd = d.degree();
    const int rd = degree();
    if (rd < dd) return {Polynomial{}, *this};
    std::vector<F> q(static_cast<std::size_t>(rd - dd) + 1, F(0));
    for (int n = rd; n >= dd; --n) {
      F f = r[static_cast<std::size_t>(n)] / d.leading();
      q[static_cast<std::size_t>(n - dd)] = f;
      for (int j = 0; j <= dd; ++j) r[static_cast<std::size_t>(n - dd + j)] -= f * d.c_[static_cast<std::size_t>(j)];
      r[static_cast<std::size_t>(n)] = F(0);
    }
    r.resize(static_cast<std::size_t>(dd));
    const double scale = std::max(max_magnitude(), 1e-300);
    return {Polynomial(std::move(q)), Polynomial(std::move(r), scale)};
  }

  Polynomial monic() const {
    if (is_zero()) return *this;
    std::vector<F> c = c_;
    const F lead = c.back();
    for (auto& x : c) x = x / lead;
    return Polynomial(std::move(c));
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  /// Ascending coefficient list "[c0 c1 ...]".
  std::string to_string() const {
    std::string s = "[";
    for (std::size_t n = 0; n < c_.size(); ++n) {
      if (n) s += ' ';
      s += Traits::format(c_[n]);
    }
    return s + "]";
  }
  static Polynomial parse(const std::string& text);

 private:
  Polynomial(std::vector<F> c, double scale) : c_(std::move(c)) { trim(scale); }

  double scale_hint(const Polynomial& o) const { return std::max(max_magnitude(), o.max_magnitude()); }

  void trim(double scale = -1.0) {
    if (scale < 0.0) scale = max_magnitude();
    if constexpr (Traits::exact) {
      while (!c_.empty() && Traits::is_zero(c_.back(), scale)) c_.pop_back();
    } else {
      for (auto& x : c_)
        if (Traits::is_zero(x, scale)) x = F(0);
      while (!c_.empty() && c_.back() == F(0)) c_.pop_back();
    }
  }

  std::vector<F> c_;
};

template <class F>
Polynomial<F> Polynomial<F>::parse(const std::string& text) {
  auto open = text.find('[');
  auto close = text.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ParseError("polynomial must be bracketed: '" + text + "'");
  std::vector<F> c;
  std::string body = text.substr(open + 1, close - open - 1);
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && body[pos] == ' ') ++pos;
    if (pos >= body.size()) break;
    auto end = body.find(' ', pos);
    if (end == std::string::npos) end = body.size();
    c.push_back(Traits::parse(body.substr(pos, end - pos)));
    pos = end;
  }
  return Polynomial(std::move(c));
}

template <class F>
Polynomial<F> polynomial_gcd(Polynomial<F> a, Polynomial<F> b) {
  using Traits = FieldTraits<F>;
  if constexpr (Traits::exact) {
    while (!b.is_zero()) {
      auto r = a.divmod(b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  } else {
    // Remainders below 1e-9 of the (normalised) operands count as zero.
    while (!b.is_zero()) {
      b = b.monic();
      auto r = a.divmod(b).second;
      const double scale = std::max(a.max_magnitude(), b.max_magnitude());
      if (r.max_magnitude() <= 1e-9 * scale) r = Polynomial<F>{};
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }
}

// ---------------------------------------------------------------------------
// Reduced rational function num/den.

template <class F>
class Rational {
 public:
  using Traits = FieldTraits<F>;
  using Poly = Polynomial<F>;

  Rational() : num_(), den_(F(1)) {}
  Rational(F constant) : num_(std::move(constant)), den_(F(1)) {}  // NOLINT
  Rational(Poly num) : num_(std::move(num)), den_(F(1)) {}         // NOLINT
  Rational(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
    reduce();
  }

  static Rational k() { return Rational(Poly::k()); }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  bool is_polynomial() const { return den_.degree() == 0; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }

  /// Evaluation; PoleError when |den(k)| is below the scale-aware threshold.
  cd operator()(cd k) const {
    const cd d = den_(k);
    const double deg = std::max(den_.degree(), 0);
    if (std::abs(d) < kPoleTolerance * (1.0 + std::pow(std::abs(k), deg)))
      throw PoleError("pole of " + to_string() + " at k=" + FieldTraits<cd>::format(k));
    return num_(k) / d;
  }

  F eval_exact(const F& k) const {
    F d = den_.eval_exact(k);
    if (d == F(0)) throw PoleError("exact pole of " + to_string());
    return num_.eval_exact(k) / d;
  }

  Rational reflect() const { return Rational(num_.reflect(), den_.reflect()); }
  Rational conj() const { return Rational(num_.conj(), den_.conj()); }

  /// Coefficients c_0..c_order of f(k) = sum c_n k^-n as k -> infinity.
  std::vector<F> laurent(int order_max) const {
    const int m = den_.degree();
    if (num_.degree() > m) throw DivergesAtInfinity("numerator degree exceeds denominator degree in " + to_string());
    // With z = 1/k: f = P~(z)/Q~(z) where P~_j = p_{m-j}, Q~_j = q_{m-j}.
    auto tilde = [m](const Poly& p, int j) { return p.coeff(m - j); };
    std::vector<F> c(static_cast<std::size_t>(order_max) + 1, F(0));
    const F q0 = tilde(den_, 0);
    for (int n = 0; n <= order_max; ++n) {
      F acc = tilde(num_, n);
      for (int j = 1; j <= std::min(n, m); ++j) acc -= tilde(den_, j) * c[static_cast<std::size_t>(n - j)];
      c[static_cast<std::size_t>(n)] = acc / q0;
    }
    return c;
  }

  Rational operator-() const { return Rational(-num_, den_, Unreduced{}); }
  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return Rational(a.num_ + b.num_, a.den_);
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero function");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string to_string() const { return num_.to_string() + "/" + den_.to_string(); }
  static Rational parse(const std::string& text) {
    const auto split = text.find("]/[");
    if (split == std::string::npos) return Rational(Poly::parse(text));
    return Rational(Poly::parse(text.substr(0, split + 1)), Poly::parse(text.substr(split + 2)));
  }

 private:
  struct Unreduced {};
  Rational(Poly num, Poly den, Unreduced) : num_(std::move(num)), den_(std::move(den)) {}

  void reduce() {
    if (num_.is_zero()) {
      den_ = Poly(F(1));
      return;
    }
    Poly g = polynomial_gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = num_.divmod(g).first;
      den_ = den_.divmod(g).first;
    }
    // Normalise: monic denominator.
    const F lead = den_.leading();
    num_ = Poly(scale_all(num_.coefficients(), lead));
    den_ = Poly(scale_all(den_.coefficients(), lead));
  }

  static std::vector<F> scale_all(std::vector<F> c, const F& divisor) {
    for (auto& x : c) x = x / divisor;
    return c;
  }

  Poly num_;
  Poly den_;
};

using ExactRational = Rational<GaussianRational>;
using NumericRational = Rational<cd>;

/// Coefficient-wise conversion of an exact rational to the floating backend.
NumericRational to_numeric(const ExactRational& r);

// ---------------------------------------------------------------------------
// Scalar k^-1 series helpers (length = order_max + 1).

namespace series {
using Series = std::vector<cd>;
Series add(const Series& a, const Series& b);
Series multiply(const Series& a, const Series& b);
Series divide(const Series& a, const Series& b);
Series scale(const Series& a, cd s);
/// cos/sin of a series, by Taylor composition around the constant term.
Series cos(const Series& a);
Series sin(const Series& a);
}  // namespace series

// ---------------------------------------------------------------------------
// Extended real a in R ∪ {∞} (dilation parameter).

class Dilation {
 public:
  Dilation(double value = 0.0) : value_(value) {}  // NOLINT: real values promote
  static Dilation infinity() {
    Dilation d;
    d.value_.reset();
    return d;
  }
  bool is_infinite() const { return !value_.has_value(); }
  double value() const {
    if (!value_) throw ParameterError("dilation parameter is infinite");
    return *value_;
  }
  std::string to_string() const;

 private:
  std::optional<double> value_;
};

// ---------------------------------------------------------------------------
// SpectralScalar: reduced numeric rational, or an opaque evaluator.

class SpectralScalar {
 public:
  using Evaluator = std::function<cd(cd)>;
  using Expander = std::function<series::Series(int)>;

  SpectralScalar(cd constant = 0.0) : rational_(NumericRational(constant)) {}  // NOLINT
  SpectralScalar(double constant) : SpectralScalar(cd(constant)) {}            // NOLINT
  SpectralScalar(NumericRational r) : rational_(std::move(r)) {}               // NOLINT
  SpectralScalar(const ExactRational& r) : rational_(to_numeric(r)) {}         // NOLINT

  static SpectralScalar k() { return SpectralScalar(NumericRational::k()); }
  /// Opaque function; `expand` (optional) supplies its k^-1 coefficients.
  static SpectralScalar opaque(std::string name, Evaluator eval, Expander expand = {});

  bool is_rational() const { return rational_.has_value(); }
  const NumericRational& rational() const;
  const std::string& name() const;

  cd operator()(cd k) const;

  SpectralScalar reflect() const;
  SpectralScalar conj_real_axis() const;
  series::Series laurent(int order_max) const;

  /// Pointwise function application, e.g. cos(theta(k)).
  SpectralScalar apply(std::string fname, std::function<cd(cd)> fn,
                       std::function<series::Series(const series::Series&)> series_fn = {}) const;

  SpectralScalar operator-() const;
  friend SpectralScalar operator+(const SpectralScalar& a, const SpectralScalar& b);
  friend SpectralScalar operator-(const SpectralScalar& a, const SpectralScalar& b);
  friend SpectralScalar operator*(const SpectralScalar& a, const SpectralScalar& b);
  friend SpectralScalar operator/(const SpectralScalar& a, const SpectralScalar& b);

  std::string to_string() const;
  static SpectralScalar parse(const std::string& text) { return SpectralScalar(NumericRational::parse(text)); }

 private:
  struct Opaque {
    std::string name;
    Evaluator eval;
    Expander expand;
  };
  std::optional<NumericRational> rational_;
  std::shared_ptr<const Opaque> opaque_;
};

SpectralScalar cos(const SpectralScalar& f);
SpectralScalar sin(const SpectralScalar& f);

// ---------------------------------------------------------------------------
// Matrix-valued spectral functions.

struct SeriesExpansion {
  int order_max = 0;
  std::vector<CMatrix> coefficients;  // coefficient of k^-n
};

namespace detail {
inline cd eval_scalar(const SpectralScalar& s, cd k) { return s(k); }
inline cd eval_scalar(const ExactRational& s, cd k) { return s(k); }
inline SpectralScalar conj_scalar(const SpectralScalar& s) { return s.conj_real_axis(); }
inline ExactRational conj_scalar(const ExactRational& s) { return s.conj(); }
inline series::Series laurent_scalar(const SpectralScalar& s, int n) { return s.laurent(n); }
inline series::Series laurent_scalar(const ExactRational& s, int n) {
  series::Series out;
  for (const auto& c : s.laurent(n)) out.push_back(c.to_complex());
  return out;
}
}  // namespace detail

template <class S>
class SpectralMatrix {
 public:
  SpectralMatrix() = default;
  explicit SpectralMatrix(int dim, const S& fill = S(0)) : dim_(dim), e_(static_cast<std::size_t>(dim * dim), fill) {
    if (dim <= 0) throw DimensionMismatch("SpectralMatrix dimension must be positive");
  }

  static SpectralMatrix identity(int dim) { return scalar(dim, S(1)); }
  static SpectralMatrix scalar(int dim, const S& s) {
    SpectralMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = s;
    return m;
  }
  static SpectralMatrix constant(const CMatrix& c) {
    if (c.rows() != c.cols()) throw DimensionMismatch("constant matrix must be square");
    SpectralMatrix m(static_cast<int>(c.rows()));
    for (int i = 0; i < m.dim_; ++i)
      for (int j = 0; j < m.dim_; ++j) m(i, j) = S(c(i, j));
    return m;
  }
  /// [[a, b], [c, d]] with equal-dimension blocks.
  static SpectralMatrix blocks(const SpectralMatrix& a, const SpectralMatrix& b, const SpectralMatrix& c,
                               const SpectralMatrix& d) {
    const int n = a.dim_;
    if (b.dim_ != n || c.dim_ != n || d.dim_ != n) throw DimensionMismatch("block dimensions differ");
    SpectralMatrix m(2 * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m(i, j) = a(i, j);
        m(i, j + n) = b(i, j);
        m(i + n, j) = c(i, j);
        m(i + n, j + n) = d(i, j);
      }
    return m;
  }

  int dim() const { return dim_; }
  S& operator()(int i, int j) { return e_[idx(i, j)]; }
  const S& operator()(int i, int j) const { return e_[idx(i, j)]; }

  /// Sub-block (bi, bj) of size `size`.
  SpectralMatrix block(int bi, int bj, int size) const {
    SpectralMatrix m(size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) m(i, j) = (*this)(bi * size + i, bj * size + j);
    return m;
  }

  CMatrix evaluate(cd k) const {
    CMatrix m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(i, j) = detail::eval_scalar((*this)(i, j), k);
    return m;
  }
  CMatrix operator()(cd k) const { return evaluate(k); }

  SpectralMatrix transpose() const {
    SpectralMatrix m(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(j, i);
    return m;
  }
  SpectralMatrix reflect() const { return map([](const S& s) { return s.reflect(); }); }
  SpectralMatrix conj_real_axis() const { return map([](const S& s) { return detail::conj_scalar(s); }); }
  SpectralMatrix dagger_real_axis() const { return conj_real_axis().transpose(); }

  friend SpectralMatrix operator+(const SpectralMatrix& a, const SpectralMatrix& b) {
    a.require_same(b);
    SpectralMatrix m(a.dim_);
    for (std::size_t n = 0; n < a.e_.size(); ++n) m.e_[n] = a.e_[n] + b.e_[n];
    return m;
  }
  friend SpectralMatrix operator-(const SpectralMatrix& a, const SpectralMatrix& b) {
    a.require_same(b);
    SpectralMatrix m(a.dim_);
    for (std::size_t n = 0; n < a.e_.size(); ++n) m.e_[n] = a.e_[n] - b.e_[n];
    return m;
  }
  friend SpectralMatrix operator*(const SpectralMatrix& a, const SpectralMatrix& b) {
    a.require_same(b);
    SpectralMatrix m(a.dim_);
    for (int i = 0; i < a.dim_; ++i)
      for (int j = 0; j < a.dim_; ++j) {
        S acc(0);
        for (int l = 0; l < a.dim_; ++l) acc = acc + a(i, l) * b(l, j);
        m(i, j) = acc;
      }
    return m;
  }
  friend SpectralMatrix operator*(const S& s, const SpectralMatrix& a) {
    return a.map([&s](const S& x) { return s * x; });
  }

  /// Kronecker product; dimension dim() * other.dim().
  SpectralMatrix kron(const SpectralMatrix& b) const {
    const int n = dim_ * b.dim_;
    SpectralMatrix m(n);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int p = 0; p < b.dim_; ++p)
          for (int q = 0; q < b.dim_; ++q) m(i * b.dim_ + p, j * b.dim_ + q) = (*this)(i, j) * b(p, q);
    return m;
  }

  template <class Fn>
  SpectralMatrix map(Fn&& fn) const {
    SpectralMatrix m(dim_);
    for (std::size_t n = 0; n < e_.size(); ++n) m.e_[n] = fn(e_[n]);
    return m;
  }

 private:
  std::size_t idx(int i, int j) const {
    if (i < 0 || j < 0 || i >= dim_ || j >= dim_) throw DimensionMismatch("SpectralMatrix index out of range");
    return static_cast<std::size_t>(i * dim_ + j);
  }
  void require_same(const SpectralMatrix& b) const {
    if (dim_ != b.dim_)
      throw DimensionMismatch("SpectralMatrix dimensions " + std::to_string(dim_) + " and " + std::to_string(b.dim_));
  }

  int dim_ = 0;
  std::vector<S> e_;
};

using SMat = SpectralMatrix<SpectralScalar>;
using ExactMatrix = SpectralMatrix<ExactRational>;

SeriesExpansion laurent_expand(const SpectralScalar& f, int order_max);

template <class S>
SeriesExpansion laurent_expand(const SpectralMatrix<S>& f, int order_max) {
  SeriesExpansion out;
  out.order_max = order_max;
  out.coefficients.assign(static_cast<std::size_t>(order_max) + 1, CMatrix::Zero(f.dim(), f.dim()));
  for (int i = 0; i < f.dim(); ++i)
    for (int j = 0; j < f.dim(); ++j) {
      auto c = detail::laurent_scalar(f(i, j), order_max);
      for (int n = 0; n <= order_max; ++n) out.coefficients[static_cast<std::size_t>(n)](i, j) = c[static_cast<std::size_t>(n)];
    }
  return out;
}

/// Entrywise max-abs norm used for every residual in the toolkit.
inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Row-major nested array text "[[a, b], [c, d]]" of a constant matrix.
std::string format_matrix(const CMatrix& m);

}  // namespace nlsd
