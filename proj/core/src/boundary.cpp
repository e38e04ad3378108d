#include "nlsd/boundary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>

namespace nlsd {

void BoundaryOperatorPair::validate() const {
  if (U.dim() != V.dim() || U.dim() % 2 != 0) throw DimensionMismatch("U and V must both be 2N x 2N");
  const int n = N();
  const std::array<double, 3> probes{0.37, 1.3, -2.1};
  for (double k : probes) {
    const CMatrix u = U.evaluate(k);
    for (int b = 0; b < 2; ++b) {
      const CMatrix blk = u.block(b * n, b * n, n, n);
      const cd s = blk(0, 0);
      if (max_abs(blk - s * CMatrix::Identity(n, n)) > 1e-12 * (1.0 + std::abs(s)))
        throw DimensionMismatch("U diagonal blocks must be scalar multiples of I");
    }
    if (max_abs(u.block(0, n, n, n)) > 0.0 || max_abs(u.block(n, 0, n, n)) > 0.0)
      throw DimensionMismatch("U must be block diagonal");
  }
}

FunctionalPair functional_pair(const BoundaryOperatorPair& bp, FunctionalCopy copy) {
  const SpectralScalar ik = SpectralScalar(kI) * SpectralScalar::k();
  if (copy == FunctionalCopy::value) return {bp.u_block(0), bp.v_block(0, 0) + ik * bp.v_block(0, 1)};
  return {ik * bp.u_block(1), bp.v_block(1, 0) + ik * bp.v_block(1, 1)};
}

ResidualReport check_functional_equations(const FunctionalPair& fp, const DefectPair& dp,
                                          const std::vector<double>& samples) {
  if (fp.X.dim() != dp.N() || fp.Y.dim() != dp.N()) throw DimensionMismatch("functional pair and representation differ");
  ResidualReport rep{"functional-equations", dp.N(), 0.0, 0, 0.0, {}};
  const SMat Rp = dp.Rplus(), Rm = dp.Rminus(), Tp = dp.Tplus(), Tm = dp.Tminus();
  for (double k : samples) {
    const CMatrix X = fp.X.evaluate(k), Xm = fp.X.evaluate(-k);
    const CMatrix Y = fp.Y.evaluate(k), Ym = fp.Y.evaluate(-k);
    const CMatrix a1 = Xm * Rp.evaluate(-k), b1 = Y * Tm.evaluate(k);
    const CMatrix a2 = Ym * Rm.evaluate(-k), b2 = X * Tp.evaluate(k);
    const double r1 = max_abs(X + a1 - b1) / (1.0 + std::max({max_abs(X), max_abs(a1), max_abs(b1)}));
    const double r2 = max_abs(Y + a2 - b2) / (1.0 + std::max({max_abs(Y), max_abs(a2), max_abs(b2)}));
    rep.absorb(std::max(r1, r2), {k});
  }
  return rep;
}

std::string to_string(BoundaryCase c) {
  switch (c) {
    case BoundaryCase::scalar: return "scalar";
    case BoundaryCase::e_type: return "E-type";
    case BoundaryCase::general_a: return "general-a";
  }
  return "?";
}

namespace {

bool e_is_identity(const ClassificationParams& p) { return (p.E_matrix() - CMatrix::Identity(p.N, p.N)).norm() == 0.0; }

CMatrix e_hat(const ClassificationParams& p) {
  const CMatrix M = p.M_or_identity();
  return M * p.E_matrix() * M.inverse();
}

}  // namespace

BoundaryCase infer_case(const ClassificationParams& p) {
  if (e_is_identity(p) || (!p.a_dil.is_infinite() && p.a_dil.value() == 0.0)) return BoundaryCase::scalar;
  if (p.a_dil.is_infinite()) return BoundaryCase::e_type;
  return BoundaryCase::general_a;
}

std::pair<SpectralScalar, SpectralScalar> f_g(const ClassificationParams& p) {
  const SpectralScalar i(kI);
  if (p.omega) return {SpectralScalar(-kI), SpectralScalar(-kI)};
  return {(*p.A + i) * (*p.B + i) * (*p.C + i), (*p.A + i) * (*p.B - i) * (*p.C - i)};
}

SpectralScalar omega_of(const ClassificationParams& p) {
  if (p.omega) return *p.omega;
  if (!p.theta) throw ParameterError("classification data has neither omega nor theta");
  if (p.theta->is_rational() && p.theta->rational().is_constant()) return SpectralScalar(std::tan((*p.theta)(0.0) / 2.0));
  return p.theta->apply("tan_half", [](cd x) { return std::tan(x / 2.0); });
}

BoundaryOperatorPair build_case_solution(BoundaryCase c, const ClassificationParams& p) {
  p.validate();
  if (p.eps_plus != 1) throw CaseMismatch("case solutions assume eps_plus = 1");
  if (infer_case(p) != c)
    throw CaseMismatch("parameters describe the " + to_string(infer_case(p)) + " case, not " + to_string(c));
  const int N = p.N;
  const auto [f, g] = f_g(p);
  const SpectralScalar w = omega_of(p);
  const SpectralScalar one(1.0);
  const SpectralScalar eps(static_cast<double>(p.eps_minus));
  const SpectralScalar k = SpectralScalar::k();
  const SpectralScalar ik = SpectralScalar(kI) * k;
  const SMat I = SMat::identity(N);
  const SMat Z(N, SpectralScalar(0.0));
  const SMat E = SMat::constant(e_hat(p));
  const SMat flip_sign = SMat::blocks(I, Z, Z, SpectralScalar(-1.0) * I);
  const SpectralScalar plus = w * w + one;
  const SpectralScalar minus = eps * (w * w - one);

  BoundaryOperatorPair bp;
  switch (c) {
    case BoundaryCase::scalar:
      bp.U = SMat::scalar(2 * N, SpectralScalar(2.0) * f * w);
      bp.V = g * (plus * SMat::identity(2 * N) + minus * flip_sign);
      break;
    case BoundaryCase::e_type:
      bp.U = SMat::scalar(2 * N, SpectralScalar(2.0) * f * w);
      bp.V = g * (plus * SMat::blocks(E, Z, Z, E) + minus * flip_sign);
      break;
    case BoundaryCase::general_a: {
      const SpectralScalar iak = SpectralScalar(p.a_dil.value()) * ik;
      bp.U = SMat::scalar(2 * N, SpectralScalar(2.0) * (one + iak) * f * w);
      const SMat first = SMat::blocks(I + iak * E, Z, ik * I, iak * E);
      const SMat second = SMat::blocks((one - iak) * I, Z, SpectralScalar(-1.0) * ik * I, iak * I);
      bp.V = g * (plus * first + minus * second);
      break;
    }
  }
  return bp;
}

// ---------------------------------------------------------------------------

FreeSolution::FreeSolution(const DefectPair& dp, double k, int sign) : k_(k), sign_(sign) {
  const int N = dp.N();
  const CMatrix I = CMatrix::Identity(N, N);
  if (sign == 1) {
    if (!(k < 0)) throw ParameterError("Psi^+ is supported on k < 0");
    above_ = {{I, k}, {dp.Rplus().evaluate(-k), -k}};
    below_ = {{dp.Tminus().evaluate(k), k}};
  } else if (sign == -1) {
    if (!(k > 0)) throw ParameterError("Psi^- is supported on k > 0");
    above_ = {{dp.Tplus().evaluate(k), k}};
    below_ = {{I, k}, {dp.Rminus().evaluate(-k), -k}};
  } else {
    throw ParameterError("free solution sign must be +1 or -1");
  }
}

namespace {

CMatrix sum_waves(const std::vector<PlaneWave>& waves, double x, bool derivative) {
  CMatrix out = CMatrix::Zero(waves.front().amplitude.rows(), waves.front().amplitude.cols());
  for (const auto& w : waves) {
    const cd phase = std::exp(kI * w.kappa * x);
    out += (derivative ? kI * w.kappa : cd(1.0)) * phase * w.amplitude;
  }
  return out;
}

CMatrix stacked(const PlaneWave& w) {
  const auto n = w.amplitude.rows();
  CMatrix s(2 * n, w.amplitude.cols());
  s.topRows(n) = w.amplitude;
  s.bottomRows(n) = kI * w.kappa * w.amplitude;
  return s;
}

CMatrix stacked_limit(const std::vector<PlaneWave>& waves) {
  CMatrix out = stacked(waves.front());
  for (std::size_t i = 1; i < waves.size(); ++i) out += stacked(waves[i]);
  return out;
}

CMatrix apply_spectral(const SMat& op, const std::vector<PlaneWave>& waves) {
  CMatrix out = op.evaluate(waves.front().kappa) * stacked(waves.front());
  for (std::size_t i = 1; i < waves.size(); ++i) out += op.evaluate(waves[i].kappa) * stacked(waves[i]);
  return out;
}

}  // namespace

CMatrix FreeSolution::value(double x) const {
  if (x == 0.0) throw ParameterError("free solution is only defined off the defect");
  return sum_waves(x > 0 ? above_ : below_, x, false);
}

CMatrix FreeSolution::derivative(double x) const {
  if (x == 0.0) throw ParameterError("free solution is only defined off the defect");
  return sum_waves(x > 0 ? above_ : below_, x, true);
}

CMatrix FreeSolution::limit_above() const { return stacked_limit(above_); }
CMatrix FreeSolution::limit_below() const { return stacked_limit(below_); }

ResidualReport verify_on_free_solutions(const BoundaryOperatorPair& bp, const DefectPair& dp,
                                        const std::vector<double>& k_samples) {
  if (bp.N() != dp.N()) throw DimensionMismatch("boundary pair and representation differ");
  ResidualReport rep{"free-solutions", dp.N(), 0.0, 0, 0.0, {}};
  for (double ks : k_samples) {
    const double m = std::abs(ks);
    if (m == 0.0) throw GenericityError("k = 0 carries no free solution");
    for (int sign : {1, -1}) {
      const FreeSolution psi(dp, -sign * m, sign);
      const CMatrix lhs = apply_spectral(bp.U, psi.above());
      const CMatrix rhs = apply_spectral(bp.V, psi.below());
      rep.absorb(max_abs(lhs - rhs) / (1.0 + std::max(max_abs(lhs), max_abs(rhs))), {psi.k()});
    }
  }
  return rep;
}

ResidualReport check_theorem_bc(const NLSDefectParams& p, const std::vector<double>& k_samples) {
  const DefectPair dp = build_nls_defect(p);
  const int N = p.N;
  const CMatrix I = CMatrix::Identity(N, N);
  CMatrix J(2 * N, 2 * N);
  J << p.a * I, p.b * I, p.c * I, p.d * I;
  J *= p.alpha;
  ResidualReport rep{"jump-condition", N, p.g, 0, 0.0, {}};
  for (double ks : k_samples) {
    const double m = std::abs(ks);
    if (m == 0.0) throw GenericityError("k = 0 carries no free solution");
    for (int sign : {1, -1}) {
      const FreeSolution psi(dp, -sign * m, sign);
      rep.absorb(max_abs(psi.limit_above() - J * psi.limit_below()), {psi.k()});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

Polynomial<cd> polynomial_of(const SpectralScalar& s) {
  if (!s.is_rational()) throw NotPolynomial("entry " + s.to_string() + " is not rational");
  const NumericRational& r = s.rational();
  if (!r.is_polynomial()) throw NotPolynomial("entry " + r.to_string() + " is not polynomial in k");
  return r.numerator() * Polynomial<cd>(1.0 / r.denominator().coeff(0));
}

MatrixDiffOp to_derivative(const SMat& m) {
  MatrixDiffOp op;
  const int n = m.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Polynomial<cd> p = to_derivative(polynomial_of(m(i, j)));
      for (int d = 0; d <= p.degree(); ++d) {
        while (static_cast<int>(op.coefficients.size()) <= d) op.coefficients.push_back(CMatrix::Zero(n, n));
        op.coefficients[static_cast<std::size_t>(d)](i, j) = p.coeff(d);
      }
    }
  if (op.coefficients.empty()) op.coefficients.push_back(CMatrix::Zero(n, n));
  return op;
}

MatrixDiffOp MatrixDiffOp::compose(const MatrixDiffOp& o) const {
  // Constant coefficients commute with Dx, so composition is the polynomial product.
  MatrixDiffOp r;
  const auto n = coefficients.front().rows();
  r.coefficients.assign(coefficients.size() + o.coefficients.size() - 1, CMatrix::Zero(n, n));
  for (std::size_t i = 0; i < coefficients.size(); ++i)
    for (std::size_t j = 0; j < o.coefficients.size(); ++j) r.coefficients[i + j] += coefficients[i] * o.coefficients[j];
  return r;
}

bool operator==(const MatrixDiffOp& a, const MatrixDiffOp& b) {
  const std::size_t n = std::max(a.coefficients.size(), b.coefficients.size());
  const auto dim = a.coefficients.front().rows();
  for (std::size_t i = 0; i < n; ++i) {
    const CMatrix x = i < a.coefficients.size() ? a.coefficients[i] : CMatrix::Zero(dim, dim);
    const CMatrix y = i < b.coefficients.size() ? b.coefficients[i] : CMatrix::Zero(dim, dim);
    if (x != y) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// ASCII rendering.

namespace {

constexpr double kRenderTol = 1e-9;

bool near(cd x, cd y) { return std::abs(x - y) <= kRenderTol * (1.0 + std::abs(y)); }
bool near_zero(cd x) { return std::abs(x) <= kRenderTol; }

std::string fmt_real(double x) {
  if (std::abs(x - std::round(x)) < kRenderTol) return std::to_string(static_cast<long long>(std::llround(x)));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string fmt_num(cd z) {
  const double scale = 1.0 + std::abs(z);
  const double re = std::abs(z.real()) < kRenderTol * scale ? 0.0 : z.real();
  const double im = std::abs(z.imag()) < kRenderTol * scale ? 0.0 : z.imag();
  auto imag_part = [](double v) {
    if (std::abs(v - 1.0) < kRenderTol) return std::string("i");
    if (std::abs(v + 1.0) < kRenderTol) return std::string("-i");
    return fmt_real(v) + "i";
  };
  if (im == 0.0) return fmt_real(re);
  if (re == 0.0) return imag_part(im);
  const std::string ip = imag_part(std::abs(im));
  return "(" + fmt_real(re) + (im < 0 ? "-" : "+") + ip + ")";
}

// c0 + c1 * a.
struct LinCoeff {
  cd c0 = 0.0;
  cd c1 = 0.0;
  bool is_zero() const { return near_zero(c0) && near_zero(c1); }
  bool is_number() const { return near_zero(c1); }
  LinCoeff operator/(cd s) const { return {c0 / s, c1 / s}; }
  LinCoeff operator-() const { return {-c0, -c1}; }
  bool operator==(const LinCoeff& o) const { return near(c0, o.c0) && near(c1, o.c1); }
  cd lead() const { return near_zero(c0) ? c1 : c0; }
};

std::string fmt_coeff(const LinCoeff& c) {
  if (c.is_number()) return fmt_num(c.c0);
  std::string apart;
  if (near(c.c1, 1.0))
    apart = "a";
  else if (near(c.c1, -1.0))
    apart = "-a";
  else
    apart = fmt_num(c.c1) + "*a";
  if (near_zero(c.c0)) return apart;
  if (apart.front() == '-') return "(" + fmt_num(c.c0) + " - " + apart.substr(1) + ")";
  return "(" + fmt_num(c.c0) + " + " + apart + ")";
}

// "", "-", or "c*".
std::string prefix(const LinCoeff& c) {
  if (c.is_number() && near(c.c0, 1.0)) return "";
  if (c.is_number() && near(c.c0, -1.0)) return "-";
  return fmt_coeff(c) + "*";
}

std::string dx(int n) {
  if (n == 0) return "";
  if (n == 1) return "Dx";
  return "Dx^" + std::to_string(n);
}

using LinPoly = std::vector<LinCoeff>;  // by power of Dx

LinPoly lin_from(const Polynomial<cd>& p) {
  LinPoly out;
  for (int n = 0; n <= p.degree(); ++n) out.push_back({p.coeff(n), 0.0});
  return out;
}

LinCoeff at(const LinPoly& p, int n) { return n < static_cast<int>(p.size()) ? p[static_cast<std::size_t>(n)] : LinCoeff{}; }

int lowest(const LinPoly& p) {
  for (std::size_t n = 0; n < p.size(); ++n)
    if (!p[n].is_zero()) return static_cast<int>(n);
  return -1;
}

LinPoly divide(const LinPoly& p, cd s) {
  LinPoly out;
  for (const auto& c : p) out.push_back(c / s);
  return out;
}

std::string join_terms(const std::vector<std::string>& terms) {
  if (terms.empty()) return "0";
  std::string s = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].front() == '-')
      s += " - " + terms[i].substr(1);
    else
      s += " + " + terms[i];
  }
  return s;
}

std::string op_term(const LinCoeff& c, int n, const std::string& field) {
  if (n == 0) return prefix(c) + field;
  return prefix(c) + dx(n) + (field.front() == '(' ? "" : " ") + field;
}

std::string render_lhs(const LinPoly& p, const std::string& field) {
  const int m = lowest(p);
  if (m < 0) return "0";
  const LinCoeff c = at(p, m);
  if (!c.is_number()) throw NotPolynomial("left-hand side lowest coefficient depends on a");
  std::string s = prefix(c);
  if (static_cast<int>(p.size()) - 1 > m) {
    std::vector<std::string> q{"1"};
    for (int n = m + 1; n < static_cast<int>(p.size()); ++n) {
      const LinCoeff qc = at(p, n) / c.c0;
      if (!qc.is_zero()) q.push_back(prefix(qc) + dx(n - m));
    }
    if (q.size() > 1) s += "(" + join_terms(q) + ") ";
  }
  if (m > 0) s += dx(m) + " ";
  return s + field;
}

struct RowData {
  LinPoly lhs;
  LinPoly rhs_R;
  LinPoly rhs_L;
};

struct RawRows {
  bool has_R = false;
  bool has_L = false;
  std::array<RowData, 2> rows;
};

// Normalization: make the first right-hand coefficient 1 when that leaves the
// left-hand side with a unit in {1, i, -i}; otherwise make the left-hand side monic.
cd normalizer(const LinPoly& lhs, std::optional<LinCoeff> first_rhs) {
  const int m = lowest(lhs);
  if (m < 0) return first_rhs ? first_rhs->lead() : cd(1.0);
  const cd l0 = at(lhs, m).lead();
  if (first_rhs) {
    const cd r = first_rhs->lead();
    const cd ratio = l0 / r;
    if (near(ratio, 1.0) || near(ratio, kI) || near(ratio, -kI)) return r;
  }
  return l0;
}

std::vector<std::string> render_single(const LinPoly& lhs, const LinPoly& rhs, const std::string& name) {
  std::optional<LinCoeff> first;
  const int r0 = lowest(rhs);
  if (r0 >= 0) first = at(rhs, r0);
  const cd s = normalizer(lhs, first);
  const LinPoly L = divide(lhs, s), R = divide(rhs, s);
  std::vector<std::string> terms;
  for (int n = 0; n < static_cast<int>(R.size()); ++n)
    if (!R[static_cast<std::size_t>(n)].is_zero()) terms.push_back(op_term(R[static_cast<std::size_t>(n)], n, name + "(-0)"));
  return {render_lhs(L, name + "(+0)") + " = " + join_terms(terms)};
}

std::string render_combined(const RowData& row) {
  const int top = static_cast<int>(std::max(row.rhs_R.size(), row.rhs_L.size()));
  struct Piece {
    LinCoeff c;
    int n;
    std::string field;
  };
  std::vector<Piece> common, grouped, right, left;
  for (int n = 0; n < top; ++n) {
    const LinCoeff r = at(row.rhs_R, n), l = at(row.rhs_L, n);
    if (r.is_zero() && l.is_zero()) continue;
    if (r == l)
      common.push_back({r, n, "Phi(-0)"});
    else if (r == -l)
      grouped.push_back({r, n, "(PhiR(-0) - PhiL(-0))"});
    else {
      if (!r.is_zero()) right.push_back({r, n, "PhiR(-0)"});
      if (!l.is_zero()) left.push_back({l, n, "PhiL(-0)"});
    }
  }
  std::vector<Piece> all = common;
  all.insert(all.end(), grouped.begin(), grouped.end());
  all.insert(all.end(), right.begin(), right.end());
  all.insert(all.end(), left.begin(), left.end());
  std::optional<LinCoeff> first;
  if (!all.empty()) first = all.front().c;
  const cd s = normalizer(row.lhs, first);
  std::vector<std::string> terms;
  for (const auto& p : all) terms.push_back(op_term(p.c / s, p.n, p.field));
  return render_lhs(divide(row.lhs, s), "Phi(+0)") + " = " + join_terms(terms);
}

bool has_common_power(const RowData& row) {
  const int top = static_cast<int>(std::max(row.rhs_R.size(), row.rhs_L.size()));
  for (int n = 0; n < top; ++n)
    if (!at(row.rhs_R, n).is_zero() && at(row.rhs_R, n) == at(row.rhs_L, n)) return true;
  return false;
}

DifferentialBoundaryForm render_rows(const RawRows& raw, RenderStyle style) {
  DifferentialBoundaryForm form;
  if (!raw.has_L || !raw.has_R) style = RenderStyle::phi;
  if (style == RenderStyle::automatic)
    style = has_common_power(raw.rows[0]) && has_common_power(raw.rows[1]) ? RenderStyle::combined : RenderStyle::split;
  if (style == RenderStyle::phi) {
    if (raw.has_R && raw.has_L) {
      for (const auto& row : raw.rows)
        for (std::size_t n = 0; n < std::max(row.rhs_R.size(), row.rhs_L.size()); ++n)
          if (!(at(row.rhs_R, static_cast<int>(n)) == at(row.rhs_L, static_cast<int>(n))))
            throw CaseMismatch("conditions differ between the E eigenspaces; use the split or combined style");
    }
    for (const auto& row : raw.rows) {
      const auto l = render_single(row.lhs, raw.has_R ? row.rhs_R : row.rhs_L, "Phi");
      form.lines.insert(form.lines.end(), l.begin(), l.end());
    }
  } else if (style == RenderStyle::split) {
    for (const auto& row : raw.rows) {
      const auto l = render_single(row.lhs, row.rhs_R, "PhiR");
      form.lines.insert(form.lines.end(), l.begin(), l.end());
    }
    for (const auto& row : raw.rows) {
      const auto l = render_single(row.lhs, row.rhs_L, "PhiL");
      form.lines.insert(form.lines.end(), l.begin(), l.end());
    }
  } else {
    for (const auto& row : raw.rows) form.lines.push_back(render_combined(row));
  }
  return form;
}

struct NumericRows {
  bool has_R = false;
  bool has_L = false;
  std::array<Polynomial<cd>, 2> lhs;
  std::array<Polynomial<cd>, 2> rhs_R, rhs_L;
};

// Component of an N x N block along the projection P (tr P > 0).
SpectralScalar project(const SMat& block, const CMatrix& P) {
  SpectralScalar acc(0.0);
  const int n = block.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!near_zero(P(j, i))) acc = acc + SpectralScalar(P(j, i)) * block(i, j);
  return acc / SpectralScalar(P.trace());
}

NumericRows numeric_rows(const BoundaryOperatorPair& bp, const CMatrix& E_in) {
  bp.validate();
  const int N = bp.N();
  const CMatrix E = E_in.size() == 0 ? CMatrix(CMatrix::Identity(N, N)) : E_in;
  if (E.rows() != N || E.cols() != N) throw DimensionMismatch("E must be N x N");
  const CMatrix I = CMatrix::Identity(N, N);
  const CMatrix PR = (I + E) / 2.0, PL = (I - E) / 2.0;
  NumericRows out;
  out.has_R = std::abs(PR.trace()) > 0.5;
  out.has_L = std::abs(PL.trace()) > 0.5;
  const Polynomial<cd> ik(std::vector<cd>{0.0, kI});
  const std::array<double, 3> probes{0.37, 1.3, -2.1};
  for (int r = 0; r < 2; ++r) {
    const Polynomial<cd> u = polynomial_of(bp.U(r * N, r * N));
    out.lhs[static_cast<std::size_t>(r)] = to_derivative(r == 0 ? u : u * ik);
    std::array<Polynomial<cd>, 2> pr, pl;
    for (int c = 0; c < 2; ++c) {
      const SMat blk = bp.v_block(r, c);
      const SpectralScalar vr = out.has_R ? project(blk, PR) : SpectralScalar(0.0);
      const SpectralScalar vl = out.has_L ? project(blk, PL) : SpectralScalar(0.0);
      for (double k : probes) {
        const CMatrix recon = vr(k) * PR + vl(k) * PL;
        const CMatrix actual = blk.evaluate(k);
        if (max_abs(recon - actual) > 1e-9 * (1.0 + max_abs(actual)))
          throw CaseMismatch("V block does not act diagonally on the E eigenspaces");
      }
      pr[static_cast<std::size_t>(c)] = polynomial_of(vr);
      pl[static_cast<std::size_t>(c)] = polynomial_of(vl);
    }
    out.rhs_R[static_cast<std::size_t>(r)] = to_derivative(pr[0] + pr[1] * ik);
    out.rhs_L[static_cast<std::size_t>(r)] = to_derivative(pl[0] + pl[1] * ik);
  }
  return out;
}

RawRows lift(const NumericRows& n) {
  RawRows raw;
  raw.has_R = n.has_R;
  raw.has_L = n.has_L;
  for (std::size_t r = 0; r < 2; ++r) raw.rows[r] = {lin_from(n.lhs[r]), lin_from(n.rhs_R[r]), lin_from(n.rhs_L[r])};
  return raw;
}

}  // namespace

std::string render_operator(const Polynomial<cd>& in_k) {
  const Polynomial<cd> d = to_derivative(in_k);
  std::vector<std::string> terms;
  for (int n = 0; n <= d.degree(); ++n) {
    const cd c = d.coeff(n);
    if (near_zero(c)) continue;
    if (n == 0)
      terms.push_back(fmt_num(c));
    else
      terms.push_back(prefix({c, 0.0}) + dx(n));
  }
  return join_terms(terms);
}

std::string DifferentialBoundaryForm::to_string() const {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

DifferentialBoundaryForm render_differential_form(const BoundaryOperatorPair& bp, const CMatrix& E_hat,
                                                  RenderStyle style) {
  return render_rows(lift(numeric_rows(bp, E_hat)), style);
}

DifferentialBoundaryForm render_case_symbolic(BoundaryCase c, const ClassificationParams& p, RenderStyle style) {
  if (c != BoundaryCase::general_a) return render_differential_form(build_case_solution(c, p), e_hat(p), style);
  auto rows_at = [&](double a) {
    ClassificationParams q = p;
    q.a_dil = a;
    return numeric_rows(build_case_solution(c, q), e_hat(q));
  };
  const NumericRows r1 = rows_at(1.0), r2 = rows_at(2.0), r3 = rows_at(3.0);
  auto fit = [](const Polynomial<cd>& p1, const Polynomial<cd>& p2, const Polynomial<cd>& p3) {
    LinPoly out;
    const int deg = std::max({p1.degree(), p2.degree(), p3.degree()});
    for (int n = 0; n <= deg; ++n) {
      const cd c1 = p2.coeff(n) - p1.coeff(n);
      const cd c0 = p1.coeff(n) - c1;
      if (!near(c0 + 3.0 * c1, p3.coeff(n))) throw NotPolynomial("boundary operators are not affine in a");
      out.push_back({c0, c1});
    }
    return out;
  };
  RawRows raw;
  raw.has_R = r1.has_R;
  raw.has_L = r1.has_L;
  for (std::size_t r = 0; r < 2; ++r)
    raw.rows[r] = {fit(r1.lhs[r], r2.lhs[r], r3.lhs[r]), fit(r1.rhs_R[r], r2.rhs_R[r], r3.rhs_R[r]),
                   fit(r1.rhs_L[r], r2.rhs_L[r], r3.rhs_L[r])};
  return render_rows(raw, style);
}

}  // namespace nlsd
