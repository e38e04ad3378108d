#include "nlsd/breaking.hpp"

#include <cmath>

namespace nlsd {

CMatrix BreakingParams::E_matrix() const {
  CMatrix e = CMatrix::Identity(N, N);
  if (E.size() != 0)
    for (int i = 0; i < N; ++i) e(i, i) = static_cast<double>(E(i));
  return e;
}

CMatrix BreakingParams::M_or_identity() const { return M.size() == 0 ? CMatrix::Identity(N, N) : M; }

void BreakingParams::validate() const {
  if (N < 1) throw ParameterError("N must be >= 1");
  if (E.size() != 0) {
    if (E.size() != N) throw DimensionMismatch("E must have N diagonal entries");
    for (int i = 0; i < N; ++i)
      if (E(i) != 1 && E(i) != -1) throw ParameterError("E entries must be +1 or -1");
  }
  const CMatrix m = M_or_identity();
  if (m.rows() != N || m.cols() != N) throw DimensionMismatch("M must be N x N");
  if (max_abs(m.adjoint() * m - CMatrix::Identity(N, N)) > 1e-10) throw ParameterError("M must be unitary");
}

BreakingParams BreakingParams::from_classification(const ClassificationParams& p) {
  BreakingParams bp;
  bp.N = p.N;
  bp.a_dil = p.a_dil;
  bp.E = p.E;
  bp.M = p.M;
  const RhoTau rt = rho_tau(p);
  bp.rho_plus = rt.rho_plus;
  bp.rho_minus = rt.rho_minus;
  bp.tau_plus = rt.tau_plus;
  bp.tau_minus = rt.tau_minus;
  return bp;
}

namespace {

bool e_is_identity(const BreakingParams& bp) {
  for (int i = 0; i < bp.E.size(); ++i)
    if (bp.E(i) != 1) return false;
  return true;
}

// (z - i a s)/(|a| sqrt(1 + z^2/a^2)) with z = 1/k.
series::Series lambda_entry_series(double a, int sign, int order_max) {
  const int n = order_max + 1;
  series::Series root(static_cast<std::size_t>(n), 0.0);
  cd c = 1.0;
  for (int j = 0; 2 * j < n; ++j) {
    root[static_cast<std::size_t>(2 * j)] = c * std::pow(1.0 / (a * a), j);
    c *= (-0.5 - j) / (j + 1.0);
  }
  series::Series lin(static_cast<std::size_t>(n), 0.0);
  lin[0] = -kI * a * static_cast<double>(sign) / std::abs(a);
  if (n > 1) lin[1] = 1.0 / std::abs(a);
  return series::multiply(lin, root);
}

SpectralScalar lambda_entry(double a, int sign) {
  const double s = static_cast<double>(sign);
  return SpectralScalar::opaque(
      "lambda_entry",
      [a, s](cd k) { return (1.0 - kI * a * s * k) / std::sqrt(1.0 + (a * k) * (a * k)); },
      [a, sign](int n) { return lambda_entry_series(a, sign, n); });
}

SMat conj_by(const CMatrix& M, const SMat& X) {
  return SMat::constant(M) * X * SMat::constant(M.inverse());
}

}  // namespace

SMat build_Lambda(const BreakingParams& bp) {
  bp.validate();
  const CMatrix E = bp.E_matrix();
  if (bp.a_dil.is_infinite()) return SMat::constant(E);
  const double a = bp.a_dil.value();
  SMat L(bp.N, SpectralScalar(0.0));
  const NumericRational den(Polynomial<cd>(std::vector<cd>{1.0, kI * a}));
  for (int i = 0; i < bp.N; ++i)
    L(i, i) = SpectralScalar(NumericRational(Polynomial<cd>(std::vector<cd>{1.0, kI * a * E(i, i)})) / den);
  return L;
}

SMat build_lambda(const BreakingParams& bp, int sign) {
  bp.validate();
  if (sign != 1 && sign != -1) throw ParameterError("lambda sign must be +1 or -1");
  if (e_is_identity(bp)) return SMat::identity(bp.N);
  if (bp.a_dil.is_infinite()) throw InfinityCase("lambda at a = inf with E != I needs an unspecified square-root branch");
  const double a = bp.a_dil.value();
  if (a == 0.0) return SMat::identity(bp.N);
  SMat lam(bp.N, SpectralScalar(0.0));
  for (int i = 0; i < bp.N; ++i) lam(i, i) = bp.E(i) == 1 ? SpectralScalar(1.0) : lambda_entry(a, sign);
  return lam;
}

std::vector<ResidualReport> check_lambda(const BreakingParams& bp, const std::vector<double>& samples) {
  const SMat L = build_Lambda(bp);
  const SMat lp = build_lambda(bp, 1), lm = build_lambda(bp, -1);
  ResidualReport sq{"lambda-squared", bp.N, 0.0, 0, 0.0, {}};
  ResidualReport inv{"lambda-inverse", bp.N, 0.0, 0, 0.0, {}};
  const CMatrix I = CMatrix::Identity(bp.N, bp.N);
  for (double k : samples) {
    const CMatrix l = lp.evaluate(k);
    sq.absorb(max_abs(l * l - L.evaluate(k)), {k});
    inv.absorb(max_abs(l * lm.evaluate(k) - I), {k});
  }
  return {sq, inv};
}

DefectPair build_breaking_rep(const BreakingParams& bp) {
  bp.validate();
  const CMatrix M = bp.M_or_identity();
  const SMat Lp = conj_by(M, build_Lambda(bp));
  const SMat Lm = Lp.reflect();
  return DefectPair(bp.rho_plus * Lp, bp.rho_minus * Lm, bp.tau_plus * Lp, bp.tau_minus * Lm);
}

DoubledSMatrix build_tilde_s(const DoubledSMatrix& S, const BreakingParams& bp) {
  if (S.N() != bp.N) throw DimensionMismatch("S-matrix and breaking data differ in N");
  const SMat lam = build_lambda(bp, 1);
  return DoubledSMatrix(S.params(), S.rule(), Dressing([lam](cd x) { return lam.evaluate(x); }));
}

DefectPair tilde_pair(const DefectPair& dp, const BreakingParams& bp) {
  if (dp.N() != bp.N) throw DimensionMismatch("representation and breaking data differ in N");
  const CMatrix M = bp.M_or_identity();
  const SMat Mi = SMat::constant(M.inverse()), Mc = SMat::constant(M);
  const SMat lp = build_lambda(bp, 1), lm = build_lambda(bp, -1);
  auto dress = [&](const SMat& X, const SMat& lam) { return lam * Mi * X * Mc * lam; };
  return DefectPair(dress(dp.Rplus(), lm), dress(dp.Rminus(), lp), dress(dp.Tplus(), lm), dress(dp.Tminus(), lp));
}

DefectPair untilde_pair(const DefectPair& tilde, const BreakingParams& bp) {
  const CMatrix M = bp.M_or_identity();
  const SMat Mi = SMat::constant(M.inverse()), Mc = SMat::constant(M);
  const SMat lp = build_lambda(bp, 1), lm = build_lambda(bp, -1);
  auto undress = [&](const SMat& X, const SMat& lam) { return Mc * lam * X * lam * Mi; };
  return DefectPair(undress(tilde.Rplus(), lp), undress(tilde.Rminus(), lm), undress(tilde.Tplus(), lp),
                    undress(tilde.Tminus(), lm));
}

TildeScalars tilde_vevs(const DefectPair& dp, const BreakingParams& bp, const std::vector<double>& samples) {
  const DefectPair tp = tilde_pair(dp, bp);
  const int N = bp.N;
  const CMatrix I = CMatrix::Identity(N, N);
  auto scalar_part = [&](const SMat& X, const char* name) {
    for (double k : samples) {
      const CMatrix v = X.evaluate(k);
      if (max_abs(v - v(0, 0) * I) > 1e-12 * (1.0 + std::abs(v(0, 0))))
        throw NotScalar(std::string("dressed ") + name + " is not scalar at k=" + std::to_string(k));
    }
    return X(0, 0);
  };
  return {scalar_part(tp.Rplus(), "r+"), scalar_part(tp.Rminus(), "r-"), scalar_part(tp.Tplus(), "t+"),
          scalar_part(tp.Tminus(), "t-")};
}

// ---------------------------------------------------------------------------

std::string GeneratorLabel::to_string() const {
  return std::string(1, kind) + (basis == GeneratorBasis::tilde ? "~" : "") + (sign > 0 ? "+" : "-") + "^(" +
         std::to_string(order) + ")," + std::to_string(i + 1) + std::to_string(j + 1);
}

const GeneratorRecord* BreakingClassification::find(char kind, int sign, int order, int i, int j) const {
  for (const auto& g : generators)
    if (g.label.kind == kind && g.label.sign == sign && g.label.order == order && g.label.i == i && g.label.j == j)
      return &g;
  return nullptr;
}

std::vector<GeneratorLabel> BreakingClassification::broken() const {
  std::vector<GeneratorLabel> out;
  for (const auto& g : generators)
    if (g.broken) out.push_back(g.label);
  return out;
}

BreakingClassification expand_and_classify(const DefectPair& dp, int n_max, double tol, GeneratorBasis basis) {
  if (n_max < 1) throw ParameterError("n_max must be >= 1");
  struct Block {
    char kind;
    int sign;
    SMat X;
  };
  const std::vector<Block> blocks{{'r', 1, dp.Rplus()}, {'r', -1, dp.Rminus()}, {'t', 1, dp.Tplus()}, {'t', -1, dp.Tminus()}};
  BreakingClassification out;
  const int N = dp.N();
  for (const auto& b : blocks) {
    const SeriesExpansion ex = laurent_expand(b.X, n_max);
    for (int n = 1; n <= n_max; ++n) {
      const CMatrix& c = ex.coefficients[static_cast<std::size_t>(n)];
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          out.generators.push_back({{b.kind, b.sign, n, i, j, basis}, c(i, j), std::abs(c(i, j)) > tol});
      const cd tr = c.trace();
      out.combinations.push_back({"trace", b.kind, b.sign, n, basis, tr, std::abs(tr) > tol});
      for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
          const cd d = c(i, i) - c(j, j);
          out.combinations.push_back({"diag(" + std::to_string(i + 1) + ")-diag(" + std::to_string(j + 1) + ")", b.kind,
                                      b.sign, n, basis, d, std::abs(d) > tol});
        }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

DefectPair cos_sin_example(int N, double theta0) {
  const SpectralScalar arg = SpectralScalar(theta0) / SpectralScalar::k();
  const SMat c = SMat::scalar(N, cos(arg));
  const SMat s = SMat::scalar(N, sin(arg));
  return DefectPair(c, c, s, s);
}

BreakingParams rotation_example(double theta0, double mu, double a) {
  BreakingParams bp;
  bp.N = 2;
  bp.a_dil = a;
  bp.E = Eigen::VectorXi(2);
  bp.E << 1, -1;
  bp.M = CMatrix(2, 2);
  bp.M << std::cos(mu), std::sin(mu), -std::sin(mu), std::cos(mu);
  bp.rho_plus = std::cos(theta0);
  bp.rho_minus = -std::cos(theta0);
  bp.tau_plus = std::sin(theta0);
  bp.tau_minus = std::sin(theta0);
  bp.theta0 = theta0;
  bp.mu = mu;
  return bp;
}

CMatrix gamma_matrix(double /*theta0*/, double mu, double a, cd k) {
  const cd den = 1.0 + kI * a * k;
  if (std::abs(den) < 1e-12 * (1.0 + std::abs(a * k))) throw PoleError("Gamma(k) has a pole at k = i/a");
  const cd beta = (1.0 - kI * a * k) / den;
  const double c = std::cos(mu), s = std::sin(mu);
  CMatrix G(2, 2);
  G << c * c + beta * s * s, (beta - 1.0) * c * s, (beta - 1.0) * c * s, s * s + beta * c * c;
  return G;
}

cd rotation_example_coefficient(char kind, int sign, int n, int i, int j, double theta0, double mu, double a) {
  const double pref = kind == 'r' ? sign * std::cos(theta0) : std::sin(theta0);
  const double c = std::cos(mu), s = std::sin(mu);
  double base;
  if (i == 0 && j == 0)
    base = -2.0 * s * s;
  else if (i == 1 && j == 1)
    base = -2.0 * c * c;
  else
    base = -2.0 * s * c;
  if (n == 0) {
    // beta(inf) = -1
    const double g = (i == j) ? (i == 0 ? c * c - s * s : s * s - c * c) : -2.0 * c * s;
    return pref * g;
  }
  return pref * base * std::pow(static_cast<double>(sign) * kI / a, n);
}

}  // namespace nlsd
