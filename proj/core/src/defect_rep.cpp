#include "nlsd/defect_rep.hpp"

#include <random>

#include <unsupported/Eigen/KroneckerProduct>

namespace nlsd {

namespace {

constexpr double kParamTolerance = 1e-12;
// Points used for parity/reality checks of user functions.
constexpr double kParityPoints[] = {0.31, 0.77, 1.9, 3.4, 6.1};

NumericRational poly(std::vector<cd> ascending) { return NumericRational(Polynomial<cd>(std::move(ascending))); }

std::string fmt(double x) { return Dilation(x).to_string(); }

}  // namespace

void NLSDefectParams::validate() const {
  if (N < 1) throw ParameterError("N must be >= 1");
  const double det = a * d - b * c;
  if (std::abs(det - 1.0) >= kParamTolerance) throw ParameterError("ad - bc must equal 1, got " + fmt(det));
  if (std::abs(std::norm(alpha) - 1.0) >= kParamTolerance) throw ParameterError("|alpha| must equal 1");
}

bool check_no_bound_states(const NLSDefectParams& p) {
  if (p.b != 0.0) {
    const double sgn = p.b > 0 ? 1.0 : -1.0;
    return p.a + p.d - sgn * std::sqrt((p.a - p.d) * (p.a - p.d) + 4.0) <= 0.0;
  }
  if (p.a + p.d == 0.0) throw DegenerateError("bound-state condition undefined for b = 0 and a + d = 0");
  return p.c / (p.a + p.d) >= 0.0;
}

DefectPair::DefectPair(const SMat& Rplus, const SMat& Rminus, const SMat& Tplus, const SMat& Tminus)
    : N_(Rplus.dim()) {
  const SMat Z(N_, SpectralScalar(0.0));
  R_ = SMat::blocks(Rplus, Z, Z, Rminus);
  T_ = SMat::blocks(Z, Tplus, Tminus, Z);
}

DefectPair DefectPair::from_blocks(SMat calR, SMat calT) {
  if (calR.dim() != calT.dim() || calR.dim() % 2 != 0)
    throw DimensionMismatch("RR and TT must share an even dimension");
  return DefectPair(calR.dim() / 2, std::move(calR), std::move(calT));
}

DefectPair build_nls_defect(const NLSDefectParams& p) {
  p.validate();
  if (!check_no_bound_states(p)) throw BoundStateError("parameters admit a bound state");
  const auto [a, b, c, d] = std::array<double, 4>{p.a, p.b, p.c, p.d};
  const NumericRational num = poly({c, kI * (a - d), b});
  const NumericRational den_plus = poly({-c, kI * (a + d), b});
  const NumericRational den_minus = poly({-c, -kI * (a + d), b});
  const NumericRational Rp = num / den_plus;
  const NumericRational Rm = num / den_minus;
  const NumericRational Tp = poly({0.0, 2.0 * kI * p.alpha}) / den_plus;
  const NumericRational Tm = poly({0.0, -2.0 * kI * std::conj(p.alpha)}) / den_minus;
  return DefectPair(SMat::scalar(p.N, Rp), SMat::scalar(p.N, Rm), SMat::scalar(p.N, Tp), SMat::scalar(p.N, Tm));
}

// ---------------------------------------------------------------------------

CMatrix ClassificationParams::M_or_identity() const {
  return M.size() == 0 ? CMatrix::Identity(N, N) : M;
}

CMatrix ClassificationParams::E_matrix() const {
  CMatrix e = CMatrix::Identity(N, N);
  if (E.size() != 0)
    for (int i = 0; i < N; ++i) e(i, i) = static_cast<double>(E(i));
  return e;
}

void ClassificationParams::validate() const {
  if (N < 1) throw ParameterError("N must be >= 1");
  const CMatrix m = M_or_identity();
  if (m.rows() != N || m.cols() != N) throw DimensionMismatch("M must be N x N");
  if (max_abs(m.adjoint() * m - CMatrix::Identity(N, N)) >= kParamTolerance) throw ParameterError("M is not unitary");
  if (E.size() != 0) {
    if (E.size() != N) throw DimensionMismatch("E must have N diagonal entries");
    for (int i = 0; i < N; ++i)
      if (E(i) != 1 && E(i) != -1) throw ParameterError("E entries must be +1 or -1");
  }
  if ((eps_plus != 1 && eps_plus != -1) || (eps_minus != 1 && eps_minus != -1))
    throw ParameterError("eps_plus, eps_minus must be +1 or -1");
  const bool full = A && B && C && theta;
  if (!full && !omega) throw ParameterError("need either (A, B, C, theta) or omega");

  const double eps = static_cast<double>(eps_plus * eps_minus);
  auto check = [](const SpectralScalar& f, double parity, const std::string& name) {
    for (double k : kParityPoints) {
      const cd fk = f(k);
      const cd fm = f(-k);
      const double scale = 1.0 + std::abs(fk);
      if (std::abs(fk.imag()) > 1e-10 * scale) throw ParityError(name + " is not real at k=" + fmt(k));
      if (std::abs(fm - parity * fk) > 1e-10 * scale)
        throw ParityError(name + " violates its parity constraint at k=" + fmt(k));
    }
  };
  if (omega) check(*omega, -eps, "omega");
  if (full) {
    check(*A, -1.0, "A");
    check(*B, 1.0, "B");
    check(*C, -1.0, "C");
    check(*theta, -eps, "theta");
  }
}

SMat middle_factor(const ClassificationParams& p, int sign) {
  const CMatrix M = p.M_or_identity();
  const CMatrix Minv = M.inverse();
  const CMatrix E = p.E_matrix();
  if (p.a_dil.is_infinite()) return SMat::constant(M * E * Minv);
  const double a = p.a_dil.value();
  // (I + s i a k E)/(1 + s i a k) is diagonal in the eigenbasis.
  const NumericRational den = poly({1.0, static_cast<double>(sign) * kI * a});
  SMat diag(p.N, SpectralScalar(0.0));
  for (int i = 0; i < p.N; ++i) diag(i, i) = SpectralScalar(poly({1.0, static_cast<double>(sign) * kI * a * E(i, i)}) / den);
  return SMat::constant(M) * diag * SMat::constant(Minv);
}

SpectralScalar mobius_phase(const SpectralScalar& x) { return (x - SpectralScalar(kI)) / (x + SpectralScalar(kI)); }

RhoTau rho_tau(const ClassificationParams& p) {
  if (p.omega) {
    const SpectralScalar& w = *p.omega;
    const SpectralScalar one(1.0);
    const SpectralScalar cos_t = (one - w * w) / (one + w * w);
    const SpectralScalar sin_t = SpectralScalar(2.0) * w / (one + w * w);
    return {cos_t, SpectralScalar(static_cast<double>(p.eps_plus * p.eps_minus)) * cos_t, sin_t, sin_t};
  }
  const SpectralScalar pa = mobius_phase(*p.A);
  const SpectralScalar pb = mobius_phase(*p.B);
  const SpectralScalar pc = mobius_phase(*p.C);
  const SpectralScalar one(1.0);
  const SpectralScalar cos_t = cos(*p.theta);
  const SpectralScalar sin_t = sin(*p.theta);
  return {SpectralScalar(static_cast<double>(p.eps_plus)) * pa * pc * cos_t,
          SpectralScalar(static_cast<double>(p.eps_minus)) * pa / pc * cos_t, pb * pc * sin_t,
          one / (pb * pc) * sin_t};
}

DefectPair build_classified(const ClassificationParams& p) {
  p.validate();
  const RhoTau rt = rho_tau(p);
  const SMat Xp = middle_factor(p, 1);
  const SMat Xm = middle_factor(p, -1);
  return DefectPair(rt.rho_plus * Xp, rt.rho_minus * Xm, rt.tau_plus * Xp, rt.tau_minus * Xm);
}

CMatrix random_unitary(int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix z(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) z(i, j) = cd(nd(rng), nd(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(N, N);
  return q;
}

Eigen::VectorXi random_signs(int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXi e(N);
  for (int i = 0; i < N; ++i) e(i) = coin(rng) ? 1 : -1;
  return e;
}

// ---------------------------------------------------------------------------

std::vector<double> rep_samples(const DefectPair& dp, std::uint64_t seed, int count, double lo, double hi) {
  auto rows = draw_samples(seed, count, 1, lo, hi, [&dp](const std::vector<double>& s) {
    try {
      for (double k : {s[0], -s[0]}) {
        const CMatrix r = dp.R(k);
        const CMatrix t = dp.T(k);
        if (!r.allFinite() || !t.allFinite()) return true;
      }
      return std::abs(s[0]) < 1e-3;
    } catch (const PoleError&) {
      return true;
    }
  });
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[0]);
  return out;
}

std::vector<ResidualReport> check_rep_constraints(const DefectPair& dp, const std::vector<double>& samples) {
  const int d = 2 * dp.N();
  std::vector<ResidualReport> reps = {
      {"dag-R", dp.N(), 0.0, 0, 0.0, {}},
      {"dag-T", dp.N(), 0.0, 0, 0.0, {}},
      {"unit-TT", dp.N(), 0.0, 0, 0.0, {}},
      {"unit-TR", dp.N(), 0.0, 0, 0.0, {}},
  };
  for (double k : samples) {
    const CMatrix R = dp.R(k), Rm = dp.R(-k);
    const CMatrix T = dp.T(k), Tm = dp.T(-k);
    reps[0].absorb(max_abs(R.adjoint() - Rm), {k});
    reps[1].absorb(max_abs(T.adjoint() - T), {k});
    reps[2].absorb(max_abs(T * T + R * Rm - CMatrix::Identity(d, d)), {k});
    reps[3].absorb(max_abs(T * R + R * Tm), {k});
  }
  return reps;
}

std::vector<ResidualReport> check_rt_equations(const DefectPair& dp, const DoubledSMatrix& S,
                                               const std::vector<std::vector<double>>& samples) {
  const int d = 2 * dp.N();
  if (S.dim() != d) throw DimensionMismatch("S-matrix and representation dimensions differ");
  const CMatrix I = CMatrix::Identity(d, d);
  auto one = [&I](const CMatrix& x) { return Eigen::kroneckerProduct(x, I).eval(); };
  auto two = [&I](const CMatrix& x) { return Eigen::kroneckerProduct(I, x).eval(); };
  std::vector<ResidualReport> reps = {
      {"rt-TT", S.N(), S.params().g, 0, 0.0, {}},
      {"rt-TR", S.N(), S.params().g, 0, 0.0, {}},
      {"rt-RR", S.N(), S.params().g, 0, 0.0, {}},
  };
  for (const auto& s : samples) {
    if (s.size() < 2) throw DimensionMismatch("RT-equation sample needs (k1, k2)");
    const double k1 = s[0], k2 = s[1];
    const CMatrix T1 = one(dp.T(k1)), T2 = two(dp.T(k2));
    const CMatrix R1 = one(dp.R(k1)), R2 = two(dp.R(k2));
    const CMatrix S12 = S.s12(k1, k2), S21 = S.s21(k2, k1);
    const CMatrix S12m = S.s12(k1, -k2), S21m = S.s21(-k2, k1);
    reps[0].absorb(max_abs(S12 * T1 * S21 * T2 - T2 * S12 * T1 * S21), s);
    reps[1].absorb(max_abs(S12 * T1 * S21 * R2 - R2 * S12m * T1 * S21m), s);
    reps[2].absorb(max_abs(S12 * R1 * S.s21(k2, -k1) * R2 - R2 * S12m * R1 * S.s21(-k2, -k1)), s);
  }
  return reps;
}

DefectPair apply_dilatation(const DefectPair& dp, const DilatationParams& dil, const std::vector<double>& samples) {
  for (double k : samples) {
    for (const auto* mu : {&dil.mu_plus, &dil.mu_minus})
      if (std::abs((*mu)(k) * (*mu)(-k) - 1.0) > 1e-10)
        throw AutomorphismError("mu(k) mu(-k) != 1 at k=" + fmt(k));
    const cd lhs = dil.nu0(-k);
    const cd rhs = dil.mu_plus(-k) * dil.mu_minus(k) * dil.nu0(k);
    if (std::abs(lhs - rhs) > 1e-10 * (1.0 + std::abs(lhs)))
      throw AutomorphismError("nu0(-k) != mu+(-k) mu-(k) nu0(k) at k=" + fmt(k));
  }
  const SpectralScalar inv_nu = SpectralScalar(1.0) / dil.nu0;
  return DefectPair(dil.mu_plus * dp.Rplus(), dil.mu_minus * dp.Rminus(), dil.nu0 * dp.Tplus(), inv_nu * dp.Tminus());
}

DilatationParams reducing_dilatation(const ClassificationParams& p) {
  if (!(p.A && p.B && p.C)) throw ParameterError("reducing dilatation needs A, B, C");
  const SpectralScalar one(1.0);
  const SpectralScalar ia = one / mobius_phase(*p.A);  // (A+i)/(A-i)
  const SpectralScalar ib = one / mobius_phase(*p.B);
  const SpectralScalar pc = mobius_phase(*p.C);
  const SpectralScalar ep(static_cast<double>(p.eps_plus));
  return {ep * ia / pc, ep * ia * pc, ib / pc};
}

}  // namespace nlsd
