#pragma once

// Reflection/transmission data R(k), T(k) of the Fock representation:
// the concrete NLS family, the classified family and their checkers.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlsd/smatrix.hpp"
#include "nlsd/spectral.hpp"

namespace nlsd {

struct NLSDefectParams {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  cd alpha = 1.0;
  int N = 1;
  double g = 1.0;

  /// ParameterError unless ad - bc = 1 and |alpha| = 1.
  void validate() const;
};

/// Bound-state exclusion; DegenerateError when b = 0 and a + d = 0.
bool check_no_bound_states(const NLSDefectParams& p);

/// Block data RR = blockdiag(R+, R-), TT = [[0, T+], [T-, 0]] (each block N x N).
class DefectPair {
 public:
  DefectPair(const SMat& Rplus, const SMat& Rminus, const SMat& Tplus, const SMat& Tminus);
  static DefectPair from_blocks(SMat calR, SMat calT);

  int N() const { return N_; }
  const SMat& calR() const { return R_; }
  const SMat& calT() const { return T_; }

  SMat Rplus() const { return R_.block(0, 0, N_); }
  SMat Rminus() const { return R_.block(1, 1, N_); }
  SMat Tplus() const { return T_.block(0, 1, N_); }
  SMat Tminus() const { return T_.block(1, 0, N_); }

  CMatrix R(cd k) const { return R_.evaluate(k); }
  CMatrix T(cd k) const { return T_.evaluate(k); }

 private:
  DefectPair(int N, SMat R, SMat T) : N_(N), R_(std::move(R)), T_(std::move(T)) {}
  int N_;
  SMat R_;
  SMat T_;
};

DefectPair build_nls_defect(const NLSDefectParams& p);

struct ClassificationParams {
  int N = 1;
  CMatrix M;                 // unitary; identity when empty
  Eigen::VectorXi E;         // diagonal of E, entries +-1; all +1 when empty
  Dilation a_dil = 0.0;
  int eps_plus = 1;
  int eps_minus = -1;
  // Full parametrization (all four present) or the reduced datum omega.
  std::optional<SpectralScalar> A, B, C, theta;
  std::optional<SpectralScalar> omega;

  CMatrix M_or_identity() const;
  CMatrix E_matrix() const;
  /// ParityError on violated parity/reality, ParameterError on bad M, E or signs.
  void validate() const;
};

/// M (I +- i a k E) / (1 +- i a k) M^-1; M E M^-1 when a is infinite.
SMat middle_factor(const ClassificationParams& p, int sign);

struct RhoTau {
  SpectralScalar rho_plus, rho_minus, tau_plus, tau_minus;
};

/// rho, tau from the full parametrization or from omega.
RhoTau rho_tau(const ClassificationParams& p);

DefectPair build_classified(const ClassificationParams& p);

/// (x - i)/(x + i) as a spectral function.
SpectralScalar mobius_phase(const SpectralScalar& x);

/// Seeded random unitary (QR of a Gaussian complex matrix).
CMatrix random_unitary(int N, std::uint64_t seed);
/// Seeded random diagonal of +-1 entries.
Eigen::VectorXi random_signs(int N, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Checkers.

/// Real samples in [lo, hi] at which both RR and TT are evaluable at +-k.
std::vector<double> rep_samples(const DefectPair& dp, std::uint64_t seed, int count, double lo = -10.0,
                                double hi = 10.0);

/// dag-R, dag-T, unit-TT, unit-TR residual reports over real samples.
std::vector<ResidualReport> check_rep_constraints(const DefectPair& dp, const std::vector<double>& samples);

/// TT, TR and RR exchange relations with r, t replaced by R, T.
std::vector<ResidualReport> check_rt_equations(const DefectPair& dp, const DoubledSMatrix& S,
                                               const std::vector<std::vector<double>>& samples);

struct DilatationParams {
  SpectralScalar mu_plus = 1.0;
  SpectralScalar mu_minus = 1.0;
  SpectralScalar nu0 = 1.0;
};

/// R+- -> mu+- R+-, T+- -> nu0^{+-1} T+-; AutomorphismError when the defining
/// identities fail on `samples`.
DefectPair apply_dilatation(const DefectPair& dp, const DilatationParams& dil, const std::vector<double>& samples);

/// Dilatation mapping the full parametrization onto the reduced one.
DilatationParams reducing_dilatation(const ClassificationParams& p);

}  // namespace nlsd
