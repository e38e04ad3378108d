#pragma once

// Symmetry-breaking analysis: lambda(k), the dressed S-matrix, tilde generators
// and the k^-1 classification of vacuum expectation values.
//
// Laurent expansions are taken at k -> +infinity along the real axis; on that
// ray sqrt(1 + (ak)^2) = |a| k sqrt(1 + 1/(ak)^2).

#include <string>
#include <vector>

#include "nlsd/defect_rep.hpp"
#include "nlsd/smatrix.hpp"
#include "nlsd/spectral.hpp"

namespace nlsd {

struct BreakingParams {
  int N = 1;
  Dilation a_dil = 0.0;
  Eigen::VectorXi E;  // diagonal entries +-1; all +1 when empty
  CMatrix M;          // unitary; identity when empty
  SpectralScalar rho_plus = 1.0, rho_minus = 1.0, tau_plus = 0.0, tau_minus = 0.0;
  double theta0 = 0.0;
  double mu = 0.0;

  CMatrix E_matrix() const;
  CMatrix M_or_identity() const;
  void validate() const;

  static BreakingParams from_classification(const ClassificationParams& p);
};

/// Lambda(k) = (I + iak E)/(1 + iak), or E when a is infinite.
SMat build_Lambda(const BreakingParams& bp);
/// lambda(sign * k); InfinityCase for a = inf with E != I.
SMat build_lambda(const BreakingParams& bp, int sign = 1);

/// lambda^2 - Lambda and lambda(k) lambda(-k) - I over real samples.
std::vector<ResidualReport> check_lambda(const BreakingParams& bp, const std::vector<double>& samples);

/// R+- = rho+- M Lambda(+-k) M^-1, T+- = tau+- M Lambda(+-k) M^-1.
DefectPair build_breaking_rep(const BreakingParams& bp);

/// S with every s block dressed by lambda.
DoubledSMatrix build_tilde_s(const DoubledSMatrix& S, const BreakingParams& bp);

/// r~+- = lambda(-+k) M^-1 R+- M lambda(-+k), same for t.
DefectPair tilde_pair(const DefectPair& dp, const BreakingParams& bp);

/// Inverse of tilde_pair.
DefectPair untilde_pair(const DefectPair& tilde, const BreakingParams& bp);

struct TildeScalars {
  SpectralScalar rho_plus, rho_minus, tau_plus, tau_minus;
};

/// Scalar parts of the dressed VEVs; NotScalar if any dressed block is not a
/// multiple of I within 1e-12 on the samples.
TildeScalars tilde_vevs(const DefectPair& dp, const BreakingParams& bp, const std::vector<double>& samples);

// ---------------------------------------------------------------------------
// Classification.

enum class GeneratorBasis { plain, tilde };

struct GeneratorLabel {
  char kind = 'r';  // 'r' or 't'
  int sign = 1;
  int order = 0;
  int i = 0, j = 0;  // 0-based
  GeneratorBasis basis = GeneratorBasis::plain;
  std::string to_string() const;
};

struct GeneratorRecord {
  GeneratorLabel label;
  cd vev_coefficient;
  bool broken = false;
};

struct CombinationRecord {
  std::string description;  // "trace" or "diag(i)-diag(j)"
  char kind = 'r';
  int sign = 1;
  int order = 0;
  GeneratorBasis basis = GeneratorBasis::plain;
  cd value;
  bool broken = false;
};

struct BreakingClassification {
  std::vector<GeneratorRecord> generators;
  std::vector<CombinationRecord> combinations;

  const GeneratorRecord* find(char kind, int sign, int order, int i, int j) const;
  std::vector<GeneratorLabel> broken() const;
};

/// Coefficients n = 1..n_max of every entry of R+-, T+-.
BreakingClassification expand_and_classify(const DefectPair& dp, int n_max, double tol = 1e-10,
                                           GeneratorBasis basis = GeneratorBasis::plain);

// ---------------------------------------------------------------------------
// Worked examples.

/// R+- = cos(theta0/k) I, T+- = sin(theta0/k) I.
DefectPair cos_sin_example(int N, double theta0);

/// N = 2, E = diag(1, -1), M = [[cos mu, sin mu], [-sin mu, cos mu]],
/// rho+- = +-cos theta0, tau+- = sin theta0.
BreakingParams rotation_example(double theta0, double mu, double a);

/// Gamma(k) = M Lambda(k) M^-1 for the rotation example; PoleError at k = i/a.
CMatrix gamma_matrix(double theta0, double mu, double a, cd k);

/// Printed closed form for the order-n VEV entry (i, j) of the rotation example.
cd rotation_example_coefficient(char kind, int sign, int n, int i, int j, double theta0, double mu, double a);

}  // namespace nlsd
