#pragma once

// Bulk NLS S-matrix s(k) and the doubled exchange matrix S12(k1, k2).
//
// Index conventions:
//   doubled index   alpha = xi * N + i   (xi = 0 for '+', 1 for '-')
//   two-space index (alpha1, alpha2) -> alpha1 * 2N + alpha2
//   three-space     (alpha1, alpha2, alpha3) -> (alpha1 * 2N + alpha2) * 2N + alpha3
// S_ij of a three-space product acts on slots (i, j) and as identity elsewhere.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlsd/spectral.hpp"

namespace nlsd {

struct SMatrixParams {
  int N = 1;
  double g = 1.0;
  bool free_theory = false;  // s == identity; the only way g = 0 is admitted

  void validate() const;
};

/// Flip operator on C^n (x) C^n.
CMatrix flip(int n);

/// s(k) = (k I - i g P) / (k + i g), or I in the free theory.
CMatrix build_s_block(const SMatrixParams& p, cd k);

enum class BlockRule {
  standard,   // (++, +-, -+, --) -> (k1-k2, k1+k2, -k1-k2, -k1+k2)
  corrupted,  // ++ and +- exchanged; used to prove the checkers can fail
};

/// lambda(k): N x N dressing matrix used by the tilde S-matrix.
using Dressing = std::function<CMatrix(cd)>;

class DoubledSMatrix {
 public:
  explicit DoubledSMatrix(SMatrixParams params, BlockRule rule = BlockRule::standard,
                          std::optional<Dressing> dressing = std::nullopt);

  const SMatrixParams& params() const { return params_; }
  int N() const { return params_.N; }
  /// Dimension of one doubled auxiliary space (2N).
  int dim() const { return 2 * params_.N; }
  bool dressed() const { return dressing_.has_value(); }
  BlockRule rule() const { return rule_; }

  /// N^2 x N^2 block for half-line labels xi1, xi2 in {0 (+), 1 (-)}.
  CMatrix block(int xi1, int xi2, cd k1, cd k2) const;

  /// (2N)^2 x (2N)^2 matrix S12(k1, k2).
  CMatrix s12(cd k1, cd k2) const;
  /// S21(k1, k2) = P S12(k1, k2) P with P the flip of the two doubled spaces.
  CMatrix s21(cd k1, cd k2) const;
  CMatrix operator()(cd k1, cd k2) const { return s12(k1, k2); }

  /// Pole locations (real parts) of the block arguments, for sample rejection.
  bool near_pole(double k1, double k2, double margin) const;

 private:
  CMatrix s_tilde(cd x, cd y) const;

  SMatrixParams params_;
  BlockRule rule_;
  std::optional<Dressing> dressing_;
};

// ---------------------------------------------------------------------------
// Residual reports.

struct ResidualReport {
  std::string identity_name;
  int N = 0;
  double g = 0.0;
  int n_samples = 0;
  double max_residual = 0.0;
  std::vector<double> worst_sample;

  void absorb(double residual, std::vector<double> sample) {
    ++n_samples;
    if (residual > max_residual || worst_sample.empty()) {
      max_residual = std::max(max_residual, residual);
      worst_sample = std::move(sample);
    }
  }
  bool passed(double tol) const { return max_residual < tol; }
};

/// Seeded uniform samples in [lo, hi]^arity, rejecting points for which
/// `reject` returns true.
std::vector<std::vector<double>> draw_samples(std::uint64_t seed, int count, int arity, double lo = -10.0,
                                              double hi = 10.0,
                                              const std::function<bool(const std::vector<double>&)>& reject = {});

/// Samples for the S-matrix checkers: no argument combination within 1e-3 of zero.
std::vector<std::vector<double>> smatrix_samples(const DoubledSMatrix& S, std::uint64_t seed, int count, int arity);

/// max over samples of |S12(k1,k2) S21(k2,k1) - I|.
ResidualReport check_unitarity(const DoubledSMatrix& S, const std::vector<std::vector<double>>& samples);

/// max over samples of |S12 S13 S23 - S23 S13 S12| on the triple space.
ResidualReport check_yang_baxter(const DoubledSMatrix& S, const std::vector<std::vector<double>>& samples);

/// Embeddings of a two-space operator into the triple space.
CMatrix embed12(const CMatrix& s, int d);
CMatrix embed23(const CMatrix& s, int d);
CMatrix embed13(const CMatrix& s, int d);

}  // namespace nlsd
