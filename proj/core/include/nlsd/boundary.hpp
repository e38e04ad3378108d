#pragma once

// Defect boundary conditions: (U, V) operator pairs, the functional equations
// tying them to R, T, free plane-wave solutions and the k -> -i Dx rendering.

#include <string>
#include <vector>

#include "nlsd/defect_rep.hpp"
#include "nlsd/smatrix.hpp"
#include "nlsd/spectral.hpp"

namespace nlsd {

/// U = diag(u1 I, u2 I), V = [[V11, V12], [V21, V22]], both 2N x 2N.
struct BoundaryOperatorPair {
  SMat U;
  SMat V;

  int N() const { return U.dim() / 2; }
  SMat u_block(int row) const { return U.block(row, row, N()); }
  SMat v_block(int row, int col) const { return V.block(row, col, N()); }
  /// DimensionMismatch unless U has the diagonal scalar-block shape.
  void validate() const;
};

enum class FunctionalCopy { value, derivative };

/// X scalar multiple of I, Y an N x N block.
struct FunctionalPair {
  SMat X;
  SMat Y;
};

/// (u1 I, V11 + ik V12) for the value copy, (ik u2 I, V21 + ik V22) for the derivative copy.
FunctionalPair functional_pair(const BoundaryOperatorPair& bp, FunctionalCopy copy);

/// X(k) + X(-k)R+(-k) - Y(k)T-(k) and Y(k) + Y(-k)R-(-k) - X(k)T+(k).
ResidualReport check_functional_equations(const FunctionalPair& fp, const DefectPair& dp,
                                          const std::vector<double>& samples);

enum class BoundaryCase { scalar, e_type, general_a };
std::string to_string(BoundaryCase c);

/// Case implied by the classification data: E = I or a = 0 is scalar,
/// a = inf is E-type, anything else is general-a.
BoundaryCase infer_case(const ClassificationParams& p);

/// f = (A+i)(B+i)(C+i), g = (A+i)(B-i)(C-i); both equal -i in the reduced form.
std::pair<SpectralScalar, SpectralScalar> f_g(const ClassificationParams& p);
/// omega itself, or tan(theta/2) for the full parametrization.
SpectralScalar omega_of(const ClassificationParams& p);

/// Closed-form (U, V) for the case; CaseMismatch when p does not fit it.
BoundaryOperatorPair build_case_solution(BoundaryCase c, const ClassificationParams& p);

// ---------------------------------------------------------------------------
// Free solutions.

struct PlaneWave {
  CMatrix amplitude;  // N x N
  double kappa;       // e^{i kappa x}
};

class FreeSolution {
 public:
  /// sign = +1 needs k < 0, sign = -1 needs k > 0.
  FreeSolution(const DefectPair& dp, double k, int sign);

  double k() const { return k_; }
  int sign() const { return sign_; }
  const std::vector<PlaneWave>& above() const { return above_; }
  const std::vector<PlaneWave>& below() const { return below_; }

  CMatrix value(double x) const;
  CMatrix derivative(double x) const;
  /// (Psi, dPsi) one-sided limits at 0 stacked into a 2N x N matrix.
  CMatrix limit_above() const;
  CMatrix limit_below() const;

 private:
  double k_;
  int sign_;
  std::vector<PlaneWave> above_, below_;
};

/// U acting on the limit from above minus V on the limit from below, each
/// spectral entry evaluated at the exponent of the plane wave it acts on.
ResidualReport verify_on_free_solutions(const BoundaryOperatorPair& bp, const DefectPair& dp,
                                        const std::vector<double>& k_samples);

/// Jump condition alpha [[aI, bI], [cI, dI]] for the NLS family.
ResidualReport check_theorem_bc(const NLSDefectParams& p, const std::vector<double>& k_samples);

// ---------------------------------------------------------------------------
// Differential forms.

/// k^n -> (-i)^n Dx^n.
template <class F>
Polynomial<F> to_derivative(const Polynomial<F>& in_k) {
  std::vector<F> c;
  F unit(1);
  const F mi = -FieldTraits<F>::imaginary_unit();
  for (int n = 0; n <= in_k.degree(); ++n) {
    c.push_back(in_k.coeff(n) * unit);
    unit = unit * mi;
  }
  return Polynomial<F>(std::move(c));
}

/// Polynomial part of a spectral scalar; NotPolynomial otherwise.
Polynomial<cd> polynomial_of(const SpectralScalar& s);

/// Matrix-coefficient operator sum_n C_n Dx^n.
struct MatrixDiffOp {
  std::vector<CMatrix> coefficients;
  MatrixDiffOp compose(const MatrixDiffOp& o) const;
  friend bool operator==(const MatrixDiffOp& a, const MatrixDiffOp& b);
};
MatrixDiffOp to_derivative(const SMat& m);

/// Single operator, e.g. 2k -> "-2i*Dx", k^2 -> "-Dx^2".
std::string render_operator(const Polynomial<cd>& in_k);

enum class RenderStyle { automatic, phi, split, combined };

/// Boundary conditions as ASCII lines. Projections use E_hat (identity when empty).
struct DifferentialBoundaryForm {
  std::vector<std::string> lines;
  std::string to_string() const;
};

DifferentialBoundaryForm render_differential_form(const BoundaryOperatorPair& bp, const CMatrix& E_hat = {},
                                                  RenderStyle style = RenderStyle::automatic);

/// Same rendering with the dilation a kept as a symbol; U, V must be affine in a.
DifferentialBoundaryForm render_case_symbolic(BoundaryCase c, const ClassificationParams& p,
                                              RenderStyle style = RenderStyle::automatic);

}  // namespace nlsd
