#pragma once

// Normal-ordering engine for words in a, a^dagger, r, t acting on the vacuum.
//
// A FockVector term is  sum_{e, b} C[e; b1..bn] a^dagger^{b1}(q1) ... a^dagger^{bn}(qn) Omega
// where e runs over "external" open slots (indices left free by previously
// applied operators) and b over creator slots.  Coefficients are dense tensors
// with layout [e1 .. em, b1 .. bn], row-major, every slot of size 2N.
//
// Momenta are concrete reals tagged with a symbol id; delta constraints are
// carried symbolically.  Contractions are only generated when the concrete
// values agree, which under the genericity assumption (distinct |momenta|) is
// exactly the symbolic matching.

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "nlsd/defect_rep.hpp"
#include "nlsd/smatrix.hpp"

namespace nlsd {

struct Momentum {
  int symbol = 0;
  int sign = 1;
  double base = 0.0;
  double value() const { return sign * base; }
  Momentum negated() const { return {symbol, -sign, base}; }
  friend bool operator==(const Momentum& x, const Momentum& y) {
    return x.symbol == y.symbol && x.sign == y.sign && x.base == y.base;
  }
};

/// value(symbol a) = sign * value(symbol b).
struct Delta {
  int a = 0;
  int b = 0;
  int sign = 1;
  friend bool operator==(const Delta& x, const Delta& y) { return x.a == y.a && x.b == y.b && x.sign == y.sign; }
  friend bool operator<(const Delta& x, const Delta& y) {
    return std::tie(x.a, x.b, x.sign) < std::tie(y.a, y.b, y.sign);
  }
};

struct FockTerm {
  std::vector<Momentum> creators;
  std::vector<Delta> deltas;
  CVector coeff;
};

class FockVector {
 public:
  FockVector(int dim, int n_ext) : dim_(dim), n_ext_(n_ext) {}

  static FockVector vacuum(int dim);
  /// Creators q1..qn with every creator slot left open as an external slot.
  static FockVector open_word(int dim, const std::vector<Momentum>& qs);
  /// Creators q1..qn with coefficient tensor over the creator slots.
  static FockVector word(int dim, const std::vector<Momentum>& qs, const CVector& coeff);

  int dim() const { return dim_; }
  int n_ext() const { return n_ext_; }
  const std::vector<FockTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(FockTerm term);
  FockVector& operator+=(const FockVector& o);
  FockVector operator-(const FockVector& o) const;
  FockVector scaled(cd s) const;

  /// Merge terms with identical creators and deltas; drop zero terms.
  FockVector compressed(double tol = 0.0) const;

  /// Trace over two external slots i != j.
  FockVector contract_ext(int i, int j) const;
  /// Move external slot `slot` to the last external position.
  FockVector move_ext_to_last(int slot) const;

 private:
  int dim_;
  int n_ext_;
  std::vector<FockTerm> terms_;
};

enum class DefectKind { t, r };
enum class Weight { signed_power, absolute_power };

class RTEngine {
 public:
  RTEngine(DoubledSMatrix S, DefectPair rep);

  const DoubledSMatrix& smatrix() const { return S_; }
  const DefectPair& rep() const { return rep_; }
  int dim() const { return S_.dim(); }

  /// a_gamma(p) psi for every gamma; gamma becomes the last external slot.
  FockVector annihilate(const FockVector& psi, const Momentum& p) const;
  /// t or r (k) psi; (alpha, beta) become the last two external slots.
  FockVector defect(const FockVector& psi, DefectKind kind, double k) const;
  /// Turns the last external slot into a leading creator a^dagger(q).
  FockVector prepend_creator(const FockVector& psi, const Momentum& q) const;

  /// Hierarchy Hamiltonian: integral of k^n (or |k|^n) a^dagger(k) a(k).
  FockVector hamiltonian(const FockVector& psi, int n, Weight w) const;
  /// integral of k^m a^dagger^alpha(k) r_alpha^beta(k) a_beta(-k).
  FockVector reflection_density(const FockVector& psi, int m) const;

  /// Swap creators at positions i, i+1 of every term using the ZF exchange.
  FockVector swap_creators(const FockVector& psi, int i) const;
  /// Sort creators of every term by symbol id.
  FockVector canonicalize(const FockVector& psi) const;

  /// Weak norm: max |<Omega| a(p_m)..a(p_1) psi>| over all out-momentum
  /// assignments p_i = +-|q_j| drawn from the state's magnitudes.
  double weak_norm(const FockVector& psi) const;
  /// Largest coefficient after bringing every word to symbol order.
  double canonical_norm(const FockVector& psi) const;

 private:
  FockVector annihilate_term(const FockTerm& term, int n_ext, const Momentum& p) const;
  FockTerm defect_term(const FockTerm& term, int n_ext, DefectKind kind, double k) const;

  DoubledSMatrix S_;
  DefectPair rep_;
};

// ---------------------------------------------------------------------------
// Amplitudes.

struct Particle {
  double momentum = 0.0;
  int xi = 0;    // +1, -1, or 0 for an open half-line label
  int iso = -1;  // 0..N-1, or -1 for open
};

struct AmplitudeOptions {
  bool kinematic_filter = true;  // in k in R^{-xi}, out p in R^{nu}, magnitude ordering
};

struct MatchedPair {
  int out_index;
  int in_index;
  int sign;  // p_out = sign * k_in
};

struct AmplitudeTerm {
  std::vector<MatchedPair> matching;
  std::vector<double> out_values;
  CVector tensor;  // layout [in slots..., out slots...]
};

struct Amplitude {
  int dim = 0;
  int n_in = 0;
  int n_out = 0;
  std::vector<AmplitudeTerm> terms;

  /// Tensor entry for doubled indices of the out and in particles.
  cd entry(std::size_t term, const std::vector<int>& out_idx, const std::vector<int>& in_idx) const;
  /// Entry selected by the particles' declared (xi, iso) labels.
  cd labelled_entry(std::size_t term, const std::vector<Particle>& out, const std::vector<Particle>& in) const;
  const AmplitudeTerm* find(const std::vector<MatchedPair>& matching) const;
};

int doubled_index(int N, int xi, int iso);

/// <out| in> with the bra applied rightmost-first (a(p1) acts first).
Amplitude vev_amplitude(const RTEngine& eng, const std::vector<Particle>& out, const std::vector<Particle>& in,
                        const AmplitudeOptions& opt = {});
/// Same amplitude computed with the reversed annihilation order and ZF exchange swaps.
Amplitude reorder_oracle(const RTEngine& eng, const std::vector<Particle>& out, const std::vector<Particle>& in,
                         const AmplitudeOptions& opt = {});

/// GenericityError unless magnitudes are nonzero and pairwise distinct.
void require_generic(const std::vector<double>& momenta);

// ---------------------------------------------------------------------------
// Checks built on the engine.

struct CommutatorReport {
  int m = 0, n = 0;
  double lhs_norm = 0.0;
  double residual = 0.0;  // after fitting the global sign
  int fitted_sign = 1;
  double residual_other_sign = 0.0;
};

/// [H~m, H~n] psi vs c [(-1)^m - (-1)^n] int k^{m+n} a^dagger r a(-k) psi.
CommutatorReport check_hierarchy_commutator(const RTEngine& eng, int m, int n, const FockVector& psi);

/// [H^(m), H^(n)] psi with absolute weights (involution).
double check_involution(const RTEngine& eng, int m, int n, const FockVector& psi);

/// [H^(n), t(k)] psi and [H^(n), r(k)] psi (absolute weight).
std::pair<double, double> check_defect_symmetry(const RTEngine& eng, int n, double k, const FockVector& psi);

/// T+(k)^dag T+(k) + R-(-k)^dag R-(-k) - I style residual from 1 -> 1 amplitudes.
double one_particle_unitarity(const RTEngine& eng, double k);

/// Residuals of the conjugation symmetry of the one-particle Hamiltonian action.
double hamiltonian_hermiticity(const RTEngine& eng, int n, double p);

}  // namespace nlsd
