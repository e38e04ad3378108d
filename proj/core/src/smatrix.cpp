#include "nlsd/smatrix.hpp"

#include <random>

#include <unsupported/Eigen/KroneckerProduct>

namespace nlsd {

void SMatrixParams::validate() const {
  if (N < 1) throw ParameterError("N must be >= 1, got " + std::to_string(N));
  if (!std::isfinite(g)) throw ParameterError("coupling g must be finite");
  if (g == 0.0 && !free_theory) throw ParameterError("g = 0 requires the free-theory flag");
}

CMatrix flip(int n) {
  CMatrix P = CMatrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P(i * n + j, j * n + i) = 1.0;
  return P;
}

CMatrix build_s_block(const SMatrixParams& p, cd k) {
  p.validate();
  const int n2 = p.N * p.N;
  if (p.free_theory) return CMatrix::Identity(n2, n2);
  const cd ig = kI * p.g;
  const cd den = k + ig;
  if (std::abs(den) < kPoleTolerance * (1.0 + std::abs(k)))
    throw PoleError("s(k) pole at k = -ig, k=" + FieldTraits<cd>::format(k));
  return (k * CMatrix::Identity(n2, n2) - ig * flip(p.N)) / den;
}

DoubledSMatrix::DoubledSMatrix(SMatrixParams params, BlockRule rule, std::optional<Dressing> dressing)
    : params_(params), rule_(rule), dressing_(std::move(dressing)) {
  params_.validate();
}

namespace {
// Signs (sigma1, sigma2) such that block (xi1, xi2) uses (sigma1 k1, sigma2 k2).
std::pair<double, double> block_signs(int xi1, int xi2, BlockRule rule) {
  if (rule == BlockRule::corrupted) {
    if (xi1 == 0 && xi2 == 0) return {1.0, -1.0};
    if (xi1 == 0 && xi2 == 1) return {1.0, 1.0};
  }
  return {xi1 == 0 ? 1.0 : -1.0, xi2 == 0 ? 1.0 : -1.0};
}
}  // namespace

CMatrix DoubledSMatrix::s_tilde(cd x, cd y) const {
  const CMatrix s = build_s_block(params_, x - y);
  if (!dressing_) return s;
  const auto& lam = *dressing_;
  const CMatrix left = Eigen::kroneckerProduct(lam(-x), lam(-y)).eval();
  const CMatrix right = Eigen::kroneckerProduct(lam(x), lam(y)).eval();
  return left * s * right;
}

CMatrix DoubledSMatrix::block(int xi1, int xi2, cd k1, cd k2) const {
  if (xi1 < 0 || xi1 > 1 || xi2 < 0 || xi2 > 1) throw DimensionMismatch("half-line label must be 0 or 1");
  auto [s1, s2] = block_signs(xi1, xi2, rule_);
  return s_tilde(s1 * k1, s2 * k2);
}

CMatrix DoubledSMatrix::s12(cd k1, cd k2) const {
  const int N = params_.N;
  const int d = 2 * N;
  CMatrix S = CMatrix::Zero(d * d, d * d);
  for (int xi1 = 0; xi1 < 2; ++xi1)
    for (int xi2 = 0; xi2 < 2; ++xi2) {
      const CMatrix b = block(xi1, xi2, k1, k2);
      for (int i1 = 0; i1 < N; ++i1)
        for (int i2 = 0; i2 < N; ++i2)
          for (int j1 = 0; j1 < N; ++j1)
            for (int j2 = 0; j2 < N; ++j2) {
              const int row = (xi1 * N + i1) * d + (xi2 * N + i2);
              const int col = (xi1 * N + j1) * d + (xi2 * N + j2);
              S(row, col) = b(i1 * N + i2, j1 * N + j2);
            }
    }
  return S;
}

CMatrix DoubledSMatrix::s21(cd k1, cd k2) const {
  const CMatrix P = flip(dim());
  return P * s12(k1, k2) * P;
}

bool DoubledSMatrix::near_pole(double k1, double k2, double margin) const {
  if (params_.free_theory) return false;
  for (int xi1 = 0; xi1 < 2; ++xi1)
    for (int xi2 = 0; xi2 < 2; ++xi2) {
      auto [s1, s2] = block_signs(xi1, xi2, rule_);
      const cd arg = s1 * k1 - s2 * k2;
      if (std::abs(arg + kI * params_.g) < margin) return true;
    }
  return false;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> draw_samples(std::uint64_t seed, int count, int arity, double lo, double hi,
                                              const std::function<bool(const std::vector<double>&)>& reject) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  int guard = 0;
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> s(static_cast<std::size_t>(arity));
    for (auto& x : s) x = dist(rng);
    if (reject && reject(s)) {
      if (++guard > 1000 * count) throw ParameterError("sample rejection never terminates");
      continue;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<double>> smatrix_samples(const DoubledSMatrix& S, std::uint64_t seed, int count, int arity) {
  return draw_samples(seed, count, arity, -10.0, 10.0, [&S](const std::vector<double>& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        if (i != j && S.near_pole(s[i], s[j], 1e-3)) return true;
    return false;
  });
}

ResidualReport check_unitarity(const DoubledSMatrix& S, const std::vector<std::vector<double>>& samples) {
  ResidualReport rep{"unitarity", S.N(), S.params().g, 0, 0.0, {}};
  const int d2 = S.dim() * S.dim();
  for (const auto& s : samples) {
    if (s.size() < 2) throw DimensionMismatch("unitarity sample needs (k1, k2)");
    try {
      const CMatrix prod = S.s12(s[0], s[1]) * S.s21(s[1], s[0]);
      rep.absorb(max_abs(prod - CMatrix::Identity(d2, d2)), s);
    } catch (const PoleError& e) {
      throw PoleError(std::string(e.what()) + " at sample (" + std::to_string(s[0]) + ", " + std::to_string(s[1]) + ")");
    }
  }
  return rep;
}

CMatrix embed12(const CMatrix& s, int d) { return Eigen::kroneckerProduct(s, CMatrix::Identity(d, d)).eval(); }

CMatrix embed23(const CMatrix& s, int d) { return Eigen::kroneckerProduct(CMatrix::Identity(d, d), s).eval(); }

CMatrix embed13(const CMatrix& s, int d) {
  // P23 S12 P23
  const CMatrix P23 = embed23(flip(d), d);
  return P23 * embed12(s, d) * P23;
}

ResidualReport check_yang_baxter(const DoubledSMatrix& S, const std::vector<std::vector<double>>& samples) {
  ResidualReport rep{"yang-baxter", S.N(), S.params().g, 0, 0.0, {}};
  const int d = S.dim();
  for (const auto& s : samples) {
    if (s.size() < 3) throw DimensionMismatch("Yang-Baxter sample needs (k1, k2, k3)");
    try {
      const CMatrix S12 = embed12(S.s12(s[0], s[1]), d);
      const CMatrix S13 = embed13(S.s12(s[0], s[2]), d);
      const CMatrix S23 = embed23(S.s12(s[1], s[2]), d);
      rep.absorb(max_abs(S12 * S13 * S23 - S23 * S13 * S12), s);
    } catch (const PoleError& e) {
      throw PoleError(std::string(e.what()) + " at sample (" + std::to_string(s[0]) + ", " + std::to_string(s[1]) +
                      ", " + std::to_string(s[2]) + ")");
    }
  }
  return rep;
}

}  // namespace nlsd
