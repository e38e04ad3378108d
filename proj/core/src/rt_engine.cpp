#include "nlsd/rt_engine.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace nlsd {

namespace {

long ipow(int base, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

bool same_value(double x, double y) { return std::abs(x - y) <= 1e-12 * (1.0 + std::abs(x) + std::abs(y)); }

// Output slot s takes input slot perm[s].
CVector permute_slots(const CVector& t, int D, int nslots, const std::vector<int>& perm) {
  CVector out(t.size());
  std::vector<int> idx(static_cast<std::size_t>(nslots));
  std::vector<long> in_stride(static_cast<std::size_t>(nslots));
  for (int s = 0; s < nslots; ++s) in_stride[static_cast<std::size_t>(s)] = ipow(D, nslots - 1 - s);
  for (long flat = 0; flat < t.size(); ++flat) {
    long rem = flat;
    long src = 0;
    for (int s = nslots - 1; s >= 0; --s) {
      const int v = static_cast<int>(rem % D);
      rem /= D;
      src += v * in_stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
    }
    out(flat) = t(src);
  }
  return out;
}

std::vector<Delta> with_delta(std::vector<Delta> ds, Delta d) {
  ds.push_back(d);
  std::sort(ds.begin(), ds.end());
  return ds;
}

bool same_key(const FockTerm& x, const FockTerm& y) { return x.creators == y.creators && x.deltas == y.deltas; }

}  // namespace

// ---------------------------------------------------------------------------
// FockVector

FockVector FockVector::vacuum(int dim) {
  FockVector v(dim, 0);
  v.add({{}, {}, CVector::Ones(1)});
  return v;
}

FockVector FockVector::open_word(int dim, const std::vector<Momentum>& qs) {
  const int n = static_cast<int>(qs.size());
  const long block = ipow(dim, n);
  CVector c = CVector::Zero(block * block);
  for (long e = 0; e < block; ++e) c(e * block + e) = 1.0;
  FockVector v(dim, n);
  v.add({qs, {}, c});
  return v;
}

FockVector FockVector::word(int dim, const std::vector<Momentum>& qs, const CVector& coeff) {
  if (coeff.size() != ipow(dim, static_cast<int>(qs.size())))
    throw DimensionMismatch("coefficient size does not match the creator word");
  FockVector v(dim, 0);
  v.add({qs, {}, coeff});
  return v;
}

void FockVector::add(FockTerm term) {
  const long expected = ipow(dim_, n_ext_ + static_cast<int>(term.creators.size()));
  if (term.coeff.size() != expected) throw DimensionMismatch("Fock term coefficient has wrong size");
  std::sort(term.deltas.begin(), term.deltas.end());
  for (auto& t : terms_)
    if (same_key(t, term)) {
      t.coeff += term.coeff;
      return;
    }
  terms_.push_back(std::move(term));
}

FockVector& FockVector::operator+=(const FockVector& o) {
  if (o.dim_ != dim_ || o.n_ext_ != n_ext_) throw DimensionMismatch("Fock vectors have different slot structure");
  for (const auto& t : o.terms_) add(t);
  return *this;
}

FockVector FockVector::operator-(const FockVector& o) const {
  FockVector r = *this;
  r += o.scaled(-1.0);
  return r;
}

FockVector FockVector::scaled(cd s) const {
  FockVector r = *this;
  for (auto& t : r.terms_) t.coeff *= s;
  return r;
}

FockVector FockVector::compressed(double tol) const {
  FockVector r(dim_, n_ext_);
  for (const auto& t : terms_) r.add(t);
  std::erase_if(r.terms_, [tol](const FockTerm& t) { return t.coeff.size() == 0 || t.coeff.cwiseAbs().maxCoeff() <= tol; });
  return r;
}

FockVector FockVector::contract_ext(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n_ext_ || j >= n_ext_) throw DimensionMismatch("bad external slots");
  FockVector r(dim_, n_ext_ - 2);
  for (const auto& t : terms_) {
    const int nslots = n_ext_ + static_cast<int>(t.creators.size());
    CVector out = CVector::Zero(t.coeff.size() / (dim_ * dim_));
    std::vector<int> idx(static_cast<std::size_t>(nslots));
    for (long flat = 0; flat < t.coeff.size(); ++flat) {
      long rem = flat;
      for (int s = nslots - 1; s >= 0; --s) {
        idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % dim_);
        rem /= dim_;
      }
      if (idx[static_cast<std::size_t>(i)] != idx[static_cast<std::size_t>(j)]) continue;
      long dst = 0;
      for (int s = 0; s < nslots; ++s)
        if (s != i && s != j) dst = dst * dim_ + idx[static_cast<std::size_t>(s)];
      out(dst) += t.coeff(flat);
    }
    r.add({t.creators, t.deltas, out});
  }
  return r;
}

FockVector FockVector::move_ext_to_last(int slot) const {
  if (slot < 0 || slot >= n_ext_) throw DimensionMismatch("bad external slot");
  FockVector r(dim_, n_ext_);
  for (const auto& t : terms_) {
    const int nslots = n_ext_ + static_cast<int>(t.creators.size());
    std::vector<int> perm;
    for (int s = 0; s < n_ext_; ++s)
      if (s != slot) perm.push_back(s);
    perm.push_back(slot);
    for (int s = n_ext_; s < nslots; ++s) perm.push_back(s);
    r.add({t.creators, t.deltas, permute_slots(t.coeff, dim_, nslots, perm)});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Engine

RTEngine::RTEngine(DoubledSMatrix S, DefectPair rep) : S_(std::move(S)), rep_(std::move(rep)) {
  if (S_.dim() != 2 * rep_.N()) throw DimensionMismatch("S-matrix and representation dimensions differ");
}

FockTerm RTEngine::defect_term(const FockTerm& term, int n_ext, DefectKind kind, double k) const {
  const int D = dim();
  const long E = ipow(D, n_ext);
  if (term.creators.empty()) {
    const CMatrix X = kind == DefectKind::t ? rep_.T(k) : rep_.R(k);
    CVector g(E * D * D);
    for (long e = 0; e < E; ++e)
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) g((e * D + a) * D + b) = term.coeff(e) * X(a, b);
    return {term.creators, term.deltas, g};
  }
  const Momentum& q1 = term.creators.front();
  FockTerm tail{std::vector<Momentum>(term.creators.begin() + 1, term.creators.end()), term.deltas, term.coeff};
  const FockTerm H = defect_term(tail, n_ext + 1, kind, k);  // [E][b1][d][e][R]
  const long R = ipow(D, static_cast<int>(tail.creators.size()));
  const CMatrix S12 = S_.s12(k, q1.value());
  const CMatrix S2 = kind == DefectKind::t ? S_.s21(q1.value(), k) : S_.s21(q1.value(), -k);
  const long D2 = D * D;

  // L[E][d][d2][b][R] = sum_{e', b1} S2[(e' d2),(b b1)] H[E][b1][d][e'][R]
  CVector L = CVector::Zero(E * D2 * D2 * R);
  for (long e = 0; e < E; ++e)
    for (int d = 0; d < D; ++d)
      for (int d2 = 0; d2 < D; ++d2)
        for (int b = 0; b < D; ++b)
          for (int ep = 0; ep < D; ++ep)
            for (int b1 = 0; b1 < D; ++b1) {
              const cd s = S2(ep * D + d2, b * D + b1);
              if (s == cd(0.0)) continue;
              const long hsrc = (((e * D + b1) * D + d) * D + ep) * R;
              const long ldst = (((e * D + d) * D + d2) * D + b) * R;
              for (long r = 0; r < R; ++r) L(ldst + r) += s * H.coeff(hsrc + r);
            }
  // G[E][a][b][g'][R] = sum_{d, d2} S12[(a g'),(d d2)] L[E][d][d2][b][R]
  CVector G = CVector::Zero(E * D2 * D * R);
  for (long e = 0; e < E; ++e)
    for (int a = 0; a < D; ++a)
      for (int gp = 0; gp < D; ++gp)
        for (int d = 0; d < D; ++d)
          for (int d2 = 0; d2 < D; ++d2) {
            const cd s = S12(a * D + gp, d * D + d2);
            if (s == cd(0.0)) continue;
            for (int b = 0; b < D; ++b) {
              const long lsrc = (((e * D + d) * D + d2) * D + b) * R;
              const long gdst = (((e * D + a) * D + b) * D + gp) * R;
              for (long r = 0; r < R; ++r) G(gdst + r) += s * L(lsrc + r);
            }
          }
  return {term.creators, term.deltas, G};
}

FockVector RTEngine::annihilate_term(const FockTerm& term, int n_ext, const Momentum& p) const {
  const int D = dim();
  FockVector out(D, n_ext + 1);
  if (term.creators.empty()) return out;
  const long E = ipow(D, n_ext);
  const Momentum& q1 = term.creators.front();
  FockTerm tail{std::vector<Momentum>(term.creators.begin() + 1, term.creators.end()), term.deltas, term.coeff};
  const long R = ipow(D, static_cast<int>(tail.creators.size()));

  // Crossing: a(p) a^dagger(q1) -> a^dagger(q1) S12(p, q1) a(p).
  const FockVector F = annihilate_term(tail, n_ext + 1, p);  // [E][b1][g'][R']
  if (!F.empty()) {
    const CMatrix S = S_.s12(p.value(), q1.value());
    for (const auto& f : F.terms()) {
      const long Rp = ipow(D, static_cast<int>(f.creators.size()));
      CVector G = CVector::Zero(E * D * D * Rp);
      for (long e = 0; e < E; ++e)
        for (long r = 0; r < Rp; ++r) {
          CVector v(D * D);
          for (int b1 = 0; b1 < D; ++b1)
            for (int gp = 0; gp < D; ++gp) v(gp * D + b1) = f.coeff(((e * D + b1) * D + gp) * Rp + r);
          const CVector w = S * v;
          for (long gd = 0; gd < D * D; ++gd) G((e * D * D + gd) * Rp + r) = w(gd);
        }
      std::vector<Momentum> cr{q1};
      cr.insert(cr.end(), f.creators.begin(), f.creators.end());
      out.add({cr, f.deltas, G});
    }
  }

  auto contracted_defect = [&](DefectKind kind) {
    const FockTerm H = defect_term(tail, n_ext + 1, kind, p.value());  // [E][b1][a][b][R]
    CVector G = CVector::Zero(E * D * R);
    for (long e = 0; e < E; ++e)
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b)
          for (long r = 0; r < R; ++r) G((e * D + a) * R + r) += H.coeff((((e * D + b) * D + a) * D + b) * R + r);
    return G;
  };

  // delta(p - q1) (1 + t(p))
  if (same_value(p.value(), q1.value())) {
    const Delta d{p.symbol, q1.symbol, p.sign * q1.sign};
    CVector G = term.coeff + contracted_defect(DefectKind::t);
    out.add({tail.creators, with_delta(term.deltas, d), G});
  }
  // delta(p + q1) r(p)
  if (same_value(p.value(), -q1.value())) {
    const Delta d{p.symbol, q1.symbol, p.sign * q1.sign};
    out.add({tail.creators, with_delta(term.deltas, d), contracted_defect(DefectKind::r)});
  }
  return out;
}

FockVector RTEngine::annihilate(const FockVector& psi, const Momentum& p) const {
  FockVector out(dim(), psi.n_ext() + 1);
  for (const auto& t : psi.terms()) out += annihilate_term(t, psi.n_ext(), p);
  return out;
}

FockVector RTEngine::defect(const FockVector& psi, DefectKind kind, double k) const {
  FockVector out(dim(), psi.n_ext() + 2);
  for (const auto& t : psi.terms()) out.add(defect_term(t, psi.n_ext(), kind, k));
  return out;
}

FockVector RTEngine::prepend_creator(const FockVector& psi, const Momentum& q) const {
  if (psi.n_ext() < 1) throw DimensionMismatch("no external slot to turn into a creator");
  FockVector out(dim(), psi.n_ext() - 1);
  for (const auto& t : psi.terms()) {
    std::vector<Momentum> cr{q};
    cr.insert(cr.end(), t.creators.begin(), t.creators.end());
    out.add({cr, t.deltas, t.coeff});
  }
  return out;
}

namespace {

void require_generic_term(const FockTerm& t) {
  std::vector<double> m;
  for (const auto& q : t.creators) m.push_back(q.base);
  require_generic(m);
}

// Keep terms carrying the trivial delta produced by integrating k against q, and drop it.
FockVector integrate_trivial_delta(const FockVector& v, int symbol) {
  FockVector out(v.dim(), v.n_ext());
  for (const auto& t : v.terms()) {
    auto it = std::find_if(t.deltas.begin(), t.deltas.end(),
                           [symbol](const Delta& d) { return d.a == symbol && d.b == symbol; });
    if (it == t.deltas.end()) continue;
    FockTerm u = t;
    u.deltas.erase(u.deltas.begin() + (it - t.deltas.begin()));
    out.add(std::move(u));
  }
  return out;
}

}  // namespace

FockVector RTEngine::hamiltonian(const FockVector& psi, int n, Weight w) const {
  if (n < 0) throw ParameterError("hierarchy order must be non-negative");
  FockVector out(dim(), psi.n_ext());
  for (const auto& t : psi.terms()) {
    require_generic_term(t);
    FockVector single(dim(), psi.n_ext());
    single.add(t);
    for (const auto& q : t.creators)
      for (int sigma : {1, -1}) {
        const Momentum kappa{q.symbol, sigma * q.sign, q.base};
        const FockVector a = integrate_trivial_delta(annihilate(single, kappa), q.symbol);
        const double kv = kappa.value();
        const double weight = std::pow(w == Weight::absolute_power ? std::abs(kv) : kv, n);
        out += prepend_creator(a, kappa).scaled(weight);
      }
  }
  return out.compressed();
}

FockVector RTEngine::reflection_density(const FockVector& psi, int m) const {
  FockVector out(dim(), psi.n_ext());
  for (const auto& t : psi.terms()) {
    require_generic_term(t);
    FockVector single(dim(), psi.n_ext());
    single.add(t);
    for (const auto& q : t.creators)
      for (int sigma : {1, -1}) {
        const Momentum p{q.symbol, sigma * q.sign, q.base};  // annihilator at -k
        const Momentum k = p.negated();
        const FockVector a = integrate_trivial_delta(annihilate(single, p), q.symbol);  // [.., b]
        if (a.empty()) continue;
        const int ne = a.n_ext();
        const FockVector r = defect(a, DefectKind::r, k.value()).contract_ext(ne - 1, ne + 1);  // [.., a']
        out += prepend_creator(r, k).scaled(std::pow(k.value(), m));
      }
  }
  return out.compressed();
}

FockVector RTEngine::swap_creators(const FockVector& psi, int i) const {
  const int D = dim();
  FockVector out(D, psi.n_ext());
  for (const auto& t : psi.terms()) {
    const int nc = static_cast<int>(t.creators.size());
    if (i < 0 || i + 1 >= nc) throw DimensionMismatch("creator swap position out of range");
    const Momentum& q1 = t.creators[static_cast<std::size_t>(i)];
    const Momentum& q2 = t.creators[static_cast<std::size_t>(i + 1)];
    const CMatrix S = S_.s21(q2.value(), q1.value());
    const long pre = ipow(D, psi.n_ext() + i);
    const long post = ipow(D, nc - i - 2);
    CVector out_c = CVector::Zero(t.coeff.size());
    for (long a = 0; a < pre; ++a)
      for (long b = 0; b < post; ++b) {
        CVector c(D * D);
        for (int x = 0; x < D; ++x)
          for (int y = 0; y < D; ++y) c(x * D + y) = t.coeff(((a * D + x) * D + y) * post + b);
        const CVector w = S * c;  // indexed (u, v)
        for (int u = 0; u < D; ++u)
          for (int v = 0; v < D; ++v) out_c(((a * D + v) * D + u) * post + b) = w(u * D + v);
      }
    std::vector<Momentum> cr = t.creators;
    std::swap(cr[static_cast<std::size_t>(i)], cr[static_cast<std::size_t>(i + 1)]);
    out.add({cr, t.deltas, out_c});
  }
  return out;
}

FockVector RTEngine::canonicalize(const FockVector& psi) const {
  FockVector out(dim(), psi.n_ext());
  for (const auto& t : psi.terms()) {
    FockVector cur(dim(), psi.n_ext());
    cur.add(t);
    const int nc = static_cast<int>(t.creators.size());
    std::vector<Momentum> order = t.creators;
    for (int pass = 0; pass < nc; ++pass)
      for (int i = 0; i + 1 < nc; ++i)
        if (order[static_cast<std::size_t>(i)].symbol > order[static_cast<std::size_t>(i + 1)].symbol) {
          cur = swap_creators(cur, i);
          std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i + 1)]);
        }
    out += cur;
  }
  return out;
}

double RTEngine::canonical_norm(const FockVector& psi) const {
  const FockVector c = canonicalize(psi).compressed();
  double worst = 0.0;
  for (const auto& t : c.terms()) worst = std::max(worst, t.coeff.cwiseAbs().maxCoeff());
  return worst;
}

double RTEngine::weak_norm(const FockVector& psi) const {
  std::map<std::size_t, FockVector> sectors;
  for (const auto& t : psi.terms()) {
    auto [it, _] = sectors.try_emplace(t.creators.size(), dim(), psi.n_ext());
    it->second.add(t);
  }
  double worst = 0.0;
  for (const auto& [n, sector] : sectors) {
    if (n == 0) {
      CVector sum = CVector::Zero(sector.terms().front().coeff.size());
      for (const auto& t : sector.terms()) sum += t.coeff;
      worst = std::max(worst, sum.size() ? sum.cwiseAbs().maxCoeff() : 0.0);
      continue;
    }
    std::vector<double> mags;
    for (const auto& q : sector.terms().front().creators) mags.push_back(q.base);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (long signs = 0; signs < (1L << n); ++signs) {
        FockVector cur = sector;
        for (std::size_t i = 0; i < n && !cur.empty(); ++i) {
          const int s = (signs >> i) & 1 ? -1 : 1;
          cur = annihilate(cur, Momentum{100000 + static_cast<int>(i), s, mags[static_cast<std::size_t>(perm[i])]});
        }
        if (cur.empty()) continue;
        CVector sum = CVector::Zero(cur.terms().front().coeff.size());
        for (const auto& t : cur.terms()) sum += t.coeff;
        worst = std::max(worst, sum.cwiseAbs().maxCoeff());
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Amplitudes

void require_generic(const std::vector<double>& momenta) {
  for (std::size_t i = 0; i < momenta.size(); ++i) {
    if (std::abs(momenta[i]) < 1e-9) throw GenericityError("zero momentum is not generic");
    for (std::size_t j = i + 1; j < momenta.size(); ++j)
      if (same_value(std::abs(momenta[i]), std::abs(momenta[j])))
        throw GenericityError("coinciding momentum magnitudes");
  }
}

int doubled_index(int N, int xi, int iso) {
  if (xi != 1 && xi != -1) throw ParameterError("half-line label must be +1 or -1");
  if (iso < 0 || iso >= N) throw ParameterError("isotopic index out of range");
  return (xi == 1 ? 0 : N) + iso;
}

cd Amplitude::entry(std::size_t term, const std::vector<int>& out_idx, const std::vector<int>& in_idx) const {
  if (term >= terms.size()) throw DimensionMismatch("amplitude term out of range");
  if (static_cast<int>(out_idx.size()) != n_out || static_cast<int>(in_idx.size()) != n_in)
    throw DimensionMismatch("amplitude index count mismatch");
  long flat = 0;
  for (int i : in_idx) flat = flat * dim + i;
  for (int o : out_idx) flat = flat * dim + o;
  return terms[term].tensor(flat);
}

cd Amplitude::labelled_entry(std::size_t term, const std::vector<Particle>& out, const std::vector<Particle>& in) const {
  const int N = dim / 2;
  std::vector<int> oi, ii;
  for (const auto& p : out) oi.push_back(doubled_index(N, p.xi, p.iso));
  for (const auto& p : in) ii.push_back(doubled_index(N, p.xi, p.iso));
  return entry(term, oi, ii);
}

const AmplitudeTerm* Amplitude::find(const std::vector<MatchedPair>& matching) const {
  for (const auto& t : terms) {
    if (t.matching.size() != matching.size()) continue;
    bool ok = true;
    for (std::size_t i = 0; i < matching.size(); ++i)
      ok = ok && t.matching[i].out_index == matching[i].out_index && t.matching[i].in_index == matching[i].in_index &&
           t.matching[i].sign == matching[i].sign;
    if (ok) return &t;
  }
  return nullptr;
}

namespace {

constexpr int kOutSymbolBase = 101;

struct Kinematics {
  std::vector<Momentum> in;
  std::vector<std::pair<std::vector<int>, long>> matchings;  // (perm, sign bits)
};

Kinematics prepare(const std::vector<Particle>& out, const std::vector<Particle>& in, const AmplitudeOptions& opt) {
  Kinematics kin;
  std::vector<double> ks;
  for (const auto& p : in) ks.push_back(p.momentum);
  require_generic(ks);
  const std::size_t n = in.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double k = in[j].momentum;
    if (opt.kinematic_filter) {
      if (in[j].xi != 0 && k * in[j].xi > 0) throw ParameterError("in momentum must lie in R^{-xi}");
      if (j > 0 && std::abs(k) <= std::abs(in[j - 1].momentum))
        throw ParameterError("in momenta must be ordered |k_n| > ... > |k_1|");
    }
    kin.in.push_back(Momentum{static_cast<int>(j) + 1, k > 0 ? 1 : -1, std::abs(k)});
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (long signs = 0; signs < (1L << n); ++signs) {
      bool ok = true;
      if (opt.kinematic_filter) {
        for (std::size_t i = 0; i < n && ok; ++i) {
          const int s = (signs >> i) & 1 ? -1 : 1;
          const double pv = s * kin.in[static_cast<std::size_t>(perm[i])].value();
          if (out[i].xi != 0 && pv * out[i].xi < 0) ok = false;
          if (i > 0 && std::abs(pv) >= kin.in[static_cast<std::size_t>(perm[i - 1])].base) ok = false;
        }
      }
      if (ok) kin.matchings.emplace_back(perm, signs);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return kin;
}

std::vector<Momentum> out_momenta(const Kinematics& kin, const std::vector<int>& perm, long signs) {
  std::vector<Momentum> ps;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const int s = (signs >> i) & 1 ? -1 : 1;
    const double v = s * kin.in[static_cast<std::size_t>(perm[i])].value();
    ps.push_back(Momentum{kOutSymbolBase + static_cast<int>(i), v > 0 ? 1 : -1, std::abs(v)});
  }
  return ps;
}

// Applies annihilators in `order` (indices into ps) and sums the vacuum terms.
std::optional<AmplitudeTerm> contract(const RTEngine& eng, const std::vector<Momentum>& in,
                                      const std::vector<Momentum>& ps, const std::vector<int>& order) {
  const int D = eng.dim();
  const int n = static_cast<int>(in.size());
  FockVector cur = FockVector::open_word(D, in);
  for (int i : order) {
    cur = eng.annihilate(cur, ps[static_cast<std::size_t>(i)]);
    if (cur.empty()) return std::nullopt;
  }
  AmplitudeTerm term;
  term.tensor = CVector::Zero(ipow(D, 2 * n));
  const auto& deltas = cur.terms().front().deltas;
  for (const auto& t : cur.terms()) {
    if (t.deltas != deltas) throw GenericityError("ambiguous delta structure in amplitude");
    term.tensor += t.coeff;
  }
  for (const auto& d : deltas) term.matching.push_back({d.a - kOutSymbolBase, d.b - 1, d.sign});
  std::sort(term.matching.begin(), term.matching.end(),
            [](const MatchedPair& x, const MatchedPair& y) { return x.out_index < y.out_index; });
  for (const auto& p : ps) term.out_values.push_back(p.value());
  // Out slots were appended in application order; restore label order.
  std::vector<int> perm(static_cast<std::size_t>(2 * n));
  for (int j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = j;
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    perm[static_cast<std::size_t>(n + order[pos])] = n + static_cast<int>(pos);
  term.tensor = permute_slots(term.tensor, D, 2 * n, perm);
  return term;
}

Amplitude empty_amplitude(const RTEngine& eng, const std::vector<Particle>& out, const std::vector<Particle>& in) {
  Amplitude a;
  a.dim = eng.dim();
  a.n_in = static_cast<int>(in.size());
  a.n_out = static_cast<int>(out.size());
  return a;
}

}  // namespace

Amplitude vev_amplitude(const RTEngine& eng, const std::vector<Particle>& out, const std::vector<Particle>& in,
                        const AmplitudeOptions& opt) {
  Amplitude amp = empty_amplitude(eng, out, in);
  if (out.size() != in.size()) return amp;
  const Kinematics kin = prepare(out, in, opt);
  const int n = static_cast<int>(in.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);  // a(p1) acts first
  for (const auto& [perm, signs] : kin.matchings) {
    if (n == 0) {
      amp.terms.push_back({{}, {}, CVector::Ones(1)});
      break;
    }
    auto term = contract(eng, kin.in, out_momenta(kin, perm, signs), order);
    if (term) amp.terms.push_back(std::move(*term));
  }
  return amp;
}

Amplitude reorder_oracle(const RTEngine& eng, const std::vector<Particle>& out, const std::vector<Particle>& in,
                         const AmplitudeOptions& opt) {
  Amplitude amp = empty_amplitude(eng, out, in);
  if (out.size() != in.size()) return amp;
  const Kinematics kin = prepare(out, in, opt);
  const int n = static_cast<int>(in.size());
  const int D = eng.dim();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.rbegin(), order.rend(), 0);  // a(p_n) acts first
  for (const auto& [perm, signs] : kin.matchings) {
    if (n == 0) {
      amp.terms.push_back({{}, {}, CVector::Ones(1)});
      break;
    }
    const auto ps = out_momenta(kin, perm, signs);
    auto term = contract(eng, kin.in, ps, order);
    if (!term) continue;
    // Bra words, left to right: computed [p1 .. pn]; wanted [pn .. p1].
    std::vector<int> w(static_cast<std::size_t>(n));
    std::iota(w.rbegin(), w.rend(), 0);
    std::vector<std::pair<std::vector<int>, int>> steps;  // (word before swap, position)
    bool swapped = true;
    while (swapped) {
      swapped = false;
      for (int pos = 0; pos + 1 < n; ++pos)
        if (w[static_cast<std::size_t>(pos)] > w[static_cast<std::size_t>(pos + 1)]) {
          steps.emplace_back(w, pos);
          std::swap(w[static_cast<std::size_t>(pos)], w[static_cast<std::size_t>(pos + 1)]);
          swapped = true;
        }
    }
    CVector A = term->tensor;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      const int a = it->first[static_cast<std::size_t>(it->second)];
      const int b = it->first[static_cast<std::size_t>(it->second + 1)];
      const CMatrix S = eng.smatrix().s21(ps[static_cast<std::size_t>(b)].value(), ps[static_cast<std::size_t>(a)].value());
      // A_old[a = x, b = y] = sum S[(x y),(u v)] A_new[a = u, b = v]
      const int nslots = 2 * n;
      const int sa = n + a, sb = n + b;
      CVector B = CVector::Zero(A.size());
      std::vector<int> idx(static_cast<std::size_t>(nslots));
      for (long flat = 0; flat < A.size(); ++flat) {
        long rem = flat;
        for (int s = nslots - 1; s >= 0; --s) {
          idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % D);
          rem /= D;
        }
        const int u = idx[static_cast<std::size_t>(sa)], v = idx[static_cast<std::size_t>(sb)];
        for (int x = 0; x < D; ++x)
          for (int y = 0; y < D; ++y) {
            const cd s = S(x * D + y, u * D + v);
            if (s == cd(0.0)) continue;
            idx[static_cast<std::size_t>(sa)] = x;
            idx[static_cast<std::size_t>(sb)] = y;
            long dst = 0;
            for (int t = 0; t < nslots; ++t) dst = dst * D + idx[static_cast<std::size_t>(t)];
            B(dst) += s * A(flat);
          }
      }
      A = B;
    }
    term->tensor = A;
    amp.terms.push_back(std::move(*term));
  }
  return amp;
}

// ---------------------------------------------------------------------------
// Checks

CommutatorReport check_hierarchy_commutator(const RTEngine& eng, int m, int n, const FockVector& psi) {
  CommutatorReport rep;
  rep.m = m;
  rep.n = n;
  const auto w = Weight::signed_power;
  const FockVector lhs = eng.hamiltonian(eng.hamiltonian(psi, n, w), m, w) - eng.hamiltonian(eng.hamiltonian(psi, m, w), n, w);
  const double pref = (m % 2 == 0 ? 1.0 : -1.0) - (n % 2 == 0 ? 1.0 : -1.0);
  const FockVector rhs = eng.reflection_density(psi, m + n).scaled(pref);
  rep.lhs_norm = eng.canonical_norm(lhs);
  const double plus = eng.canonical_norm(lhs - rhs);
  const double minus = eng.canonical_norm(lhs - rhs.scaled(-1.0));
  rep.fitted_sign = plus <= minus ? 1 : -1;
  rep.residual = std::min(plus, minus);
  rep.residual_other_sign = std::max(plus, minus);
  return rep;
}

double check_involution(const RTEngine& eng, int m, int n, const FockVector& psi) {
  const auto w = Weight::absolute_power;
  return eng.canonical_norm(eng.hamiltonian(eng.hamiltonian(psi, n, w), m, w) - eng.hamiltonian(eng.hamiltonian(psi, m, w), n, w));
}

std::pair<double, double> check_defect_symmetry(const RTEngine& eng, int n, double k, const FockVector& psi) {
  const auto w = Weight::absolute_power;
  double res[2];
  int i = 0;
  for (auto kind : {DefectKind::t, DefectKind::r}) {
    const FockVector a = eng.hamiltonian(eng.defect(psi, kind, k), n, w);
    const FockVector b = eng.defect(eng.hamiltonian(psi, n, w), kind, k);
    res[i++] = eng.canonical_norm(a - b);
  }
  return {res[0], res[1]};
}

double one_particle_unitarity(const RTEngine& eng, double k) {
  if (k == 0.0) throw GenericityError("zero momentum is not generic");
  const int N = eng.rep().N();
  const int xi = k > 0 ? -1 : 1;
  const Amplitude amp = vev_amplitude(eng, {Particle{0.0, 0, -1}}, {Particle{k, xi, -1}}, {false});
  CMatrix U = CMatrix::Zero(2 * N, N);
  for (int nu : {1, -1}) {
    const int sign = (nu * k > 0) ? 1 : -1;  // p = sign * k must lie in R^{nu}
    const AmplitudeTerm* t = amp.find({{0, 0, sign}});
    if (!t) continue;
    const std::size_t idx = static_cast<std::size_t>(t - amp.terms.data());
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        U(doubled_index(N, nu, i), j) = amp.entry(idx, {doubled_index(N, nu, i)}, {doubled_index(N, xi, j)});
  }
  return max_abs(U.adjoint() * U - CMatrix::Identity(N, N));
}

double hamiltonian_hermiticity(const RTEngine& eng, int n, double p) {
  const int D = eng.dim();
  auto coefficient_matrices = [&](double pv) {
    const FockVector psi = FockVector::open_word(D, {Momentum{1, pv > 0 ? 1 : -1, std::abs(pv)}});
    const FockVector h = eng.hamiltonian(psi, n, Weight::signed_power);
    CMatrix direct = CMatrix::Zero(D, D), refl = CMatrix::Zero(D, D);
    for (const auto& t : h.terms()) {
      CMatrix& target = same_value(t.creators.front().value(), pv) ? direct : refl;
      for (int b = 0; b < D; ++b)
        for (int a = 0; a < D; ++a) target(a, b) += t.coeff(b * D + a);  // layout [ext b][creator a]
    }
    return std::make_pair(direct, refl);
  };
  const auto [dp, rp] = coefficient_matrices(p);
  const auto [dm, rm] = coefficient_matrices(-p);
  (void)dm;
  return std::max(max_abs(dp.adjoint() - dp), max_abs(rp.adjoint() - rm));
}

}  // namespace nlsd
