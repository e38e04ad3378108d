#include "nlsd_cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "nlsd/boundary.hpp"
#include "nlsd/breaking.hpp"
#include "nlsd/defect_rep.hpp"
#include "nlsd/rt_engine.hpp"
#include "nlsd/smatrix.hpp"

namespace nlsd::cli {

namespace {

const std::vector<std::pair<Task, std::string>> kTaskNames = {
    {Task::verify_smatrix, "verify-smatrix"},   {Task::verify_rep, "verify-rep"},
    {Task::verify_rt, "verify-rt-equations"},   {Task::classify_rep, "classify-rep"},
    {Task::amplitude, "amplitude"},             {Task::hierarchy, "hierarchy"},
    {Task::boundary_derive, "boundary-derive"}, {Task::boundary_verify, "boundary-verify"},
    {Task::breaking_expand, "breaking-expand"}, {Task::breaking_classify, "breaking-classify"},
};

template <class T>
T convert(const std::string& raw, const std::string& field) {
  const std::string s = boost::algorithm::trim_copy(raw);
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
      if (s == "false" || s == "0" || s == "no" || s == "off") return false;
      throw ConfigError(field, "expected a boolean, got '" + s + "'");
    } else {
      return boost::lexical_cast<T>(s);
    }
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError(field, "cannot parse '" + s + "'");
  }
}

template <class T>
T get(const ptree& t, const std::string& path, T fallback) {
  const auto v = t.get_optional<std::string>(path);
  return v ? convert<T>(*v, path) : fallback;
}

template <class T>
T require(const ptree& t, const std::string& path) {
  const auto v = t.get_optional<std::string>(path);
  if (!v) throw ConfigError(path, "required field is missing");
  return convert<T>(*v, path);
}

std::vector<std::string> split_list(const std::string& s, const char* seps) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, s, boost::algorithm::is_any_of(seps), boost::algorithm::token_compress_on);
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::vector<double> double_list(const ptree& t, const std::string& path, std::vector<double> fallback) {
  const auto v = t.get_optional<std::string>(path);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& p : split_list(*v, ", ")) out.push_back(convert<double>(p, path));
  return out;
}

SpectralScalar spectral_field(const std::string& raw, const std::string& field) {
  const std::string s = boost::algorithm::trim_copy(raw);
  if (s == "k") return SpectralScalar::k();
  try {
    if (s.find('[') != std::string::npos) return SpectralScalar::parse(s);
    return SpectralScalar(FieldTraits<cd>::parse(s));
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

std::optional<SpectralScalar> optional_spectral(const ptree& t, const std::string& path) {
  const auto v = t.get_optional<std::string>(path);
  if (!v) return std::nullopt;
  return spectral_field(*v, path);
}

Json cjson(cd z) { return Json::array({z.real(), z.imag()}); }

Json tree_json(const ptree& t) {
  if (t.empty()) return Json(t.data());
  Json o = Json::object();
  for (const auto& [k, v] : t) o[k] = tree_json(v);
  return o;
}

// ---------------------------------------------------------------------------
// Records.

CheckRecord residual_record(std::string name, std::string anchor, double residual, double tol) {
  CheckRecord r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.residual = residual;
  r.tolerance = tol;
  r.pass = std::isfinite(residual) && residual < tol;
  return r;
}

CheckRecord exact_record(std::string name, std::string anchor, double residual) {
  CheckRecord r = residual_record(std::move(name), std::move(anchor), residual, 0.0);
  r.pass = residual == 0.0;
  return r;
}

CheckRecord value_record(std::string name, std::string anchor, Json value) {
  CheckRecord r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.value = std::move(value);
  r.pass = true;
  return r;
}

CheckRecord from_report(const ResidualReport& rep, const std::string& module, double tol) {
  CheckRecord r = residual_record(rep.identity_name, module + "/" + rep.identity_name, rep.max_residual, tol);
  r.value = Json{{"n_samples", rep.n_samples}, {"worst_sample", rep.worst_sample}};
  return r;
}

using Job = std::function<std::vector<CheckRecord>()>;

// Runs a job; module errors become one failed record.
std::vector<CheckRecord> guarded(const std::string& name, const std::string& anchor, const Job& job) {
  try {
    return job();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    CheckRecord r;
    r.name = name;
    r.anchor = anchor;
    r.pass = false;
    r.error = e.what();
    return {r};
  }
}

struct NamedJob {
  std::string name, anchor;
  Job job;
};

std::vector<CheckRecord> run_jobs(const std::vector<NamedJob>& jobs, int threads) {
  std::vector<std::vector<CheckRecord>> parts(jobs.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) parts[i] = guarded(jobs[i].name, jobs[i].anchor, jobs[i].job);
  } else {
    for (std::size_t start = 0; start < jobs.size(); start += static_cast<std::size_t>(threads)) {
      std::vector<std::future<std::vector<CheckRecord>>> fs;
      const std::size_t end = std::min(jobs.size(), start + static_cast<std::size_t>(threads));
      for (std::size_t i = start; i < end; ++i)
        fs.push_back(std::async(std::launch::async, guarded, jobs[i].name, jobs[i].anchor, jobs[i].job));
      for (std::size_t i = start; i < end; ++i) parts[i] = fs[i - start].get();
    }
  }
  std::vector<CheckRecord> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// ---------------------------------------------------------------------------
// Model construction from the config tree.

DoubledSMatrix make_smatrix(const RunConfig& c) {
  SMatrixParams p{c.N, c.g, get<bool>(c.tree, "smatrix.free", false)};
  const std::string rule = get<std::string>(c.tree, "smatrix.rule", "standard");
  if (rule != "standard" && rule != "corrupted") throw ConfigError("smatrix.rule", "expected standard|corrupted");
  return DoubledSMatrix(p, rule == "corrupted" ? BlockRule::corrupted : BlockRule::standard);
}

NLSDefectParams nls_params(const RunConfig& c) {
  NLSDefectParams p;
  p.N = c.N;
  p.g = c.g;
  p.a = get<double>(c.tree, "rep.a", 1.0);
  p.b = get<double>(c.tree, "rep.b", 0.0);
  p.d = get<double>(c.tree, "rep.d", 1.0);
  p.c = get<double>(c.tree, "rep.c", p.b != 0.0 ? (p.a * p.d - 1.0) / p.b : 0.0);
  p.alpha = std::polar(1.0, get<double>(c.tree, "rep.alpha_phase", 0.0));
  return p;
}

Eigen::VectorXi sign_vector(const RunConfig& c) {
  const auto v = c.tree.get_optional<std::string>("rep.E");
  if (!v) return {};
  if (*v == "random") return random_signs(c.N, c.sampling.seed + 11);
  const auto parts = split_list(*v, ", ");
  if (static_cast<int>(parts.size()) != c.N) throw ConfigError("rep.E", "needs N entries");
  Eigen::VectorXi e(c.N);
  for (int i = 0; i < c.N; ++i) e(i) = convert<int>(parts[static_cast<std::size_t>(i)], "rep.E");
  return e;
}

CMatrix unitary_field(const RunConfig& c) {
  const std::string kind = get<std::string>(c.tree, "rep.M", "identity");
  if (kind == "identity") return {};
  if (kind == "random") return random_unitary(c.N, c.sampling.seed + 7);
  if (kind == "rotation") {
    const double mu = get<double>(c.tree, "rep.mu", 0.0);
    CMatrix m = CMatrix::Identity(c.N, c.N);
    if (c.N < 2) throw ConfigError("rep.M", "rotation needs N >= 2");
    m(0, 0) = std::cos(mu);
    m(0, 1) = std::sin(mu);
    m(1, 0) = -std::sin(mu);
    m(1, 1) = std::cos(mu);
    return m;
  }
  throw ConfigError("rep.M", "expected identity|rotation|random");
}

ClassificationParams classified_params(const RunConfig& c) {
  ClassificationParams p;
  p.N = c.N;
  p.E = sign_vector(c);
  p.M = unitary_field(c);
  const std::string a = get<std::string>(c.tree, "rep.a_dil", "0");
  p.a_dil = (a == "inf") ? Dilation::infinity() : Dilation(convert<double>(a, "rep.a_dil"));
  p.eps_plus = get<int>(c.tree, "rep.eps_plus", 1);
  p.eps_minus = get<int>(c.tree, "rep.eps_minus", -1);
  p.A = optional_spectral(c.tree, "rep.A");
  p.B = optional_spectral(c.tree, "rep.B");
  p.C = optional_spectral(c.tree, "rep.C");
  p.theta = optional_spectral(c.tree, "rep.theta");
  p.omega = optional_spectral(c.tree, "rep.omega");
  const bool full = p.A || p.B || p.C || p.theta;
  if (full && !(p.A && p.B && p.C && p.theta))
    throw ConfigError("rep.A", "full parametrization needs A, B, C and theta");
  if (!full && !p.omega) throw ConfigError("rep.omega", "needs omega or the full parametrization");
  return p;
}

std::string rep_kind(const RunConfig& c) {
  const std::string k = get<std::string>(c.tree, "rep.kind", "nls");
  if (k != "nls" && k != "classified") throw ConfigError("rep.kind", "expected nls|classified");
  return k;
}

DefectPair make_rep(const RunConfig& c) {
  DefectPair dp = rep_kind(c) == "nls" ? build_nls_defect(nls_params(c)) : build_classified(classified_params(c));
  const std::string corrupt = get<std::string>(c.tree, "rep.corrupt", "none");
  if (corrupt == "t-minus-sign") return DefectPair(dp.Rplus(), dp.Rminus(), dp.Tplus(), SpectralScalar(-1.0) * dp.Tminus());
  if (corrupt != "none") throw ConfigError("rep.corrupt", "expected none|t-minus-sign");
  return dp;
}

// ---------------------------------------------------------------------------
// Tasks.

std::vector<NamedJob> smatrix_jobs(const RunConfig& c) {
  return {{"smatrix", "smatrix/unitarity",
           [c] {
             const DoubledSMatrix S = make_smatrix(c);
             const int n2 = get<int>(c.tree, "smatrix.count2", c.sampling.count);
             const int n3 = get<int>(c.tree, "smatrix.count3", std::max(1, c.sampling.count * 2 / 5));
             return std::vector<CheckRecord>{
                 from_report(check_unitarity(S, smatrix_samples(S, c.sampling.seed, n2, 2)), "smatrix", c.tol),
                 from_report(check_yang_baxter(S, smatrix_samples(S, c.sampling.seed + 1, n3, 3)), "smatrix", c.tol)};
           }}};
}

std::vector<NamedJob> rep_jobs(const RunConfig& c, bool constraints, bool rt) {
  std::vector<NamedJob> jobs;
  if (constraints && rep_kind(c) == "nls")
    jobs.push_back({"no-bound-states", "defect_rep/no-bound-states", [c] {
                      CheckRecord r = value_record("no-bound-states", "defect_rep/no-bound-states", Json());
                      r.pass = check_no_bound_states(nls_params(c));
                      r.value = r.pass;
                      return std::vector<CheckRecord>{r};
                    }});
  if (constraints && rep_kind(c) == "classified")
    jobs.push_back({"boundary-case", "boundary/case", [c] {
                      const auto p = classified_params(c);
                      p.validate();
                      return std::vector<CheckRecord>{
                          value_record("boundary-case", "boundary/case", to_string(infer_case(p)))};
                    }});
  if (constraints)
    jobs.push_back({"rep-constraints", "defect_rep/constraints", [c] {
                      const DefectPair dp = make_rep(c);
                      std::vector<CheckRecord> out;
                      const auto ks = rep_samples(dp, c.sampling.seed, c.sampling.count, c.sampling.lo, c.sampling.hi);
                      for (const auto& r : check_rep_constraints(dp, ks)) out.push_back(from_report(r, "defect_rep", c.tol));
                      return out;
                    }});
  if (rt)
    jobs.push_back({"rt-equations", "defect_rep/rt-equations", [c] {
                      const DefectPair dp = make_rep(c);
                      const DoubledSMatrix S = make_smatrix(c);
                      const int n = get<int>(c.tree, "rep.rt_count", std::max(1, c.sampling.count / 2));
                      std::vector<CheckRecord> out;
                      for (const auto& r : check_rt_equations(dp, S, smatrix_samples(S, c.sampling.seed + 2, n, 2)))
                        out.push_back(from_report(r, "defect_rep", c.tol));
                      return out;
                    }});
  return jobs;
}

std::vector<Particle> particles(const RunConfig& c, const std::string& path, bool incoming) {
  const auto v = c.tree.get_optional<std::string>(path);
  if (!v) throw ConfigError(path, "required field is missing");
  std::vector<Particle> out;
  for (const auto& item : split_list(*v, ";")) {
    auto f = split_list(item, ":");
    if (incoming ? f.size() != 3 : (f.size() != 2 && f.size() != 3))
      throw ConfigError(path, incoming ? "in particles are k:xi:iso" : "out particles are xi:iso");
    if (!incoming && f.size() == 3) f.erase(f.begin());
    Particle p;
    if (incoming) {
      p.momentum = convert<double>(f[0], path);
      f.erase(f.begin());
    }
    if (f[0] == "+") p.xi = 1;
    else if (f[0] == "-") p.xi = -1;
    else if (f[0] == "*") p.xi = 0;
    else throw ConfigError(path, "half-line label must be +, - or *");
    p.iso = f[1] == "*" ? -1 : convert<int>(f[1], path) - 1;
    if (p.iso < -1 || p.iso >= c.N) throw ConfigError(path, "isospin label out of range");
    out.push_back(p);
  }
  return out;
}

bool labelled(const std::vector<Particle>& ps) {
  return std::all_of(ps.begin(), ps.end(), [](const Particle& p) { return p.xi != 0 && p.iso >= 0; });
}

Json tensor_json(const Amplitude& a, const AmplitudeTerm& t) {
  Json nz = Json::array();
  const int slots = a.n_in + a.n_out;
  for (Eigen::Index flat = 0; flat < t.tensor.size(); ++flat) {
    if (std::abs(t.tensor(flat)) <= 1e-15) continue;
    std::vector<int> idx(static_cast<std::size_t>(slots));
    Eigen::Index r = flat;
    for (int s = slots - 1; s >= 0; --s) {
      idx[static_cast<std::size_t>(s)] = static_cast<int>(r % a.dim);
      r /= a.dim;
    }
    nz.push_back(Json{{"index", idx}, {"value", cjson(t.tensor(flat))}});
  }
  return nz;
}

std::vector<NamedJob> amplitude_jobs(const RunConfig& c) {
  return {{"amplitude", "rt_engine/amplitude", [c] {
             const auto in = particles(c, "amplitude.in", true);
             const auto out = particles(c, "amplitude.out", false);
             if (in.size() != out.size()) throw ConfigError("amplitude.out", "needs as many particles as amplitude.in");
             const DefectPair dp = make_rep(c);
             const RTEngine eng(make_smatrix(c), dp);
             const AmplitudeOptions opt{get<bool>(c.tree, "amplitude.filter", true)};
             const Amplitude A = vev_amplitude(eng, out, in, opt);
             std::vector<CheckRecord> recs;
             const bool fixed = labelled(in) && labelled(out);
             double factor_residual = 0.0;
             for (std::size_t t = 0; t < A.terms.size(); ++t) {
               const auto& term = A.terms[t];
               Json m = Json::array();
               for (const auto& mp : term.matching) m.push_back(Json{{"out", mp.out_index}, {"in", mp.in_index}, {"sign", mp.sign}});
               Json v{{"matching", m}, {"out_values", term.out_values}};
               if (fixed && in.size() == 1) {
                 const Particle& pi = in[0];
                 const Particle& po = out[0];
                 const double k = pi.momentum;
                 const int row = doubled_index(c.N, po.xi, po.iso), col = doubled_index(c.N, pi.xi, pi.iso);
                 const bool refl = term.matching[0].sign < 0;
                 const std::string half = po.xi > 0 ? "+" : "-";
                 const cd expect = refl ? dp.R(-k)(row, col) : dp.T(k)(row, col);
                 v["factors"] = Json::array({(refl ? "R" : "T") + half + (refl ? "(-k)" : "(k)") + "[" +
                                             std::to_string(po.iso + 1) + "," + std::to_string(pi.iso + 1) + "]"});
                 const cd got = A.labelled_entry(t, out, in);
                 v["value"] = cjson(got);
                 factor_residual = std::max(factor_residual, std::abs(got - expect));
               } else if (fixed) {
                 v["value"] = cjson(A.labelled_entry(t, out, in));
               } else {
                 v["tensor"] = tensor_json(A, term);
               }
               recs.push_back(value_record("amplitude-term-" + std::to_string(t), "rt_engine/amplitude", v));
             }
             if (fixed && in.size() == 1)
               recs.push_back(exact_record("one-to-one-factor", "rt_engine/one-to-one", factor_residual));
             if (get<bool>(c.tree, "amplitude.oracle", true)) {
               const Amplitude B = reorder_oracle(eng, out, in, opt);
               double worst = A.terms.size() == B.terms.size() ? 0.0 : INFINITY;
               for (const auto& term : A.terms) {
                 const AmplitudeTerm* u = B.find(term.matching);
                 worst = u ? std::max(worst, (term.tensor - u->tensor).cwiseAbs().maxCoeff()) : INFINITY;
               }
               recs.push_back(residual_record("reorder-oracle", "rt_engine/reorder-oracle", worst, c.tol));
             }
             return recs;
           }}};
}

std::vector<std::pair<int, int>> pair_list(const RunConfig& c) {
  const std::string raw = get<std::string>(c.tree, "hierarchy.pairs", "1,2;2,4;1,3;3,2");
  std::vector<std::pair<int, int>> out;
  for (const auto& item : split_list(raw, ";")) {
    const auto f = split_list(item, ", ");
    if (f.size() != 2) throw ConfigError("hierarchy.pairs", "pairs are m,n separated by ';'");
    out.emplace_back(convert<int>(f[0], "hierarchy.pairs"), convert<int>(f[1], "hierarchy.pairs"));
  }
  return out;
}

std::vector<NamedJob> hierarchy_jobs(const RunConfig& c) {
  const double htol = get<double>(c.tree, "hierarchy.tol", 1e-10);
  auto engine = [c] { return RTEngine(make_smatrix(c), make_rep(c)); };
  auto states = [c](const RTEngine& eng) {
    const auto ks = double_list(c.tree, "hierarchy.momenta", {0.7, -1.6});
    if (ks.size() < 2) throw ConfigError("hierarchy.momenta", "needs two momenta");
    require_generic(ks);
    auto mom = [](int sym, double k) { return Momentum{sym, k > 0 ? 1 : -1, std::abs(k)}; };
    return std::vector<FockVector>{FockVector::open_word(eng.dim(), {mom(1, ks[0])}),
                                   FockVector::open_word(eng.dim(), {mom(1, ks[0]), mom(2, ks[1])})};
  };
  std::vector<NamedJob> jobs;
  jobs.push_back({"hierarchy-commutator", "rt_engine/hierarchy-commutator", [=] {
                    const RTEngine eng = engine();
                    std::vector<CheckRecord> out;
                    int particles = 1;
                    for (const auto& psi : states(eng)) {
                      for (auto [m, n] : pair_list(c)) {
                        const auto r = check_hierarchy_commutator(eng, m, n, psi);
                        const std::string name = "hierarchy-commutator-" + std::to_string(m) + "-" + std::to_string(n) +
                                                 "-" + std::to_string(particles) + "p";
                        CheckRecord rec = residual_record(name, "rt_engine/hierarchy-commutator", r.residual, htol);
                        rec.value = Json{{"fitted_sign", r.fitted_sign},
                                         {"lhs_norm", r.lhs_norm},
                                         {"residual_other_sign", r.residual_other_sign}};
                        out.push_back(rec);
                      }
                      ++particles;
                    }
                    return out;
                  }});
  jobs.push_back({"involution", "rt_engine/involution", [=] {
                    const RTEngine eng = engine();
                    std::vector<CheckRecord> out;
                    const auto psi = states(eng).back();
                    for (auto [m, n] : pair_list(c)) {
                      if (m % 2 || n % 2) continue;
                      out.push_back(residual_record("involution-" + std::to_string(m) + "-" + std::to_string(n),
                                                    "rt_engine/involution", check_involution(eng, m, n, psi), htol));
                    }
                    return out;
                  }});
  jobs.push_back({"defect-symmetry", "rt_engine/defect-symmetry", [=] {
                    const RTEngine eng = engine();
                    const auto psi = states(eng).back();
                    const double k = get<double>(c.tree, "hierarchy.k", 0.55);
                    std::vector<CheckRecord> out;
                    for (double n : double_list(c.tree, "hierarchy.orders", {2, 4})) {
                      const auto [rt, rr] = check_defect_symmetry(eng, static_cast<int>(n), k, psi);
                      const std::string s = std::to_string(static_cast<int>(n));
                      out.push_back(residual_record("symmetry-t-" + s, "rt_engine/defect-symmetry", rt, htol));
                      out.push_back(residual_record("symmetry-r-" + s, "rt_engine/defect-symmetry", rr, htol));
                    }
                    return out;
                  }});
  jobs.push_back({"one-particle-unitarity", "rt_engine/one-particle-unitarity", [=] {
                    const RTEngine eng = engine();
                    double worst = 0.0;
                    for (double k : double_list(c.tree, "hierarchy.momenta", {0.7, -1.6}))
                      worst = std::max(worst, one_particle_unitarity(eng, k));
                    return std::vector<CheckRecord>{
                        residual_record("one-particle-unitarity", "rt_engine/one-particle-unitarity", worst, c.tol)};
                  }});
  jobs.push_back({"hamiltonian-hermiticity", "rt_engine/hermiticity", [=] {
                    const RTEngine eng = engine();
                    double worst = 0.0;
                    for (double k : double_list(c.tree, "hierarchy.momenta", {0.7, -1.6}))
                      for (double n : double_list(c.tree, "hierarchy.orders", {2, 4}))
                        worst = std::max(worst, hamiltonian_hermiticity(eng, static_cast<int>(n), k));
                    return std::vector<CheckRecord>{
                        residual_record("hamiltonian-hermiticity", "rt_engine/hermiticity", worst, c.tol)};
                  }});
  return jobs;
}

BoundaryCase case_field(const RunConfig& c, const ClassificationParams& p) {
  const std::string s = get<std::string>(c.tree, "boundary.case", "auto");
  if (s == "auto") return infer_case(p);
  if (s == "scalar") return BoundaryCase::scalar;
  if (s == "e-type") return BoundaryCase::e_type;
  if (s == "general-a") return BoundaryCase::general_a;
  throw ConfigError("boundary.case", "expected auto|scalar|e-type|general-a");
}

RenderStyle style_field(const RunConfig& c) {
  const std::string s = get<std::string>(c.tree, "boundary.style", "automatic");
  if (s == "automatic") return RenderStyle::automatic;
  if (s == "phi") return RenderStyle::phi;
  if (s == "split") return RenderStyle::split;
  if (s == "combined") return RenderStyle::combined;
  throw ConfigError("boundary.style", "expected automatic|phi|split|combined");
}

std::vector<NamedJob> boundary_jobs(const RunConfig& c, bool derive) {
  std::vector<NamedJob> jobs;
  if (rep_kind(c) == "nls") {
    if (derive) throw ConfigError("rep.kind", "boundary derive needs a classified representation");
    jobs.push_back({"jump-condition", "boundary/jump-condition", [c] {
                      const NLSDefectParams p = nls_params(c);
                      const DefectPair dp = build_nls_defect(p);
                      const auto ks = rep_samples(dp, c.sampling.seed, c.sampling.count, c.sampling.lo, c.sampling.hi);
                      return std::vector<CheckRecord>{from_report(check_theorem_bc(p, ks), "boundary", c.tol)};
                    }});
    return jobs;
  }
  jobs.push_back({"case-solution", "boundary/case-solution", [c, derive] {
                    const ClassificationParams p = classified_params(c);
                    const BoundaryCase bc = case_field(c, p);
                    const DefectPair dp = make_rep(c);
                    const BoundaryOperatorPair bp = build_case_solution(bc, p);
                    const auto ks = rep_samples(dp, c.sampling.seed, c.sampling.count, c.sampling.lo, c.sampling.hi);
                    const bool corrupt = get<bool>(c.tree, "boundary.corrupt_y", false);
                    std::vector<CheckRecord> out;
                    out.push_back(value_record("case", "boundary/case", to_string(bc)));
                    for (auto copy : {FunctionalCopy::value, FunctionalCopy::derivative}) {
                      FunctionalPair fp = functional_pair(bp, copy);
                      if (corrupt) fp.Y = SpectralScalar(2.0) * fp.Y;
                      ResidualReport r = check_functional_equations(fp, dp, ks);
                      r.identity_name += copy == FunctionalCopy::value ? "-value" : "-derivative";
                      CheckRecord rec = from_report(r, "boundary", c.tol);
                      rec.anchor = "boundary/functional-equations";
                      out.push_back(rec);
                    }
                    out.push_back(from_report(verify_on_free_solutions(bp, dp, ks), "boundary", c.tol));
                    if (derive)
                      out.push_back(value_record("differential-form", "boundary/differential-form",
                                                 render_case_symbolic(bc, p, style_field(c)).lines));
                    return out;
                  }});
  return jobs;
}

struct BreakingSetup {
  std::string example;
  DefectPair dp;
  std::optional<BreakingParams> bp;
};

BreakingSetup breaking_setup(const RunConfig& c) {
  const std::string ex = get<std::string>(c.tree, "breaking.example", "rotation");
  const double th = get<double>(c.tree, "breaking.theta0", 0.3);
  if (ex == "cos-sin") return {ex, cos_sin_example(c.N, th), std::nullopt};
  if (ex == "rotation") {
    if (c.N != 2) throw ConfigError("run.N", "rotation example needs N = 2");
    BreakingParams bp = rotation_example(th, get<double>(c.tree, "breaking.mu", 0.4), get<double>(c.tree, "breaking.a", 0.8));
    return {ex, build_breaking_rep(bp), bp};
  }
  if (ex == "classified") {
    const BreakingParams bp = BreakingParams::from_classification(classified_params(c));
    return {ex, build_breaking_rep(bp), bp};
  }
  throw ConfigError("breaking.example", "expected cos-sin|rotation|classified");
}

Json generator_json(const GeneratorRecord& g) {
  return Json{{"label", g.label.to_string()},
              {"kind", std::string(1, g.label.kind)},
              {"sign", g.label.sign},
              {"order", g.label.order},
              {"i", g.label.i + 1},
              {"j", g.label.j + 1},
              {"basis", g.label.basis == GeneratorBasis::tilde ? "tilde" : "plain"},
              {"vev_coefficient", cjson(g.vev_coefficient)},
              {"broken", g.broken}};
}

std::vector<NamedJob> breaking_jobs(const RunConfig& c, bool classify) {
  const int n_max = get<int>(c.tree, "breaking.n_max", 6);
  const double ctol = get<double>(c.tree, "breaking.tol", 1e-10);
  if (n_max < 1) throw ConfigError("breaking.n_max", "must be >= 1");
  std::vector<NamedJob> jobs;
  jobs.push_back({"expansion", "breaking/expansion", [=] {
                    const BreakingSetup s = breaking_setup(c);
                    const BreakingClassification cl = expand_and_classify(s.dp, n_max, ctol);
                    std::vector<CheckRecord> out;
                    Json table = Json::array();
                    for (const auto& g : cl.generators) table.push_back(generator_json(g));
                    out.push_back(value_record("coefficients", "breaking/expansion", table));
                    if (classify) {
                      Json combos = Json::array();
                      for (const auto& r : cl.combinations)
                        combos.push_back(Json{{"description", r.description},
                                              {"kind", std::string(1, r.kind)},
                                              {"sign", r.sign},
                                              {"order", r.order},
                                              {"value", cjson(r.value)},
                                              {"broken", r.broken}});
                      out.push_back(value_record("combinations", "breaking/classification", combos));
                      Json broken = Json::array();
                      for (const auto& l : cl.broken()) broken.push_back(l.to_string());
                      out.push_back(value_record("broken-generators", "breaking/classification", broken));
                    }
                    const double th = get<double>(c.tree, "breaking.theta0", 0.3);
                    if (s.example == "cos-sin") {
                      // Printed form: r^(2n) ~ (-1)^n th^2n, t^(2n+1) ~ (-1)^n th^(2n+1).
                      double printed = 0.0, taylor = 0.0, fact = 1.0;
                      for (int order = 1; order <= n_max; ++order) {
                        fact *= order;
                        const int h = order / 2;
                        const double sgn = h % 2 ? -1.0 : 1.0;
                        const bool even = order % 2 == 0;
                        const double pr = sgn * std::pow(th, order);
                        const double r_print = even ? pr : 0.0, t_print = even ? 0.0 : pr;
                        for (int sign : {1, -1})
                          for (int i = 0; i < c.N; ++i)
                            for (int j = 0; j < c.N; ++j) {
                              const cd rv = cl.find('r', sign, order, i, j)->vev_coefficient;
                              const cd tv = cl.find('t', sign, order, i, j)->vev_coefficient;
                              const double diag = i == j ? 1.0 : 0.0;
                              printed = std::max({printed, std::abs(rv - diag * r_print), std::abs(tv - diag * t_print)});
                              taylor = std::max({taylor, std::abs(rv - diag * r_print / fact),
                                                 std::abs(tv - diag * t_print / fact)});
                            }
                      }
                      out.push_back(residual_record("cos-sin-printed-form", "breaking/cos-sin-printed", printed, ctol));
                      out.push_back(residual_record("cos-sin-taylor-form", "breaking/cos-sin-taylor", taylor, ctol));
                    }
                    if (s.example == "rotation") {
                      const double mu = get<double>(c.tree, "breaking.mu", 0.4), a = get<double>(c.tree, "breaking.a", 0.8);
                      double worst = 0.0;
                      for (const auto& g : cl.generators)
                        worst = std::max(worst, std::abs(g.vev_coefficient -
                                                         rotation_example_coefficient(g.label.kind, g.label.sign, g.label.order,
                                                                                      g.label.i, g.label.j, th, mu, a)));
                      out.push_back(residual_record("rotation-printed-form", "breaking/rotation-coefficients", worst, ctol));
                      double gm = 0.0;
                      const auto ks = rep_samples(s.dp, c.sampling.seed, c.sampling.count, c.sampling.lo, c.sampling.hi);
                      for (double k : ks)
                        gm = std::max(gm, max_abs(std::cos(th) * gamma_matrix(th, mu, a, k) - s.dp.Rplus().evaluate(k)));
                      out.push_back(residual_record("gamma-matrix", "breaking/gamma", gm, c.tol));
                    }
                    return out;
                  }});
  jobs.push_back({"lambda", "breaking/lambda", [=] {
                    const BreakingSetup s = breaking_setup(c);
                    std::vector<CheckRecord> out;
                    if (!s.bp) return out;
                    const auto ks = rep_samples(s.dp, c.sampling.seed, c.sampling.count, c.sampling.lo, c.sampling.hi);
                    for (const auto& r : check_lambda(*s.bp, ks)) out.push_back(from_report(r, "breaking", c.tol));
                    const DoubledSMatrix St = build_tilde_s(make_smatrix(c), *s.bp);
                    const int n3 = std::max(1, c.sampling.count * 2 / 5);
                    CheckRecord u = from_report(check_unitarity(St, smatrix_samples(St, c.sampling.seed, c.sampling.count, 2)),
                                                "breaking", c.tol);
                    CheckRecord y = from_report(check_yang_baxter(St, smatrix_samples(St, c.sampling.seed + 1, n3, 3)),
                                                "breaking", c.tol);
                    u.name = "tilde-" + u.name;
                    y.name = "tilde-" + y.name;
                    u.anchor = y.anchor = "breaking/tilde-smatrix";
                    out.push_back(u);
                    out.push_back(y);
                    return out;
                  }});
  jobs.push_back({"tilde-vevs", "breaking/tilde-vevs", [=] {
                    const BreakingSetup s = breaking_setup(c);
                    std::vector<CheckRecord> out;
                    if (!s.bp) return out;
                    const auto ks = rep_samples(s.dp, c.sampling.seed, c.sampling.count, c.sampling.lo, c.sampling.hi);
                    const TildeScalars tv = tilde_vevs(s.dp, *s.bp, ks);
                    const DefectPair tp = tilde_pair(s.dp, *s.bp);
                    const BreakingClassification cl = expand_and_classify(tp, n_max, ctol, GeneratorBasis::tilde);
                    double off = 0.0;
                    for (const auto& g : cl.generators)
                      if (g.label.i != g.label.j) off = std::max(off, std::abs(g.vev_coefficient));
                    for (double k : ks)
                      for (const auto& blk : {tp.Rplus(), tp.Rminus(), tp.Tplus(), tp.Tminus()}) {
                        CMatrix v = blk.evaluate(k);
                        v.diagonal().setZero();
                        off = std::max(off, max_abs(v));
                      }
                    out.push_back(residual_record("tilde-off-diagonal", "breaking/tilde-vevs", off, c.tol));
                    const double k0 = ks.empty() ? 1.0 : ks.front();
                    out.push_back(value_record("tilde-scalars", "breaking/tilde-vevs",
                                               Json{{"k", k0},
                                                    {"rho_plus", cjson(tv.rho_plus(k0))},
                                                    {"rho_minus", cjson(tv.rho_minus(k0))},
                                                    {"tau_plus", cjson(tv.tau_plus(k0))},
                                                    {"tau_minus", cjson(tv.tau_minus(k0))}}));
                    if (classify) {
                      Json table = Json::array();
                      for (const auto& g : cl.generators) table.push_back(generator_json(g));
                      out.push_back(value_record("tilde-coefficients", "breaking/classification", table));
                    }
                    return out;
                  }});
  return jobs;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Task t) {
  for (const auto& [task, name] : kTaskNames)
    if (task == t) return name;
  return "unknown";
}

Task parse_task(const std::string& s) {
  for (const auto& [task, name] : kTaskNames)
    if (name == s) return task;
  throw ConfigError("run.task", "unknown task '" + s + "'");
}

void RunConfig::validate() const {
  if (N < 1) throw ConfigError("run.N", "must be >= 1");
  if (sampling.count < 1) throw ConfigError("run.count", "must be >= 1");
  if (!(sampling.lo < sampling.hi)) throw ConfigError("run.lo", "must be below run.hi");
  if (!(tol > 0.0)) throw ConfigError("run.tol", "must be positive");
  switch (task) {
    case Task::verify_rep:
    case Task::verify_rt:
    case Task::hierarchy:
    case Task::boundary_verify:
      rep_kind(*this) == "nls" ? (void)nls_params(*this) : (void)classified_params(*this);
      break;
    case Task::classify_rep:
    case Task::boundary_derive:
      if (rep_kind(*this) != "classified") throw ConfigError("rep.kind", "task needs a classified representation");
      (void)classified_params(*this);
      break;
    case Task::amplitude:
      (void)particles(*this, "amplitude.in", true);
      (void)particles(*this, "amplitude.out", false);
      break;
    case Task::breaking_expand:
    case Task::breaking_classify:
      if (get<std::string>(tree, "breaking.example", "rotation") == "classified") (void)classified_params(*this);
      break;
    case Task::verify_smatrix:
      break;
  }
}

ptree read_ini(const std::string& path) {
  ptree t;
  try {
    boost::property_tree::ini_parser::read_ini(path, t);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("<file>", e.what());
  }
  return t;
}

RunConfig load_config(const ptree& tree) {
  RunConfig c;
  c.tree = tree;
  c.task = parse_task(require<std::string>(tree, "run.task"));
  c.N = get<int>(tree, "run.N", 1);
  c.g = get<double>(tree, "run.g", 1.0);
  c.sampling.seed = require<std::uint64_t>(tree, "run.seed");
  c.sampling.count = get<int>(tree, "run.count", 50);
  c.sampling.lo = get<double>(tree, "run.lo", -10.0);
  c.sampling.hi = get<double>(tree, "run.hi", 10.0);
  c.tol = get<double>(tree, "run.tol", 1e-12);
  c.out = get<std::string>(tree, "run.out", "");
  c.jobs = get<int>(tree, "run.jobs", 1);
  c.preset = get<std::string>(tree, "run.preset", "");
  return c;
}

// ---------------------------------------------------------------------------
// Presets.

namespace {

struct Preset {
  PresetInfo info;
  std::vector<std::pair<std::string, std::string>> fields;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {{"pure-transmission", "defect_rep/nls-family", "NLS defect with a = d = 1, b = c = 0"},
       {{"run.task", "verify-rep"}, {"run.seed", "1"}, {"run.N", "1"}, {"run.g", "1"},
        {"rep.kind", "nls"}, {"rep.a", "1"}, {"rep.b", "0"}, {"rep.c", "0"}, {"rep.d", "1"}}},
      {{"resonant", "defect_rep/nls-family", "NLS defect with a = d = 0, b = 1, c = -1"},
       {{"run.task", "verify-rep"}, {"run.seed", "1"}, {"run.N", "1"}, {"run.g", "1"},
        {"rep.kind", "nls"}, {"rep.a", "0"}, {"rep.b", "1"}, {"rep.c", "-1"}, {"rep.d", "0"}}},
      {{"breaking-cos-sin", "breaking/cos-sin", "R = cos(theta0/k) I, T = sin(theta0/k) I with theta0 = 0.3"},
       {{"run.task", "breaking-expand"}, {"run.seed", "1"}, {"run.N", "2"}, {"run.g", "1"},
        {"breaking.example", "cos-sin"}, {"breaking.theta0", "0.3"}, {"breaking.n_max", "6"}}},
      {{"breaking-rotation", "breaking/rotation", "E = diag(1,-1), rotated by mu, rho = +-cos theta0, tau = sin theta0"},
       {{"run.task", "breaking-classify"}, {"run.seed", "1"}, {"run.N", "2"}, {"run.g", "1"},
        {"breaking.example", "rotation"}, {"breaking.theta0", "0.7"}, {"breaking.mu", "0.4"},
        {"breaking.a", "0.8"}, {"breaking.n_max", "6"}}},
      {{"bc-omega-1", "boundary/scalar-case", "scalar case, omega = 1"},
       {{"run.task", "boundary-derive"}, {"run.seed", "1"}, {"run.N", "2"}, {"run.g", "1"},
        {"rep.kind", "classified"}, {"rep.omega", "1"}, {"rep.eps_plus", "1"}, {"rep.eps_minus", "-1"},
        {"boundary.case", "scalar"}}},
      {{"bc-omega-k", "boundary/scalar-case", "scalar case, omega = k"},
       {{"run.task", "boundary-derive"}, {"run.seed", "1"}, {"run.N", "2"}, {"run.g", "1"},
        {"rep.kind", "classified"}, {"rep.omega", "k"}, {"rep.eps_plus", "1"}, {"rep.eps_minus", "1"},
        {"boundary.case", "scalar"}}},
  };
  return all;
}

}  // namespace

std::vector<PresetInfo> list_cases() {
  std::vector<PresetInfo> out;
  for (const auto& p : presets()) out.push_back(p.info);
  return out;
}

ptree preset_tree(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.info.name != name) continue;
    ptree t;
    for (const auto& [k, v] : p.fields) t.put(k, v);
    t.put("run.preset", name);
    return t;
  }
  throw ConfigError("run.preset", "unknown preset '" + name + "'");
}

// ---------------------------------------------------------------------------

bool Report::all_pass() const {
  return !records.empty() && std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
}

Json Report::to_json() const {
  Json j;
  j["config"] = config;
  Json recs = Json::array();
  for (const auto& r : records) {
    Json o;
    o["name"] = r.name;
    o["anchor"] = r.anchor;
    if (r.residual) o["residual"] = *r.residual;
    if (r.tolerance) o["tolerance"] = *r.tolerance;
    if (!r.value.is_null()) o["value"] = r.value;
    if (!r.error.empty()) o["error"] = r.error;
    o["pass"] = r.pass;
    recs.push_back(o);
  }
  j["records"] = recs;
  j["pass"] = all_pass();
  if (wall_time) j["wall_time_s"] = *wall_time;
  return j;
}

Report run(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.config = Json{{"task", to_string(config.task)},
                    {"N", config.N},
                    {"g", config.g},
                    {"seed", config.sampling.seed},
                    {"count", config.sampling.count},
                    {"range", Json::array({config.sampling.lo, config.sampling.hi})},
                    {"tol", config.tol}};
  if (!config.preset.empty()) {
    rep.config["preset"] = config.preset;
    for (const auto& p : list_cases())
      if (p.name == config.preset) rep.config["preset_anchor"] = p.anchor;
  }
  Json sections = tree_json(config.tree);
  if (sections.is_object()) sections.erase("run");
  rep.config["sections"] = sections.is_object() ? sections : Json::object();

  std::vector<NamedJob> jobs;
  switch (config.task) {
    case Task::verify_smatrix: jobs = smatrix_jobs(config); break;
    case Task::verify_rep: jobs = rep_jobs(config, true, true); break;
    case Task::verify_rt: jobs = rep_jobs(config, false, true); break;
    case Task::classify_rep: jobs = rep_jobs(config, true, true); break;
    case Task::amplitude: jobs = amplitude_jobs(config); break;
    case Task::hierarchy: jobs = hierarchy_jobs(config); break;
    case Task::boundary_derive: jobs = boundary_jobs(config, true); break;
    case Task::boundary_verify: jobs = boundary_jobs(config, false); break;
    case Task::breaking_expand: jobs = breaking_jobs(config, false); break;
    case Task::breaking_classify: jobs = breaking_jobs(config, true); break;
  }
  rep.records = run_jobs(jobs, config.jobs);
  if (config.timing)
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string render(const Report& r) { return r.to_json().dump(2) + "\n"; }

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f << text;
    f.flush();
    if (!f) throw Error("write to " + tmp + " failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace nlsd::cli
