#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "nlsd/boundary.hpp"

using namespace nlsd;

namespace {

using Poly = Polynomial<cd>;

ClassificationParams case_params(BoundaryCase c, bool omega_k) {
  ClassificationParams p;
  p.N = 2;
  if (c != BoundaryCase::scalar) {
    p.E = Eigen::VectorXi(2);
    p.E << 1, -1;
  }
  p.a_dil = c == BoundaryCase::e_type ? Dilation::infinity() : Dilation(c == BoundaryCase::general_a ? 1.0 : 0.0);
  p.omega = omega_k ? SpectralScalar::k() : SpectralScalar(1.0);
  p.eps_minus = omega_k ? 1 : -1;
  return p;
}

std::string golden(const std::string& name) {
  std::ifstream in(std::string(NLSD_GOLDEN_DIR) + "/" + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Poly poly(std::vector<cd> c) { return Poly(std::move(c)); }
Poly dx_pow(int n, cd c = 1.0) {
  std::vector<cd> v(static_cast<std::size_t>(n + 1), 0.0);
  v.back() = c;
  return Poly(v);
}
Poly times_dx(const Poly& p) {
  std::vector<cd> v{0.0};
  for (int n = 0; n <= p.degree(); ++n) v.push_back(p.coeff(n));
  return Poly(v);
}
Poly add(const Poly& a, const Poly& b) {
  std::vector<cd> v;
  for (int n = 0; n <= std::max(a.degree(), b.degree()); ++n) v.push_back(a.coeff(n) + b.coeff(n));
  return Poly(v);
}

// Row r, isotopic component c of (U, V) as operators in Dx.
struct OpRow {
  Poly lhs, rhs;
};
OpRow op_row(const BoundaryOperatorPair& bp, int r, int c) {
  const int N = bp.N();
  Poly lhs = to_derivative(polynomial_of(bp.U(r * N + c, r * N + c)));
  for (int i = 0; i < r; ++i) lhs = times_dx(lhs);
  const Poly rhs = add(to_derivative(polynomial_of(bp.V(r * N + c, c))),
                       times_dx(to_derivative(polynomial_of(bp.V(r * N + c, N + c)))));
  return {lhs, rhs};
}

// Residual of ours == factor * printed, factor fitted on the leading lhs coefficient.
double proportional(const OpRow& ours, const OpRow& printed, cd* factor = nullptr) {
  const int d = printed.lhs.degree();
  const cd f = ours.lhs.coeff(d) / printed.lhs.coeff(d);
  if (factor) *factor = f;
  double r = 0.0;
  for (const auto* pair : {&ours.lhs, &ours.rhs}) {
    const Poly& o = *pair;
    const Poly& p = pair == &ours.lhs ? printed.lhs : printed.rhs;
    for (int n = 0; n <= std::max(o.degree(), p.degree()); ++n) r = std::max(r, std::abs(o.coeff(n) - f * p.coeff(n)));
  }
  return r;
}

const cd I = kI;

}  // namespace

TEST_CASE("k -> -i Dx rendering") {
  CHECK(render_operator(poly({0.0, 2.0})) == "-2i*Dx");
  CHECK(render_operator(poly({0.0, 0.0, 1.0})) == "-Dx^2");
  CHECK(to_derivative(poly({1.0, 1.0, 1.0})) == poly({1.0, -I, -1.0}));
  CHECK_THROWS_AS(polynomial_of(SpectralScalar(1.0) / SpectralScalar::k()), NotPolynomial);
}

TEST_CASE("rendering is a morphism on polynomial matrices") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> d(-3, 3);
  auto draw = [&] {
    SMat m(2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        std::vector<cd> c;
        for (int n = 0; n <= 3; ++n) c.emplace_back(d(rng), d(rng));
        m(i, j) = SpectralScalar(NumericRational(Poly(c), Poly(cd(1.0))));
      }
    return m;
  };
  for (int trial = 0; trial < 20; ++trial) {
    const SMat A = draw(), B = draw();
    CHECK(to_derivative(A * B) == to_derivative(A).compose(to_derivative(B)));
  }
}

TEST_CASE("golden renderings of the closed-form cases") {
  const std::vector<std::tuple<BoundaryCase, bool, std::string>> cases = {
      {BoundaryCase::scalar, false, "scalar_omega_1.txt"},       {BoundaryCase::scalar, true, "scalar_omega_k.txt"},
      {BoundaryCase::e_type, false, "e_type_omega_1.txt"},       {BoundaryCase::e_type, true, "e_type_omega_k.txt"},
      {BoundaryCase::general_a, false, "general_a_omega_1.txt"}, {BoundaryCase::general_a, true, "general_a_omega_k.txt"}};
  for (const auto& [c, wk, file] : cases) {
    CAPTURE(file);
    CHECK(render_case_symbolic(c, case_params(c, wk)).to_string() == golden(file));
  }
}

TEST_CASE("printed displays are proportional to the derived operators") {
  // Rows as printed: per isotopic component (R = E +1, L = E -1), lhs acting on
  // Phi(+0) and rhs acting on Phi(-0), both as polynomials in Dx.
  struct Printed {
    BoundaryCase c;
    bool omega_k;
    std::vector<std::vector<OpRow>> rows;  // [row][component]
  };
  const Poly one = dx_pow(0), dx = dx_pow(1), dx2 = dx_pow(2);
  const std::vector<Printed> printed = {
      {BoundaryCase::scalar, false, {{{one, one}}, {{dx, dx}}}},
      {BoundaryCase::scalar, true, {{{dx_pow(1, I), dx2}}, {{dx2, dx_pow(1, I)}}}},
      {BoundaryCase::e_type,
       false,
       {{{one, one}, {one, dx_pow(0, -1.0)}}, {{dx, dx}, {dx, dx_pow(1, -1.0)}}}},
      {BoundaryCase::e_type,
       true,
       {{{dx_pow(1, I), dx2}, {dx_pow(1, I), one}}, {{dx_pow(2, -I), dx}, {dx_pow(2, -I), dx_pow(3)}}}},
      {BoundaryCase::general_a,
       false,
       {{{poly({1.0, 1.0}), poly({1.0, 1.0})}, {poly({1.0, 1.0}), poly({1.0, -1.0})}},
        {{poly({0.0, 1.0, 1.0}), poly({0.0, 1.0, 1.0})}, {poly({0.0, 1.0, 1.0}), poly({0.0, 1.0, -1.0})}}}},
      {BoundaryCase::general_a,
       true,
       {{{poly({0.0, I, I}), poly({0.0, -1.0, 1.0})}, {poly({0.0, I, I}), poly({0.0, 0.0, 1.0, -1.0})}},
        {{poly({0.0, 0.0, I, I}), poly({0.0, -1.0, 0.0, 0.0, 1.0})},
         {poly({0.0, 0.0, I, I}), poly({0.0, -1.0, 1.0})}}}},
  };
  for (const auto& pr : printed) {
    CAPTURE(to_string(pr.c));
    CAPTURE(pr.omega_k);
    const ClassificationParams p = case_params(pr.c, pr.omega_k);
    const BoundaryOperatorPair bp = build_case_solution(pr.c, p);
    for (std::size_t r = 0; r < 2; ++r) {
      const OpRow first = op_row(bp, static_cast<int>(r), 0);
      const int d = pr.rows[r][0].lhs.degree();
      const cd row_scale = first.lhs.coeff(d) / pr.rows[r][0].lhs.coeff(d);
      for (std::size_t c = 0; c < pr.rows[r].size(); ++c) {
        cd f;
        CHECK(proportional(op_row(bp, static_cast<int>(r), static_cast<int>(c)), pr.rows[r][c], &f) <
              1e-12 * std::abs(row_scale));
        CHECK(std::abs(f - row_scale) < 1e-12 * std::abs(row_scale));
      }
    }
  }
}

TEST_CASE("closed-form cases satisfy the functional equations and free solutions") {
  for (BoundaryCase c : {BoundaryCase::scalar, BoundaryCase::e_type, BoundaryCase::general_a})
    for (bool wk : {false, true})
      for (std::uint64_t seed : {1u, 2u}) {
        CAPTURE(to_string(c));
        ClassificationParams p = case_params(c, wk);
        if (seed == 2 && c != BoundaryCase::scalar) p.M = random_unitary(2, 11);
        const DefectPair dp = build_classified(p);
        const BoundaryOperatorPair bp = build_case_solution(c, p);
        const auto ks = rep_samples(dp, seed, 25);
        for (auto copy : {FunctionalCopy::value, FunctionalCopy::derivative})
          CHECK(check_functional_equations(functional_pair(bp, copy), dp, ks).max_residual < 1e-12);
        CHECK(verify_on_free_solutions(bp, dp, ks).max_residual < 1e-12);
      }
}

TEST_CASE("full parametrization") {
  ClassificationParams p;
  p.N = 2;
  p.E = Eigen::VectorXi(2);
  p.E << 1, -1;
  p.M = random_unitary(2, 5);
  p.a_dil = 0.6;
  p.eps_minus = -1;
  p.A = SpectralScalar::k() * SpectralScalar(0.5);
  p.B = SpectralScalar(0.3);
  p.C = SpectralScalar::k() * SpectralScalar(-1.2);
  p.theta = SpectralScalar(0.4);
  const auto [f, g] = f_g(p);
  CHECK(std::abs(f(0.7) - (0.35 + I) * (0.3 + I) * (-0.84 + I)) < 1e-14);
  CHECK(std::abs(g(0.7) - (0.35 + I) * (0.3 - I) * (-0.84 - I)) < 1e-14);
  CHECK(std::abs(omega_of(p)(0.7) - std::tan(0.2)) < 1e-15);
  const DefectPair dp = build_classified(p);
  const BoundaryOperatorPair bp = build_case_solution(BoundaryCase::general_a, p);
  const auto ks = rep_samples(dp, 3, 25);
  for (auto copy : {FunctionalCopy::value, FunctionalCopy::derivative})
    CHECK(check_functional_equations(functional_pair(bp, copy), dp, ks).max_residual < 1e-12);
  CHECK(verify_on_free_solutions(bp, dp, ks).max_residual < 1e-12);

  ClassificationParams reduced = case_params(BoundaryCase::scalar, false);
  const auto [fr, gr] = f_g(reduced);
  CHECK(std::abs(fr(1.3) + I) < 1e-15);
  CHECK(std::abs(gr(1.3) + I) < 1e-15);
}

TEST_CASE("falsifiability") {
  const ClassificationParams p = case_params(BoundaryCase::scalar, true);
  const DefectPair dp = build_classified(p);
  const BoundaryOperatorPair bp = build_case_solution(BoundaryCase::scalar, p);
  FunctionalPair fp = functional_pair(bp, FunctionalCopy::value);
  fp.Y = SpectralScalar(2.0) * fp.Y;
  CHECK(check_functional_equations(fp, dp, rep_samples(dp, 1, 20)).max_residual > 1e-3);

  // Scalar-case operators against an E-type representation.
  const ClassificationParams e = case_params(BoundaryCase::e_type, true);
  const DefectPair de = build_classified(e);
  CHECK(verify_on_free_solutions(bp, de, rep_samples(de, 1, 20)).max_residual > 1e-3);

  CHECK_THROWS_AS(build_case_solution(BoundaryCase::e_type, p), CaseMismatch);
  CHECK_THROWS_AS(build_case_solution(BoundaryCase::scalar, e), CaseMismatch);
}

TEST_CASE("parity of omega is tied to eps-") {
  ClassificationParams p = case_params(BoundaryCase::scalar, true);
  p.eps_minus = -1;
  CHECK_THROWS_AS(p.validate(), ParityError);
  p = case_params(BoundaryCase::scalar, false);
  p.eps_minus = 1;
  CHECK_THROWS_AS(p.validate(), ParityError);
}

TEST_CASE("case inference") {
  CHECK(infer_case(case_params(BoundaryCase::scalar, false)) == BoundaryCase::scalar);
  CHECK(infer_case(case_params(BoundaryCase::e_type, false)) == BoundaryCase::e_type);
  CHECK(infer_case(case_params(BoundaryCase::general_a, false)) == BoundaryCase::general_a);
  ClassificationParams z = case_params(BoundaryCase::general_a, false);
  z.a_dil = 0.0;
  CHECK(infer_case(z) == BoundaryCase::scalar);
}

TEST_CASE("free solutions") {
  NLSDefectParams p;
  p.a = 0.5;
  p.b = 1.0;
  p.d = 0.3;
  p.c = (p.a * p.d - 1.0) / p.b;
  p.alpha = std::polar(1.0, 0.4);
  const DefectPair dp = build_nls_defect(p);
  const CMatrix one = CMatrix::Identity(1, 1);
  for (double k : {1.0, -0.7}) {
    const int sign = k > 0 ? -1 : 1;
    const FreeSolution s(dp, k, sign);
    // Transmitted side carries T, incident side I e^{ikx} + R(-k) e^{-ikx}.
    const CMatrix T = sign < 0 ? dp.Tplus().evaluate(k) : dp.Tminus().evaluate(k);
    const CMatrix R = sign < 0 ? dp.Rminus().evaluate(-k) : dp.Rplus().evaluate(-k);
    const CMatrix trans = (sign < 0 ? s.limit_above() : s.limit_below());
    const CMatrix inc = (sign < 0 ? s.limit_below() : s.limit_above());
    CHECK(max_abs(trans.topRows(1) - T) < 1e-15);
    CHECK(max_abs(trans.bottomRows(1) - I * k * T) < 1e-15);
    CHECK(max_abs(inc.topRows(1) - (one + R)) < 1e-15);
    CHECK(max_abs(inc.bottomRows(1) - I * k * (one - R)) < 1e-15);
    const double x = sign < 0 ? 0.3 : -0.3;
    CHECK(max_abs(s.value(x) - T * std::exp(I * k * x)) < 1e-15);
    CHECK(max_abs(s.derivative(-x) - I * k * (std::exp(-I * k * x) * one - R * std::exp(I * k * x))) < 1e-14);
  }
  CHECK_THROWS(FreeSolution(dp, 1.0, 1));
}

TEST_CASE("theorem jump condition") {
  NLSDefectParams pt;
  CHECK(check_theorem_bc(pt, {0.3, -1.2, 2.5}).max_residual < 1e-12);
  NLSDefectParams res;
  res.a = 0.0;
  res.b = 1.0;
  res.c = -1.0;
  res.d = 0.0;
  CHECK(check_theorem_bc(res, {1.0, -0.4, 3.1}).max_residual < 1e-12);
  NLSDefectParams ph;
  ph.alpha = I;
  CHECK(check_theorem_bc(ph, {0.8, -2.0}).max_residual < 1e-12);

  // Transparent defect: X = Y = I exactly when T = 1.
  const DefectPair dp = build_nls_defect(pt);
  const FunctionalPair id{SMat::identity(1), SMat::identity(1)};
  CHECK(check_functional_equations(id, dp, {0.3, -1.2}).max_residual < 1e-12);
  const BoundaryOperatorPair uv{SMat::identity(2), SMat::identity(2)};
  CHECK(verify_on_free_solutions(uv, dp, {0.3, -1.2}).max_residual < 1e-12);
  CHECK(check_functional_equations(id, build_nls_defect(ph), {0.3}).max_residual > 1e-3);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int accepted = 0;
  while (accepted < 20) {
    NLSDefectParams p;
    p.a = u(rng);
    p.b = u(rng);
    p.d = u(rng);
    p.alpha = std::polar(1.0, u(rng));
    p.N = 1 + accepted % 3;
    if (std::abs(p.b) < 0.1) continue;
    p.c = (p.a * p.d - 1.0) / p.b;
    try {
      if (!check_no_bound_states(p)) continue;
    } catch (const DegenerateError&) {
      continue;
    }
    ++accepted;
    CHECK(check_theorem_bc(p, rep_samples(build_nls_defect(p), accepted, 20)).max_residual < 1e-12);
  }
}
