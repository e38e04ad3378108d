#include <benchmark/benchmark.h>

#include "nlsd/breaking.hpp"
#include "nlsd/rt_engine.hpp"

using namespace nlsd;

namespace {

NLSDefectParams generic(int N) {
  NLSDefectParams p;
  p.a = 0.5;
  p.b = 1.0;
  p.d = 0.3;
  p.c = (p.a * p.d - 1.0) / p.b;
  p.alpha = std::polar(1.0, 0.4);
  p.N = N;
  p.g = 0.8;
  return p;
}

void BM_DoubledS(benchmark::State& st) {
  const DoubledSMatrix S({static_cast<int>(st.range(0)), 1.0});
  double k = 0.3;
  for (auto _ : st) {
    benchmark::DoNotOptimize(S.s12(k, 1.7));
    k += 1e-6;
  }
}
BENCHMARK(BM_DoubledS)->Arg(1)->Arg(2)->Arg(3);

void BM_YangBaxter(benchmark::State& st) {
  const DoubledSMatrix S({static_cast<int>(st.range(0)), 1.0});
  const auto samples = smatrix_samples(S, 1, 20, 3);
  for (auto _ : st) benchmark::DoNotOptimize(check_yang_baxter(S, samples));
}
BENCHMARK(BM_YangBaxter)->Arg(1)->Arg(2);

void BM_RTEquations(benchmark::State& st) {
  const DefectPair dp = build_nls_defect(generic(2));
  const DoubledSMatrix S({2, 0.8});
  const auto samples = smatrix_samples(S, 1, 10, 2);
  for (auto _ : st) benchmark::DoNotOptimize(check_rt_equations(dp, S, samples));
}
BENCHMARK(BM_RTEquations);

void BM_Amplitude2to2(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  const RTEngine eng(DoubledSMatrix({N, 0.8}), build_nls_defect(generic(N)));
  const std::vector<Particle> in{{0.8, -1, -1}, {-1.9, 1, -1}}, out{{0, 0, -1}, {0, 0, -1}};
  for (auto _ : st) benchmark::DoNotOptimize(vev_amplitude(eng, out, in, AmplitudeOptions{false}));
}
BENCHMARK(BM_Amplitude2to2)->Arg(1)->Arg(2);

void BM_HierarchyCommutator(benchmark::State& st) {
  const RTEngine eng(DoubledSMatrix({1, 0.8}), build_nls_defect(generic(1)));
  const FockVector psi = FockVector::open_word(eng.dim(), {Momentum{1, 1, 0.7}, Momentum{2, -1, 1.6}});
  for (auto _ : st) benchmark::DoNotOptimize(check_hierarchy_commutator(eng, 1, 2, psi));
}
BENCHMARK(BM_HierarchyCommutator);

void BM_Laurent(benchmark::State& st) {
  const SpectralScalar arg = SpectralScalar(0.3) / SpectralScalar::k();
  const SpectralScalar ik = SpectralScalar(kI) * SpectralScalar::k();
  const SpectralScalar f = cos(arg) * ((SpectralScalar(1.0) - ik) / (SpectralScalar(1.0) + ik));
  for (auto _ : st) benchmark::DoNotOptimize(f.laurent(static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Laurent)->Arg(6)->Arg(12);

void BM_ClassifyRotation(benchmark::State& st) {
  const BreakingParams bp = rotation_example(0.7, 0.4, 0.8);
  const DefectPair dp = build_breaking_rep(bp);
  for (auto _ : st) benchmark::DoNotOptimize(expand_and_classify(dp, 6));
}
BENCHMARK(BM_ClassifyRotation);

}  // namespace

BENCHMARK_MAIN();
