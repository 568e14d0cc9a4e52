#include <benchmark/benchmark.h>

#include "gomet/structure.hpp"
#include "gomet/verifier.hpp"

using namespace gomet;

static void BM_bracket_table_so8(benchmark::State& state) {
  AlgebraPtr alg = build_algebra(Family::SO, 8);
  for (auto _ : state) {
    double acc = 0.0;
    for (int i = 0; i < alg->dim(); ++i) {
      for (int j = i + 1; j < alg->dim(); ++j) {
        acc += bracket(alg->basis_element(i), alg->basis_element(j)).coeffs.squaredNorm();
      }
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_bracket_table_so8);

static void BM_decompose_so9(benchmark::State& state) {
  SpaceSpec spec = parse_spec("SO(9)/SO(2)xSO(3)");
  for (auto _ : state) {
    Decomposition dec = decompose(spec);
    benchmark::DoNotOptimize(dec.m_dim());
  }
}
BENCHMARK(BM_decompose_so9);

static void BM_geodesic_residual_u4(benchmark::State& state) {
  Decomposition dec = decompose(parse_spec("U(4)/U(1)xU(2)"));
  MetricOperator metric = gmu_metric(dec, 2.0);
  ProbeSet probes = ProbeSet::build(dec, {64, 1});
  double op = metric.op_norm();
  size_t k = 0;
  for (auto _ : state) {
    const Probe& p = probes.random[k++ % probes.random.size()];
    benchmark::DoNotOptimize(geodesic_residual(dec, metric, p.x, op).relative_residual);
  }
}
BENCHMARK(BM_geodesic_residual_u4);

static void BM_derive_constraints_so7(benchmark::State& state) {
  Decomposition dec = decompose(parse_spec("SO(7)/SO(2)xSO(3)"));
  for (auto _ : state) {
    EigenvalueClasses classes = derive_constraints(dec);
    benchmark::DoNotOptimize(classes.class_count());
  }
}
BENCHMARK(BM_derive_constraints_so7);

BENCHMARK_MAIN();
