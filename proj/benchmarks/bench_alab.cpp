#include "alab/builtins.hpp"
#include "alab/classify.hpp"
#include "alab/integrate.hpp"
#include "alab/reconstruct.hpp"

#include <benchmark/benchmark.h>

using namespace alab;

static void BM_ExpMatrixSo3(benchmark::State& state) {
  const LieAlgebra g = LieAlgebra::so3();
  const Vec xi = (Vec(3) << 0.3, -0.7, 1.1).finished();
  for (auto _ : state) benchmark::DoNotOptimize(exp_matrix(g, xi));
}
BENCHMARK(BM_ExpMatrixSo3);

static void BM_Rkmk4Step(benchmark::State& state) {
  const ActionODE p = sphere_test_problem();
  Vec y = p.y0;
  for (auto _ : state) {
    y = rkmk4_step(p, y, 0.01);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_Rkmk4Step);

static void BM_CurvatureAtPoint(benchmark::State& state) {
  const AlgebroidPtr alg = builtin_algebroid("so3_sphere");
  const AConnection conn = random_coefficient_connection(alg, 1);
  ProbeConfig cfg;
  cfg.num_batteries = 1;
  cfg.num_points = 1;
  const ProbeSet probes = make_probes(*alg, cfg);
  const auto& s = probes.batteries.front().sections;
  for (auto _ : state) benchmark::DoNotOptimize(curvature(conn, s[0], s[1], s[2], probes.points.front()));
}
BENCHMARK(BM_CurvatureAtPoint);

static void BM_Classify(benchmark::State& state) {
  const AlgebroidPtr alg = builtin_algebroid("so3_sphere");
  const AConnection conn = canonical_flat(alg);
  ProbeConfig cfg;
  cfg.num_batteries = static_cast<int>(state.range(0));
  cfg.num_points = 20;
  const ProbeSet probes = make_probes(*alg, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(classify(conn, probes));
}
BENCHMARK(BM_Classify)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_ParallelTransport(benchmark::State& state) {
  const ReconstructionFixture f = gauge_twisted_so3();
  const auto points = f.algebroid->base().sample_points(2, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel_transport(f.connection, points[0], points[1]));
  }
}
BENCHMARK(BM_ParallelTransport)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
