#include <random>

#include <benchmark/benchmark.h>

#include "eqd/ascent.hpp"
#include "eqd/relax_socp.hpp"

using namespace eqd;

namespace {

EdInstance random_instance(int founders, int generations, std::size_t dense_limit) {
  const auto ped = generate_pedigree(founders, generations, 2, 17);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  Vector g(static_cast<Eigen::Index>(ped.size()));
  for (auto& v : g) v = normal(rng);
  auto kin = std::make_shared<const KinshipSystem>(KinshipSystem::build(ped, dense_limit));
  const int n = std::max(2, static_cast<int>(ped.size()) / 10);
  return make_instance(kin, g, 1.5 / n, n);
}

void BM_KinshipBuild(benchmark::State& state) {
  const auto ped = generate_pedigree(static_cast<int>(state.range(0)), 3, 2, 17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(KinshipSystem::build(ped));
  }
  state.SetLabel("Z=" + std::to_string(ped.size()));
}
BENCHMARK(BM_KinshipBuild)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SwapDelta(benchmark::State& state) {
  const auto pp = preprocess_free(random_instance(static_cast<int>(state.range(0)), 3, kDefaultDenseLimit));
  const auto z = pp.inst.g.size();
  Vector x = Vector::Zero(z);
  for (int i = 0; i < pp.inst.n; ++i) x[i] = 1.0 / pp.inst.n;
  QuadraticCache cache(pp, x);
  const int out = 0;
  const int in = static_cast<int>(z) - 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cache.swap_delta(out, in));
  }
}
BENCHMARK(BM_SwapDelta)->Arg(50)->Arg(500);

void BM_FullRecompute(benchmark::State& state) {
  const auto inst = random_instance(static_cast<int>(state.range(0)), 3, kDefaultDenseLimit);
  const auto z = inst.g.size();
  Vector x = Vector::Zero(z);
  for (int i = 0; i < inst.n; ++i) x[i] = 1.0 / inst.n;
  x[0] = 0.0;
  x[z - 1] = 1.0 / inst.n;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inst.kin->quadratic(x));
  }
}
BENCHMARK(BM_FullRecompute)->Arg(50)->Arg(500);

void BM_SocpSolve(benchmark::State& state) {
  const auto pp = preprocess_free(random_instance(static_cast<int>(state.range(0)), 3, kDefaultDenseLimit));
  const auto model = build_socp(pp);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_socp(model));
  }
}
BENCHMARK(BM_SocpSolve)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SteepestAscent(benchmark::State& state) {
  const auto inst = random_instance(static_cast<int>(state.range(0)), 3, kDefaultDenseLimit);
  const auto pp = preprocess_free(inst);
  const auto socp = solve_socp(build_socp(pp));
  const double lambda = default_lambda(inst);
  for (auto _ : state) {
    benchmark::DoNotOptimize(steepest_ascent(pp, socp, lambda));
  }
}
BENCHMARK(BM_SteepestAscent)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
