#include <benchmark/benchmark.h>

#include "ifsm/data.hpp"
#include "ifsm/linalg.hpp"
#include "ifsm/model.hpp"
#include "ifsm/offline.hpp"
#include "ifsm/rng.hpp"

using namespace ifsm;
using namespace ifsm::linalg;

namespace {

// n=10 selects the small preset, n=100 the large one.
ProblemPreset sized_preset(const benchmark::State& state) {
  return state.range(0) >= 100 ? large_problem() : small_problem();
}

void BM_OnlineStep(benchmark::State& state) {
  const ProblemPreset p = sized_preset(state);
  const auto task = static_cast<Task>(state.range(1));
  const auto variant = static_cast<Variant>(state.range(2));
  RngStream rng(1, 0);
  const CovarianceSpec spec = random_covariance(p.spectrum, rng);
  ModelState s = initial_state(p, task, rng);
  std::vector<Vector> xs;
  for (int i = 0; i < 256; ++i) xs.push_back(sample(spec, rng));
  std::size_t i = 0;
  for (auto _ : state) {
    StepResult r = online_step(s, xs[i++ % xs.size()], 1e-4, task, variant);
    benchmark::DoNotOptimize(r.y);
  }
}
BENCHMARK(BM_OnlineStep)
    ->ArgsProduct({{10, 100}, {0, 1}, {0, 1}})
    ->ArgNames({"n", "task", "variant"});

void BM_OfflineStep(benchmark::State& state) {
  const ProblemPreset p = sized_preset(state);
  const auto task = static_cast<Task>(state.range(1));
  RngStream rng(2, 0);
  const Matrix g = build_covariance(random_covariance(p.spectrum, rng));
  const ModelState s = initial_state(p, task, rng);
  for (auto _ : state) {
    ModelState next = offline_step(s, g, 0.01, task, Variant::IterationFree);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_OfflineStep)->ArgsProduct({{10, 100}, {0, 1}})->ArgNames({"n", "task"});

void BM_SymEig(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(3, 0);
  Matrix a = random_normal_matrix(n, n, 1.0, rng);
  a.symmetrize();
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(a));
}
BENCHMARK(BM_SymEig)->Arg(10)->Arg(30)->Arg(100);

void BM_JacobianSpectrum(benchmark::State& state) {
  const ProblemPreset p = small_problem();
  RngStream rng(4, 0);
  const Matrix g = build_covariance(random_covariance(p.spectrum, rng));
  const ModelState fp = construct_fixed_point(g, p.lambda, Task::PSP, DiagonalMatrix::identity(p.k), p.tau_psp);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian_spectrum(fp, g, Task::PSP, Variant::IterationFree));
}
BENCHMARK(BM_JacobianSpectrum);

}  // namespace
BENCHMARK_MAIN();
