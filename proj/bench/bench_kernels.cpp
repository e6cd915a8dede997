#include <benchmark/benchmark.h>

#include "benard/ensemble.hpp"
#include "benard/integrators.hpp"
#include "benard/norms.hpp"

using namespace benard;

namespace {

GalerkinBasis square(int k) {
  Domain d;
  d.length = 2.0;
  BasisSpec s;
  s.max_k1 = k;
  s.max_k2 = k;
  s.velocity_modes = k;
  return GalerkinBasis::build(d, s);
}

void BM_ApplyB(benchmark::State& state) {
  const auto b = square(static_cast<int>(state.range(0)));
  const Operators ops(b, {1.0, 1.0});
  OperatorWorkspace ws(b);
  Rng rng = make_stream(1, 0);
  const Vec phi = random_field(b, rng).values();
  Vec out(b.size());
  for (auto _ : state) {
    ops.apply_B(phi, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["modes"] = b.size();
}
BENCHMARK(BM_ApplyB)->Arg(4)->Arg(8)->Arg(16);

void BM_JacobianTranspose(benchmark::State& state) {
  const auto b = square(static_cast<int>(state.range(0)));
  const Operators ops(b, {1.0, 1.0});
  OperatorWorkspace ws(b);
  Rng rng = make_stream(1, 0);
  const Vec phi = random_field(b, rng).values(), p = random_field(b, rng).values();
  Vec out(b.size());
  for (auto _ : state) {
    ops.apply_B_jacobian_transpose(phi, p, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_JacobianTranspose)->Arg(8);

// One Monte-Carlo batch: 64 stochastic paths of an 8x8 system, serial reference vs the
// OpenMP path map (argument = threads).
struct Batch {
  GalerkinBasis basis = square(8);
  Operators ops{basis, {1.0, 1.0}};
  NoiseModel noise{CovarianceSpec::decay_law(basis, 1.0, 2.0), DiffusionCoefficient::additive(1.0),
                   DiffusionCoefficient::additive(1.0)};
  IntegratorConfig cfg{1.0, 50, 1e-2, 50, true};
  Vec xi = Vec::Zero(basis.size());
  double path(Rng& rng) const { return run_stochastic(ops, noise, xi, nullptr, cfg, rng).x_norm_sq(); }
};

void BM_EnsembleSerial(benchmark::State& state) {
  const Batch batch;
  for (auto _ : state) {
    auto v = map_paths_serial<double>(64, 7, [&](int, Rng& r) { return batch.path(r); });
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_EnsembleSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EnsembleParallel(benchmark::State& state) {
  const Batch batch;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto v = map_paths<double>(64, 7, threads, [&](int, Rng& r) { return batch.path(r); });
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_EnsembleParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
