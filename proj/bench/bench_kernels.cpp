#include <benchmark/benchmark.h>

#include <random>

#include "mfk/kernels.hpp"
#include "mfk/rkhs.hpp"
#include "mfk/sampler.hpp"

using namespace mfk;

namespace {

DiscreteMeasure random_measure(Rng& rng, Eigen::Index n, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd atoms(d, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < d; ++i) atoms(i, j) = u(rng);
  return DiscreteMeasure(atoms, RealVector::Constant(n, 1.0 / static_cast<double>(n)));
}

std::vector<DiscreteMeasure> centers(int n, Eigen::Index m) {
  Rng rng = make_rng({42, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m)});
  std::vector<DiscreteMeasure> out;
  for (int i = 0; i < n; ++i) out.push_back(random_measure(rng, m, 2));
  return out;
}

const auto kKernel = DistributionKernelSpec::double_sum(BaseKernelSpec::gaussian(0.5));

void BM_DoubleSumParallel(benchmark::State& state) {
  Rng rng = make_rng({1});
  const auto mu = random_measure(rng, state.range(0), 2), nu = random_measure(rng, state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(eval_double_sum(kKernel.base(), mu, nu));
}

void BM_DoubleSumSerial(benchmark::State& state) {
  Rng rng = make_rng({1});
  const auto mu = random_measure(rng, state.range(0), 2), nu = random_measure(rng, state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::double_sum(kKernel.base(), mu, nu));
}

void BM_GramParallel(benchmark::State& state) {
  const auto c = centers(static_cast<int>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(gram(kKernel, c).entries(0, 0));
}

void BM_GramSerial(benchmark::State& state) {
  const auto c = centers(static_cast<int>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(serial::gram(kKernel, c).entries(0, 0));
}

}  // namespace

BENCHMARK(BM_DoubleSumParallel)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_DoubleSumSerial)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_GramParallel)->Arg(16)->Arg(64);
BENCHMARK(BM_GramSerial)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
