#include <benchmark/benchmark.h>

#include "lmv/multiview.hpp"
#include "lmv/rng.hpp"

using namespace lmv;

namespace {

CameraRig make_rig(int m) {
  Rng rng(1);
  std::vector<Camera> cams;
  for (int i = 0; i < m; ++i)
    cams.emplace_back(Matrix34d(rng.gaussian_matrix(3, 4)));
  return CameraRig(std::move(cams));
}

void BM_Membership(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const CameraRig rig = make_rig(m);
  Rng rng(2);
  const PlueckerLine line =
      PlueckerLine::from_points(rng.gaussian_vector(4).cast<Complex>(),
                                rng.gaussian_vector(4).cast<Complex>());
  const LineTuple tuple = forward_map(rig, line);
  for (auto _ : state) {
    benchmark::DoNotOptimize(membership(rig, tuple));
  }
}
BENCHMARK(BM_Membership)->Arg(3)->Arg(4)->Arg(6);

void BM_ForwardMap(benchmark::State& state) {
  const CameraRig rig = make_rig(4);
  Rng rng(3);
  const PlueckerLine line =
      PlueckerLine::from_points(rng.gaussian_vector(4).cast<Complex>(),
                                rng.gaussian_vector(4).cast<Complex>());
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_map(rig, line));
  }
}
BENCHMARK(BM_ForwardMap);

void BM_GrassmannDistance(benchmark::State& state) {
  Rng rng(4);
  const PlueckerLine a =
      PlueckerLine::from_points(rng.gaussian_vector(4).cast<Complex>(),
                                rng.gaussian_vector(4).cast<Complex>());
  const PlueckerLine b =
      PlueckerLine::from_points(rng.gaussian_vector(4).cast<Complex>(),
                                rng.gaussian_vector(4).cast<Complex>());
  for (auto _ : state) {
    benchmark::DoNotOptimize(grassmann_distance(a, b));
  }
}
BENCHMARK(BM_GrassmannDistance);

}  // namespace

BENCHMARK_MAIN();
