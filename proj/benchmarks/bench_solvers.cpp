#include <benchmark/benchmark.h>

#include "lmv/ed_degree.hpp"
#include "lmv/enumerative.hpp"
#include "lmv/rng.hpp"
#include "lmv/triangulation.hpp"

using namespace lmv;

namespace {

CameraRig make_rig(int m) {
  Rng rng(11);
  std::vector<Camera> cams;
  for (int i = 0; i < m; ++i)
    cams.emplace_back(Matrix34d(rng.gaussian_matrix(3, 4)));
  return CameraRig(std::move(cams));
}

void BM_TransversalsOfFour(benchmark::State& state) {
  Rng rng(12);
  auto line = [&rng]() {
    return PlueckerLine::from_points(rng.gaussian_vector(4).cast<Complex>(),
                                     rng.gaussian_vector(4).cast<Complex>());
  };
  const PlueckerLine l1 = line(), l2 = line(), l3 = line(), l4 = line();
  for (auto _ : state) {
    benchmark::DoNotOptimize(transversals_of_four(l1, l2, l3, l4));
  }
}
BENCHMARK(BM_TransversalsOfFour);

void BM_MonteCarloRealCount(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        expected_real_transversals(static_cast<std::uint64_t>(state.range(0)),
                                   7, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloRealCount)->Arg(1000)->Arg(10000);

void BM_TriangulateNoisy(benchmark::State& state) {
  const CameraRig rig = make_rig(3);
  Rng rng(13);
  Eigen::Matrix2cd v;
  v << Complex(rng.gaussian(), 0), Complex(rng.gaussian(), 0),
      Complex(rng.gaussian(), 0), Complex(rng.gaussian(), 0);
  const LineTuple exact = forward_map(rig, chart(ChartPoint(v)));
  std::vector<ProjectivePoint> noisy;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d hat = exact[i].real_coords().normalized();
    noisy.emplace_back(Eigen::VectorXd(hat + 1e-10 * rng.unit_sphere(3)));
  }
  const LineTuple tuple(noisy);
  for (auto _ : state) {
    benchmark::DoNotOptimize(triangulate_line(rig, tuple));
  }
}
BENCHMARK(BM_TriangulateNoisy);

void BM_EdSystemJacobian(benchmark::State& state) {
  const CameraRig rig = make_rig(3);
  Rng rng(14);
  std::vector<Eigen::Vector3d> u(3);
  for (int i = 0; i < 3; ++i) u[i] = rng.unit_sphere(3);
  const EdCriticalSystem system(rig, u);
  Eigen::VectorXcd x(7);
  for (int i = 0; i < 7; ++i) x[i] = Complex(rng.gaussian(), rng.gaussian());
  Eigen::MatrixXcd j;
  for (auto _ : state) {
    system.jacobian(x, j);
    benchmark::DoNotOptimize(j);
  }
}
BENCHMARK(BM_EdSystemJacobian);

void BM_TrackSmallSystem(benchmark::State& state) {
  const MultiPoly x = MultiPoly::variable(2, 0);
  const MultiPoly y = MultiPoly::variable(2, 1);
  std::vector<MultiPoly> system;
  system.push_back(x * x - MultiPoly::constant(2, 1.0));
  system.push_back(y * y * y - MultiPoly::constant(2, 8.0));
  TrackConfig config;
  config.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_total_degree(system, config));
  }
}
BENCHMARK(BM_TrackSmallSystem);

}  // namespace
