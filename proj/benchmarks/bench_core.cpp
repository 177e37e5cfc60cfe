// Microbenchmarks for the hot paths: pointwise residual evaluation, the
// recorded gradient, surface jets, and the double-point candidate scan.

#include <benchmark/benchmark.h>

#include <vector>

#include "plateau/curve.hpp"
#include "plateau/intersect.hpp"
#include "plateau/loss.hpp"
#include "plateau/network.hpp"
#include "plateau/rng.hpp"
#include "plateau/surface.hpp"
#include "plateau/threading.hpp"
#include "plateau/train.hpp"

using namespace plateau;

namespace {

ModelConfig width_model(int width) {
  ModelConfig m;
  m.curve = preset_curve(CurvePreset::kUnknot);
  m.arch.hidden.assign(4, width);
  m.arch.out_dim = 4;
  return m;
}

std::vector<double> busy_theta(const MlpArchitecture& arch) {
  std::vector<double> theta =
      init_params(arch, InitKind::kGlorotZeroHead, 7);
  Rng rng(13);
  for (double& t : theta) t += rng.uniform(-0.1, 0.1);
  return theta;
}

}  // namespace

static void BM_PointResidual(benchmark::State& state) {
  const ModelConfig model = width_model(static_cast<int>(state.range(0)));
  const std::vector<double> theta = busy_theta(model.arch);
  PlainLossEval pe(model);
  pe.bind(theta);
  for (auto _ : state)
    benchmark::DoNotOptimize(pe.point_sq_norm(0.31, -0.42));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PointResidual)->Arg(32)->Arg(64);

static void BM_SurfaceJet(benchmark::State& state) {
  const ModelConfig model = width_model(static_cast<int>(state.range(0)));
  const std::vector<double> theta = busy_theta(model.arch);
  SurfaceEvaluator ev(model);
  ev.bind(theta);
  SurfaceJet jet;
  for (auto _ : state) {
    ev.eval_jet(0.31, -0.42, jet);
    benchmark::DoNotOptimize(jet.comp[0].v);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SurfaceJet)->Arg(32)->Arg(64);

static void BM_BatchLossGrad(benchmark::State& state) {
  const ModelConfig model = width_model(static_cast<int>(state.range(0)));
  const std::vector<double> theta = busy_theta(model.arch);
  const std::vector<DiscPoint> pts = sample_disc(256, 11);
  ThreadPool pool(1);
  for (auto _ : state) {
    const BatchedLoss bl = batched_loss(model, theta, pts, pool);
    benchmark::DoNotOptimize(bl.value);
  }
  state.SetItemsProcessed(state.iterations() * pts.size());
}
BENCHMARK(BM_BatchLossGrad)->Arg(32)->Arg(64);

static void BM_CandidateScan(benchmark::State& state) {
  PolynomialImmersion fx = two_crossing_fixture();
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const ImmersionGrid grid = eval_grid(fx, res);
    const auto cands = generate_candidates(grid, 0.2, 0.012);
    benchmark::DoNotOptimize(cands.size());
  }
  state.SetItemsProcessed(state.iterations() * res * res);
}
BENCHMARK(BM_CandidateScan)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
