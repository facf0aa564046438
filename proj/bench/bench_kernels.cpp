// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include "qrdyn/analysis.hpp"

using namespace qrdyn;

namespace {

const MapInstance& zsquared() {
  static const MapInstance f = make_zsquared();
  return f;
}

const EscapeCertificate& zsquared_cert() {
  static const EscapeCertificate c = estimate_certificate(zsquared(), CertificateMethod::Holder);
  return c;
}

const BoxRegion kBox = BoxRegion::cube(2, -2.5, 2.5);

void BM_ClassifySerial(benchmark::State& state) {
  const auto res = GridResolution::uniform(2, static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(classify_grid_serial(zsquared(), kBox, res, zsquared_cert(), 100));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * res.total()));
}

void BM_ClassifyParallel(benchmark::State& state) {
  const auto res = GridResolution::uniform(2, static_cast<std::uint32_t>(state.range(0)));
  GridOptions opts;
  opts.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(classify_grid(zsquared(), kBox, res, zsquared_cert(), 100, opts));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * res.total()));
}

void BM_ClassifyWinding3D(benchmark::State& state) {
  static const MapInstance w = make_winding(3, 3);
  const auto res = GridResolution::uniform(3, 32);
  GridOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    if (opts.threads == 0) {
      benchmark::DoNotOptimize(classify_grid_serial(w, BoxRegion::cube(3, -2, 2), res, std::nullopt, 50));
    } else {
      benchmark::DoNotOptimize(classify_grid(w, BoxRegion::cube(3, -2, 2), res, std::nullopt, 50, opts));
    }
  }
}

void BM_BoundarySerial(benchmark::State& state) {
  const auto g = classify_grid(zsquared(), kBox, GridResolution::uniform(2, 1024), zsquared_cert(), 100);
  for (auto _ : state) benchmark::DoNotOptimize(extract_boundary_serial(g));
}

void BM_BoundaryParallel(benchmark::State& state) {
  const auto g = classify_grid(zsquared(), kBox, GridResolution::uniform(2, 1024), zsquared_cert(), 100);
  for (auto _ : state) benchmark::DoNotOptimize(extract_boundary(g));
}

}  // namespace

BENCHMARK(BM_ClassifySerial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassifyParallel)->Args({256, 1})->Args({256, 4})->Args({512, 1})->Args({512, 4})->Unit(benchmark::kMillisecond);
// Thread count 0 selects the serial reference.
BENCHMARK(BM_ClassifyWinding3D)->Arg(0)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundarySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BoundaryParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
