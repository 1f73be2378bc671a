#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "subsearch/evaluation.hpp"
#include "subsearch/random.hpp"
#include "subsearch/ranking.hpp"
#include "subsearch/synthetic.hpp"

namespace {

using namespace subsearch;

const SyntheticDataset& dataset(std::size_t images) {
  static std::map<std::size_t, SyntheticDataset> cache;
  auto it = cache.find(images);
  if (it == cache.end()) {
    SyntheticSpec spec;
    spec.images = images;
    spec.dim = 512;
    spec.queries = 64;
    it = cache.emplace(images, make_homogeneous_dataset(spec)).first;
  }
  return it->second;
}

void BM_RankImages(benchmark::State& state) {
  const auto& data = dataset(static_cast<std::size_t>(state.range(0)));
  const RankingConfig cfg{static_cast<DistanceKind>(state.range(1)), Fusion::linear,
                          0.5, CandidateMode::all_overlap};
  std::size_t q = 0;
  for (auto _ : state) {
    const auto& a = data.annotations[q++ % data.annotations.size()];
    benchmark::DoNotOptimize(
        rank_images(data.collection, a.embedding_long->values(), a.rect, cfg));
  }
  state.SetItemsProcessed(state.iterations());
  state.counters["regions"] = static_cast<double>(data.collection.region_count());
}
BENCHMARK(BM_RankImages)
    ->ArgsProduct({{1000, 10000}, {0, 4}})
    ->ArgNames({"images", "kind"})
    ->Unit(benchmark::kMillisecond);

void BM_CandidateRegions(benchmark::State& state) {
  const auto& data = dataset(static_cast<std::size_t>(state.range(0)));
  std::size_t q = 0;
  for (auto _ : state) {
    const auto& a = data.annotations[q++ % data.annotations.size()];
    benchmark::DoNotOptimize(
        candidate_regions(data.collection, a.rect, CandidateMode::all_overlap));
  }
}
BENCHMARK(BM_CandidateRegions)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_UnionArea(benchmark::State& state) {
  SubstreamRng rng(1, "bench-union");
  std::vector<Rect> rects(static_cast<std::size_t>(state.range(0)));
  for (auto& r : rects) {
    const double w = 0.05 + 0.5 * rng.uniform();
    const double h = 0.05 + 0.5 * rng.uniform();
    r = {rng.uniform() * (1 - w), rng.uniform() * (1 - h), w, h};
  }
  for (auto _ : state) benchmark::DoNotOptimize(union_area(rects));
}
BENCHMARK(BM_UnionArea)->RangeMultiplier(4)->Range(4, 256);

void BM_PerturbRect(benchmark::State& state) {
  const auto cfg = PerturbationConfig::from_pixels(25.0, 0.25, 42, 1280, 720);
  const Rect r{0.2, 0.3, 0.25, 0.15};
  for (auto _ : state) benchmark::DoNotOptimize(perturb_rect(r, cfg, "q00042"));
}
BENCHMARK(BM_PerturbRect);

}  // namespace
BENCHMARK_MAIN();
