#include <benchmark/benchmark.h>

#include <cstdio>
#include <string>
#include <vector>

#include "aegis/embedding.hpp"
#include "aegis/liveness.hpp"
#include "aegis/pgm.hpp"
#include "aegis/recognition.hpp"
#include "aegis/synth.hpp"

namespace {

aegis::Scene one_face_scene(int size) {
  aegis::SceneSpec spec;
  spec.seed = 42;
  spec.placements.push_back({.identity_seed = 3, .x = 40, .y = 24, .size = size});
  return aegis::compose_scene(spec);
}

std::vector<aegis::FaceRecord> collection(std::size_t n) {
  std::vector<aegis::FaceRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[17];
    std::snprintf(id, sizeof id, "%016zx", i);
    aegis::FaceRecord r;
    r.face_id = id;
    r.user_id = "user-" + r.face_id;
    r.embedding = aegis::embed(aegis::generate_identity_texture(1000 + i, 32));
    out.push_back(std::move(r));
  }
  return out;
}

void BM_DetectFaces(benchmark::State& state) {
  const auto scene = one_face_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aegis::detect_faces(scene.frame));
}
BENCHMARK(BM_DetectFaces)->Arg(16)->Arg(32)->Arg(64);

void BM_Embed(benchmark::State& state) {
  const auto face = aegis::generate_identity_texture(5, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aegis::embed(face));
}
BENCHMARK(BM_Embed)->Arg(16)->Arg(32)->Arg(64);

void BM_SearchCollection(benchmark::State& state) {
  const auto faces = collection(static_cast<std::size_t>(state.range(0)));
  const auto probe = aegis::embed(aegis::generate_identity_texture(7, 32));
  for (auto _ : state) benchmark::DoNotOptimize(aegis::search_collection(probe, faces, 80.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SearchCollection)->RangeMultiplier(10)->Range(10, 10000);

void BM_LaplacianEnergy(benchmark::State& state) {
  const auto face = aegis::generate_identity_texture(5, 64);
  for (auto _ : state) benchmark::DoNotOptimize(aegis::laplacian_energy(face));
}
BENCHMARK(BM_LaplacianEnergy);

void BM_PgmRoundTrip(benchmark::State& state) {
  const auto frame = one_face_scene(32).frame;
  for (auto _ : state) benchmark::DoNotOptimize(aegis::decode_pgm(aegis::encode_pgm(frame)));
}
BENCHMARK(BM_PgmRoundTrip);

}  // namespace
BENCHMARK_MAIN();
