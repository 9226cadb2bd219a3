// Copyright 2026 The MeshDeform Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Microbenchmarks for the hot paths: surface sampling, the two Chamfer
// implementations, and the two assignment solvers. Sizes bracket the scales
// the pipeline actually runs at.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "meshdeform/assignment.hpp"
#include "meshdeform/losses.hpp"
#include "meshdeform/primitives.hpp"
#include "meshdeform/rng.hpp"
#include "meshdeform/sampling.hpp"

namespace {

using namespace meshdeform;

PointCloud bench_cloud(std::uint64_t seed, int n) {
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    cloud.points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  return cloud;
}

Mat bench_cost(std::uint64_t seed, int n) {
  const PointCloud a = bench_cloud(seed, n);
  const PointCloud b = bench_cloud(seed + 1, n);
  Mat cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      cost(i, j) = (a.points[static_cast<std::size_t>(i)] -
                    b.points[static_cast<std::size_t>(j)])
                       .norm();
    }
  }
  return cost;
}

void BM_SampleSurface(benchmark::State& state) {
  const TriMesh mesh = make_uv_sphere(0.8, 24, 32);
  const int count = static_cast<int>(state.range(0));
  Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_surface(mesh, count, rng));
  }
  state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_SampleSurface)->Arg(256)->Arg(2048)->Arg(16384);

void BM_ChamferTree(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PointCloud a = bench_cloud(11, n);
  const PointCloud b = bench_cloud(12, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chamfer(a, b));
  }
}
BENCHMARK(BM_ChamferTree)->Arg(256)->Arg(1024)->Arg(4096);

void BM_ChamferBrute(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PointCloud a = bench_cloud(11, n);
  const PointCloud b = bench_cloud(12, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chamfer_brute(a, b));
  }
}
BENCHMARK(BM_ChamferBrute)->Arg(256)->Arg(1024)->Arg(4096);

void BM_AssignmentExact(benchmark::State& state) {
  const Mat cost = bench_cost(21, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_assignment_exact(cost));
  }
}
BENCHMARK(BM_AssignmentExact)->Arg(64)->Arg(256)->Arg(512);

void BM_AssignmentAuction(benchmark::State& state) {
  const Mat cost = bench_cost(21, static_cast<int>(state.range(0)));
  AssignmentOptions options;
  options.auction_eps_min = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_assignment_auction(cost, options));
  }
}
BENCHMARK(BM_AssignmentAuction)->Arg(64)->Arg(256)->Arg(512)->Arg(1024);

void BM_AssignmentAuctionWarm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Mat cost = bench_cost(21, n);
  AssignmentOptions options;
  options.auction_eps_min = 1e-3;
  AssignmentWarmStart warm;
  solve_assignment_auction(cost, options, &warm);
  Rng rng(33);
  for (auto _ : state) {
    // Perturb slightly so the warm start faces realistic drift.
    state.PauseTiming();
    for (int i = 0; i < n; ++i) {
      cost(i, static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n))) +=
          rng.uniform(-1e-3, 1e-3);
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(solve_assignment_auction(cost, options, &warm));
  }
}
BENCHMARK(BM_AssignmentAuctionWarm)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
