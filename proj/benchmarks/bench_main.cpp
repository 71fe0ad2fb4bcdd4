// Copyright 2026 The PointCert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <benchmark/benchmark.h>

#include "pointcert/attacks.hpp"
#include "pointcert/completion.hpp"
#include "pointcert/dataset.hpp"
#include "pointcert/ensemble.hpp"

namespace {

using namespace pointcert;

PointCloud bench_cloud(std::size_t n) {
  SyntheticSpec spec;
  spec.points = n;
  spec.test_per_class = 1;
  spec.spread = 0.3;
  return synthetic_clouds(spec, "test")[0].cloud;
}

void BM_CanonicalEncode(benchmark::State& state) {
  const Point p({0.123456789, -0.5, 0.75});
  for (auto _ : state) benchmark::DoNotOptimize(canonical_encode(p));
}
BENCHMARK(BM_CanonicalEncode);

void BM_Partition(benchmark::State& state) {
  const auto cloud = bench_cloud(static_cast<std::size_t>(state.range(0)));
  const auto rule = state.range(1) == 0 ? HashRule::md5() : HashRule::mean_digits();
  for (auto _ : state) benchmark::DoNotOptimize(partition(cloud, 400, rule));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Partition)->Args({1024, 0})->Args({10000, 0})->Args({10000, 1});

void BM_PredictAndCertify(benchmark::State& state) {
  const auto cloud = bench_cloud(1024);
  const CentroidClassifier f({synthetic_anchor(1, 3), synthetic_anchor(2, 3),
                              synthetic_anchor(3, 3)});
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_and_certify(cloud, m, HashRule::md5(), f));
  }
}
BENCHMARK(BM_PredictAndCertify)->Arg(8)->Arg(32)->Arg(400);

void BM_Chamfer(benchmark::State& state) {
  const auto a = bench_cloud(static_cast<std::size_t>(state.range(0)));
  const auto b = CentroidUpsample(1).complete(a);
  for (auto _ : state) benchmark::DoNotOptimize(chamfer(a, b));
}
BENCHMARK(BM_Chamfer)->Arg(64)->Arg(512);

void BM_AttackAdd(benchmark::State& state) {
  const auto cloud = bench_cloud(1024);
  const EnsembleSpec ens{32, HashRule::md5(),
                         std::make_shared<CentroidClassifier>(std::vector<std::vector<double>>{
                             synthetic_anchor(1, 3), synthetic_anchor(2, 3),
                             synthetic_anchor(3, 3)})};
  const AttackBudget budget{AttackType::Addition, static_cast<std::size_t>(state.range(0)), 64, 1};
  for (auto _ : state) benchmark::DoNotOptimize(run_attack(cloud, ens, budget));
}
BENCHMARK(BM_AttackAdd)->Arg(1)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
