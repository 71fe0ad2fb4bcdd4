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


// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pointcert/attacks.hpp"
#include "pointcert/baselines.hpp"
#include "pointcert/certlab.hpp"
#include "pointcert/completion.hpp"
#include "pointcert/dataset.hpp"
#include "pointcert/errors.hpp"
#include "pointcert/evaluate.hpp"
#include "pointcert/parallel.hpp"
#include "pointcert/rng.hpp"

namespace {

using namespace pointcert;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PointCloud uniform_cloud(Rng& rng, std::size_t n) {
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(Point({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}));
  }
  return PointCloud(std::move(pts));
}

// Standard benchmark: 3 well-separated classes, 1024 points per cloud.
SyntheticSpec standard_spec() {
  SyntheticSpec spec;
  spec.classes = 3;
  spec.train_per_class = 10;
  spec.test_per_class = 67;
  spec.points = 1024;
  spec.spread = 0.1;
  spec.seed = 2026;
  return spec;
}

std::vector<LabeledCloud> first(std::vector<LabeledCloud> v, std::size_t n) {
  v.resize(std::min(n, v.size()));
  return v;
}

Outcome soundness() {
  const auto r = run_oracle_batch(500, 1, 3);
  auto u = [](std::uint64_t v) { return static_cast<unsigned long long>(v); };
  return {r.violations == 0 && r.instances == 500,
          fmt("%zu instances x 4 types, budgets 0/1/2/3: %llu/%llu/%llu/%llu, "
              "%llu attacks enumerated, %llu violations",
              r.instances, u(r.budgets[0]), u(r.budgets[1]), u(r.budgets[2]),
              u(r.budgets[3]), u(r.attacks_enumerated), u(r.violations))};
}

Outcome tightness() {
  const auto r = run_tightness_batch(200, 7);
  return {r.witnesses_constructed == 800 && r.witnesses_verified == 800,
          fmt("%zu/%zu witnesses verified", r.witnesses_verified, r.witnesses_constructed)};
}

// Subclouds that differ between two partitions.
std::size_t changed_buckets(const Partition& a, const Partition& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.subclouds.size(); ++i) {
    n += a.subclouds[i] == b.subclouds[i] ? 0 : 1;
  }
  return n;
}

Outcome partition_laws() {
  Rng rng(11);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto cloud = uniform_cloud(rng, 1 + rng.below(300));
    const std::size_t m = 1 + rng.below(64);
    const auto rule = trial % 2 ? HashRule::md5() : HashRule::mean_digits();
    const auto part = partition(cloud, m, rule);

    std::set<std::string> seen;
    std::size_t covered = 0;
    bool ok = true;
    for (std::size_t b = 0; b < m; ++b) {
      const auto& sub = part.subclouds[b];
      for (std::size_t i = 0; i < sub.size(); ++i) {
        ok &= seen.insert(sub.encoding(i)).second;
        ok &= cloud.contains(sub.encoding(i));
        ok &= assign(sub.point(i), m, rule) == b;
      }
      covered += sub.size();
    }
    ok &= covered == cloud.size();
    ok &= changed_buckets(part, partition(cloud, m, rule)) == 0;

    Point fresh({2.0 + rng.uniform01(), 0.0, 0.0});
    ok &= changed_buckets(part, partition(cloud.with(fresh), m, rule)) == 1;
    const std::vector<std::size_t> victim{rng.below(cloud.size())};
    ok &= changed_buckets(part, partition(cloud.without(victim), m, rule)) == 1;
    ok &= changed_buckets(part, partition(cloud.without(victim).with(fresh), m, rule)) <= 2;
    failures += ok ? 0 : 1;
  }
  return {failures == 0, fmt("1000 clouds, %zu failures", failures)};
}

Outcome hash_balance() {
  Rng rng(400);
  const auto cloud = uniform_cloud(rng, 10'000);
  const auto md5 = balance_stats(partition(cloud, 400, HashRule::md5()));
  const auto mean = balance_stats(partition(cloud, 400, HashRule::mean_digits()));
  return {md5.min >= 5 && md5.max <= 60 && mean.stddev > md5.stddev,
          fmt("md5 min=%zu max=%zu sd=%.3f; mean-digits sd=%.3f", md5.min, md5.max,
              md5.stddev, mean.stddev)};
}

// Fewest single-bucket label changes that make some other label win.
std::int64_t min_flip(const std::vector<std::int64_t>& counts, int y) {
  std::map<std::vector<std::int64_t>, int> dist{{counts, 0}};
  std::vector<std::vector<std::int64_t>> frontier{counts};
  const int c = static_cast<int>(counts.size());
  auto winner = [c](const std::vector<std::int64_t>& v) {
    int best = 0;
    for (int l = 1; l < c; ++l) {
      if (v[l] > v[best]) best = l;
    }
    return best;
  };
  for (int k = 1;; ++k) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& v : frontier) {
      // A change moves one bucket between labels, or empties / fills it.
      for (int from = -1; from < c; ++from) {
        for (int to = -1; to < c; ++to) {
          if (from == to || (from >= 0 && v[from] == 0)) continue;
          auto w = v;
          if (from >= 0) --w[from];
          if (to >= 0) ++w[to];
          if (dist.count(w)) continue;
          dist[w] = k;
          bool any = false;
          for (auto x : w) any |= x > 0;
          if (!any || winner(w) != y) return k;
          next.push_back(std::move(w));
        }
      }
    }
    frontier = std::move(next);
  }
}

Outcome certificate_arithmetic() {
  std::size_t cases = 0, mismatches = 0;
  for (int c = 1; c <= 4; ++c) {
    std::vector<std::int64_t> counts(c, 0);
    for (;;) {
      LabelFrequencies f;
      f.counts = counts;
      std::int64_t total = 0;
      for (auto x : counts) total += x;
      f.m = static_cast<std::size_t>(total);
      ++cases;
      if (total == 0) {
        bool threw = false;
        try {
          vote(f);
        } catch (const NoEvidenceError&) {
          threw = true;
        }
        mismatches += threw ? 0 : 1;
      } else {
        int y = 0;
        for (int l = 1; l < c; ++l) {
          if (counts[l] > counts[y]) y = l;
        }
        std::int64_t rival = std::numeric_limits<std::int64_t>::min();
        for (int l = 0; l < c; ++l) {
          if (l != y) rival = std::max(rival, counts[l] + (y > l ? 1 : 0));
        }
        const std::int64_t gap = c == 1 ? counts[0] : counts[y] - rival;
        const auto cert = certify(f);
        bool ok = cert.label.value == y + 1 && cert.gap == gap;
        const std::int64_t kmin = min_flip(counts, y);
        for (auto type : kAllAttackTypes) {
          const std::int64_t tau = impact_factor(type);
          const std::int64_t t = cert.size(type);
          ok &= t == gap / (2 * tau);
          // Sound: t perturbed points change at most tau * t buckets.
          ok &= tau * t < kmin;
          // Tight at the vote level when more than one class exists.
          if (c > 1) ok &= tau * (t + 1) >= kmin;
        }
        mismatches += ok ? 0 : 1;
      }
      int i = 0;
      while (i < c && counts[i] == 6) counts[i++] = 0;
      if (i == c) break;
      ++counts[i];
    }
  }
  return {mismatches == 0, fmt("%zu count vectors, %zu mismatches", cases, mismatches)};
}

Outcome empirical_above_certified() {
  const auto spec = standard_spec();
  const auto train = synthetic_clouds(spec, "train");
  const auto test = first(synthetic_clouds(spec, "test"), 200);
  const std::size_t m = 32;
  const EnsembleSpec ens{m, HashRule::md5(),
                         fit_centroid(train, 3, FitMode::sub_clouds(m, HashRule::md5()))};
  const std::size_t tmax = 10;
  std::size_t violations = 0, order_failures = 0, successes = 0;
  std::string worst;
  for (auto type : kAllAttackTypes) {
    std::vector<std::int64_t> size(test.size());
    std::vector<char> correct(test.size()), survived(test.size() * (tmax + 1));
    std::vector<char> bad(test.size(), 0);
    parallel_for(test.size(), 1, [&](std::size_t i) {
      const auto cert = predict_and_certify(test[i].cloud, ens);
      size[i] = cert.size(type);
      correct[i] = cert.label == test[i].label;
      for (std::size_t t = 0; t <= tmax; ++t) {
        const AttackBudget budget{type, t, 64, attack_seed(3, i)};
        const auto r = run_attack(test[i].cloud, ens, budget, test[i].label);
        survived[i * (tmax + 1) + t] = !r.success;
        if (correct[i] && static_cast<std::int64_t>(t) <= size[i] && r.success) bad[i] = 1;
      }
    });
    violations += static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
    for (std::size_t t = 0; t <= tmax; ++t) {
      std::size_t cert_ok = 0, emp_ok = 0;
      for (std::size_t i = 0; i < test.size(); ++i) {
        cert_ok += correct[i] && size[i] >= static_cast<std::int64_t>(t);
        emp_ok += survived[i * (tmax + 1) + t];
        successes += !survived[i * (tmax + 1) + t];
      }
      if (emp_ok < cert_ok) ++order_failures;
      if (t == tmax) {
        worst += fmt("%s@%zu cert=%.3f emp=%.3f; ", std::string(to_string(type)).c_str(), t,
                     cert_ok / 200.0, emp_ok / 200.0);
      }
    }
  }
  return {violations == 0 && order_failures == 0,
          worst + fmt("%zu order failures, %zu attacks inside certificate succeeded",
                      order_failures, violations)};
}

double accuracy_at_zero(const EvalConfig& cfg, const std::vector<LabeledCloud>& train,
                        const std::vector<LabeledCloud>& test) {
  auto c = cfg;
  c.t_grid = {0};
  return evaluate(c, train, test, 3).rows[0].certified_accuracy;
}

Outcome scenario_ordering() {
  const auto spec = standard_spec();
  const auto train = synthetic_clouds(spec, "train");
  const auto test = first(synthetic_clouds(spec, "test"), 200);
  EvalConfig cfg;
  cfg.m = 32;
  cfg.scenario = Scenario::Direct;
  const double s1 = accuracy_at_zero(cfg, train, test);
  cfg.scenario = Scenario::SubTrained;
  const double s2 = accuracy_at_zero(cfg, train, test);
  cfg.scenario = Scenario::Completed;
  const double s3 = accuracy_at_zero(cfg, train, test);
  return {s2 >= s3 && s3 >= s1, fmt("II=%.3f III=%.3f I=%.3f", s2, s3, s1)};
}

Outcome m_tradeoff() {
  const auto spec = standard_spec();
  const auto train = synthetic_clouds(spec, "train");
  const auto test = first(synthetic_clouds(spec, "test"), 200);
  std::vector<double> acc0;
  std::vector<std::size_t> reach;
  std::string detail;
  for (std::size_t m : {8, 32, 128}) {
    EvalConfig cfg;
    cfg.m = m;
    cfg.t_grid.resize(m + 1);
    for (std::size_t t = 0; t <= m; ++t) cfg.t_grid[t] = t;
    const auto curve = evaluate(cfg, train, test, 3);
    std::size_t last = 0;
    for (const auto& r : curve.rows) {
      if (r.certified_accuracy > 0) last = r.t;
    }
    acc0.push_back(curve.rows[0].certified_accuracy);
    reach.push_back(last);
    detail += fmt("m=%zu acc0=%.3f tmax=%zu; ", m, acc0.back(), last);
  }
  bool ok = true;
  for (std::size_t i = 1; i < acc0.size(); ++i) {
    ok &= acc0[i] <= acc0[i - 1] + 0.02;
    ok &= reach[i] >= reach[i - 1];
  }
  return {ok, detail};
}

double brute_chamfer(const PointCloud& a, const PointCloud& b) {
  auto directed = [](const PointCloud& x, const PointCloud& y) {
    long double sum = 0;
    for (const auto& p : x.points()) {
      long double best = std::numeric_limits<long double>::infinity();
      for (const auto& q : y.points()) {
        long double sq = 0;
        for (std::size_t j = 0; j < p.dim(); ++j) {
          const long double d = static_cast<long double>(p[j]) - q[j];
          sq += d * d;
        }
        best = std::min(best, std::sqrt(sq));
      }
      sum += best;
    }
    return sum / x.size();
  };
  return static_cast<double>(directed(a, b) + directed(b, a));
}

Outcome chamfer_checks() {
  Rng rng(64);
  double worst = 0;
  bool ok = true;
  for (int i = 0; i < 100; ++i) {
    const auto a = uniform_cloud(rng, 1 + rng.below(64));
    const auto b = uniform_cloud(rng, 1 + rng.below(64));
    const double got = chamfer(a, b);
    const double want = brute_chamfer(a, b);
    worst = std::max(worst, std::abs(got - want) / want);
    ok &= got == chamfer(b, a);
    ok &= chamfer(a, a) == 0.0;
  }
  ok &= worst <= 1e-9;

  std::vector<CompletionPair> pairs;
  std::vector<LabeledCloud> labeled;
  for (int i = 0; i < 8; ++i) {
    const auto src = uniform_cloud(rng, 32);
    const std::vector<std::size_t> idx{0, 1, 2, 3, 4};
    pairs.push_back({src.subset(idx), src});
    labeled.push_back({src.subset(idx), Label(1 + i % 3)});
  }
  const CentroidUpsample up(3);
  const ConstantClassifier f(3, Label(1));
  const double l0 = combined_loss(pairs, labeled, up, f, 0.0);
  const double l1 = combined_loss(pairs, labeled, up, f, 0.5);
  const double l2 = combined_loss(pairs, labeled, up, f, 1.0);
  const double l3 = combined_loss(pairs, labeled, up, f, 1.5);
  const double collinear = std::abs((l2 - l1) - (l3 - l2));
  ok &= collinear <= 1e-12;
  ok &= l0 == reconstruction_loss(pairs, up);
  return {ok, fmt("max relative error %.2e, collinearity residual %.2e", worst, collinear)};
}

Outcome rs_conversion() {
  bool ok = rs_to_perturbation_size({1.3, 1.3}) == 1 &&
            rs_to_perturbation_size({0.5, 2 * std::sqrt(3.0)}) == 0;
  Rng rng(15);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double g = rng.uniform(0, 50), e = rng.uniform(0.01, 10);
    const auto k = static_cast<double>(rs_to_perturbation_size({g, e}));
    bad += (k * e * e <= g * g && g * g < (k + 1) * e * e) ? 0 : 1;
  }
  return {ok && bad == 0, fmt("examples %s, %zu bracket failures in 1000", ok ? "ok" : "wrong", bad)};
}

fs::path make_dataset(const fs::path& dir) {
  auto spec = standard_spec();
  gen_synthetic(spec, dir);
  // Trim the test split to 200 clouds.
  auto manifest = load_manifest(dir / "manifest.json");
  std::size_t tests = 0;
  std::erase_if(manifest.entries, [&](const ManifestEntry& e) {
    return e.split == "test" && ++tests > 200;
  });
  save_manifest(manifest, dir / "manifest.json");
  return dir / "manifest.json";
}

Outcome determinism(const fs::path& manifest_path) {
  EvalConfig cfg;
  cfg.m = 32;
  cfg.run_attacks = true;
  cfg.candidate_pool = 16;
  cfg.t_grid = {0, 1, 2, 4, 8, 16};
  std::string csv[2], json[2];
  for (int run = 0; run < 2; ++run) {
    const auto curve = evaluate(cfg, load_manifest(manifest_path));
    csv[run] = format_results(curve, ResultFormat::Csv);
    json[run] = format_results(curve, ResultFormat::Json);
  }
  return {csv[0] == csv[1] && json[0] == json[1],
          fmt("csv %zu bytes, json %zu bytes", csv[0].size(), json[0].size())};
}

Outcome performance(const fs::path& manifest_path) {
  EvalConfig cfg;
  cfg.m = 32;
  cfg.t_grid = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto start = std::chrono::steady_clock::now();
  const auto single = evaluate(cfg, load_manifest(manifest_path));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  cfg.threads = 4;
  const auto parallel = evaluate(cfg, load_manifest(manifest_path));
  const bool same = format_results(single, ResultFormat::Json) ==
                    format_results(parallel, ResultFormat::Json);
  return {secs < 10.0 && same,
          fmt("single-threaded %.2f s, parallel output %s", secs, same ? "identical" : "differs")};
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "pointcert_acceptance";
  fs::remove_all(scratch);
  fs::path manifest;

  const std::vector<Criterion> criteria = {
      {"soundness oracle", 120, soundness},
      {"tightness witnesses", 60, tightness},
      {"partition laws", 30, partition_laws},
      {"hash balance", 5, hash_balance},
      {"certificate arithmetic", 60, certificate_arithmetic},
      {"empirical >= certified", 300, empirical_above_certified},
      {"scenario ordering", 120, scenario_ordering},
      {"m tradeoff", 120, m_tradeoff},
      {"chamfer and combined loss", 60, chamfer_checks},
      {"rs conversion", 5, rs_conversion},
      {"eval determinism", 120,
       [&] {
         manifest = make_dataset(scratch / "bench");
         return determinism(manifest);
       }},
      {"performance", 60, [&] { return performance(manifest); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_seconds) {
      out.pass = false;
      out.detail += fmt(" (over the %.0f s limit)", c.limit_seconds);
    }
    std::printf("[%s] %-28s %7.2fs  %s\n", out.pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                out.detail.c_str());
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  fs::remove_all(scratch);
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
