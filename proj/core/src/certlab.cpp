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

#include "pointcert/certlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pointcert/errors.hpp"
#include "pointcert/parallel.hpp"

namespace pointcert {

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// fn(indices) for every k-subset of [0, n), lexicographic order.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(std::span<const std::size_t>(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::optional<Label> ensemble_outcome(const PointCloud& cloud,
                                      std::size_t m, const HashRule& rule,
                                      const Classifier& f) {
  if (cloud.empty()) return std::nullopt;
  const auto freq = label_frequencies(partition(cloud, m, rule), f);
  if (freq.total() == 0) return std::nullopt;
  return vote(freq);
}

Point random_point(Rng& rng, std::size_t dim, double lo, double hi) {
  std::vector<double> coords(dim);
  // Three decimals keep the universe readable in failure reports.
  for (auto& v : coords) v = std::round(rng.uniform(lo, hi) * 1000.0) / 1000.0;
  return Point(std::move(coords));
}

}  // namespace

std::shared_ptr<LookupClassifier> closed_world_classifier(
    const std::vector<Point>& universe, std::size_t m, const HashRule& rule,
    std::size_t classes, std::uint64_t seed, double favored_probability) {
  Rng rng(seed);
  const int favored = 1 + static_cast<int>(rng.below(classes));
  auto f = std::make_shared<LookupClassifier>(classes, Label(favored));

  std::vector<std::vector<std::size_t>> members(m);
  for (std::size_t i = 0; i < universe.size(); ++i) {
    members[assign(universe[i], m, rule)].push_back(i);
  }
  for (const auto& idx : members) {
    const std::size_t k = idx.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      std::vector<Point> pts;
      for (std::size_t b = 0; b < k; ++b) {
        if (mask & (std::uint64_t{1} << b)) pts.push_back(universe[idx[b]]);
      }
      const int label = rng.uniform01() < favored_probability
                            ? favored
                            : 1 + static_cast<int>(rng.below(classes));
      f->set(PointCloud(std::move(pts)), Label(label));
    }
  }
  return f;
}

SmallInstance make_small_instance(std::uint64_t seed,
                                  const SmallInstanceOptions& options) {
  Rng rng(seed);
  SmallInstance inst;
  const std::size_t span = options.max_universe - options.min_universe + 1;
  const std::size_t u = options.min_universe + rng.below(span);

  PointCloud seen;
  while (inst.universe.size() < u) {
    auto p = random_point(rng, 3, -1.0, 1.0);
    if (seen.contains(p)) continue;
    seen = seen.with(p);
    inst.universe.push_back(std::move(p));
  }
  inst.m = 1 + rng.below(options.max_m);
  const std::size_t classes = 2 + rng.below(options.max_classes - 1);
  inst.rule = HashRule::md5();

  const std::size_t outside = std::min<std::size_t>(2 + rng.below(4), u - 1);
  std::vector<std::size_t> order(u);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = u; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<Point> inside;
  for (std::size_t i = outside; i < u; ++i) inside.push_back(inst.universe[order[i]]);
  inst.cloud = PointCloud(std::move(inside));
  inst.f = closed_world_classifier(inst.universe, inst.m, inst.rule, classes,
                                   rng.next_u64(), options.favored_probability);
  return inst;
}

OracleReport oracle_check(const SmallInstance& inst, AttackType type,
                          std::size_t tmax) {
  if (tmax > 3) throw ConfigError("oracle budget is limited to 3");
  if (!inst.f) throw ConfigError("instance has no classifier");
  const auto& f = *inst.f;
  const auto cert = predict_and_certify(inst.cloud, inst.m, inst.rule, f);

  OracleReport report;
  report.label = cert.label;
  report.certified = cert.size(type);
  report.budget = std::min<std::size_t>(
      tmax, static_cast<std::size_t>(std::max<std::int64_t>(0, report.certified)));
  const std::size_t b = report.budget;

  std::vector<Point> outside;
  for (const auto& p : inst.universe) {
    if (!inst.cloud.contains(p)) outside.push_back(p);
  }
  const std::size_t n_in = inst.cloud.size();
  const std::size_t n_out = outside.size();

  const bool adds = type != AttackType::Deletion;
  const bool dels = type != AttackType::Addition;
  const bool equal_sizes = type == AttackType::Modification;

  std::uint64_t states = 0;
  for (std::size_t d = 0; d <= (dels ? b : 0); ++d) {
    for (std::size_t a = 0; a <= (adds ? b : 0); ++a) {
      if (equal_sizes && a != d) continue;
      states += binomial(n_in, d) * binomial(n_out, a);
    }
  }
  if (states > kMaxOracleStates) {
    throw ScaleError("oracle would enumerate " + std::to_string(states) +
                     " perturbed clouds");
  }

  for (std::size_t d = 0; d <= (dels ? b : 0); ++d) {
    for (std::size_t a = 0; a <= (adds ? b : 0); ++a) {
      if (equal_sizes && a != d) continue;
      for_each_combination(n_in, d, [&](std::span<const std::size_t> del) {
        const PointCloud kept = inst.cloud.without(del);
        for_each_combination(n_out, a, [&](std::span<const std::size_t> add) {
          std::vector<Point> extra;
          for (auto i : add) extra.push_back(outside[i]);
          const PointCloud attacked = kept.with(PointCloud(std::move(extra)));
          ++report.attacks_enumerated;
          const auto label = ensemble_outcome(attacked, inst.m, inst.rule, f);
          if (!label || *label != cert.label) ++report.violations;
        });
      });
    }
  }
  return report;
}

Point find_point_in_bucket(std::size_t bucket, std::size_t m,
                           const HashRule& rule, const PointCloud& avoid,
                           std::size_t dim, double lo, double hi, Rng& rng) {
  for (std::size_t attempt = 0; attempt < kMaxBucketSearch; ++attempt) {
    std::vector<double> coords(dim);
    for (auto& v : coords) v = rng.uniform(lo, hi);
    Point q(std::move(coords));
    const auto enc = canonical_encode(q);
    if (avoid.contains(enc)) continue;
    if (rule.bucket(q, enc, m) == bucket) return q;
  }
  throw ConstructionError("no fresh point found for bucket " +
                          std::to_string(bucket) + " after " +
                          std::to_string(kMaxBucketSearch) + " candidates");
}

TightnessWitness construct_tightness_witness(const PointCloud& cloud,
                                             std::size_t m,
                                             const HashRule& rule,
                                             const LabelFrequencies& freq,
                                             AttackType type,
                                             std::uint64_t seed) {
  const auto part = partition(cloud, m, rule);
  std::vector<std::size_t> nonempty;
  for (std::size_t b = 0; b < m; ++b) {
    if (!part.subclouds[b].empty()) nonempty.push_back(b);
  }
  if (freq.classes() < 2) throw ConstructionError("need at least 2 classes");
  if (freq.total() != static_cast<std::int64_t>(nonempty.size())) {
    throw ConstructionError("frequencies sum to " +
                            std::to_string(freq.total()) + " but P has " +
                            std::to_string(nonempty.size()) +
                            " non-empty buckets");
  }

  TightnessWitness w;
  w.type = type;
  w.frequencies = freq;
  w.original_label = vote(freq);
  const Label y = w.original_label;
  const Label target = runner_up(freq, y);
  w.certified = certified_size(vote_gap(freq, y), type);
  const std::size_t k = static_cast<std::size_t>(w.certified) + 1;

  // Largest buckets carry label y so deletions leave them non-empty.
  std::vector<std::size_t> by_size = nonempty;
  std::stable_sort(by_size.begin(), by_size.end(), [&](auto a, auto b) {
    return part.subclouds[a].size() > part.subclouds[b].size();
  });
  const auto my = static_cast<std::size_t>(freq[y]);
  std::vector<std::size_t> y_buckets(by_size.begin(), by_size.begin() + my);
  std::vector<int> labels(m, 0);
  for (auto b : y_buckets) labels[b] = y.value;
  {
    std::vector<std::size_t> rest(by_size.begin() + my, by_size.end());
    std::sort(rest.begin(), rest.end());
    std::size_t pos = 0;
    for (std::size_t l = 1; l <= freq.classes(); ++l) {
      if (static_cast<int>(l) == y.value) continue;
      for (std::int64_t c = 0; c < freq.counts[l - 1]; ++c) {
        labels[rest[pos++]] = static_cast<int>(l);
      }
    }
  }

  std::vector<std::size_t> delete_from;
  std::vector<std::size_t> add_to;
  if (type == AttackType::Addition || type == AttackType::Deletion) {
    if (k > y_buckets.size()) {
      throw ConstructionError("not enough y-labeled buckets");
    }
    auto& list = type == AttackType::Addition ? add_to : delete_from;
    list.assign(y_buckets.begin(), y_buckets.begin() + k);
  } else {
    // k modifications: distinct delete/add buckets while there are enough
    // y-buckets, otherwise delete and re-add inside the same bucket.
    if (k > y_buckets.size()) {
      throw ConstructionError("not enough y-labeled buckets");
    }
    const std::size_t pairs = std::min(k, y_buckets.size() - k);
    for (std::size_t j = 0; j < pairs; ++j) {
      delete_from.push_back(y_buckets[j]);
      add_to.push_back(y_buckets[pairs + j]);
    }
    for (std::size_t j = 0; j < k - pairs; ++j) {
      delete_from.push_back(y_buckets[2 * pairs + j]);
      add_to.push_back(y_buckets[2 * pairs + j]);
    }
  }

  std::vector<std::size_t> drop;
  for (auto b : delete_from) {
    const auto& sub = part.subclouds[b];
    const bool refilled =
        std::find(add_to.begin(), add_to.end(), b) != add_to.end();
    if (sub.size() < 2 && !refilled) {
      throw ConstructionError("bucket " + std::to_string(b) +
                              " holds a single point; deleting it would empty it");
    }
    // First point of the bucket in encoding order.
    const auto& first = sub.encoding(sub.sorted_order().front());
    drop.push_back(*cloud.find(first));
  }

  PointCloud pprime = cloud.without(drop);
  Rng rng(seed);
  const std::size_t dim = cloud.empty() ? 3 : cloud.dim();
  for (auto b : add_to) {
    pprime = pprime.with(
        find_point_in_bucket(b, m, rule, cloud.with(pprime), dim, -1.0, 1.0, rng));
  }

  auto fprime = std::make_shared<LookupClassifier>(freq.classes(), y);
  for (auto b : nonempty) fprime->set(part.subclouds[b], Label(labels[b]));
  const auto part_prime = partition(pprime, m, rule);
  for (std::size_t b = 0; b < m; ++b) {
    const auto& sub = part_prime.subclouds[b];
    if (!sub.empty() && !(sub == part.subclouds[b])) fprime->set(sub, target);
  }

  w.fprime = std::move(fprime);
  w.pprime = std::move(pprime);
  const auto flipped = ensemble_outcome(w.pprime, m, rule, *w.fprime);
  if (!flipped || *flipped == y) {
    throw ConstructionError("construction did not flip the ensemble");
  }
  w.flipped_label = *flipped;
  return w;
}

bool verify_witness(const TightnessWitness& w, const PointCloud& cloud,
                    std::size_t m, const HashRule& rule) {
  if (!w.fprime || cloud.empty()) return false;
  const auto& f = *w.fprime;
  const auto freq = label_frequencies(partition(cloud, m, rule), f);
  if (!(freq == w.frequencies) || freq.total() == 0) return false;
  const auto cert = certify(freq);
  if (cert.label != w.original_label || cert.size(w.type) != w.certified) {
    return false;
  }

  const std::size_t d = perturbation_size(cloud, w.pprime);
  if (static_cast<std::int64_t>(d) != cert.size(w.type) + 1) return false;
  switch (w.type) {
    case AttackType::Addition:
      if (w.pprime.size() != cloud.size() + d) return false;
      break;
    case AttackType::Deletion:
      if (w.pprime.size() + d != cloud.size()) return false;
      break;
    case AttackType::Modification:
      if (w.pprime.size() != cloud.size()) return false;
      break;
    case AttackType::Perturbation:
      break;
  }

  if (w.pprime.empty()) return false;
  const auto freq_prime = label_frequencies(partition(w.pprime, m, rule), f);
  if (freq_prime.total() == 0) return false;
  const Label flipped = vote(freq_prime);
  if (flipped != w.flipped_label || flipped == cert.label) return false;

  const Label y = cert.label;
  const std::int64_t lhs =
      freq_prime[flipped] + (y.value > flipped.value ? 1 : 0);
  return lhs > freq_prime[y];
}

LabReport run_oracle_batch(std::size_t instances, std::uint64_t seed,
                           std::size_t tmax, std::size_t threads) {
  std::vector<OracleReport> reports(instances * kAllAttackTypes.size());
  parallel_for(instances, threads, [&](std::size_t i) {
    const auto inst = make_small_instance(seed + i);
    for (std::size_t t = 0; t < kAllAttackTypes.size(); ++t) {
      reports[i * kAllAttackTypes.size() + t] =
          oracle_check(inst, kAllAttackTypes[t], tmax);
    }
  });
  LabReport out;
  out.instances = instances;
  for (const auto& r : reports) {
    out.attacks_enumerated += r.attacks_enumerated;
    ++out.budgets[std::min<std::size_t>(r.budget, 3)];
    out.violations += r.violations;
  }
  return out;
}

namespace {

struct TightnessCase {
  PointCloud cloud;
  std::size_t m = 1;
  LabelFrequencies freq;
};

TightnessCase make_tightness_case(std::uint64_t seed) {
  Rng rng(seed);
  TightnessCase tc;
  tc.m = 1 + rng.below(40);
  const std::size_t n = tc.m * (4 + rng.below(6)) + rng.below(8);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(random_point(rng, 3, -1.0, 1.0));
  tc.cloud = PointCloud(std::move(pts));

  const auto part = partition(tc.cloud, tc.m, HashRule::md5());
  const std::size_t nonempty = part.nonempty_count();
  const std::size_t classes = 2 + rng.below(4);
  const std::size_t favored = rng.below(classes);
  tc.freq.counts.assign(classes, 0);
  tc.freq.m = tc.m;
  for (std::size_t i = 0; i < nonempty; ++i) {
    const std::size_t l = rng.uniform01() < 0.6 ? favored : rng.below(classes);
    ++tc.freq.counts[l];
  }
  return tc;
}

}  // namespace

LabReport run_tightness_batch(std::size_t instances, std::uint64_t seed,
                              std::size_t threads) {
  const std::size_t total = instances * kAllAttackTypes.size();
  std::vector<char> built(total, 0), verified(total, 0);
  parallel_for(total, threads, [&](std::size_t i) {
    const auto type = kAllAttackTypes[i % kAllAttackTypes.size()];
    const auto tc = make_tightness_case(seed + i / kAllAttackTypes.size());
    const auto w = construct_tightness_witness(tc.cloud, tc.m, HashRule::md5(),
                                               tc.freq, type, seed ^ i);
    built[i] = 1;
    verified[i] = verify_witness(w, tc.cloud, tc.m, HashRule::md5()) ? 1 : 0;
  });
  LabReport out;
  out.instances = total;
  out.witnesses_constructed =
      static_cast<std::size_t>(std::count(built.begin(), built.end(), 1));
  out.witnesses_verified =
      static_cast<std::size_t>(std::count(verified.begin(), verified.end(), 1));
  return out;
}

}  // namespace pointcert
