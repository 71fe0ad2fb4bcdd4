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

#include "pointcert/attacks.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pointcert/errors.hpp"
#include "pointcert/parallel.hpp"
#include "pointcert/rng.hpp"

namespace pointcert {

namespace {

struct Box {
  std::vector<double> lo, hi;
};

Box bounding_box(const PointCloud& cloud) {
  Box box;
  if (cloud.empty()) return box;
  box.lo.assign(cloud.dim(), std::numeric_limits<double>::infinity());
  box.hi.assign(cloud.dim(), -std::numeric_limits<double>::infinity());
  for (const auto& p : cloud.points()) {
    for (std::size_t j = 0; j < p.dim(); ++j) {
      box.lo[j] = std::min(box.lo[j], p[j]);
      box.hi[j] = std::max(box.hi[j], p[j]);
    }
  }
  return box;
}

std::optional<Label> outcome(const PointCloud& cloud, const EnsembleSpec& ens) {
  if (cloud.empty()) return std::nullopt;
  const auto freq =
      label_frequencies(partition(cloud, ens.m, ens.rule), ens.classifier());
  if (freq.total() == 0) return std::nullopt;
  return vote(freq);
}

AttackResult finish(const PointCloud& original, PointCloud adversarial,
                    const EnsembleSpec& ens, Label original_label,
                    std::optional<Label> reference, std::size_t budget) {
  AttackResult r;
  r.achieved_size = perturbation_size(original, adversarial);
  if (r.achieved_size > budget) {
    throw std::logic_error("attack exceeded its perturbation budget");
  }
  r.original_label = original_label;
  r.attacked_label = outcome(adversarial, ens);
  r.adversarial = std::move(adversarial);
  const Label ref = reference.value_or(original_label);
  r.success = !r.attacked_label || *r.attacked_label != ref;
  return r;
}

std::vector<std::size_t> deletion_choice(const PointCloud& cloud,
                                         const EnsembleSpec& ens,
                                         std::size_t t) {
  const auto& f = ens.classifier();
  const auto buckets = bucket_indices(cloud, ens.m, ens.rule);
  std::vector<std::vector<std::size_t>> members(ens.m);
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    members[buckets[i]].push_back(i);
  }

  // Buckets are disjoint, so each point is scored once.
  std::vector<int> critical(cloud.size(), 0);
  std::vector<std::size_t> rest;
  for (const auto& idx : members) {
    if (idx.empty()) continue;
    const Label label = f.classify(cloud.subset(idx));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx.size() == 1) {
        critical[idx[k]] = 1;  // removing it empties the bucket
        continue;
      }
      rest.clear();
      for (std::size_t q = 0; q < idx.size(); ++q) {
        if (q != k) rest.push_back(idx[q]);
      }
      if (f.classify(cloud.subset(rest)) != label) critical[idx[k]] = 1;
    }
  }

  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (critical[a] != critical[b]) return critical[a] > critical[b];
    return cloud.encoding(a) < cloud.encoding(b);
  });
  order.resize(t);
  return order;
}

PointCloud greedy_add(PointCloud current, const EnsembleSpec& ens,
                      const Box& box, Label target, std::size_t t,
                      std::size_t pool, std::uint64_t seed) {
  if (t == 0 || box.lo.empty()) return current;
  const auto& f = ens.classifier();
  Partition part = partition(current, ens.m, ens.rule);
  std::vector<int> labels = subcloud_labels(part, f);
  Rng rng(seed);

  for (std::size_t step = 0; step < t; ++step) {
    const auto freq = frequencies_from_labels(labels, f.classes());
    std::int64_t best_score = std::numeric_limits<std::int64_t>::min();
    std::optional<Point> best_point;
    std::size_t best_bucket = 0;
    int best_label = 0;

    for (std::size_t k = 0; k < pool; ++k) {
      std::vector<double> coords(box.lo.size());
      for (std::size_t j = 0; j < coords.size(); ++j) {
        coords[j] = rng.uniform(box.lo[j], box.hi[j]);
      }
      Point q(std::move(coords));
      const auto enc = canonical_encode(q);
      if (current.contains(enc)) continue;
      const std::size_t b = ens.rule.bucket(q, enc, ens.m);
      const int new_label = f.classify(part.subclouds[b].with(q)).value;

      auto trial = freq;
      if (labels[b] != 0) --trial.counts[static_cast<std::size_t>(labels[b] - 1)];
      ++trial.counts[static_cast<std::size_t>(new_label - 1)];
      const std::int64_t score = -vote_gap(trial, target);
      if (score > best_score) {
        best_score = score;
        best_point = std::move(q);
        best_bucket = b;
        best_label = new_label;
      }
    }
    if (!best_point) continue;
    current = current.with(*best_point);
    part.subclouds[best_bucket] = part.subclouds[best_bucket].with(*best_point);
    labels[best_bucket] = best_label;
  }
  return current;
}

void require_type(const AttackBudget& budget,
                  std::initializer_list<AttackType> allowed, const char* name) {
  if (std::find(allowed.begin(), allowed.end(), budget.type) == allowed.end()) {
    throw ConfigError(std::string(name) + " does not run " +
                      std::string(to_string(budget.type)) + " budgets");
  }
}

void require_classifier(const EnsembleSpec& ens) {
  if (!ens.f) throw ConfigError("ensemble has no base classifier");
}

}  // namespace

AttackResult attack_delete(const PointCloud& cloud, const EnsembleSpec& ens,
                           const AttackBudget& budget,
                           std::optional<Label> reference) {
  require_type(budget, {AttackType::Deletion}, "attack_delete");
  require_classifier(ens);
  if (budget.t > cloud.size()) {
    throw BudgetError("cannot delete " + std::to_string(budget.t) +
                      " points from a cloud of " +
                      std::to_string(cloud.size()));
  }
  const Label original = ensemble_predict(cloud, ens.m, ens.rule, ens.classifier());
  const auto drop = deletion_choice(cloud, ens, budget.t);
  return finish(cloud, cloud.without(drop), ens, original, reference, budget.t);
}

AttackResult attack_add(const PointCloud& cloud, const EnsembleSpec& ens,
                        const AttackBudget& budget,
                        std::optional<Label> reference) {
  require_type(budget, {AttackType::Addition}, "attack_add");
  require_classifier(ens);
  if (budget.t > 0 && budget.candidate_pool_size == 0) {
    throw ConfigError("candidate_pool_size must be at least 1");
  }
  const Label original = ensemble_predict(cloud, ens.m, ens.rule, ens.classifier());
  const Label target = reference.value_or(original);
  auto adversarial = greedy_add(cloud, ens, bounding_box(cloud), target,
                                budget.t, budget.candidate_pool_size,
                                budget.seed);
  return finish(cloud, std::move(adversarial), ens, original, reference,
                budget.t);
}

AttackResult attack_modify(const PointCloud& cloud, const EnsembleSpec& ens,
                           const AttackBudget& budget,
                           std::optional<Label> reference) {
  require_type(budget, {AttackType::Modification, AttackType::Perturbation},
               "attack_modify");
  require_classifier(ens);
  if (budget.t > cloud.size()) {
    throw BudgetError("cannot modify " + std::to_string(budget.t) +
                      " points of a cloud of " + std::to_string(cloud.size()));
  }
  if (budget.t > 0 && budget.candidate_pool_size == 0) {
    throw ConfigError("candidate_pool_size must be at least 1");
  }
  const Label original = ensemble_predict(cloud, ens.m, ens.rule, ens.classifier());
  const Label target = reference.value_or(original);
  const auto drop = deletion_choice(cloud, ens, budget.t);
  auto adversarial = greedy_add(cloud.without(drop), ens, bounding_box(cloud),
                                target, budget.t, budget.candidate_pool_size,
                                budget.seed);
  return finish(cloud, std::move(adversarial), ens, original, reference,
                budget.t);
}

AttackResult run_attack(const PointCloud& cloud, const EnsembleSpec& ens,
                        const AttackBudget& budget,
                        std::optional<Label> reference) {
  switch (budget.type) {
    case AttackType::Addition:
      return attack_add(cloud, ens, budget, reference);
    case AttackType::Deletion:
      return attack_delete(cloud, ens, budget, reference);
    case AttackType::Modification:
    case AttackType::Perturbation:
      return attack_modify(cloud, ens, budget, reference);
  }
  throw ConfigError("unknown attack type");
}

std::uint64_t attack_seed(std::uint64_t seed, std::size_t index) {
  return derive_seed(seed, index);
}

std::vector<double> empirical_accuracy(const std::vector<LabeledCloud>& data,
                                       const EnsembleSpec& ens,
                                       AttackType type,
                                       const std::vector<std::size_t>& t_values,
                                       std::size_t candidate_pool_size,
                                       std::uint64_t seed,
                                       std::size_t threads) {
  std::vector<double> acc(t_values.size(), 0.0);
  if (data.empty()) return acc;
  // correct[k * n + i]: cloud i survives budget t_values[k].
  const std::size_t n = data.size();
  std::vector<char> correct(t_values.size() * n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& example = data[i];
    for (std::size_t k = 0; k < t_values.size(); ++k) {
      AttackBudget budget{type, t_values[k], candidate_pool_size,
                          attack_seed(seed, i)};
      if (type != AttackType::Addition) {
        budget.t = std::min(budget.t, example.cloud.size());
      }
      try {
        const auto r = run_attack(example.cloud, ens, budget, example.label);
        correct[k * n + i] = r.success ? 0 : 1;
      } catch (const NoEvidenceError&) {
        correct[k * n + i] = 0;
      }
    }
  });
  for (std::size_t k = 0; k < t_values.size(); ++k) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < n; ++i) ok += correct[k * n + i];
    acc[k] = static_cast<double>(ok) / static_cast<double>(n);
  }
  return acc;
}

}  // namespace pointcert
