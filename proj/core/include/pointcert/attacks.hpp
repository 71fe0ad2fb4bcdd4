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

#pragma once

// Empirical attacks on the ensemble. They only need labels from the base
// classifier, so any Classifier (including external ones) can be attacked.
// Accuracy under these attacks is an upper bound on worst-case accuracy.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pointcert/classifier.hpp"
#include "pointcert/ensemble.hpp"

namespace pointcert {

struct AttackBudget {
  AttackType type = AttackType::Addition;
  std::size_t t = 0;
  /// Random candidates scored per greedy addition step.
  std::size_t candidate_pool_size = 64;
  std::uint64_t seed = 0;
};

struct AttackResult {
  PointCloud adversarial;
  std::size_t achieved_size = 0;
  Label original_label;
  /// nullopt when every bucket of the adversarial cloud is empty.
  std::optional<Label> attacked_label;
  /// attacked_label differs from the reference label (the true label when
  /// one was given, otherwise original_label). No evidence counts as success.
  bool success = false;
};

/// Deletes the t points whose single removal most often flips the label of
/// their own sub-point cloud (ties by canonical encoding).
/// Throws BudgetError when t > |P|.
AttackResult attack_delete(const PointCloud& cloud, const EnsembleSpec& ens,
                           const AttackBudget& budget,
                           std::optional<Label> reference = std::nullopt);

/// Greedy addition: each of t steps draws candidate_pool_size points uniformly
/// from the bounding box of the input and inserts the one that most reduces
/// the voted label's margin (first drawn wins ties).
AttackResult attack_add(const PointCloud& cloud, const EnsembleSpec& ens,
                        const AttackBudget& budget,
                        std::optional<Label> reference = std::nullopt);

/// Deletion attack with budget t followed by addition attack with budget t.
/// Throws BudgetError when t > |P|.
AttackResult attack_modify(const PointCloud& cloud, const EnsembleSpec& ens,
                           const AttackBudget& budget,
                           std::optional<Label> reference = std::nullopt);

/// Dispatches on budget.type.
AttackResult run_attack(const PointCloud& cloud, const EnsembleSpec& ens,
                        const AttackBudget& budget,
                        std::optional<Label> reference = std::nullopt);

/// Per-cloud attack seed derived from a run seed and the cloud's index.
std::uint64_t attack_seed(std::uint64_t seed, std::size_t index);

/// Fraction of clouds still labeled correctly after the attack for each t.
/// Budgets larger than a cloud's size are clamped to its size for deletion
/// and modification. Clouds reduced to no evidence count as misclassified.
std::vector<double> empirical_accuracy(const std::vector<LabeledCloud>& data,
                                       const EnsembleSpec& ens,
                                       AttackType type,
                                       const std::vector<std::size_t>& t_values,
                                       std::size_t candidate_pool_size,
                                       std::uint64_t seed,
                                       std::size_t threads = 1);

}  // namespace pointcert
