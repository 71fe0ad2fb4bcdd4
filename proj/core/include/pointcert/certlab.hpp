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

// Executable checks of the certificate: an exhaustive soundness oracle over
// closed-world instances, and the constructive tightness witness showing that
// t(P) + 1 perturbed points can flip the ensemble for some base classifier.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "pointcert/classifier.hpp"
#include "pointcert/ensemble.hpp"
#include "pointcert/rng.hpp"

namespace pointcert {

/// Enumeration bound of oracle_check.
inline constexpr std::uint64_t kMaxOracleStates = 10'000'000;
/// Candidate bound for finding a fresh point in a chosen bucket.
inline constexpr std::size_t kMaxBucketSearch = 1'000'000;

/// A closed world: every attack stays inside `universe`, and `f` has an entry
/// for every non-empty subset of universe points sharing a bucket.
struct SmallInstance {
  std::vector<Point> universe;
  PointCloud cloud;
  std::size_t m = 1;
  HashRule rule = HashRule::md5();
  std::shared_ptr<LookupClassifier> f;

  EnsembleSpec ensemble() const { return {m, rule, f}; }
};

struct SmallInstanceOptions {
  std::size_t min_universe = 8;
  std::size_t max_universe = 16;
  std::size_t max_m = 14;
  std::size_t max_classes = 3;
  /// Probability that a lookup entry gets the instance's favored label; the
  /// rest are uniform. Biasing makes non-zero certificates common.
  double favored_probability = 0.9;
};

/// Seeded random closed-world instance. The cloud holds all but 2..5
/// universe points so additions are always possible.
SmallInstance make_small_instance(std::uint64_t seed,
                                  const SmallInstanceOptions& options = {});

/// Lookup classifier with a seeded label for every non-empty subset of
/// universe points that share a bucket.
std::shared_ptr<LookupClassifier> closed_world_classifier(
    const std::vector<Point>& universe, std::size_t m, const HashRule& rule,
    std::size_t classes, std::uint64_t seed, double favored_probability);

struct OracleReport {
  Label label;
  std::int64_t certified = 0;
  std::size_t budget = 0;
  std::uint64_t attacks_enumerated = 0;
  std::uint64_t violations = 0;
};

/// Enumerates every P' inside the universe with d(P, P') <= min(tmax, t(P))
/// reachable by the attack type (additions from universe \ P, deletions from
/// P, modifications as equal-size swaps, perturbations as any mix) and counts
/// those whose ensemble label differs from h(P).
/// Throws ConfigError when tmax > 3 and ScaleError above kMaxOracleStates.
OracleReport oracle_check(const SmallInstance& inst, AttackType type,
                          std::size_t tmax);

struct TightnessWitness {
  AttackType type = AttackType::Addition;
  Label original_label;
  /// Frequencies fprime produces on P; they equal the requested ones.
  LabelFrequencies frequencies;
  std::int64_t certified = 0;
  std::shared_ptr<LookupClassifier> fprime;
  PointCloud pprime;
  Label flipped_label;
};

/// Builds f' and P' with d(P, P') = t(P) + 1 such that the ensemble under f'
/// predicts y on P and the runner-up label on P'. The first M_y(P) buckets
/// (largest first) are labeled y and the perturbed points all land in them.
///
/// `freq` must sum to the number of non-empty buckets of P. Deletions need
/// their bucket to keep at least one point. Throws ConstructionError when the
/// partition cannot host the construction or the fresh-point search fails.
TightnessWitness construct_tightness_witness(const PointCloud& cloud,
                                             std::size_t m,
                                             const HashRule& rule,
                                             const LabelFrequencies& freq,
                                             AttackType type,
                                             std::uint64_t seed = 0);

/// Re-derives everything from f' alone: frequencies on P, the certificate,
/// d(P, P') = t(P) + 1, the flip, and M_l'(P') + [y > l'] > M_y(P').
bool verify_witness(const TightnessWitness& w, const PointCloud& cloud,
                    std::size_t m, const HashRule& rule);

/// A fresh point (not in `avoid`) that lands in `bucket`, drawn uniformly from
/// the box [lo, hi] in every coordinate. Throws ConstructionError after
/// kMaxBucketSearch candidates.
Point find_point_in_bucket(std::size_t bucket, std::size_t m,
                           const HashRule& rule, const PointCloud& avoid,
                           std::size_t dim, double lo, double hi, Rng& rng);

struct LabReport {
  std::size_t instances = 0;
  std::uint64_t attacks_enumerated = 0;
  /// Oracle checks by enumerated budget min(tmax, t(P)), for budgets 0..3.
  std::array<std::uint64_t, 4> budgets{};
  std::uint64_t violations = 0;
  std::size_t witnesses_constructed = 0;
  std::size_t witnesses_verified = 0;
};

/// oracle_check over `instances` seeded instances and every attack type.
LabReport run_oracle_batch(std::size_t instances, std::uint64_t seed,
                           std::size_t tmax, std::size_t threads = 1);

/// Seeded random clouds and frequencies; `instances` witnesses per attack
/// type, each built and then verified.
LabReport run_tightness_batch(std::size_t instances, std::uint64_t seed,
                              std::size_t threads = 1);

}  // namespace pointcert
