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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pointcert/classifier.hpp"
#include "pointcert/partition.hpp"

namespace pointcert {

/// counts[l - 1] = number of non-empty sub-point clouds classified as l.
struct LabelFrequencies {
  std::vector<std::int64_t> counts;
  std::size_t m = 0;

  std::size_t classes() const { return counts.size(); }
  std::int64_t total() const;
  std::int64_t operator[](Label l) const { return counts[l.value - 1]; }

  bool operator==(const LabelFrequencies&) const = default;
};

/// Label value of each bucket; 0 for an empty bucket.
std::vector<int> subcloud_labels(const Partition& part, const Classifier& f);

/// Empty sub-point clouds contribute to no label.
LabelFrequencies label_frequencies(const Partition& part, const Classifier& f);

/// Builds frequencies from per-bucket labels where 0 marks an empty bucket.
LabelFrequencies frequencies_from_labels(const std::vector<int>& labels,
                                         std::size_t classes);

/// Largest frequency, ties resolved to the smallest label. Throws
/// NoEvidenceError when every count is zero.
Label vote(const LabelFrequencies& freq);

/// M_y - max_{l != y}(M_l + [y > l]) for the voted label y; never negative.
/// M_y - max over l != y of (M_l + [y > l]); M_y when there is no other label.
std::int64_t vote_gap(const LabelFrequencies& freq, Label y);

/// The runner-up label l' = argmax_{l != y}(M_l + [y > l]), smallest on ties.
/// The l != y maximizing M_l + [y > l], smallest on ties. Throws ConfigError
/// with fewer than two labels.
Label runner_up(const LabelFrequencies& freq, Label y);

struct Certificate {
  Label label;
  LabelFrequencies frequencies;
  std::int64_t gap = 0;
  /// Indexed by AttackType: floor(gap / (2 * impact_factor)).
  std::array<std::int64_t, 4> certified{};

  std::int64_t size(AttackType type) const {
    return certified[static_cast<std::size_t>(type)];
  }
};

/// floor(gap / (2 * impact_factor(type))).
std::int64_t certified_size(std::int64_t gap, AttackType type);

Certificate certify(const LabelFrequencies& freq);

/// Partition, classify every non-empty sub-point cloud, vote and certify.
Certificate predict_and_certify(const PointCloud& cloud, std::size_t m,
                                const HashRule& rule, const Classifier& f);

/// The ensemble h: m buckets, a hash rule and a base classifier.
struct EnsembleSpec {
  std::size_t m = 1;
  HashRule rule = HashRule::md5();
  ClassifierHandle f;

  const Classifier& classifier() const { return *f; }
};

inline Certificate predict_and_certify(const PointCloud& cloud,
                                       const EnsembleSpec& ens) {
  return predict_and_certify(cloud, ens.m, ens.rule, ens.classifier());
}

/// Ensemble label only.
Label ensemble_predict(const PointCloud& cloud, std::size_t m,
                       const HashRule& rule, const Classifier& f);

}  // namespace pointcert
