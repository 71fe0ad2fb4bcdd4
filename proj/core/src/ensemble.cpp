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

#include "pointcert/ensemble.hpp"

#include <limits>
#include <numeric>

#include "pointcert/errors.hpp"

namespace pointcert {

std::int64_t LabelFrequencies::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::vector<int> subcloud_labels(const Partition& part, const Classifier& f) {
  std::vector<int> labels(part.subclouds.size(), 0);
  for (std::size_t i = 0; i < part.subclouds.size(); ++i) {
    if (!part.subclouds[i].empty()) {
      labels[i] = f.classify(part.subclouds[i]).value;
    }
  }
  return labels;
}

LabelFrequencies frequencies_from_labels(const std::vector<int>& labels,
                                         std::size_t classes) {
  LabelFrequencies freq;
  freq.counts.assign(classes, 0);
  freq.m = labels.size();
  for (int l : labels) {
    if (l == 0) continue;
    if (l < 0 || static_cast<std::size_t>(l) > classes) {
      throw ConfigError("label " + std::to_string(l) + " outside [1, " +
                        std::to_string(classes) + "]");
    }
    ++freq.counts[static_cast<std::size_t>(l - 1)];
  }
  return freq;
}

LabelFrequencies label_frequencies(const Partition& part, const Classifier& f) {
  return frequencies_from_labels(subcloud_labels(part, f), f.classes());
}

Label vote(const LabelFrequencies& freq) {
  if (freq.total() <= 0) {
    throw NoEvidenceError("every sub-point cloud is empty");
  }
  std::size_t best = 0;
  for (std::size_t l = 1; l < freq.counts.size(); ++l) {
    if (freq.counts[l] > freq.counts[best]) best = l;
  }
  return Label(static_cast<int>(best) + 1);
}

Label runner_up(const LabelFrequencies& freq, Label y) {
  if (freq.classes() < 2) throw ConfigError("runner_up needs at least 2 labels");
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  int best_label = 0;
  for (std::size_t i = 0; i < freq.counts.size(); ++i) {
    const int l = static_cast<int>(i) + 1;
    if (l == y.value) continue;
    const std::int64_t score = freq.counts[i] + (y.value > l ? 1 : 0);
    if (score > best) {
      best = score;
      best_label = l;
    }
  }
  return Label(best_label);
}

std::int64_t vote_gap(const LabelFrequencies& freq, Label y) {
  if (freq.classes() < 2) return freq[y];
  const Label other = runner_up(freq, y);
  return freq[y] - (freq[other] + (y.value > other.value ? 1 : 0));
}

std::int64_t certified_size(std::int64_t gap, AttackType type) {
  // gap >= 0 for the voted label, so integer division is the floor.
  return gap / (2 * impact_factor(type));
}

Certificate certify(const LabelFrequencies& freq) {
  Certificate cert;
  cert.label = vote(freq);
  cert.frequencies = freq;
  cert.gap = vote_gap(freq, cert.label);
  for (auto type : kAllAttackTypes) {
    cert.certified[static_cast<std::size_t>(type)] =
        certified_size(cert.gap, type);
  }
  return cert;
}

Certificate predict_and_certify(const PointCloud& cloud, std::size_t m,
                                const HashRule& rule, const Classifier& f) {
  if (cloud.empty()) throw NoEvidenceError("cannot certify an empty cloud");
  const auto part = partition(cloud, m, rule);
  return certify(label_frequencies(part, f));
}

Label ensemble_predict(const PointCloud& cloud, std::size_t m,
                       const HashRule& rule, const Classifier& f) {
  if (cloud.empty()) throw NoEvidenceError("cannot classify an empty cloud");
  return vote(label_frequencies(partition(cloud, m, rule), f));
}

}  // namespace pointcert
