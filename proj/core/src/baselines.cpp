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


#include "pointcert/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "pointcert/errors.hpp"
#include "pointcert/rng.hpp"

namespace pointcert {

std::int64_t rs_to_perturbation_size(const RsConversion& conv) {
  if (!(conv.eta > 0.0) || !std::isfinite(conv.eta)) {
    throw ConfigError("eta must be a positive finite number");
  }
  if (!(conv.gamma >= 0.0) || !std::isfinite(conv.gamma)) {
    throw ConfigError("gamma must be a non-negative finite number");
  }
  const double g2 = conv.gamma * conv.gamma;
  const double e2 = conv.eta * conv.eta;
  auto out = static_cast<std::int64_t>(std::floor(g2 / e2));
  while (out > 0 && static_cast<double>(out) * e2 > g2) --out;
  while (static_cast<double>(out + 1) * e2 <= g2) ++out;
  return out;
}

std::vector<std::vector<std::size_t>> draw_subsamples(
    const PointCloud& cloud, const SubsampleBaseline& base) {
  if (base.k == 0 || base.n == 0) {
    throw ConfigError("subsample baseline needs k >= 1 and n >= 1");
  }
  if (base.k > cloud.size()) {
    throw BudgetError("cannot draw " + std::to_string(base.k) +
                      " points from a cloud of " + std::to_string(cloud.size()));
  }
  const auto& order = cloud.sorted_order();
  Rng rng(base.seed);
  std::vector<std::vector<std::size_t>> draws;
  draws.reserve(base.n);
  std::vector<std::size_t> pool(cloud.size());
  for (std::size_t s = 0; s < base.n; ++s) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates over sorted positions.
    for (std::size_t i = 0; i < base.k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> pick(base.k);
    for (std::size_t i = 0; i < base.k; ++i) pick[i] = order[pool[i]];
    std::sort(pick.begin(), pick.end());
    draws.push_back(std::move(pick));
  }
  return draws;
}

SubsampleCertificate det_subsample_certify(const PointCloud& cloud,
                                           const SubsampleBaseline& base,
                                           const Classifier& f) {
  const auto draws = draw_subsamples(cloud, base);
  std::vector<int> labels;
  labels.reserve(draws.size());
  std::vector<std::size_t> containment(cloud.size(), 0);
  for (const auto& pick : draws) {
    labels.push_back(f.classify(cloud.subset(pick)).value);
    for (auto i : pick) ++containment[i];
  }

  SubsampleCertificate cert;
  cert.frequencies = frequencies_from_labels(labels, f.classes());
  cert.frequencies.m = base.n;
  cert.label = vote(cert.frequencies);
  cert.gap = vote_gap(cert.frequencies, cert.label);
  cert.max_containment = *std::max_element(containment.begin(), containment.end());

  const auto n = static_cast<std::int64_t>(base.n);
  const auto j = static_cast<std::int64_t>(std::max<std::size_t>(cert.max_containment, 1));
  const std::int64_t by_n = cert.gap / (2 * n);
  cert.certified[static_cast<std::size_t>(AttackType::Addition)] = by_n;
  cert.certified[static_cast<std::size_t>(AttackType::Deletion)] = cert.gap / (2 * j);
  cert.certified[static_cast<std::size_t>(AttackType::Modification)] = by_n;
  cert.certified[static_cast<std::size_t>(AttackType::Perturbation)] = by_n;
  return cert;
}

}  // namespace pointcert
