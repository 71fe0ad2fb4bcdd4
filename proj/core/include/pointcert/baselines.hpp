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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pointcert/classifier.hpp"
#include "pointcert/ensemble.hpp"

namespace pointcert {

/// Diameter bounds of the unit-cube and the wider object-scan coordinate spaces.
inline const double kEtaCube = 2.0 * std::numbers::sqrt3;
inline const double kEtaScan = std::sqrt(15.0);

struct RsConversion {
  double gamma = 0.0;  // l2 certified radius
  double eta = kEtaCube;
};

/// floor(gamma^2 / eta^2), corrected so that
/// out * eta^2 <= gamma^2 < (out + 1) * eta^2 holds in floating point.
/// Throws ConfigError for eta <= 0 or a negative / non-finite gamma.
std::int64_t rs_to_perturbation_size(const RsConversion& conv);

struct SubsampleBaseline {
  std::size_t k = 1;  // points per subsample
  std::size_t n = 1;  // number of subsamples
  std::uint64_t seed = 0;
};

struct SubsampleCertificate {
  Label label;
  LabelFrequencies frequencies;
  std::int64_t gap = 0;
  /// Largest number of subsamples sharing one point of P.
  std::size_t max_containment = 0;
  /// Indexed by AttackType. An added point may reach all n subsamples; a
  /// deleted point reaches at most max_containment of them.
  std::array<std::int64_t, 4> certified{};

  std::int64_t size(AttackType type) const {
    return certified[static_cast<std::size_t>(type)];
  }
};

/// Index sets of the n seeded subsamples, positions into P's sorted
/// encoding order. Throws BudgetError when k > |P| and ConfigError for
/// k = 0 or n = 0.
std::vector<std::vector<std::size_t>> draw_subsamples(
    const PointCloud& cloud, const SubsampleBaseline& base);

/// Votes f over the drawn subsamples and certifies with worst-case impact.
SubsampleCertificate det_subsample_certify(const PointCloud& cloud,
                                           const SubsampleBaseline& base,
                                           const Classifier& f);

}  // namespace pointcert
