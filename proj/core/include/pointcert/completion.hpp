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

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pointcert/classifier.hpp"
#include "pointcert/external.hpp"

namespace pointcert {

/// Maps a sub-point cloud to a completed point cloud. Deterministic, and
/// non-empty output for non-empty input.
class CompletionFn {
 public:
  virtual ~CompletionFn() = default;
  virtual PointCloud complete(const PointCloud& cloud) const = 0;
  virtual std::string describe() const = 0;
};

using CompletionHandle = std::shared_ptr<const CompletionFn>;

class IdentityCompletion final : public CompletionFn {
 public:
  PointCloud complete(const PointCloud& cloud) const override { return cloud; }
  std::string describe() const override { return "identity"; }
};

/// Adds k interpolated points between the centroid c and every input point e:
/// c + (j / (k + 1)) * (e - c) for j = 1..k.
class CentroidUpsample final : public CompletionFn {
 public:
  explicit CentroidUpsample(std::size_t k) : k_(k) {}
  PointCloud complete(const PointCloud& cloud) const override;
  std::string describe() const override;

 private:
  std::size_t k_;
};

/// Completion served by an external process ("complete" requests).
class ExternalCompletion final : public CompletionFn {
 public:
  explicit ExternalCompletion(
      std::string command,
      std::chrono::milliseconds timeout = kDefaultBackendTimeout);
  PointCloud complete(const PointCloud& cloud) const override;
  std::string describe() const override;

 private:
  mutable std::mutex mutex_;
  mutable std::unique_ptr<ExternalProcess> proc_;
  mutable std::uint64_t next_id_ = 1;
};

/// "identity", "upsample:<k>" or "external:<command>".
CompletionHandle parse_completion(const std::string& spec);

/// Base classifier applied to the completed cloud: f(C(P)).
class CompletedClassifier final : public Classifier {
 public:
  CompletedClassifier(CompletionHandle completion, ClassifierHandle inner)
      : completion_(std::move(completion)), inner_(std::move(inner)) {}

  std::size_t classes() const override { return inner_->classes(); }
  std::string describe() const override;

 private:
  Label do_classify(const PointCloud& cloud) const override;

  CompletionHandle completion_;
  ClassifierHandle inner_;
};

/// Bidirectional Chamfer distance with l2 (not squared) distances:
/// mean_a min_b |a - b| + mean_b min_a |a - b|.
/// Throws EmptyInputError for an empty input, DimensionError on mismatch.
double chamfer(const PointCloud& a, const PointCloud& b);

/// A sub-point cloud and the cloud it was taken from.
struct CompletionPair {
  PointCloud sub;
  PointCloud source;
};

/// Mean chamfer(C(sub), source) over the pairs.
double reconstruction_loss(const std::vector<CompletionPair>& pairs,
                           const CompletionFn& completion);

/// Mean 0/1 loss [f(C(P)) != y]; hard-label classifiers have no logits.
double classification_loss(const std::vector<LabeledCloud>& labeled,
                           const CompletionFn& completion, const Classifier& f);

/// reconstruction_loss + lambda * classification_loss.
double combined_loss(const std::vector<CompletionPair>& pairs,
                     const std::vector<LabeledCloud>& labeled,
                     const CompletionFn& completion, const Classifier& f,
                     double lambda);

inline constexpr double kDefaultLambda = 5e-4;

}  // namespace pointcert
