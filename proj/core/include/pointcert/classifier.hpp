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

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pointcert/partition.hpp"
#include "pointcert/point_cloud.hpp"

namespace pointcert {

/// Class label in [1, c].
struct Label {
  int value = 1;

  constexpr Label() = default;
  constexpr explicit Label(int v) : value(v) {}
  constexpr auto operator<=>(const Label&) const = default;
};

struct LabeledCloud {
  PointCloud cloud;
  Label label;
};

/// A base point-cloud classifier f. Implementations must be deterministic and
/// safe to call from several threads at once.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::size_t classes() const = 0;
  virtual std::string describe() const = 0;

  /// Throws EmptyInputError for an empty cloud; implementations that return
  /// a label outside [1, classes()] raise ClassifierBackendError.
  Label classify(const PointCloud& cloud) const;

 private:
  virtual Label do_classify(const PointCloud& cloud) const = 0;
};

using ClassifierHandle = std::shared_ptr<const Classifier>;

class ConstantClassifier final : public Classifier {
 public:
  ConstantClassifier(std::size_t classes, Label label);

  std::size_t classes() const override { return classes_; }
  std::string describe() const override;

 private:
  Label do_classify(const PointCloud&) const override { return label_; }

  std::size_t classes_;
  Label label_;
};

/// Finite table from order-insensitive cloud keys (multiset_key) to labels,
/// with a default for every other cloud.
class LookupClassifier final : public Classifier {
 public:
  LookupClassifier(std::size_t classes, Label default_label);

  void set(const PointCloud& cloud, Label label);
  void set_key(std::string key, Label label);
  /// Entry for exactly this cloud, if any.
  const Label* find(const PointCloud& cloud) const;

  std::size_t classes() const override { return classes_; }
  std::string describe() const override;
  Label default_label() const { return default_; }
  const std::map<std::string, Label>& table() const { return table_; }

  /// JSON table: {"classes": c, "default": l,
  ///              "entries": [{"points": [[x, y, z, ...], ...], "label": l}]}
  static LookupClassifier load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  Label do_classify(const PointCloud& cloud) const override;

  std::size_t classes_;
  Label default_;
  std::map<std::string, Label> table_;
  // Keeps a representative cloud for each key so save() can emit points.
  std::map<std::string, PointCloud> clouds_;
};

/// Nearest prototype (squared Euclidean) to the mean point of the cloud;
/// equidistant prototypes resolve to the smallest label.
class CentroidClassifier final : public Classifier {
 public:
  /// prototypes[l - 1] is the prototype of label l.
  explicit CentroidClassifier(std::vector<std::vector<double>> prototypes);

  std::size_t classes() const override { return prototypes_.size(); }
  std::string describe() const override;
  const std::vector<std::vector<double>>& prototypes() const {
    return prototypes_;
  }

 private:
  Label do_classify(const PointCloud& cloud) const override;

  std::vector<std::vector<double>> prototypes_;
};

struct FitMode {
  enum class Kind { FullClouds, SubClouds };
  Kind kind = Kind::FullClouds;
  std::size_t m = 1;
  HashRule rule = HashRule::md5();

  static FitMode full_clouds() { return {}; }
  static FitMode sub_clouds(std::size_t m, HashRule rule) {
    return {Kind::SubClouds, m, std::move(rule)};
  }
};

/// Prototype of a class = mean over the mean points of its training clouds
/// (FullClouds) or of the non-empty sub-point clouds of those clouds, each
/// inheriting its cloud's label (SubClouds). Throws TrainingError when a class
/// has no examples or a label is outside [1, c].
std::shared_ptr<CentroidClassifier> fit_centroid(
    const std::vector<LabeledCloud>& train, std::size_t classes,
    const FitMode& mode);

}  // namespace pointcert
