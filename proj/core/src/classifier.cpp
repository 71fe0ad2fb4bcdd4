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

#include "pointcert/classifier.hpp"

#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "pointcert/errors.hpp"

namespace pointcert {

using nlohmann::json;

namespace {

void check_label(Label label, std::size_t classes, const char* what) {
  if (label.value < 1 || static_cast<std::size_t>(label.value) > classes) {
    throw ConfigError(std::string(what) + ": label " +
                      std::to_string(label.value) + " outside [1, " +
                      std::to_string(classes) + "]");
  }
}

void check_classes(std::size_t classes) {
  if (classes < 2) throw ConfigError("a classifier needs at least 2 classes");
}

}  // namespace

Label Classifier::classify(const PointCloud& cloud) const {
  if (cloud.empty()) throw EmptyInputError("cannot classify an empty cloud");
  const Label label = do_classify(cloud);
  if (label.value < 1 || static_cast<std::size_t>(label.value) > classes()) {
    throw ClassifierBackendError(describe() + " returned label " +
                                 std::to_string(label.value) +
                                 " outside [1, " + std::to_string(classes()) +
                                 "]");
  }
  return label;
}

ConstantClassifier::ConstantClassifier(std::size_t classes, Label label)
    : classes_(classes), label_(label) {
  check_classes(classes);
  check_label(label, classes, "constant classifier");
}

std::string ConstantClassifier::describe() const {
  return "constant:" + std::to_string(label_.value);
}

LookupClassifier::LookupClassifier(std::size_t classes, Label default_label)
    : classes_(classes), default_(default_label) {
  check_classes(classes);
  check_label(default_label, classes, "lookup default");
}

void LookupClassifier::set(const PointCloud& cloud, Label label) {
  auto key = multiset_key(cloud);
  clouds_.insert_or_assign(key, cloud);
  set_key(std::move(key), label);
}

void LookupClassifier::set_key(std::string key, Label label) {
  check_label(label, classes_, "lookup entry");
  table_.insert_or_assign(std::move(key), label);
}

const Label* LookupClassifier::find(const PointCloud& cloud) const {
  auto it = table_.find(multiset_key(cloud));
  return it == table_.end() ? nullptr : &it->second;
}

std::string LookupClassifier::describe() const {
  return "lookup(" + std::to_string(table_.size()) + " entries)";
}

Label LookupClassifier::do_classify(const PointCloud& cloud) const {
  const Label* hit = find(cloud);
  return hit ? *hit : default_;
}

LookupClassifier LookupClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lookup table " + path.string());
  json doc;
  try {
    doc = json::parse(in);
    LookupClassifier table(doc.at("classes").get<std::size_t>(),
                           Label(doc.at("default").get<int>()));
    for (const auto& entry : doc.at("entries")) {
      std::vector<Point> points;
      for (const auto& coords : entry.at("points")) {
        points.emplace_back(coords.get<std::vector<double>>());
      }
      table.set(PointCloud(std::move(points)), Label(entry.at("label").get<int>()));
    }
    return table;
  } catch (const json::exception& e) {
    throw FormatError("lookup table " + path.string() + ": " + e.what());
  }
}

void LookupClassifier::save(const std::filesystem::path& path) const {
  json entries = json::array();
  for (const auto& [key, label] : table_) {
    auto it = clouds_.find(key);
    if (it == clouds_.end()) {
      throw FormatError("lookup entry was added by key only and has no points");
    }
    json points = json::array();
    for (auto idx : it->second.sorted_order()) {
      const auto coords = it->second.point(idx).coords();
      points.push_back(std::vector<double>(coords.begin(), coords.end()));
    }
    entries.push_back({{"points", std::move(points)}, {"label", label.value}});
  }
  json doc = {{"classes", classes_},
              {"default", default_.value},
              {"entries", std::move(entries)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write lookup table " + path.string());
  out << doc.dump(1) << '\n';
}

CentroidClassifier::CentroidClassifier(
    std::vector<std::vector<double>> prototypes)
    : prototypes_(std::move(prototypes)) {
  check_classes(prototypes_.size());
  for (const auto& p : prototypes_) {
    if (p.size() != prototypes_.front().size()) {
      throw DimensionError("centroid prototypes have mixed dimensions");
    }
  }
}

std::string CentroidClassifier::describe() const {
  return "centroid(" + std::to_string(prototypes_.size()) + " classes)";
}

Label CentroidClassifier::do_classify(const PointCloud& cloud) const {
  const auto mean = mean_point(cloud);
  if (mean.size() != prototypes_.front().size()) {
    throw DimensionError("cloud dimension " + std::to_string(mean.size()) +
                         " does not match prototypes (" +
                         std::to_string(prototypes_.front().size()) + ")");
  }
  double best = std::numeric_limits<double>::infinity();
  int best_label = 1;
  for (std::size_t l = 0; l < prototypes_.size(); ++l) {
    double d = 0.0;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double diff = mean[j] - prototypes_[l][j];
      d += diff * diff;
    }
    if (d < best) {  // strict: ties keep the smaller label
      best = d;
      best_label = static_cast<int>(l) + 1;
    }
  }
  return Label(best_label);
}

std::shared_ptr<CentroidClassifier> fit_centroid(
    const std::vector<LabeledCloud>& train, std::size_t classes,
    const FitMode& mode) {
  if (classes < 2) throw TrainingError("need at least 2 classes");
  std::size_t dim = 0;
  std::vector<std::vector<double>> sums(classes);
  std::vector<std::size_t> counts(classes, 0);

  auto accumulate = [&](const PointCloud& cloud, std::size_t cls) {
    const auto mean = mean_point(cloud);
    if (dim == 0) dim = mean.size();
    if (mean.size() != dim) throw TrainingError("training clouds have mixed dimensions");
    if (sums[cls].empty()) sums[cls].assign(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) sums[cls][j] += mean[j];
    ++counts[cls];
  };

  for (const auto& example : train) {
    const int l = example.label.value;
    if (l < 1 || static_cast<std::size_t>(l) > classes) {
      throw TrainingError("training label " + std::to_string(l) +
                          " outside [1, " + std::to_string(classes) + "]");
    }
    if (example.cloud.empty()) continue;
    const auto cls = static_cast<std::size_t>(l - 1);
    if (mode.kind == FitMode::Kind::FullClouds) {
      accumulate(example.cloud, cls);
    } else {
      const auto part = partition(example.cloud, mode.m, mode.rule);
      for (const auto& sub : part.subclouds) {
        if (!sub.empty()) accumulate(sub, cls);
      }
    }
  }

  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) {
      throw TrainingError("class " + std::to_string(c + 1) +
                          " has no training examples");
    }
    for (auto& v : sums[c]) v /= static_cast<double>(counts[c]);
  }
  return std::make_shared<CentroidClassifier>(std::move(sums));
}

}  // namespace pointcert
