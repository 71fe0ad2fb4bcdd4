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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pointcert/attacks.hpp"
#include "pointcert/baselines.hpp"
#include "pointcert/completion.hpp"
#include "pointcert/dataset.hpp"

namespace pointcert {

/// Library version, e.g. "0.1.0".
std::string_view version();

enum class Scenario {
  Direct = 1,      // f fit on full clouds, applied to sub-point clouds
  SubTrained = 2,  // f fit on sub-point clouds
  Completed = 3,   // a completion function in front of a full-cloud f
};

Scenario parse_scenario(std::string_view text);

struct EvalConfig {
  std::size_t m = 400;
  HashRule rule = HashRule::md5();
  AttackType attack = AttackType::Addition;
  std::vector<std::size_t> t_grid = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  /// "centroid", "constant:<l>", "lookup:<file>" or "external:<command>".
  std::string classifier = "centroid";
  Scenario scenario = Scenario::SubTrained;
  std::uint64_t seed = 0;
  double eta = kEtaCube;
  double lambda = kDefaultLambda;
  /// Completion used by Scenario III; see parse_completion.
  std::string completion = "upsample:4";
  bool run_attacks = false;
  std::size_t candidate_pool = 64;
  /// Worker threads; results do not depend on it.
  std::size_t threads = 1;

  /// Throws ConfigError for m = 0, an empty or unsorted t grid, a negative
  /// lambda or a non-positive eta.
  void validate() const;
};

/// Base classifier for the configured scenario. "centroid" is fit on `train`;
/// the other specs ignore it. Scenario III wraps f in the completion function.
ClassifierHandle make_classifier(const EvalConfig& config,
                                 const std::vector<LabeledCloud>& train,
                                 std::size_t classes);

struct CurveRow {
  std::size_t t = 0;
  double certified_accuracy = 0.0;
  std::optional<double> empirical_accuracy;

  bool operator==(const CurveRow&) const = default;
};

struct AccuracyCurve {
  std::vector<CurveRow> rows;
  /// Config echo, toolkit version, dataset sizes and (Scenario III) losses.
  nlohmann::json metadata = nlohmann::json::object();

  bool operator==(const AccuracyCurve&) const = default;
};

/// Certified accuracy at every t of the grid, plus empirical accuracy when
/// config.run_attacks is set. Failures name the offending test cloud.
AccuracyCurve evaluate(const EvalConfig& config,
                       const std::vector<LabeledCloud>& train,
                       const std::vector<LabeledCloud>& test,
                       std::size_t classes);

/// Loads the manifest's train and test splits and evaluates.
AccuracyCurve evaluate(const EvalConfig& config, const DatasetManifest& manifest);

/// Per-cloud certified size, or -1 when the prediction is wrong or there is
/// no evidence. Parallel over clouds.
std::vector<std::int64_t> certified_sizes(const std::vector<LabeledCloud>& test,
                                          const EnsembleSpec& ens,
                                          AttackType type, std::size_t threads);

/// Fraction of entries >= t.
double certified_accuracy(const std::vector<std::int64_t>& sizes, std::size_t t);

enum class ResultFormat { Csv, Json };
ResultFormat parse_result_format(std::string_view text);

/// CSV: header `t,certified_accuracy,empirical_accuracy`, empty cell when
/// attacks were skipped. JSON: rows and metadata. Byte-deterministic.
std::string format_results(const AccuracyCurve& curve, ResultFormat format);
void write_results(const AccuracyCurve& curve,
                   const std::filesystem::path& path, ResultFormat format);

nlohmann::json curve_to_json(const AccuracyCurve& curve);
/// Throws FormatError for malformed input.
AccuracyCurve curve_from_json(const nlohmann::json& doc);

}  // namespace pointcert
