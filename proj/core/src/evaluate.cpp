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


#include "pointcert/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "pointcert/errors.hpp"
#include "pointcert/parallel.hpp"

#ifndef POINTCERT_VERSION_STRING
#define POINTCERT_VERSION_STRING "0.0.0"
#endif

namespace pointcert {

using nlohmann::json;

std::string_view version() { return POINTCERT_VERSION_STRING; }

Scenario parse_scenario(std::string_view text) {
  if (text == "1" || text == "I") return Scenario::Direct;
  if (text == "2" || text == "II") return Scenario::SubTrained;
  if (text == "3" || text == "III") return Scenario::Completed;
  throw ConfigError("scenario must be 1, 2 or 3, got '" + std::string(text) + "'");
}

void EvalConfig::validate() const {
  if (m == 0) throw ConfigError("m must be at least 1");
  if (t_grid.empty()) throw ConfigError("t grid is empty");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
    throw ConfigError("t grid must be sorted ascending");
  }
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
}

namespace {

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

int parse_label(const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("not a label: '" + text + "'");
  }
  return v;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Rethrows the active exception with the cloud named, keeping backend errors
// distinguishable.
[[noreturn]] void rethrow_for_cloud(std::size_t index) {
  const std::string where = "test cloud " + std::to_string(index) + ": ";
  try {
    throw;
  } catch (const ClassifierBackendError& e) {
    throw ClassifierBackendError(where + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const Error& e) {
    throw Error(where + e.what());
  }
}

json scenario_losses(const EvalConfig& config,
                     const std::vector<LabeledCloud>& train,
                     const CompletionFn& completion, const Classifier& inner) {
  // One sub-point cloud (the first non-empty bucket) per training cloud.
  std::vector<CompletionPair> pairs;
  std::vector<LabeledCloud> labeled;
  for (const auto& example : train) {
    if (example.cloud.empty()) continue;
    const auto part = partition(example.cloud, config.m, config.rule);
    for (const auto& sub : part.subclouds) {
      if (sub.empty()) continue;
      pairs.push_back({sub, example.cloud});
      labeled.push_back({sub, example.label});
      break;
    }
  }
  if (pairs.empty()) return json();
  const double rec = reconstruction_loss(pairs, completion);
  const double cls = classification_loss(labeled, completion, inner);
  return {{"reconstruction", rec},
          {"classification", cls},
          {"combined", rec + config.lambda * cls},
          {"pairs", pairs.size()}};
}

json config_echo(const EvalConfig& config) {
  json j = {{"m", config.m},
            {"hash", config.rule.name()},
            {"attack", std::string(to_string(config.attack))},
            {"t_grid", config.t_grid},
            {"classifier", config.classifier},
            {"scenario", static_cast<int>(config.scenario)},
            {"seed", config.seed},
            {"eta", config.eta},
            {"lambda", config.lambda},
            {"attacks_run", config.run_attacks}};
  if (config.scenario == Scenario::Completed) j["completion"] = config.completion;
  if (config.run_attacks) j["candidate_pool"] = config.candidate_pool;
  return j;
}

}  // namespace

ClassifierHandle make_classifier(const EvalConfig& config,
                                 const std::vector<LabeledCloud>& train,
                                 std::size_t classes) {
  const auto [kind, arg] = split_spec(config.classifier);
  ClassifierHandle f;
  if (kind == "centroid" && arg.empty()) {
    if (train.empty()) throw ConfigError("centroid classifier needs training clouds");
    const auto mode = config.scenario == Scenario::SubTrained
                          ? FitMode::sub_clouds(config.m, config.rule)
                          : FitMode::full_clouds();
    f = fit_centroid(train, classes, mode);
  } else if (kind == "constant") {
    f = std::make_shared<ConstantClassifier>(classes, Label(parse_label(arg)));
  } else if (kind == "lookup" && !arg.empty()) {
    auto table = LookupClassifier::load(arg);
    if (table.classes() != classes) {
      throw ConfigError("lookup table has " + std::to_string(table.classes()) +
                        " classes, dataset has " + std::to_string(classes));
    }
    f = std::make_shared<LookupClassifier>(std::move(table));
  } else if (kind == "external" && !arg.empty()) {
    f = open_external(arg, classes);
  } else {
    throw ConfigError("unknown classifier '" + config.classifier + "'");
  }
  if (config.scenario == Scenario::Completed) {
    return std::make_shared<CompletedClassifier>(parse_completion(config.completion),
                                                 std::move(f));
  }
  return f;
}

std::vector<std::int64_t> certified_sizes(const std::vector<LabeledCloud>& test,
                                          const EnsembleSpec& ens,
                                          AttackType type, std::size_t threads) {
  std::vector<std::int64_t> sizes(test.size(), -1);
  parallel_for(test.size(), threads, [&](std::size_t i) {
    try {
      const auto cert = predict_and_certify(test[i].cloud, ens);
      if (cert.label == test[i].label) sizes[i] = cert.size(type);
    } catch (const NoEvidenceError&) {
      sizes[i] = -1;
    } catch (...) {
      rethrow_for_cloud(i);
    }
  });
  return sizes;
}

double certified_accuracy(const std::vector<std::int64_t>& sizes, std::size_t t) {
  if (sizes.empty()) return 0.0;
  const auto ok = std::count_if(sizes.begin(), sizes.end(), [t](std::int64_t s) {
    return s >= static_cast<std::int64_t>(t);
  });
  return static_cast<double>(ok) / static_cast<double>(sizes.size());
}

AccuracyCurve evaluate(const EvalConfig& config,
                       const std::vector<LabeledCloud>& train,
                       const std::vector<LabeledCloud>& test,
                       std::size_t classes) {
  config.validate();
  if (test.empty()) throw EmptyInputError("no test clouds");
  const auto f = make_classifier(config, train, classes);
  const EnsembleSpec ens{config.m, config.rule, f};

  const auto sizes = certified_sizes(test, ens, config.attack, config.threads);
  std::vector<double> empirical;
  if (config.run_attacks) {
    try {
      empirical = empirical_accuracy(test, ens, config.attack, config.t_grid,
                                     config.candidate_pool, config.seed,
                                     config.threads);
    } catch (const ClassifierBackendError& e) {
      throw ClassifierBackendError(std::string("attack: ") + e.what());
    }
  }

  AccuracyCurve curve;
  for (std::size_t k = 0; k < config.t_grid.size(); ++k) {
    CurveRow row;
    row.t = config.t_grid[k];
    row.certified_accuracy = certified_accuracy(sizes, row.t);
    if (config.run_attacks) row.empirical_accuracy = empirical[k];
    curve.rows.push_back(row);
  }

  auto& meta = curve.metadata;
  meta["config"] = config_echo(config);
  meta["version"] = std::string(version());
  meta["classes"] = classes;
  meta["train_clouds"] = train.size();
  meta["test_clouds"] = test.size();
  if (config.scenario == Scenario::Completed && !train.empty()) {
    const auto completion = parse_completion(config.completion);
    auto inner = config;
    inner.scenario = Scenario::Direct;
    const auto base = make_classifier(inner, train, classes);
    const auto losses = scenario_losses(config, train, *completion, *base);
    if (!losses.is_null()) meta["losses"] = losses;
  }
  return curve;
}

AccuracyCurve evaluate(const EvalConfig& config, const DatasetManifest& manifest) {
  const auto train = load_split(manifest, "train");
  const auto test = load_split(manifest, "test");
  auto curve = evaluate(config, train, test, manifest.classes);
  curve.metadata["dataset"] = manifest.name;
  return curve;
}

ResultFormat parse_result_format(std::string_view text) {
  if (text == "csv") return ResultFormat::Csv;
  if (text == "json") return ResultFormat::Json;
  throw ConfigError("format must be csv or json, got '" + std::string(text) + "'");
}

json curve_to_json(const AccuracyCurve& curve) {
  json rows = json::array();
  for (const auto& r : curve.rows) {
    rows.push_back({{"t", r.t},
                    {"certified_accuracy", r.certified_accuracy},
                    {"empirical_accuracy", r.empirical_accuracy
                                               ? json(*r.empirical_accuracy)
                                               : json(nullptr)}});
  }
  return {{"rows", rows}, {"metadata", curve.metadata}};
}

AccuracyCurve curve_from_json(const json& doc) {
  try {
    AccuracyCurve curve;
    for (const auto& r : doc.at("rows")) {
      CurveRow row;
      row.t = r.at("t").get<std::size_t>();
      row.certified_accuracy = r.at("certified_accuracy").get<double>();
      const auto& emp = r.at("empirical_accuracy");
      if (!emp.is_null()) row.empirical_accuracy = emp.get<double>();
      curve.rows.push_back(row);
    }
    curve.metadata = doc.value("metadata", json::object());
    return curve;
  } catch (const json::exception& e) {
    throw FormatError(std::string("accuracy curve: ") + e.what());
  }
}

std::string format_results(const AccuracyCurve& curve, ResultFormat format) {
  if (format == ResultFormat::Json) return curve_to_json(curve).dump(2) + "\n";
  std::string out = "t,certified_accuracy,empirical_accuracy\n";
  for (const auto& r : curve.rows) {
    out += std::to_string(r.t) + ',' + shortest(r.certified_accuracy) + ',';
    if (r.empirical_accuracy) out += shortest(*r.empirical_accuracy);
    out += '\n';
  }
  return out;
}

void write_results(const AccuracyCurve& curve, const std::filesystem::path& path,
                   ResultFormat format) {
  const auto text = format_results(curve, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace pointcert
