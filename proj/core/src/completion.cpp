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

#include "pointcert/completion.hpp"

#include <cmath>
#include <limits>

#include "pointcert/errors.hpp"

namespace pointcert {

using nlohmann::json;

PointCloud CentroidUpsample::complete(const PointCloud& cloud) const {
  if (cloud.empty() || k_ == 0) return cloud;
  const auto c = mean_point(cloud);
  std::vector<Point> out = cloud.points();
  out.reserve(cloud.size() * (k_ + 1));
  for (const auto& e : cloud.points()) {
    for (std::size_t j = 1; j <= k_; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(k_ + 1);
      std::vector<double> coords(e.dim());
      for (std::size_t d = 0; d < e.dim(); ++d) {
        coords[d] = c[d] + s * (e[d] - c[d]);
      }
      out.emplace_back(std::move(coords));
    }
  }
  return PointCloud(std::move(out));
}

std::string CentroidUpsample::describe() const {
  return "upsample:" + std::to_string(k_);
}

ExternalCompletion::ExternalCompletion(std::string command,
                                       std::chrono::milliseconds timeout)
    : proc_(std::make_unique<ExternalProcess>(command, timeout)) {
  read_hello(*proc_);
}

PointCloud ExternalCompletion::complete(const PointCloud& cloud) const {
  std::lock_guard lock(mutex_);
  const std::uint64_t id = next_id_++;
  const json request = {
      {"type", "complete"}, {"id", id}, {"points", points_to_json(cloud)}};
  const auto doc = round_trip(*proc_, request, "points");
  auto out = points_from_json(doc.value("points", json()));
  if (!cloud.empty() && out.empty()) {
    throw ClassifierBackendError("completion backend returned no points");
  }
  return out;
}

std::string ExternalCompletion::describe() const {
  return "external:" + proc_->command();
}

CompletionHandle parse_completion(const std::string& spec) {
  if (spec == "identity") return std::make_shared<IdentityCompletion>();
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "upsample") {
    try {
      std::size_t used = 0;
      const long k = std::stol(arg, &used);
      if (used != arg.size() || k < 0) throw std::invalid_argument(arg);
      return std::make_shared<CentroidUpsample>(static_cast<std::size_t>(k));
    } catch (const std::logic_error&) {
      throw ConfigError("upsample needs a non-negative integer, got '" + arg + "'");
    }
  }
  if (kind == "external" && !arg.empty()) {
    return std::make_shared<ExternalCompletion>(arg);
  }
  throw ConfigError("unknown completion '" + spec + "'");
}

std::string CompletedClassifier::describe() const {
  return inner_->describe() + " after " + completion_->describe();
}

Label CompletedClassifier::do_classify(const PointCloud& cloud) const {
  return inner_->classify(completion_->complete(cloud));
}

namespace {

// Mean over `from` of the distance to the nearest point of `to`.
double directed_mean(const PointCloud& from, const PointCloud& to) {
  const std::size_t dim = from.dim();
  double total = 0.0;
  for (const auto& a : from.points()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : to.points()) {
      double sq = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double diff = a[j] - b[j];
        sq += diff * diff;
      }
      best = std::min(best, sq);
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(from.size());
}

}  // namespace

double chamfer(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw EmptyInputError("chamfer of an empty cloud");
  if (a.dim() != b.dim()) throw DimensionError("chamfer: dimensions differ");
  return directed_mean(a, b) + directed_mean(b, a);
}

double reconstruction_loss(const std::vector<CompletionPair>& pairs,
                           const CompletionFn& completion) {
  if (pairs.empty()) throw EmptyInputError("no completion pairs");
  double total = 0.0;
  for (const auto& pair : pairs) {
    total += chamfer(completion.complete(pair.sub), pair.source);
  }
  return total / static_cast<double>(pairs.size());
}

double classification_loss(const std::vector<LabeledCloud>& labeled,
                           const CompletionFn& completion,
                           const Classifier& f) {
  if (labeled.empty()) throw EmptyInputError("no labeled clouds");
  std::size_t wrong = 0;
  for (const auto& example : labeled) {
    if (f.classify(completion.complete(example.cloud)) != example.label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(labeled.size());
}

double combined_loss(const std::vector<CompletionPair>& pairs,
                     const std::vector<LabeledCloud>& labeled,
                     const CompletionFn& completion, const Classifier& f,
                     double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  const double rec = reconstruction_loss(pairs, completion);
  if (lambda == 0.0) return rec;
  return rec + lambda * classification_loss(labeled, completion, f);
}

}  // namespace pointcert
