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


#include <chrono>

#include <gtest/gtest.h>

#include "pointcert/completion.hpp"
#include "pointcert/dataset.hpp"
#include "pointcert/ensemble.hpp"
#include "pointcert/errors.hpp"
#include "pointcert/external.hpp"
#include "pointcert/rng.hpp"

namespace pointcert {
namespace {

std::string backend(const std::string& mode, int classes = 3) {
  return std::string(FAKE_BACKEND) + " " + mode + " " + std::to_string(classes);
}

std::vector<std::vector<double>> anchors(std::size_t classes) {
  std::vector<std::vector<double>> a;
  for (std::size_t l = 1; l <= classes; ++l) a.push_back(synthetic_anchor(l, classes));
  return a;
}

TEST(External, CentroidParityOnRandomSubclouds) {
  const auto remote = open_external(backend("centroid"), 3);
  const CentroidClassifier local(anchors(3));
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    std::vector<Point> pts;
    const std::size_t n = 1 + rng.below(20);
    for (std::size_t k = 0; k < n; ++k) {
      pts.push_back(Point({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}));
    }
    const PointCloud c(pts);
    ASSERT_EQ(remote->classify(c), local.classify(c));
  }
}

TEST(External, CertificatesMatchInProcess) {
  SyntheticSpec spec;
  spec.points = 256;
  spec.test_per_class = 2;
  spec.spread = 0.6;
  const auto remote = open_external(backend("centroid"), 3);
  const CentroidClassifier local(anchors(3));
  for (const auto& ex : synthetic_clouds(spec, "test")) {
    const auto a = predict_and_certify(ex.cloud, 16, HashRule::md5(), *remote);
    const auto b = predict_and_certify(ex.cloud, 16, HashRule::md5(), local);
    EXPECT_EQ(a.frequencies, b.frequencies);
    EXPECT_EQ(a.certified, b.certified);
  }
}

TEST(External, ManySequentialRequests) {
  const auto remote = open_external(backend("constant:2"), 3);
  const PointCloud c{Point({0.1, 0.2, 0.3})};
  for (int i = 0; i < 2000; ++i) ASSERT_EQ(remote->classify(c), Label(2));
}

TEST(External, ProtocolFailuresAreBackendErrors) {
  const PointCloud c{Point({0.1, 0.2, 0.3})};
  EXPECT_THROW(open_external(backend("constant:1", 4), 3), ClassifierBackendError);
  EXPECT_THROW(open_external(backend("no-hello"), 3), ClassifierBackendError);
  EXPECT_THROW(open_external("/nonexistent/backend", 3), ClassifierBackendError);
  for (const char* mode : {"error", "bad-label", "wrong-id", "garbage", "die"}) {
    const auto remote = open_external(backend(mode), 3);
    EXPECT_THROW(remote->classify(c), ClassifierBackendError) << mode;
  }
}

TEST(External, Timeout) {
  const auto remote =
      open_external(backend("sleep"), 3, std::chrono::milliseconds(200));
  const auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(remote->classify(PointCloud{Point({0, 0, 0})}), ClassifierBackendError);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(External, CompletionEcho) {
  const ExternalCompletion comp(backend("complete"));
  const PointCloud c{Point({0.125, -0.5, 0.75}), Point({1e-7, 3.3, -2})};
  EXPECT_EQ(comp.complete(c).points(), c.points());
}

}  // namespace
}  // namespace pointcert
