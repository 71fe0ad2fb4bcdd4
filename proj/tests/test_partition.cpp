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


#include <cstdio>
#include <set>

#include <gtest/gtest.h>

#include "pointcert/errors.hpp"
#include "pointcert/partition.hpp"
#include "pointcert/rng.hpp"

namespace pointcert {
namespace {

std::string hex(const std::array<std::uint8_t, 16>& d) {
  std::string s;
  char buf[3];
  for (auto b : d) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    s += buf;
  }
  return s;
}

// Reference digests from an independent MD5 implementation.
TEST(Md5, KnownDigests) {
  EXPECT_EQ(hex(md5_digest("")), "d41d8cd98f00b204e9800998ecf8427e");
  EXPECT_EQ(hex(md5_digest("+0.100000|+0.200000|+0.300000")),
            "e30bec065a0ae15bd8516951013acbdb");
}

TEST(Md5, BigEndianModulus) {
  const auto d = md5_digest("+0.100000|+0.200000|+0.300000");
  EXPECT_EQ(digest_mod(d, 400), 315u);
  EXPECT_EQ(digest_mod(d, 7), 1u);
  EXPECT_EQ(digest_mod(d, 1), 0u);
  std::array<std::uint8_t, 16> one{};
  one[15] = 1;
  EXPECT_EQ(digest_mod(one, 10), 1u);
  std::array<std::uint8_t, 16> high{};
  high[0] = 1;  // 2^120
  EXPECT_EQ(digest_mod(high, 1000), 576u);  // 2^120 mod 1000
}

TEST(Assign, Md5RuleMatchesGolden) {
  EXPECT_EQ(assign(Point({0.1, 0.2, 0.3}), 400, HashRule::md5()), 315u);
  EXPECT_THROW(assign(Point({0.1, 0.2, 0.3}), 0, HashRule::md5()), ConfigError);
}

TEST(MeanDigits, FirstFourDigits) {
  EXPECT_EQ(mean_digits_value(Point({0.1, 0.2, 0.3})), 200u);  // "0.200000"
  EXPECT_EQ(assign(Point({0.1, 0.2, 0.3}), 400, HashRule::mean_digits()), 200u);
  EXPECT_EQ(mean_digits_value(Point({-1.5, -1.5, -1.5})), 1500u);
  EXPECT_EQ(mean_digits_value(Point({12.345678, 12.345678, 12.345678})), 1234u);
  EXPECT_EQ(assign(Point({12.345678, 12.345678, 12.345678}), 1000,
                   HashRule::mean_digits()),
            234u);
}

TEST(HashRule, ParseNames) {
  EXPECT_EQ(HashRule::parse("md5").kind(), HashRule::Kind::Md5);
  EXPECT_EQ(HashRule::parse("mean").kind(), HashRule::Kind::MeanDigits);
  EXPECT_THROW(HashRule::parse("sha1"), ConfigError);
}

PointCloud random_cloud(Rng& rng, std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(Point({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}));
  }
  return PointCloud(pts);
}

TEST(Partition, DisjointCoveringDeterministic) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cloud = random_cloud(rng, 1 + rng.below(200));
    const std::size_t m = 1 + rng.below(50);
    const auto part = partition(cloud, m, HashRule::md5());
    ASSERT_EQ(part.subclouds.size(), m);
    std::set<std::string> seen;
    std::size_t total = 0;
    for (std::size_t b = 0; b < m; ++b) {
      for (std::size_t i = 0; i < part.subclouds[b].size(); ++i) {
        const auto& p = part.subclouds[b].point(i);
        EXPECT_EQ(assign(p, m, HashRule::md5()), b);
        EXPECT_TRUE(seen.insert(part.subclouds[b].encoding(i)).second);
      }
      total += part.subclouds[b].size();
    }
    EXPECT_EQ(total, cloud.size());
    const auto again = partition(cloud, m, HashRule::md5());
    for (std::size_t b = 0; b < m; ++b) EXPECT_EQ(again.subclouds[b], part.subclouds[b]);
  }
}

TEST(Partition, EmptyCloud) {
  const auto part = partition(PointCloud{}, 4, HashRule::md5());
  EXPECT_EQ(part.subclouds.size(), 4u);
  EXPECT_EQ(part.nonempty_count(), 0u);
}

TEST(Partition, CustomRule) {
  const auto rule = HashRule::custom(
      "first", [](const Point& p, std::string_view, std::size_t m) {
        return static_cast<std::size_t>(p[0]) % m;
      });
  const PointCloud cloud{Point({0, 0, 0}), Point({1, 0, 0}), Point({2, 0, 0})};
  const auto part = partition(cloud, 2, rule);
  EXPECT_EQ(part.subclouds[0].size(), 2u);
  EXPECT_EQ(part.subclouds[1].size(), 1u);
}

TEST(BalanceStats, Values) {
  const auto rule = HashRule::custom(
      "first", [](const Point& p, std::string_view, std::size_t m) {
        return static_cast<std::size_t>(p[0]) % m;
      });
  const PointCloud cloud{Point({0, 0, 0}), Point({0, 1, 0}), Point({1, 0, 0})};
  const auto s = balance_stats(partition(cloud, 3, rule));
  EXPECT_EQ(s.min, 0u);
  EXPECT_EQ(s.max, 2u);
  EXPECT_DOUBLE_EQ(s.mean, 1.0);
  EXPECT_NEAR(s.stddev, std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_EQ(s.empty_buckets, 1u);
}

}  // namespace
}  // namespace pointcert
