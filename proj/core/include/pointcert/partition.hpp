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
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pointcert/point_cloud.hpp"

namespace pointcert {

/// 16-byte MD5 digest of `bytes`.
std::array<std::uint8_t, 16> md5_digest(std::string_view bytes);

/// Big-endian 128-bit integer value of `digest`, reduced mod m.
std::size_t digest_mod(const std::array<std::uint8_t, 16>& digest,
                       std::size_t m);

/// Maps one point to a bucket in [0, m).
///
/// Md5 hashes the canonical encoding. MeanDigits is the ablation rule: the
/// first four digit characters of |mean of coordinates| printed with six
/// decimals, read as a decimal integer. Custom rules exist for tests and
/// experiments with other hash families.
class HashRule {
 public:
  enum class Kind { Md5, MeanDigits, Custom };
  using CustomFn =
      std::function<std::size_t(const Point&, std::string_view encoding,
                                std::size_t m)>;

  static HashRule md5() { return HashRule(Kind::Md5, "md5", {}); }
  static HashRule mean_digits() {
    return HashRule(Kind::MeanDigits, "mean", {});
  }
  static HashRule custom(std::string name, CustomFn fn) {
    return HashRule(Kind::Custom, std::move(name), std::move(fn));
  }
  /// "md5" or "mean"; throws ConfigError otherwise.
  static HashRule parse(std::string_view name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  /// `encoding` must be canonical_encode(p).
  std::size_t bucket(const Point& p, std::string_view encoding,
                     std::size_t m) const;

 private:
  HashRule(Kind kind, std::string name, CustomFn fn)
      : kind_(kind), name_(std::move(name)), fn_(std::move(fn)) {}

  Kind kind_;
  std::string name_;
  CustomFn fn_;
};

/// Value of the first four digits of |mean(p)| (see HashRule).
std::size_t mean_digits_value(const Point& p);

/// Bucket of `p` under `rule`. Throws ConfigError when m == 0.
std::size_t assign(const Point& p, std::size_t m, const HashRule& rule);

/// m disjoint sub-point clouds whose union is the source cloud.
struct Partition {
  std::size_t m = 0;
  std::vector<PointCloud> subclouds;
  std::size_t source_size = 0;

  std::size_t nonempty_count() const;
};

/// Points keep their source order inside each bucket.
Partition partition(const PointCloud& cloud, std::size_t m,
                    const HashRule& rule);

/// Bucket index of every point of `cloud`, in point order.
std::vector<std::size_t> bucket_indices(const PointCloud& cloud, std::size_t m,
                                        const HashRule& rule);

struct BalanceStats {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
  /// Population standard deviation of the bucket sizes.
  double stddev = 0.0;
  std::size_t empty_buckets = 0;
};

BalanceStats balance_stats(const Partition& part);

}  // namespace pointcert
