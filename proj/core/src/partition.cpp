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

#include "pointcert/partition.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>

#include "pointcert/errors.hpp"

namespace pointcert {

std::array<std::uint8_t, 16> md5_digest(std::string_view bytes) {
  std::array<std::uint8_t, 16> out{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_md5(),
                 nullptr) != 1 ||
      len != out.size()) {
    throw Error("MD5 digest failed");
  }
  return out;
}

std::size_t digest_mod(const std::array<std::uint8_t, 16>& digest,
                       std::size_t m) {
  if (m == 0) throw ConfigError("m must be positive");
  // Horner's rule over base 256; r < m < 2^64 so r * 256 + 255 fits in 128 bits.
  __extension__ using uint128 = unsigned __int128;
  uint128 r = 0;
  for (auto byte : digest) r = (r * 256u + byte) % m;
  return static_cast<std::size_t>(r);
}

std::size_t mean_digits_value(const Point& p) {
  double sum = 0.0;
  for (double v : p.coords()) sum += v;
  const double mean = sum / static_cast<double>(p.dim());
  const std::string text = format_fixed6(std::fabs(mean));
  std::size_t value = 0;
  int taken = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') continue;  // sign and decimal point
    value = value * 10 + static_cast<std::size_t>(ch - '0');
    if (++taken == 4) break;
  }
  return value;
}

HashRule HashRule::parse(std::string_view name) {
  if (name == "md5") return md5();
  if (name == "mean" || name == "mean-digits") return mean_digits();
  throw ConfigError("unknown hash rule '" + std::string(name) + "'");
}

std::size_t HashRule::bucket(const Point& p, std::string_view encoding,
                             std::size_t m) const {
  if (m == 0) throw ConfigError("m must be positive");
  switch (kind_) {
    case Kind::Md5:
      return digest_mod(md5_digest(encoding), m);
    case Kind::MeanDigits:
      return mean_digits_value(p) % m;
    case Kind::Custom: {
      const auto r = fn_(p, encoding, m);
      if (r >= m) throw ConfigError("custom hash rule returned out-of-range bucket");
      return r;
    }
  }
  return 0;
}

std::size_t assign(const Point& p, std::size_t m, const HashRule& rule) {
  if (m == 0) throw ConfigError("m must be positive");
  return rule.bucket(p, canonical_encode(p), m);
}

std::size_t Partition::nonempty_count() const {
  return static_cast<std::size_t>(
      std::count_if(subclouds.begin(), subclouds.end(),
                    [](const PointCloud& c) { return !c.empty(); }));
}

std::vector<std::size_t> bucket_indices(const PointCloud& cloud, std::size_t m,
                                        const HashRule& rule) {
  if (m == 0) throw ConfigError("m must be positive");
  std::vector<std::size_t> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out[i] = rule.bucket(cloud.point(i), cloud.encoding(i), m);
  }
  return out;
}

Partition partition(const PointCloud& cloud, std::size_t m,
                    const HashRule& rule) {
  const auto buckets = bucket_indices(cloud, m, rule);
  std::vector<std::vector<std::size_t>> members(m);
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    members[buckets[i]].push_back(i);
  }
  Partition part;
  part.m = m;
  part.source_size = cloud.size();
  part.subclouds.reserve(m);
  for (const auto& idx : members) part.subclouds.push_back(cloud.subset(idx));
  return part;
}

BalanceStats balance_stats(const Partition& part) {
  BalanceStats s;
  if (part.subclouds.empty()) return s;
  s.min = part.subclouds.front().size();
  double sum = 0.0;
  for (const auto& c : part.subclouds) {
    s.min = std::min(s.min, c.size());
    s.max = std::max(s.max, c.size());
    sum += static_cast<double>(c.size());
    if (c.empty()) ++s.empty_buckets;
  }
  const double n = static_cast<double>(part.subclouds.size());
  s.mean = sum / n;
  double sq = 0.0;
  for (const auto& c : part.subclouds) {
    const double d = static_cast<double>(c.size()) - s.mean;
    sq += d * d;
  }
  s.stddev = std::sqrt(sq / n);
  return s;
}

}  // namespace pointcert
