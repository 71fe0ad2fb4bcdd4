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

#include "pointcert/point_cloud.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

#include "pointcert/errors.hpp"

namespace pointcert {

std::string_view to_string(AttackType type) {
  switch (type) {
    case AttackType::Addition:
      return "addition";
    case AttackType::Deletion:
      return "deletion";
    case AttackType::Modification:
      return "modification";
    case AttackType::Perturbation:
      return "perturbation";
  }
  return "unknown";
}

AttackType parse_attack_type(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "add" || lower == "addition") return AttackType::Addition;
  if (lower == "delete" || lower == "deletion") return AttackType::Deletion;
  if (lower == "modify" || lower == "modification") {
    return AttackType::Modification;
  }
  if (lower == "perturb" || lower == "perturbation") {
    return AttackType::Perturbation;
  }
  throw ConfigError("unknown attack type '" + std::string(text) + "'");
}

std::string format_fixed6(double value) {
  if (!std::isfinite(value)) {
    throw EncodingError("cannot encode non-finite coordinate");
  }
  // to_chars is locale-independent and rounds the exact binary value,
  // ties to even.
  char buf[400];
  const auto magnitude = std::fabs(value);
  auto [end, ec] = std::to_chars(buf + 1, buf + sizeof(buf), magnitude,
                                 std::chars_format::fixed, 6);
  if (ec != std::errc{}) {
    throw EncodingError("coordinate formatting failed");
  }
  std::string_view digits(buf + 1, static_cast<std::size_t>(end - buf - 1));
  const bool is_zero =
      digits.find_first_not_of("0.") == std::string_view::npos;
  buf[0] = (std::signbit(value) && !is_zero) ? '-' : '+';
  return std::string(buf, end);
}

std::string canonical_encode(const Point& p) {
  std::string out;
  out.reserve(p.dim() * 11);
  for (std::size_t j = 0; j < p.dim(); ++j) {
    if (j > 0) out.push_back('|');
    out += format_fixed6(p[j]);
  }
  return out;
}

void validate_ingest(const Point& p) {
  if (p.dim() < 3) {
    throw DimensionError("points need at least 3 coordinates, got " +
                         std::to_string(p.dim()));
  }
  for (double v : p.coords()) {
    if (!std::isfinite(v)) throw EncodingError("non-finite coordinate");
    if (std::fabs(v) > kMaxAbsCoordinate) {
      throw EncodingError("coordinate outside +-9999.999999");
    }
  }
}

namespace {

std::size_t check_uniform_dim(const std::vector<Point>& points) {
  if (points.empty()) return 0;
  const std::size_t dim = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != dim) {
      throw DimensionError("mixed point dimensions " + std::to_string(dim) +
                           " and " + std::to_string(p.dim()));
    }
  }
  return dim;
}

// Keeps the first occurrence of each encoding; returns the number dropped.
std::size_t unique_prepare(std::vector<Point>& points,
                           std::vector<std::string>& encodings) {
  encodings.clear();
  encodings.reserve(points.size());
  for (const auto& p : points) encodings.push_back(canonical_encode(p));

  std::vector<std::uint32_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return encodings[a] < encodings[b];
  });
  std::vector<char> keep(points.size(), 1);
  std::size_t dropped = 0;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (encodings[idx[k]] == encodings[idx[k - 1]]) {
      keep[idx[k]] = 0;
      ++dropped;
    }
  }
  if (dropped == 0) return 0;

  std::size_t w = 0;
  for (std::size_t r = 0; r < points.size(); ++r) {
    if (!keep[r]) continue;
    if (w != r) {
      points[w] = std::move(points[r]);
      encodings[w] = std::move(encodings[r]);
    }
    ++w;
  }
  points.resize(w);
  encodings.resize(w);
  return dropped;
}

}  // namespace

PointCloud::PointCloud(std::vector<Point> points) {
  dim_ = check_uniform_dim(points);
  unique_prepare(points, encodings_);
  points_ = std::move(points);
  build_order();
}

PointCloud::PointCloud(Prepared, std::size_t dim, std::vector<Point> points,
                       std::vector<std::string> encodings)
    : dim_(points.empty() ? 0 : dim),
      points_(std::move(points)),
      encodings_(std::move(encodings)) {
  build_order();
}

void PointCloud::build_order() {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  std::sort(order_.begin(), order_.end(), [this](auto a, auto b) {
    return encodings_[a] < encodings_[b];
  });
}

std::optional<std::size_t> PointCloud::find(std::string_view encoding) const {
  auto it = std::lower_bound(
      order_.begin(), order_.end(), encoding,
      [this](std::uint32_t i, std::string_view e) { return encodings_[i] < e; });
  if (it != order_.end() && encodings_[*it] == encoding) return *it;
  return std::nullopt;
}

PointCloud PointCloud::with(const Point& p) const {
  if (!empty() && p.dim() != dim_) {
    throw DimensionError("point dimension does not match cloud");
  }
  auto enc = canonical_encode(p);
  if (contains(enc)) return *this;
  auto points = points_;
  auto encodings = encodings_;
  points.push_back(p);
  encodings.push_back(std::move(enc));
  return PointCloud(Prepared{}, p.dim(), std::move(points),
                    std::move(encodings));
}

PointCloud PointCloud::with(const PointCloud& extra) const {
  if (!empty() && !extra.empty() && extra.dim() != dim_) {
    throw DimensionError("cloud dimensions differ");
  }
  auto points = points_;
  auto encodings = encodings_;
  for (std::size_t i = 0; i < extra.size(); ++i) {
    if (contains(extra.encoding(i))) continue;
    points.push_back(extra.point(i));
    encodings.push_back(extra.encoding(i));
  }
  const std::size_t dim = empty() ? extra.dim() : dim_;
  return PointCloud(Prepared{}, dim, std::move(points), std::move(encodings));
}

PointCloud PointCloud::without(std::span<const std::size_t> indices) const {
  std::vector<char> drop(points_.size(), 0);
  for (auto i : indices) {
    if (i < drop.size()) drop[i] = 1;
  }
  std::vector<Point> points;
  std::vector<std::string> encodings;
  points.reserve(points_.size());
  encodings.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (drop[i]) continue;
    points.push_back(points_[i]);
    encodings.push_back(encodings_[i]);
  }
  return PointCloud(Prepared{}, dim_, std::move(points), std::move(encodings));
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  std::vector<Point> points;
  std::vector<std::string> encodings;
  points.reserve(indices.size());
  encodings.reserve(indices.size());
  for (auto i : indices) {
    points.push_back(points_.at(i));
    encodings.push_back(encodings_[i]);
  }
  return PointCloud(Prepared{}, dim_, std::move(points), std::move(encodings));
}

bool operator==(const PointCloud& a, const PointCloud& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.encodings_[a.order_[k]] != b.encodings_[b.order_[k]]) return false;
  }
  return true;
}

DedupeResult dedupe(std::vector<Point> points) {
  const std::size_t dim = check_uniform_dim(points);
  std::vector<std::string> encodings;
  const std::size_t dropped = unique_prepare(points, encodings);
  return DedupeResult{PointCloud(PointCloud::Prepared{}, dim, std::move(points),
                                 std::move(encodings)),
                      dropped};
}

std::size_t perturbation_size(const PointCloud& p, const PointCloud& q) {
  if (!p.empty() && !q.empty() && p.dim() != q.dim()) {
    throw DimensionError("perturbation_size: dimensions " +
                         std::to_string(p.dim()) + " and " +
                         std::to_string(q.dim()));
  }
  const auto& po = p.sorted_order();
  const auto& qo = q.sorted_order();
  std::size_t i = 0, j = 0, common = 0;
  while (i < po.size() && j < qo.size()) {
    const auto& a = p.encoding(po[i]);
    const auto& b = q.encoding(qo[j]);
    if (a < b) {
      ++i;
    } else if (b < a) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return std::max(p.size(), q.size()) - common;
}

std::string multiset_key(const PointCloud& cloud) {
  std::string key;
  for (auto idx : cloud.sorted_order()) {
    if (!key.empty()) key.push_back(';');
    key += cloud.encoding(idx);
  }
  return key;
}

std::vector<double> mean_point(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyInputError("mean of an empty cloud");
  // Summed in encoding order so the result does not depend on point order.
  std::vector<double> mean(cloud.dim(), 0.0);
  for (auto idx : cloud.sorted_order()) {
    const auto& p = cloud.point(idx);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += p[j];
  }
  for (auto& v : mean) v /= static_cast<double>(cloud.size());
  return mean;
}

}  // namespace pointcert
