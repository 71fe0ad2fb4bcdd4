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
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pointcert {

/// Largest coordinate magnitude accepted at ingestion.
inline constexpr double kMaxAbsCoordinate = 9999.999999;

enum class AttackType { Addition, Deletion, Modification, Perturbation };

inline constexpr std::array<AttackType, 4> kAllAttackTypes = {
    AttackType::Addition, AttackType::Deletion, AttackType::Modification,
    AttackType::Perturbation};

/// Number of sub-point clouds one perturbed point can touch: 1 for addition
/// and deletion, 2 for modification and perturbation.
constexpr int impact_factor(AttackType type) {
  return (type == AttackType::Addition || type == AttackType::Deletion) ? 1 : 2;
}

std::string_view to_string(AttackType type);

/// Accepts "add", "delete", "modify", "perturb" and the full enum names
/// (case-insensitive). Throws ConfigError otherwise.
AttackType parse_attack_type(std::string_view text);

/// One o-dimensional point; the first three coordinates are spatial.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  bool operator==(const Point&) const = default;

 private:
  std::vector<double> coords_;
};

/// Signed fixed-point text with exactly six fractional digits, e.g. "+0.100000".
/// Rounds half-to-even on the exact binary value and never depends on locale.
/// A value that rounds to zero is always "+0.000000".
std::string format_fixed6(double value);

/// Coordinates formatted by format_fixed6 and joined with '|'.
/// Throws EncodingError for NaN or infinite coordinates.
std::string canonical_encode(const Point& p);

/// Ingestion check: finite coordinates within +-kMaxAbsCoordinate, dim >= 3.
void validate_ingest(const Point& p);

/// A finite set of points of uniform dimension, keyed by canonical encoding.
///
/// Points keep their insertion order; a second point with an encoding that is
/// already present is dropped. Values are immutable after construction.
class PointCloud {
 public:
  PointCloud() = default;

  /// Throws DimensionError on mixed dimensions and EncodingError on
  /// non-finite coordinates. Duplicates are dropped silently; use dedupe()
  /// when the count matters.
  explicit PointCloud(std::vector<Point> points);
  PointCloud(std::initializer_list<Point> points)
      : PointCloud(std::vector<Point>(points)) {}

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  /// Zero for an empty cloud.
  std::size_t dim() const { return dim_; }

  const std::vector<Point>& points() const { return points_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  const std::string& encoding(std::size_t i) const { return encodings_[i]; }
  const std::vector<std::string>& encodings() const { return encodings_; }

  /// Indices of points in ascending canonical-encoding order.
  const std::vector<std::uint32_t>& sorted_order() const { return order_; }

  std::optional<std::size_t> find(std::string_view encoding) const;
  bool contains(std::string_view encoding) const {
    return find(encoding).has_value();
  }
  bool contains(const Point& p) const { return contains(canonical_encode(p)); }

  /// Copy with `p` inserted (no-op if already present).
  PointCloud with(const Point& p) const;
  /// Copy with every point of `extra` inserted.
  PointCloud with(const PointCloud& extra) const;
  /// Copy without the points at `indices` (indices into points()).
  PointCloud without(std::span<const std::size_t> indices) const;
  /// The points at `indices`, in the given order. Indices must be distinct.
  PointCloud subset(std::span<const std::size_t> indices) const;

  /// Set equality by canonical encoding.
  friend bool operator==(const PointCloud& a, const PointCloud& b);

 private:
  struct Prepared {};
  PointCloud(Prepared, std::size_t dim, std::vector<Point> points,
             std::vector<std::string> encodings);
  void build_order();

  std::size_t dim_ = 0;
  std::vector<Point> points_;
  std::vector<std::string> encodings_;
  std::vector<std::uint32_t> order_;

  friend struct DedupeResult dedupe(std::vector<Point> points);
};

struct DedupeResult {
  PointCloud cloud;
  std::size_t duplicates_dropped = 0;
};

/// Set semantics for file input: keeps the first occurrence of each encoding.
DedupeResult dedupe(std::vector<Point> points);

/// max(|P|, |Q|) - |P intersect Q|, the minimum number of added, deleted or
/// modified points turning P into Q. Throws DimensionError when both clouds are
/// non-empty with different dimensions.
std::size_t perturbation_size(const PointCloud& p, const PointCloud& q);

/// Order-insensitive key of a cloud: its sorted encodings joined with ';'.
std::string multiset_key(const PointCloud& cloud);

/// Coordinate-wise mean. Throws EmptyInputError for an empty cloud.
std::vector<double> mean_point(const PointCloud& cloud);

}  // namespace pointcert
