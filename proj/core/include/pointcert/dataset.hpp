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
#include <string>
#include <string_view>
#include <vector>

#include "pointcert/classifier.hpp"

namespace pointcert {

enum class CloudFormat { Xyz, Csv };

/// "xyz" or "csv".
CloudFormat parse_cloud_format(std::string_view text);
/// By extension: ".csv" is Csv, anything else Xyz.
CloudFormat format_for_path(const std::filesystem::path& path);

struct LoadedCloud {
  PointCloud cloud;
  std::size_t duplicates_dropped = 0;
};

/// xyz: one point per line, whitespace-separated numbers; blank lines and
/// lines starting with '#' are skipped. csv: a header row, then one point per
/// row. Duplicates are dropped and counted. Throws FormatError naming the line
/// and IoError when the file cannot be read.
LoadedCloud load_cloud(const std::filesystem::path& path, CloudFormat format);
LoadedCloud parse_cloud(std::string_view text, CloudFormat format,
                        std::string_view origin = "<memory>");

/// Writes the shortest round-trip representation of every coordinate, so a
/// reload gives identical canonical encodings.
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path,
                CloudFormat format);

struct ManifestEntry {
  std::filesystem::path path;  // absolute after load_manifest
  Label label;
  std::string split = "test";  // "train" or "test"
};

/// manifest.json:
///   {"name": "...", "classes": c,
///    "entries": [{"path": "cloud.xyz", "label": l, "split": "train"}, ...]}
/// Paths are relative to the manifest's directory.
struct DatasetManifest {
  std::string name;
  std::size_t classes = 0;
  std::vector<ManifestEntry> entries;
};

/// Throws FormatError for malformed JSON, a label outside [1, classes] or an
/// unknown split.
DatasetManifest load_manifest(const std::filesystem::path& path);
/// Entry paths are written relative to the manifest's directory.
void save_manifest(const DatasetManifest& manifest,
                   const std::filesystem::path& path);

/// Loads every entry of `split`, in manifest order.
std::vector<LabeledCloud> load_split(const DatasetManifest& manifest,
                                     std::string_view split);

/// Gaussian clusters around fixed anchors on a circle of radius 0.6 in the
/// xy-plane, clamped to [-1, 1]. Cloud i has label (i mod classes) + 1.
struct SyntheticSpec {
  std::size_t classes = 3;
  std::size_t train_per_class = 10;
  std::size_t test_per_class = 10;
  std::size_t points = 1024;
  double spread = 0.1;
  std::uint64_t seed = 0;
};

/// Anchor of class `label` (1-based).
std::vector<double> synthetic_anchor(std::size_t label, std::size_t classes);

/// The clouds of one split, generated in memory. Throws ConfigError for
/// zero classes or points, or a non-positive spread.
std::vector<LabeledCloud> synthetic_clouds(const SyntheticSpec& spec,
                                           std::string_view split);

/// Writes <split>_<index>.xyz files and manifest.json into `outdir`.
DatasetManifest gen_synthetic(const SyntheticSpec& spec,
                              const std::filesystem::path& outdir);

}  // namespace pointcert
