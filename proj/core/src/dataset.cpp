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


#include "pointcert/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pointcert/errors.hpp"
#include "pointcert/rng.hpp"

namespace pointcert {

namespace fs = std::filesystem;
using nlohmann::json;

CloudFormat parse_cloud_format(std::string_view text) {
  if (text == "xyz") return CloudFormat::Xyz;
  if (text == "csv") return CloudFormat::Csv;
  throw ConfigError("unknown cloud format '" + std::string(text) + "'");
}

CloudFormat format_for_path(const fs::path& path) {
  return path.extension() == ".csv" ? CloudFormat::Csv : CloudFormat::Xyz;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::string_view origin, std::size_t line,
                       const std::string& what) {
  throw FormatError(std::string(origin) + ":" + std::to_string(line) + ": " +
                    what);
}

double parse_number(std::string_view field, std::string_view origin,
                    std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    fail(origin, line, "not a number: '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view row,
                                           CloudFormat format) {
  std::vector<std::string_view> out;
  if (format == CloudFormat::Csv) {
    std::size_t start = 0;
    for (;;) {
      const auto comma = row.find(',', start);
      out.push_back(row.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }
  std::size_t i = 0;
  while (i < row.size()) {
    while (i < row.size() && is_space(row[i])) ++i;
    const std::size_t start = i;
    while (i < row.size() && !is_space(row[i])) ++i;
    if (i > start) out.push_back(row.substr(start, i - start));
  }
  return out;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

LoadedCloud parse_cloud(std::string_view text, CloudFormat format,
                        std::string_view origin) {
  std::vector<Point> points;
  std::size_t line_no = 0;
  bool header_seen = format != CloudFormat::Csv;
  std::size_t dim = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto row = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (row.empty() || row.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto fields = split_fields(row, format);
    if (fields.size() < 3) fail(origin, line_no, "a point needs at least 3 coordinates");
    if (dim == 0) dim = fields.size();
    if (fields.size() != dim) {
      fail(origin, line_no, "expected " + std::to_string(dim) +
                                " coordinates, got " + std::to_string(fields.size()));
    }
    std::vector<double> coords;
    coords.reserve(fields.size());
    for (auto f : fields) coords.push_back(parse_number(f, origin, line_no));
    Point p(std::move(coords));
    try {
      validate_ingest(p);
    } catch (const Error& e) {
      fail(origin, line_no, e.what());
    }
    points.push_back(std::move(p));
  }
  auto result = dedupe(std::move(points));
  return {std::move(result.cloud), result.duplicates_dropped};
}

LoadedCloud load_cloud(const fs::path& path, CloudFormat format) {
  return parse_cloud(read_file(path), format, path.string());
}

void save_cloud(const PointCloud& cloud, const fs::path& path,
                CloudFormat format) {
  const char sep = format == CloudFormat::Csv ? ',' : ' ';
  std::string text;
  if (format == CloudFormat::Csv) {
    static constexpr const char* kAxes[] = {"x", "y", "z"};
    for (std::size_t j = 0; j < cloud.dim(); ++j) {
      if (j > 0) text += ',';
      text += j < 3 ? std::string(kAxes[j]) : "f" + std::to_string(j - 3);
    }
    text += '\n';
  }
  for (const auto& p : cloud.points()) {
    for (std::size_t j = 0; j < p.dim(); ++j) {
      if (j > 0) text += sep;
      text += shortest(p[j]);
    }
    text += '\n';
  }
  write_file(path, text);
}

DatasetManifest load_manifest(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  DatasetManifest m;
  try {
    m.name = doc.value("name", std::string());
    m.classes = doc.at("classes").get<std::size_t>();
    if (m.classes == 0) throw FormatError(path.string() + ": classes must be >= 1");
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.path = base / e.at("path").get<std::string>();
      entry.label = Label(e.at("label").get<int>());
      entry.split = e.value("split", std::string("test"));
      if (entry.label.value < 1 ||
          static_cast<std::size_t>(entry.label.value) > m.classes) {
        throw FormatError(path.string() + ": label " +
                          std::to_string(entry.label.value) + " outside [1, " +
                          std::to_string(m.classes) + "]");
      }
      if (entry.split != "train" && entry.split != "test") {
        throw FormatError(path.string() + ": unknown split '" + entry.split + "'");
      }
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  const fs::path base = fs::absolute(path).parent_path();
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    const auto rel = fs::absolute(e.path).lexically_relative(base);
    entries.push_back(
        {{"path", rel.generic_string()}, {"label", e.label.value}, {"split", e.split}});
  }
  const json doc = {
      {"name", manifest.name}, {"classes", manifest.classes}, {"entries", entries}};
  write_file(path, doc.dump(2) + "\n");
}

std::vector<LabeledCloud> load_split(const DatasetManifest& manifest,
                                     std::string_view split) {
  std::vector<LabeledCloud> out;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    out.push_back({load_cloud(e.path, format_for_path(e.path)).cloud, e.label});
  }
  return out;
}

std::vector<double> synthetic_anchor(std::size_t label, std::size_t classes) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(label - 1) /
                       static_cast<double>(classes);
  return {0.6 * std::cos(angle), 0.6 * std::sin(angle), 0.0};
}

std::vector<LabeledCloud> synthetic_clouds(const SyntheticSpec& spec,
                                           std::string_view split) {
  if (spec.classes == 0 || spec.points == 0 || !(spec.spread > 0.0)) {
    throw ConfigError("synthetic data needs classes, points and spread > 0");
  }
  const bool train = split == "train";
  const std::size_t count =
      spec.classes * (train ? spec.train_per_class : spec.test_per_class);
  const std::uint64_t stream = derive_seed(spec.seed, train ? 0 : 1);
  std::vector<LabeledCloud> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t label = i % spec.classes + 1;
    const auto anchor = synthetic_anchor(label, spec.classes);
    Rng rng(derive_seed(stream, i));
    std::vector<Point> points;
    points.reserve(spec.points);
    // Redraw collisions so every cloud has exactly spec.points points.
    PointCloud cloud;
    for (int round = 0; cloud.size() < spec.points; ++round) {
      if (round == 64) throw ConfigError("spread too large for distinct points");
      points.clear();
      for (std::size_t k = cloud.size(); k < spec.points; ++k) {
        std::vector<double> c(3);
        for (std::size_t j = 0; j < 3; ++j) {
          c[j] = std::clamp(anchor[j] + spec.spread * rng.normal(), -1.0, 1.0);
        }
        points.emplace_back(std::move(c));
      }
      cloud = cloud.with(PointCloud(std::move(points)));
    }
    out.push_back({std::move(cloud), Label(static_cast<int>(label))});
  }
  return out;
}

DatasetManifest gen_synthetic(const SyntheticSpec& spec, const fs::path& outdir) {
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create " + outdir.string() + ": " + ec.message());
  DatasetManifest manifest;
  manifest.name = "synthetic-c" + std::to_string(spec.classes) + "-n" +
                  std::to_string(spec.points);
  manifest.classes = spec.classes;
  for (const char* split : {"train", "test"}) {
    const auto clouds = synthetic_clouds(spec, split);
    for (std::size_t i = 0; i < clouds.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_%05zu.xyz", split, i);
      const fs::path path = outdir / name;
      save_cloud(clouds[i].cloud, path, CloudFormat::Xyz);
      manifest.entries.push_back({path, clouds[i].label, split});
    }
  }
  save_manifest(manifest, outdir / "manifest.json");
  return manifest;
}

}  // namespace pointcert
