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


#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pointcert/dataset.hpp"
#include "pointcert/errors.hpp"

namespace pointcert {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("pointcert_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ParseCloud, Xyz) {
  const auto r = parse_cloud("0 0 0\n# comment\n\n1 2 3\n-1.5\t2e-1 +3\n", CloudFormat::Xyz);
  EXPECT_EQ(r.cloud.size(), 3u);
  EXPECT_EQ(r.duplicates_dropped, 0u);
  EXPECT_TRUE(r.cloud.contains(Point({-1.5, 0.2, 3})));
}

TEST(ParseCloud, CsvWithHeaderAndFeatures) {
  const auto r = parse_cloud("x,y,z,r\n0,0,0,1\n1,1,1,0.5\r\n", CloudFormat::Csv);
  EXPECT_EQ(r.cloud.size(), 2u);
  EXPECT_EQ(r.cloud.dim(), 4u);
}

TEST(ParseCloud, DuplicatesCounted) {
  const auto r = parse_cloud("1 1 1\n1 1 1\n2 2 2\n", CloudFormat::Xyz);
  EXPECT_EQ(r.cloud.size(), 2u);
  EXPECT_EQ(r.duplicates_dropped, 1u);
}

TEST(ParseCloud, ErrorsNameTheLine) {
  try {
    parse_cloud("0 0 0\n1 2 x\n", CloudFormat::Xyz, "f.xyz");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("f.xyz:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_cloud("0 0\n", CloudFormat::Xyz), FormatError);
  EXPECT_THROW(parse_cloud("0 0 0\n0 0 0 0\n", CloudFormat::Xyz), FormatError);
  EXPECT_THROW(parse_cloud("0 0 nan\n", CloudFormat::Xyz), FormatError);
  EXPECT_THROW(parse_cloud("0 0 1e5\n", CloudFormat::Xyz), FormatError);
  EXPECT_THROW(load_cloud("/nonexistent/cloud.xyz", CloudFormat::Xyz), IoError);
}

TEST(SaveCloud, RoundTripPreservesEncodings) {
  TempDir dir;
  SyntheticSpec spec;
  spec.points = 200;
  spec.test_per_class = 1;
  const auto cloud = synthetic_clouds(spec, "test")[0].cloud;
  for (auto format : {CloudFormat::Xyz, CloudFormat::Csv}) {
    const auto path = dir.path() / (format == CloudFormat::Csv ? "c.csv" : "c.xyz");
    save_cloud(cloud, path, format);
    const auto back = load_cloud(path, format_for_path(path)).cloud;
    EXPECT_EQ(back.encodings(), cloud.encodings());
    EXPECT_EQ(back.points(), cloud.points());
  }
}

TEST(Manifest, RoundTripAndValidation) {
  TempDir dir;
  DatasetManifest m;
  m.name = "demo";
  m.classes = 2;
  m.entries.push_back({dir.path() / "a.xyz", Label(1), "train"});
  m.entries.push_back({dir.path() / "sub" / "b.xyz", Label(2), "test"});
  save_manifest(m, dir.path() / "manifest.json");
  EXPECT_NE(slurp(dir.path() / "manifest.json").find("\"sub/b.xyz\""), std::string::npos);
  const auto back = load_manifest(dir.path() / "manifest.json");
  EXPECT_EQ(back.name, "demo");
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[1].path, dir.path() / "sub" / "b.xyz");
  EXPECT_EQ(back.entries[1].label, Label(2));

  std::ofstream(dir.path() / "bad.json") << R"({"classes":2,"entries":[{"path":"a","label":3}]})";
  EXPECT_THROW(load_manifest(dir.path() / "bad.json"), FormatError);
  std::ofstream(dir.path() / "broken.json") << "{";
  EXPECT_THROW(load_manifest(dir.path() / "broken.json"), FormatError);
}

TEST(GenSynthetic, CountsAndDeterminism) {
  TempDir a, b;
  SyntheticSpec spec;
  spec.classes = 3;
  spec.train_per_class = 2;
  spec.test_per_class = 10;
  spec.points = 1024;
  spec.seed = 5;
  const auto ma = gen_synthetic(spec, a.path() / "d");
  gen_synthetic(spec, b.path() / "d");
  std::size_t tests = 0;
  for (const auto& e : ma.entries) tests += e.split == "test" ? 1 : 0;
  EXPECT_EQ(tests, 30u);
  EXPECT_EQ(ma.entries.size(), 36u);
  for (const auto& e : ma.entries) {
    const auto rel = e.path.filename();
    EXPECT_EQ(slurp(a.path() / "d" / rel), slurp(b.path() / "d" / rel));
  }
  EXPECT_EQ(slurp(a.path() / "d" / "manifest.json"), slurp(b.path() / "d" / "manifest.json"));
  const auto loaded = load_split(load_manifest(a.path() / "d" / "manifest.json"), "test");
  const auto memory = synthetic_clouds(spec, "test");
  ASSERT_EQ(loaded.size(), memory.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    EXPECT_EQ(loaded[i].cloud.size(), 1024u);
    EXPECT_EQ(loaded[i].cloud, memory[i].cloud);
    EXPECT_EQ(loaded[i].label, memory[i].label);
  }
}

TEST(GenSynthetic, CentroidIsPerfectOnTightClusters) {
  SyntheticSpec spec;
  spec.classes = 3;
  spec.train_per_class = 10;
  spec.test_per_class = 10;
  spec.points = 1024;
  spec.spread = 0.1;
  const auto f = fit_centroid(synthetic_clouds(spec, "train"), 3, FitMode::full_clouds());
  for (const auto& ex : synthetic_clouds(spec, "test")) {
    EXPECT_EQ(f->classify(ex.cloud), ex.label);
  }
}

TEST(GenSynthetic, ClampedAndLabelsInterleaved) {
  SyntheticSpec spec;
  spec.classes = 4;
  spec.points = 50;
  spec.spread = 2.0;
  spec.test_per_class = 2;
  const auto clouds = synthetic_clouds(spec, "test");
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    EXPECT_EQ(clouds[i].label, Label(static_cast<int>(i % 4 + 1)));
    for (const auto& p : clouds[i].cloud.points()) {
      for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_LE(std::abs(p[j]), 1.0);
      }
    }
  }
  EXPECT_THROW(synthetic_clouds({0, 1, 1, 10, 0.1, 0}, "test"), ConfigError);
}

}  // namespace
}  // namespace pointcert
