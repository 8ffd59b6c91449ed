/* Copyright 2026 The Partlift Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "partlift/io.hpp"

#include <filesystem>

#include <gtest/gtest.h>
#include <json.hpp>

#include "partlift/errors.hpp"
#include "partlift/scenes.hpp"

namespace partlift {
namespace {

TEST(PlyTest, BinaryRoundTrip) {
  SceneSpec spec;
  spec.total_points = 1500;
  const Scene s = generate_scene(spec);
  const ColoredPointCloud back = parse_ply(write_ply(s.cloud));
  EXPECT_EQ(back.positions, s.cloud.positions);
  EXPECT_EQ(back.colors, s.cloud.colors);
}

TEST(PlyTest, AsciiWithAndWithoutColor) {
  const std::string colored =
      "ply\nformat ascii 1.0\ncomment hi\nelement vertex 2\n"
      "property float x\nproperty float y\nproperty float z\n"
      "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      "end_header\n0 1 2 10 20 30\n-1.5 0.25 3 255 0 7\n";
  const ColoredPointCloud c = parse_ply(colored);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.positions[1], Vec3(-1.5, 0.25, 3));
  EXPECT_EQ(c.colors[1], (Rgb{255, 0, 7}));

  const std::string plain =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\n"
      "property double y\nproperty double z\nend_header\n1 2 3\n";
  const ColoredPointCloud p = parse_ply(plain);
  EXPECT_EQ(p.colors[0], (Rgb{128, 128, 128}));
}

TEST(PlyTest, RejectsMalformed) {
  EXPECT_THROW(parse_ply("not a ply"), InputError);
  EXPECT_THROW(parse_ply("ply\nformat binary_big_endian 1.0\nelement vertex 1\n"
                         "property float x\nproperty float y\nproperty float z\nend_header\n"),
               InputError);
  EXPECT_THROW(parse_ply("ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\n"
                         "property float y\nproperty float z\nend_header\n1 2 3\n"),
               InputError);
}

TEST(GroundTruthIoTest, RoundTripAndValidation) {
  const GroundTruth gt{{"body", "lid"}, {0, 1, -1}, {4, 9, -1}, "mug"};
  const GroundTruth back = parse_ground_truth(write_ground_truth(gt));
  EXPECT_EQ(back.class_names, gt.class_names);
  EXPECT_EQ(back.semantic, gt.semantic);
  EXPECT_EQ(back.instance, gt.instance);
  EXPECT_EQ(back.category, "mug");
  EXPECT_THROW(parse_ground_truth("{\"classes\": []}"), InputError);
  EXPECT_THROW(parse_ground_truth("[1,2"), InputError);
}

TEST(PartsIoTest, UnlabeledAndLabeled) {
  std::vector<Part3D> parts(2);
  parts[0].points = {1, 2, 5};
  parts[0].part_id = 0;
  parts[1].points = {3};
  parts[1].part_id = 1;
  const PartsFile plain = parse_parts(write_parts(6, parts));
  EXPECT_EQ(plain.num_points, 6u);
  EXPECT_FALSE(plain.labeled);
  EXPECT_EQ(plain.parts[0].points, parts[0].points);

  parts[0].label = 1;
  parts[0].confidence = 0.5;
  const std::vector<std::string> names{"body", "lid"};
  const std::string text = write_parts(6, parts, names, true);
  const auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc["parts"][0]["label"], "lid");
  EXPECT_TRUE(doc["parts"][1]["label"].is_null());
  const PartsFile labeled = parse_parts(text);
  EXPECT_TRUE(labeled.labeled);
  ASSERT_TRUE(labeled.parts[0].label.has_value());
  EXPECT_EQ(labeled.label_names[*labeled.parts[0].label], "lid");
  EXPECT_DOUBLE_EQ(labeled.parts[0].confidence, 0.5);
  EXPECT_FALSE(labeled.parts[1].label.has_value());

  EXPECT_THROW(parse_parts(R"({"num_points": 2, "parts": [{"part_id": 0, "indices": [5]}]})"),
               InputError);
}

TEST(FileIoTest, MissingFileThrows) {
  EXPECT_THROW(read_file("/nonexistent/partlift/file"), InputError);
  const auto path = std::filesystem::temp_directory_path() / "partlift_io_test.bin";
  write_file(path, std::string("a\0b", 3));
  EXPECT_EQ(read_file(path), std::string("a\0b", 3));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace partlift
