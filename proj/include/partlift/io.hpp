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

// On-disk formats used by the command-line tool.
//
//   cloud     PLY, ascii or binary_little_endian, vertex properties
//             x y z [red green blue]; written as binary doubles + uchars.
//   gt        {"classes": [...], "semantic": [...], "instance": [...],
//              "category": "..."}; -1 marks unannotated points.
//   parts     {"num_points": N, "parts": [{"part_id", "indices"}]}, with
//             "label" (class name or null) and "confidence" once labeled.

#ifndef PARTLIFT_IO_HPP_
#define PARTLIFT_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "partlift/backends.hpp"
#include "partlift/merging.hpp"

namespace partlift {

ColoredPointCloud parse_ply(std::string_view bytes);
std::string write_ply(const ColoredPointCloud& cloud);

GroundTruth parse_ground_truth(std::string_view text);
std::string write_ground_truth(const GroundTruth& gt);

struct PartsFile {
  std::size_t num_points = 0;
  std::vector<Part3D> parts;
  std::vector<std::string> label_names;  // indexed by Part3D::label
  bool labeled = false;
};

PartsFile parse_parts(std::string_view text);
// `label_names` is consulted only when `labeled` is set.
std::string write_parts(std::size_t num_points, std::span<const Part3D> parts,
                        std::span<const std::string> label_names = {},
                        bool labeled = false);

// Whole-file helpers; read_file throws InputError when the file cannot be
// opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace partlift

#endif  // PARTLIFT_IO_HPP_
