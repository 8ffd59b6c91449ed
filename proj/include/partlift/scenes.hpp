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

// Procedural multi-part objects with per-point ground truth. Parts are
// surface samples of simple primitives, roughly uniform in density.

#ifndef PARTLIFT_SCENES_HPP_
#define PARTLIFT_SCENES_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "partlift/backends.hpp"
#include "partlift/geometry.hpp"

namespace partlift {

enum class ColorScheme { kByInstance, kByClass, kUniform };

struct SceneSpec {
  std::string template_name = "mug";  // mug | table | kettle | stapler | lamp
  std::size_t total_points = 20000;
  // Per-instance counts in template order; overrides total_points when set.
  std::vector<std::size_t> part_points;
  ColorScheme colors = ColorScheme::kByInstance;
  std::uint64_t seed = 0;
  // Roll, pitch, yaw in degrees, applied about the object's centroid.
  std::optional<std::array<double, 3>> rotation_deg;
};

struct Scene {
  ColoredPointCloud cloud;
  GroundTruth gt;
};

const std::vector<std::string>& scene_templates();

// Throws InputError for an unknown template, fewer than 1000 points, or an
// instance that fails to show at least 50 points in at least 4 of the 20
// canonical views.
Scene generate_scene(const SceneSpec& spec);

}  // namespace partlift

#endif  // PARTLIFT_SCENES_HPP_
