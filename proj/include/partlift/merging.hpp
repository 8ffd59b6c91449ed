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

#ifndef PARTLIFT_MERGING_HPP_
#define PARTLIFT_MERGING_HPP_

#include <optional>
#include <span>
#include <vector>

#include "partlift/extension.hpp"
#include "partlift/geometry.hpp"

namespace partlift {

inline constexpr double kDefaultMergeThreshold = 0.3;

struct Part3D {
  PointIndexSet points;
  int part_id = 0;
  std::optional<int> label;  // row of the text prompt
  double confidence = 0.0;
};

// Fuses the groups of all runs into pairwise-disjoint parts.
//
// Groups are visited largest first (stable, so equal sizes keep input
// order). Each one is folded into the first accumulated set it overlaps
// with IoU > threshold, or starts a new set. The accumulated sets are then
// emitted in order, each new one taking its points away from every part
// emitted before it, so finer sets keep contested points. Parts left empty
// are dropped and the survivors numbered from 0.
std::vector<Part3D> merge_groups(std::span<const Group3D> groups,
                                 double threshold = kDefaultMergeThreshold);

}  // namespace partlift

#endif  // PARTLIFT_MERGING_HPP_
