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

// Growing 3D groups from one start view across an extension sequence.
//
// A run begins with automatic 2D segmentation at the start view, prompted by
// farthest-point keypoints of the visible points, and lifts every mask to a
// 3D group through the index map. Each later view in the sequence then sees
// part of every group; that visible part is turned into prompt points, the
// returned mask is lifted back, and the group absorbs it. Groups never
// shrink.

#ifndef PARTLIFT_EXTENSION_HPP_
#define PARTLIFT_EXTENSION_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "partlift/backends.hpp"
#include "partlift/geometry.hpp"
#include "partlift/multiview.hpp"

namespace partlift {

struct Group3D {
  PointIndexSet points;
  int origin_start_viewpoint = 0;
};

struct ExtensionConfig {
  std::size_t fps_count = 256;     // keypoints for the start view
  std::size_t sve_fps_count = 8;   // keypoints per extension prompt, plus CC
  std::size_t min_group_size = 10;
  std::size_t min_visible = 3;     // smaller visible portions are ignored
  bool extend = true;              // false: start-view groups only
  bool skip_failed_views = false;  // retryable backend errors skip the view
  int jobs = 1;                    // concurrent groups within one step
};

struct ExtensionStats {
  std::size_t groups_found = 0;
  std::size_t extensions_applied = 0;  // SVE calls that added points
  std::size_t views_skipped = 0;
};

std::vector<Group3D> guided_auto_segment(const ColoredPointCloud& cloud,
                                         const RenderProduct& start_view,
                                         Segmenter& segmenter,
                                         const ExtensionConfig& config = {});

// Single-view extension of `group` using `view`.
Group3D sve(const ColoredPointCloud& cloud, const Group3D& group,
            const RenderProduct& view, Segmenter& segmenter,
            const ExtensionConfig& config = {}, CallKey key = {});

// One full run over `sequence`; `renders` must hold every viewpoint in it.
std::vector<Group3D> self_extension(const ColoredPointCloud& cloud,
                                    std::span<const int> sequence,
                                    std::span<const RenderProduct> renders,
                                    Segmenter& segmenter,
                                    const ExtensionConfig& config = {},
                                    ExtensionStats* stats = nullptr);

}  // namespace partlift

#endif  // PARTLIFT_EXTENSION_HPP_
