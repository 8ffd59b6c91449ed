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

#include "partlift/extension.hpp"

#include <algorithm>
#include <optional>

#include <spdlog/spdlog.h>

#include "partlift/errors.hpp"
#include "partlift/parallel.hpp"

namespace partlift {
namespace {

const RenderProduct& find_render(std::span<const RenderProduct> renders,
                                 int viewpoint_id) {
  for (const RenderProduct& rp : renders) {
    if (rp.viewpoint_id() == viewpoint_id) return rp;
  }
  throw InputError("no render for viewpoint " + std::to_string(viewpoint_id));
}

CallKey auto_key(int start) {
  return CallKey{(std::uint64_t{1} << 63) | static_cast<std::uint64_t>(start)};
}

CallKey extend_key(int start, std::size_t group) {
  return CallKey{(static_cast<std::uint64_t>(start) << 32) | group};
}

// bip_backward over the mask's cells, walking the runs directly.
PointIndexSet lift(const Mask2D& mask, const RenderProduct& view) {
  if (mask.width() != view.width() || mask.height() != view.height()) {
    throw InputError("mask size does not match the render");
  }
  const auto& map = view.index_map();
  std::vector<bool> seen(view.num_points(), false);
  std::vector<PointIndex> out;
  const auto& runs = mask.runs();
  for (std::size_t r = 0; r + 1 < runs.size(); r += 2) {
    const std::size_t end = std::size_t{runs[r]} + runs[r + 1];
    for (std::size_t c = runs[r]; c < end; ++c) {
      const PointIndex idx = map[c];
      if (idx == RenderProduct::kEmpty || seen[idx]) continue;
      seen[idx] = true;
      out.push_back(idx);
    }
  }
  return PointIndexSet::from_unsorted(std::move(out));
}

}  // namespace

std::vector<Group3D> guided_auto_segment(const ColoredPointCloud& cloud,
                                         const RenderProduct& start_view,
                                         Segmenter& segmenter,
                                         const ExtensionConfig& config) {
  const PointIndexSet& visible = start_view.visible();
  if (visible.empty()) {
    spdlog::info("view {} shows no points; no groups", start_view.viewpoint_id());
    return {};
  }
  const PointIndexSet keypoints = fps(cloud, visible, config.fps_count);
  const std::vector<Pixel> seeds = keypoint_pixels(keypoints, start_view);
  const std::vector<Mask2D> masks = segmenter.segment_auto(
      start_view, seeds, auto_key(start_view.viewpoint_id()));

  std::vector<Group3D> groups;
  for (const Mask2D& mask : masks) {
    PointIndexSet points = lift(mask, start_view);
    if (points.size() < config.min_group_size) continue;
    groups.push_back(Group3D{std::move(points), start_view.viewpoint_id()});
  }
  return groups;
}

Group3D sve(const ColoredPointCloud& cloud, const Group3D& group,
            const RenderProduct& view, Segmenter& segmenter,
            const ExtensionConfig& config, CallKey key) {
  const PointIndexSet seen = group.points.intersect(view.visible());
  if (seen.size() < std::max<std::size_t>(config.min_visible, 1)) return group;

  std::vector<PointIndex> keys = fps(cloud, seen, config.sve_fps_count).indices();
  keys.push_back(closest_to_centroid(cloud, seen));
  const std::vector<Pixel> prompts =
      keypoint_pixels(PointIndexSet::from_unsorted(std::move(keys)), view);

  const std::vector<Mask2D> candidates =
      segmenter.segment_prompted(view, prompts, key);
  std::optional<PointIndexSet> best;
  double best_iou = -1.0;
  for (const Mask2D& mask : candidates) {
    PointIndexSet lifted = lift(mask, view);
    const double iou = set_iou(lifted, seen);
    if (iou > best_iou) {
      best_iou = iou;
      best = std::move(lifted);
    }
  }
  if (!best) return group;
  return Group3D{group.points.unite(*best), group.origin_start_viewpoint};
}

std::vector<Group3D> self_extension(const ColoredPointCloud& cloud,
                                    std::span<const int> sequence,
                                    std::span<const RenderProduct> renders,
                                    Segmenter& segmenter,
                                    const ExtensionConfig& config,
                                    ExtensionStats* stats) {
  if (sequence.empty()) return {};
  const int start = sequence.front();
  std::vector<Group3D> groups =
      guided_auto_segment(cloud, find_render(renders, start), segmenter, config);
  ExtensionStats local;
  local.groups_found = groups.size();
  if (config.extend) {
    for (std::size_t step = 1; step < sequence.size(); ++step) {
      const RenderProduct& view = find_render(renders, sequence[step]);
      std::vector<Group3D> next(groups.size());
      bool failed = false;
      try {
        parallel_for(groups.size(), config.jobs, [&](std::size_t g) {
          next[g] = sve(cloud, groups[g], view, segmenter, config,
                        extend_key(start, g));
        });
      } catch (const BackendError& e) {
        if (!config.skip_failed_views || !e.retryable()) throw;
        spdlog::warn("skipping view {}: {}", view.viewpoint_id(), e.what());
        ++local.views_skipped;
        failed = true;
      }
      if (failed) continue;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        if (next[g].points.size() != groups[g].points.size()) {
          ++local.extensions_applied;
        }
      }
      groups = std::move(next);
    }
  }
  if (stats) {
    stats->groups_found += local.groups_found;
    stats->extensions_applied += local.extensions_applied;
    stats->views_skipped += local.views_skipped;
  }
  return groups;
}

}  // namespace partlift
