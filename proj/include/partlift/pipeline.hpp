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

// End-to-end orchestration: normalize, render every view, grow groups from
// each start view, merge them into parts, and label the parts.

#ifndef PARTLIFT_PIPELINE_HPP_
#define PARTLIFT_PIPELINE_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "partlift/backends.hpp"
#include "partlift/extension.hpp"
#include "partlift/labeling.hpp"
#include "partlift/merging.hpp"
#include "partlift/multiview.hpp"

namespace partlift {

struct PipelineConfig {
  int views = kDefaultViewCount;
  int resolution = kDefaultResolution;
  int splat_radius = kDefaultSplatRadius;
  std::size_t fps_count = 256;
  std::size_t sve_fps_count = 8;
  double merge_threshold = kDefaultMergeThreshold;
  bool extend = true;
  bool use_cnvp = true;
  VoteMode vote_mode = VoteMode::kBoth;
  bool skip_failed_views = false;
  std::uint64_t seed = 0;
  int jobs = 1;

  ExtensionConfig extension() const;
  LabelingConfig labeling() const;
};

struct PreparedObject {
  ColoredPointCloud cloud;  // normalized
  NormalizationRecord normalization;
  std::vector<Viewpoint> viewpoints;
  std::vector<RenderProduct> renders;  // same order as viewpoints
};

PreparedObject prepare(const ColoredPointCloud& cloud,
                       const PipelineConfig& config);

// Groups from every start viewpoint, runs in ascending start id.
std::vector<Group3D> collect_groups(const PreparedObject& object,
                                    Segmenter& segmenter,
                                    const PipelineConfig& config,
                                    ExtensionStats* stats = nullptr);

std::vector<Part3D> segment_parts(const PreparedObject& object,
                                  Segmenter& segmenter,
                                  const PipelineConfig& config);

LabelingResult label_parts(const PreparedObject& object,
                           std::span<const Part3D> parts, Detector& detector,
                           const TextPrompt& prompt,
                           const PipelineConfig& config);

struct Backends {
  std::shared_ptr<Segmenter> segmenter;
  std::shared_ptr<Detector> detector;
};

// "oracle", "noisy:key=value,..." or "remote:http://host:port". Noisy keys:
// erosion, dilation, drop, merge (segmenter) and mislabel, jitter, box_drop
// (detector). Oracle and noisy backends need ground truth.
Backends make_backends(const std::string& selector, const GroundTruth* gt,
                       std::uint64_t seed);

}  // namespace partlift

#endif  // PARTLIFT_PIPELINE_HPP_
