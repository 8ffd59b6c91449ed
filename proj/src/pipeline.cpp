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

#include "partlift/pipeline.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "partlift/errors.hpp"
#include "partlift/parallel.hpp"

namespace partlift {
namespace {

class StageTimer {
 public:
  explicit StageTimer(const char* stage)
      : stage_(stage), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start_)
                        .count();
    spdlog::info("{}: {} ms", stage_, ms);
  }

 private:
  const char* stage_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

ExtensionConfig PipelineConfig::extension() const {
  ExtensionConfig c;
  c.fps_count = fps_count;
  c.sve_fps_count = sve_fps_count;
  c.extend = extend;
  c.skip_failed_views = skip_failed_views;
  c.jobs = 1;  // runs are the unit of parallelism
  return c;
}

LabelingConfig PipelineConfig::labeling() const {
  LabelingConfig c;
  c.use_cnvp = use_cnvp;
  c.mode = vote_mode;
  c.skip_failed_views = skip_failed_views;
  c.jobs = jobs;
  return c;
}

PreparedObject prepare(const ColoredPointCloud& cloud,
                       const PipelineConfig& config) {
  StageTimer timer("render");
  PreparedObject obj;
  auto [normalized, record] = normalize_to_unit_sphere(cloud);
  obj.cloud = std::move(normalized);
  obj.normalization = record;
  obj.viewpoints = place_viewpoints(config.views);
  obj.renders = render_all(obj.cloud, obj.viewpoints, config.resolution,
                           config.splat_radius, config.jobs);
  return obj;
}

std::vector<Group3D> collect_groups(const PreparedObject& object,
                                    Segmenter& segmenter,
                                    const PipelineConfig& config,
                                    ExtensionStats* stats) {
  StageTimer timer("self-extension");
  const ViewGraph graph = build_view_graph(object.viewpoints);
  std::vector<int> starts;
  for (const Viewpoint& vp : object.viewpoints) {
    if (vp.is_start) starts.push_back(vp.id);
  }
  const ExtensionConfig ext = config.extension();
  std::vector<std::vector<Group3D>> runs(starts.size());
  std::vector<ExtensionStats> run_stats(starts.size());
  parallel_for(starts.size(), config.jobs, [&](std::size_t k) {
    const std::vector<int> seq = extension_sequence(graph, starts[k]);
    runs[k] = self_extension(object.cloud, seq, object.renders, segmenter, ext,
                             &run_stats[k]);
  });

  std::vector<Group3D> groups;
  ExtensionStats total;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    total.groups_found += run_stats[k].groups_found;
    total.extensions_applied += run_stats[k].extensions_applied;
    total.views_skipped += run_stats[k].views_skipped;
    for (Group3D& g : runs[k]) groups.push_back(std::move(g));
  }
  spdlog::info("{} runs: {} groups found, {} extensions applied, {} views skipped",
               starts.size(), total.groups_found, total.extensions_applied,
               total.views_skipped);
  if (stats) *stats = total;
  return groups;
}

std::vector<Part3D> segment_parts(const PreparedObject& object,
                                  Segmenter& segmenter,
                                  const PipelineConfig& config) {
  const std::vector<Group3D> groups = collect_groups(object, segmenter, config);
  StageTimer timer("merge");
  std::vector<Part3D> parts = merge_groups(groups, config.merge_threshold);
  spdlog::info("merged {} groups into {} parts", groups.size(), parts.size());
  return parts;
}

LabelingResult label_parts(const PreparedObject& object,
                           std::span<const Part3D> parts, Detector& detector,
                           const TextPrompt& prompt,
                           const PipelineConfig& config) {
  StageTimer timer("labeling");
  LabelingResult result = multi_model_labeling(parts, object.renders, detector,
                                               prompt, config.labeling());
  spdlog::info("{} boxes, {} discarded by 2D/3D checking, {} views skipped",
               result.boxes, result.discarded, result.views_skipped);
  return result;
}

namespace {

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw InputError("noisy backend: bad value for " + key + ": " + value);
  }
}

}  // namespace

Backends make_backends(const std::string& selector, const GroundTruth* gt,
                       std::uint64_t seed) {
  Backends b;
  if (selector.rfind("remote:", 0) == 0) {
    auto remote = std::make_shared<RemoteBackend>(selector.substr(7));
    b.segmenter = remote;
    b.detector = remote;
    return b;
  }
  if (!gt) throw InputError("backend '" + selector + "' needs ground truth");
  if (selector == "oracle") {
    b.segmenter = std::make_shared<OracleSegmenter>(*gt);
    b.detector = std::make_shared<OracleDetector>(*gt);
    return b;
  }
  if (selector.rfind("noisy", 0) != 0) {
    throw InputError("unknown backend: " + selector);
  }
  SegmenterNoise seg;
  DetectorNoise det;
  std::string params = selector.size() > 6 ? selector.substr(6) : "";
  std::size_t pos = 0;
  while (pos < params.size()) {
    std::size_t comma = params.find(',', pos);
    if (comma == std::string::npos) comma = params.size();
    const std::string item = params.substr(pos, comma - pos);
    pos = comma + 1;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("noisy backend: expected key=value");
    const std::string key = item.substr(0, eq);
    const double v = parse_number(key, item.substr(eq + 1));
    if (key == "erosion") {
      seg.erosion = static_cast<int>(v);
    } else if (key == "dilation") {
      seg.dilation = static_cast<int>(v);
    } else if (key == "drop") {
      seg.drop_rate = v;
    } else if (key == "merge") {
      seg.merge_rate = v;
    } else if (key == "mislabel") {
      det.mislabel_rate = v;
    } else if (key == "jitter") {
      det.jitter = static_cast<int>(v);
    } else if (key == "box_drop") {
      det.drop_rate = v;
    } else {
      throw InputError("noisy backend: unknown parameter " + key);
    }
  }
  b.segmenter = std::make_shared<NoisySegmenter>(*gt, seg, seed);
  b.detector = std::make_shared<NoisyDetector>(*gt, det, seed);
  return b;
}

}  // namespace partlift
