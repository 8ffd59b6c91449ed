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

// The two model roles the pipeline consumes: a promptable 2D segmenter and
// a text-grounded 2D detector. Implementations here are the ground-truth
// oracles, their seeded noisy variants, and an HTTP client for a model
// bridge. The pipeline talks only to the abstract interfaces.

#ifndef PARTLIFT_BACKENDS_HPP_
#define PARTLIFT_BACKENDS_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "partlift/mask.hpp"
#include "partlift/multiview.hpp"

namespace partlift {

// Per-point annotation. Instance and class ids are -1 for unannotated
// points.
struct GroundTruth {
  std::vector<std::string> class_names;
  std::vector<int> semantic;
  std::vector<int> instance;
  std::string category = "object";

  std::size_t size() const { return instance.size(); }
  // Throws InputError unless sizes match `num_points`, class ids are in
  // range and each instance carries a single class.
  void validate(std::size_t num_points) const;
  // Ascending distinct instance ids, -1 excluded.
  std::vector<int> instance_ids() const;
  int class_of_instance(int instance_id) const;
  PointIndexSet instance_points(int instance_id) const;
  PointIndexSet annotated_points() const;
};

struct TextPrompt {
  std::vector<std::string> class_names;

  // "lid,handle,spout" with surrounding whitespace trimmed. Throws
  // InputError when no name remains.
  static TextPrompt parse(const std::string& comma_separated);
  // Index of `name`, or -1.
  int index_of(const std::string& name) const;
};

// Inclusive pixel bounds.
struct DetectionBox {
  int viewpoint_id = 0;
  int class_index = 0;
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  double score = 0.0;
  friend bool operator==(const DetectionBox&, const DetectionBox&) = default;
};

// Identifies one backend call so that seeded noise does not depend on call
// order or thread scheduling.
struct CallKey {
  std::uint64_t ordinal = 0;
};

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  // Automatic mode over the whole view, guided by `seeds`.
  virtual std::vector<Mask2D> segment_auto(const RenderProduct& view,
                                           std::span<const Pixel> seeds,
                                           CallKey key) = 0;
  // Candidate masks for the region indicated by `prompts`, best first.
  // Callers choose among candidates; an empty list means no answer.
  virtual std::vector<Mask2D> segment_prompted(const RenderProduct& view,
                                               std::span<const Pixel> prompts,
                                               CallKey key) = 0;
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<DetectionBox> detect(const RenderProduct& view,
                                           const TextPrompt& prompt) = 0;
};

// Ideal segmenter: each mask is exactly the visible pixels of one annotated
// instance. A prompt selects the instance owning most prompt pixels (ties to
// the lower instance id).
class OracleSegmenter : public Segmenter {
 public:
  explicit OracleSegmenter(const GroundTruth& gt) : gt_(&gt) {}
  std::vector<Mask2D> segment_auto(const RenderProduct& view,
                                   std::span<const Pixel> seeds,
                                   CallKey key) override;
  std::vector<Mask2D> segment_prompted(const RenderProduct& view,
                                       std::span<const Pixel> prompts,
                                       CallKey key) override;

 private:
  const GroundTruth* gt_;
};

// Ideal detector: one box per visible instance whose class is prompted, the
// tight bound of its visible pixels, score 1.
class OracleDetector : public Detector {
 public:
  explicit OracleDetector(const GroundTruth& gt) : gt_(&gt) {}
  std::vector<DetectionBox> detect(const RenderProduct& view,
                                   const TextPrompt& prompt) override;

 private:
  const GroundTruth* gt_;
};

struct SegmenterNoise {
  int erosion = 0;          // pixels
  int dilation = 0;         // pixels
  double drop_rate = 0.0;   // probability a mask is withheld
  double merge_rate = 0.0;  // probability a mask is fused with another
};

struct DetectorNoise {
  double mislabel_rate = 0.0;  // box gets a uniformly drawn wrong class
  int jitter = 0;              // per-coordinate uniform shift, pixels
  double drop_rate = 0.0;
};

// Random engine for one call: a pure function of (seed, view, ordinal).
std::mt19937_64 call_rng(std::uint64_t seed, int viewpoint_id,
                         std::uint64_t ordinal);

class NoisySegmenter : public Segmenter {
 public:
  NoisySegmenter(const GroundTruth& gt, SegmenterNoise noise,
                 std::uint64_t seed)
      : oracle_(gt), noise_(noise), seed_(seed) {}
  std::vector<Mask2D> segment_auto(const RenderProduct& view,
                                   std::span<const Pixel> seeds,
                                   CallKey key) override;
  std::vector<Mask2D> segment_prompted(const RenderProduct& view,
                                       std::span<const Pixel> prompts,
                                       CallKey key) override;

 private:
  Mask2D perturb(const Mask2D& mask) const;

  OracleSegmenter oracle_;
  SegmenterNoise noise_;
  std::uint64_t seed_;
};

class NoisyDetector : public Detector {
 public:
  NoisyDetector(const GroundTruth& gt, DetectorNoise noise, std::uint64_t seed)
      : oracle_(gt), noise_(noise), seed_(seed) {}
  std::vector<DetectionBox> detect(const RenderProduct& view,
                                   const TextPrompt& prompt) override;

 private:
  OracleDetector oracle_;
  DetectorNoise noise_;
  std::uint64_t seed_;
};

struct RemoteOptions {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::seconds timeout{120};
};

// Client for the model bridge:
//   POST /v1/segment {image_png_b64, points, mode} -> {masks: [...]}
//   POST /v1/detect  {image_png_b64, classes}      -> {boxes: [...]}
// Transport failures and HTTP 503 are retried with exponential backoff;
// anything else non-200 fails immediately.
class RemoteBackend : public Segmenter, public Detector {
 public:
  explicit RemoteBackend(std::string base_url, RemoteOptions options = {});
  ~RemoteBackend() override;

  std::vector<Mask2D> segment_auto(const RenderProduct& view,
                                   std::span<const Pixel> seeds,
                                   CallKey key) override;
  std::vector<Mask2D> segment_prompted(const RenderProduct& view,
                                       std::span<const Pixel> prompts,
                                       CallKey key) override;
  std::vector<DetectionBox> detect(const RenderProduct& view,
                                   const TextPrompt& prompt) override;

 private:
  std::vector<Mask2D> segment(const RenderProduct& view,
                              std::span<const Pixel> points,
                              const char* mode);
  std::string post(const std::string& path, const std::string& body);

  struct Impl;
  std::unique_ptr<Impl> impl_;
  RemoteOptions options_;
};

// Request and response bodies of the bridge protocol, shared by the client
// and by test servers.
namespace wire {

std::string segment_request(const RenderProduct& view,
                            std::span<const Pixel> points,
                            const std::string& mode);
std::string detect_request(const RenderProduct& view,
                           const TextPrompt& prompt);
std::vector<Mask2D> parse_segment_response(const std::string& body,
                                           int viewpoint_id, int width,
                                           int height);
std::vector<DetectionBox> parse_detect_response(const std::string& body,
                                                int viewpoint_id, int width,
                                                int height,
                                                std::size_t class_count);
std::string segment_response(std::span<const Mask2D> masks);
std::string detect_response(std::span<const DetectionBox> boxes);

}  // namespace wire

}  // namespace partlift

#endif  // PARTLIFT_BACKENDS_HPP_
