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

// Virtual cameras around a normalized cloud, the point rasterizer that
// produces the per-view image and point-index map, projection between point
// subsets and pixels through that map, and the viewpoint graph whose BFS
// orders define how groups are grown across views.

#ifndef PARTLIFT_MULTIVIEW_HPP_
#define PARTLIFT_MULTIVIEW_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "partlift/geometry.hpp"

namespace partlift {

inline constexpr double kDefaultCameraDistance = 2.2;
inline constexpr int kDefaultResolution = 800;
inline constexpr int kDefaultViewCount = 20;

struct Viewpoint {
  int id = 1;
  double elevation_deg = 0.0;
  double azimuth_deg = 0.0;
  double distance = kDefaultCameraDistance;
  bool is_start = false;
};

// count 20, 8 and 4 give the canonical layouts; any other positive count
// is spread over the sphere on a Fibonacci lattice with odd ids as starts.
std::vector<Viewpoint> place_viewpoints(int count = kDefaultViewCount,
                                        double distance = kDefaultCameraDistance);

// Pinhole camera looking at the origin, world +z up.
struct Camera {
  Vec3 position;
  Vec3 right;
  Vec3 up;
  Vec3 forward;
  double tan_half_fov = 0.0;

  static Camera look_at_origin(const Viewpoint& vp);

  // Normalized device coordinates in [-1, 1] on both axes for points inside
  // the frustum, and the distance along the viewing axis.
  struct Projection {
    double ndc_x;
    double ndc_y;
    double depth;
  };
  Projection project(const Vec3& p) const;
};

struct Pixel {
  int x = 0;  // column
  int y = 0;  // row
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// Rendered view: RGB raster plus the index of the point that won each pixel.
// Immutable once built; also carries the inverse map (pixels owned by each
// point) so that projecting a subset costs time proportional to the subset.
class RenderProduct {
 public:
  static constexpr PointIndex kEmpty = std::numeric_limits<PointIndex>::max();

  // `index_map` is row-major, width * height entries, kEmpty for no point.
  // `centers` optionally gives each point's projected pixel (row-major linear
  // offset, -1 when outside the raster); when omitted the keypoint pixel of a
  // point is the first pixel it owns.
  static RenderProduct from_index_map(int viewpoint_id, int width, int height,
                                      std::vector<PointIndex> index_map,
                                      const ColoredPointCloud& cloud,
                                      std::vector<std::int64_t> centers = {});

  int viewpoint_id() const { return viewpoint_id_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t num_points() const { return offsets_.size() - 1; }

  bool in_bounds(Pixel p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }
  std::size_t linear(Pixel p) const {
    return static_cast<std::size_t>(p.y) * width_ + p.x;
  }
  Pixel pixel(std::size_t linear) const {
    return {static_cast<int>(linear % width_), static_cast<int>(linear / width_)};
  }

  PointIndex index_at(Pixel p) const { return index_map_[linear(p)]; }
  Rgb color_at(Pixel p) const { return image_[linear(p)]; }
  const std::vector<PointIndex>& index_map() const { return index_map_; }
  const std::vector<Rgb>& image() const { return image_; }

  // Row-major linear offsets of the pixels won by `point`.
  std::span<const std::uint32_t> pixels_of(PointIndex point) const {
    return {owned_.data() + offsets_[point],
            owned_.data() + offsets_[point + 1]};
  }
  // The single pixel that stands for `point` when it is used as a prompt:
  // its projected center if it won that pixel, else the owned pixel nearest
  // to the center. Empty when the point is not visible.
  std::optional<Pixel> keypoint_pixel(PointIndex point) const;

  const PointIndexSet& visible() const { return visible_; }

 private:
  int viewpoint_id_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> image_;
  std::vector<PointIndex> index_map_;
  std::vector<std::uint32_t> offsets_;  // N + 1 prefix sums into owned_
  std::vector<std::uint32_t> owned_;
  std::vector<std::uint32_t> keypoint_;  // kNoPixel when invisible
  PointIndexSet visible_;

  static constexpr std::uint32_t kNoPixel =
      std::numeric_limits<std::uint32_t>::max();
};

inline constexpr int kDefaultSplatRadius = 1;

// Nearest-point z-buffer. Each point covers the pixels (dx, dy) around its
// projected pixel with dx² + dy² <= (radius + 0.5)²; radius 1 is a 3×3 block.
RenderProduct render(const ColoredPointCloud& cloud, const Viewpoint& vp,
                     int resolution = kDefaultResolution,
                     int splat_radius = kDefaultSplatRadius);

// Renders every viewpoint, using up to `jobs` threads. Output order follows
// `viewpoints`.
std::vector<RenderProduct> render_all(const ColoredPointCloud& cloud,
                                      std::span<const Viewpoint> viewpoints,
                                      int resolution = kDefaultResolution,
                                      int splat_radius = kDefaultSplatRadius,
                                      int jobs = 1);

// Pixels whose winning point belongs to `points`, in row-major order.
std::vector<Pixel> bip_forward(const PointIndexSet& points,
                               const RenderProduct& rp);

// Distinct points stored at `pixels`; empty cells are skipped.
PointIndexSet bip_backward(std::span<const Pixel> pixels,
                           const RenderProduct& rp);

PointIndexSet visible_subset(const RenderProduct& rp);

// One prompt pixel per visible member of `points` (see keypoint_pixel),
// ordered by point index.
std::vector<Pixel> keypoint_pixels(const PointIndexSet& points,
                                   const RenderProduct& rp);

class ViewGraph {
 public:
  ViewGraph(std::vector<int> nodes, std::vector<std::pair<int, int>> edges);

  const std::vector<int>& nodes() const { return nodes_; }
  // Each edge once, as (lower id, higher id), sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  // Ascending ids.
  const std::vector<int>& neighbors(int id) const;
  bool adjacent(int a, int b) const;
  bool contains(int id) const;

 private:
  std::vector<int> nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;  // indexed by position in nodes_
  std::size_t position(int id) const;
};

// Viewpoints sharing an elevation form a ring. Ring members link to their
// azimuth neighbours (wrapping), and each viewpoint links to the
// nearest-azimuth member(s) of the next ring up and down.
ViewGraph build_view_graph(std::span<const Viewpoint> viewpoints);

// Breadth-first order from `start`, expanding neighbours by ascending id.
std::vector<int> extension_sequence(const ViewGraph& graph, int start);

}  // namespace partlift

#endif  // PARTLIFT_MULTIVIEW_HPP_
