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

#include "partlift/multiview.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include <Eigen/Geometry>

#include "partlift/errors.hpp"
#include "partlift/parallel.hpp"

namespace partlift {
namespace {

constexpr double kDeg = M_PI / 180.0;

struct Angles {
  double elevation;
  double azimuth;
  bool start;
};

// 20-view layout; starred rows are the start viewpoints.
constexpr Angles kLayout20[] = {
    {35, -35, true},  {35, 10, false},  {35, 55, true},   {35, 100, false},
    {35, 145, true},  {35, 190, false}, {35, 235, true},  {35, 280, false},
    {-10, -35, false}, {-10, 55, false}, {-10, 145, false}, {-10, 235, false},
    {-55, -35, true}, {-55, 10, false}, {-55, 55, true},  {-55, 100, false},
    {-55, 145, true}, {-55, 190, false}, {-55, 235, true}, {-55, 280, false},
};

constexpr Angles kLayout4[] = {
    {35, -35, true}, {35, 145, true}, {-55, -35, true}, {-55, 145, true}};

// Absolute angular difference on the circle, in [0, 180].
double azimuth_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

}  // namespace

std::vector<Viewpoint> place_viewpoints(int count, double distance) {
  if (count < 1) throw InputError("viewpoint count must be at least 1");
  std::vector<Angles> angles;
  if (count == 20) {
    angles.assign(std::begin(kLayout20), std::end(kLayout20));
  } else if (count == 8) {
    for (const Angles& a : kLayout20) {
      if (a.start) angles.push_back(a);
    }
  } else if (count == 4) {
    angles.assign(std::begin(kLayout4), std::end(kLayout4));
  } else {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      double azimuth = std::fmod(i * golden / kDeg, 360.0);
      if (azimuth >= 180.0) azimuth -= 360.0;
      angles.push_back({std::asin(z) / kDeg, azimuth, i % 2 == 0});
    }
  }

  std::vector<Viewpoint> out;
  out.reserve(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    out.push_back(Viewpoint{static_cast<int>(i) + 1, angles[i].elevation,
                            angles[i].azimuth, distance, angles[i].start});
  }
  return out;
}

Camera Camera::look_at_origin(const Viewpoint& vp) {
  const double e = vp.elevation_deg * kDeg;
  const double a = vp.azimuth_deg * kDeg;
  Camera cam;
  cam.position = vp.distance * Vec3(std::cos(e) * std::cos(a),
                                    std::cos(e) * std::sin(a), std::sin(e));
  cam.forward = (-cam.position).normalized();
  Vec3 world_up = Vec3::UnitZ();
  if (cam.forward.cross(world_up).norm() < 1e-9) world_up = Vec3::UnitY();
  cam.right = cam.forward.cross(world_up).normalized();
  cam.up = cam.right.cross(cam.forward);
  // Field of view chosen so that the unit ball exactly fills the frame.
  const double half = std::asin(std::min(1.0, 1.0 / vp.distance));
  cam.tan_half_fov = std::tan(half);
  return cam;
}

Camera::Projection Camera::project(const Vec3& p) const {
  const Vec3 v = p - position;
  const double depth = v.dot(forward);
  return {v.dot(right) / (depth * tan_half_fov),
          v.dot(up) / (depth * tan_half_fov), depth};
}

RenderProduct RenderProduct::from_index_map(int viewpoint_id, int width,
                                            int height,
                                            std::vector<PointIndex> index_map,
                                            const ColoredPointCloud& cloud,
                                            std::vector<std::int64_t> centers) {
  const std::size_t cells = static_cast<std::size_t>(width) * height;
  if (width <= 0 || height <= 0 || index_map.size() != cells) {
    throw InputError("index map does not match raster dimensions");
  }
  const std::size_t n = cloud.size();
  if (!centers.empty() && centers.size() != n) {
    throw InputError("projected centers do not match the cloud");
  }

  RenderProduct rp;
  rp.viewpoint_id_ = viewpoint_id;
  rp.width_ = width;
  rp.height_ = height;
  rp.image_.assign(cells, Rgb{255, 255, 255});
  rp.offsets_.assign(n + 1, 0);

  for (std::size_t c = 0; c < cells; ++c) {
    const PointIndex idx = index_map[c];
    if (idx == kEmpty) continue;
    if (idx >= n) throw InputError("index map refers to a missing point");
    rp.image_[c] = cloud.colors[idx];
    ++rp.offsets_[idx + 1];
  }
  for (std::size_t i = 0; i < n; ++i) rp.offsets_[i + 1] += rp.offsets_[i];
  rp.owned_.resize(rp.offsets_[n]);
  {
    std::vector<std::uint32_t> fill(rp.offsets_.begin(), rp.offsets_.end() - 1);
    for (std::size_t c = 0; c < cells; ++c) {
      const PointIndex idx = index_map[c];
      if (idx != kEmpty) rp.owned_[fill[idx]++] = static_cast<std::uint32_t>(c);
    }
  }

  std::vector<PointIndex> visible;
  rp.keypoint_.assign(n, kNoPixel);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t begin = rp.offsets_[i];
    const std::uint32_t end = rp.offsets_[i + 1];
    if (begin == end) continue;
    visible.push_back(static_cast<PointIndex>(i));
    std::uint32_t key = rp.owned_[begin];
    if (!centers.empty() && centers[i] >= 0) {
      const auto center = static_cast<std::size_t>(centers[i]);
      const long cx = static_cast<long>(center % width);
      const long cy = static_cast<long>(center / width);
      long best = -1;
      for (std::uint32_t k = begin; k < end; ++k) {
        const long px = rp.owned_[k] % width;
        const long py = rp.owned_[k] / width;
        const long d = (px - cx) * (px - cx) + (py - cy) * (py - cy);
        if (best < 0 || d < best) {
          best = d;
          key = rp.owned_[k];
        }
      }
    }
    rp.keypoint_[i] = key;
  }
  rp.visible_ = PointIndexSet::from_sorted(std::move(visible));
  rp.index_map_ = std::move(index_map);
  return rp;
}

std::optional<Pixel> RenderProduct::keypoint_pixel(PointIndex point) const {
  if (point >= keypoint_.size() || keypoint_[point] == kNoPixel) {
    return std::nullopt;
  }
  return pixel(keypoint_[point]);
}

RenderProduct render(const ColoredPointCloud& cloud, const Viewpoint& vp,
                     int resolution, int splat_radius) {
  cloud.validate();
  if (resolution < 1) throw InputError("resolution must be positive");
  if (splat_radius < 0) throw InputError("splat radius must be non-negative");
  const int w = resolution;
  const int h = resolution;
  const Camera cam = Camera::look_at_origin(vp);

  std::vector<std::pair<int, int>> disc;
  const double reach = (splat_radius + 0.5) * (splat_radius + 0.5);
  for (int dy = -splat_radius; dy <= splat_radius; ++dy) {
    for (int dx = -splat_radius; dx <= splat_radius; ++dx) {
      if (dx * dx + dy * dy <= reach) disc.emplace_back(dx, dy);
    }
  }

  const std::size_t cells = static_cast<std::size_t>(w) * h;
  std::vector<float> depth(cells, std::numeric_limits<float>::infinity());
  std::vector<PointIndex> index_map(cells, RenderProduct::kEmpty);
  std::vector<std::int64_t> centers(cloud.size(), -1);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Camera::Projection proj = cam.project(cloud.positions[i]);
    if (!(proj.depth > 1e-6)) continue;
    const int cx = static_cast<int>(std::floor((proj.ndc_x + 1.0) * 0.5 * w));
    const int cy = static_cast<int>(std::floor((1.0 - proj.ndc_y) * 0.5 * h));
    if (cx >= 0 && cy >= 0 && cx < w && cy < h) {
      centers[i] = static_cast<std::int64_t>(cy) * w + cx;
    }
    const float z = static_cast<float>(proj.depth);
    for (const auto& [dx, dy] : disc) {
      const int x = cx + dx;
      const int y = cy + dy;
      if (x < 0 || y < 0 || x >= w || y >= h) continue;
      const std::size_t c = static_cast<std::size_t>(y) * w + x;
      // Points arrive in index order, so strict < keeps the lower index on
      // equal depth.
      if (z < depth[c]) {
        depth[c] = z;
        index_map[c] = static_cast<PointIndex>(i);
      }
    }
  }
  return RenderProduct::from_index_map(vp.id, w, h, std::move(index_map), cloud,
                                       std::move(centers));
}

std::vector<RenderProduct> render_all(const ColoredPointCloud& cloud,
                                      std::span<const Viewpoint> viewpoints,
                                      int resolution, int splat_radius,
                                      int jobs) {
  std::vector<std::optional<RenderProduct>> slots(viewpoints.size());
  parallel_for(viewpoints.size(), jobs, [&](std::size_t i) {
    slots[i] = render(cloud, viewpoints[i], resolution, splat_radius);
  });
  std::vector<RenderProduct> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<Pixel> bip_forward(const PointIndexSet& points,
                               const RenderProduct& rp) {
  std::vector<std::uint32_t> linear;
  for (PointIndex i : points) {
    if (i >= rp.num_points()) continue;
    const auto owned = rp.pixels_of(i);
    linear.insert(linear.end(), owned.begin(), owned.end());
  }
  std::sort(linear.begin(), linear.end());
  std::vector<Pixel> out;
  out.reserve(linear.size());
  for (std::uint32_t c : linear) out.push_back(rp.pixel(c));
  return out;
}

PointIndexSet bip_backward(std::span<const Pixel> pixels,
                           const RenderProduct& rp) {
  // Dedupe with a scratch mark per point; a point usually owns several of
  // the pixels.
  std::vector<bool> seen(rp.num_points(), false);
  std::vector<PointIndex> out;
  for (const Pixel& p : pixels) {
    if (!rp.in_bounds(p)) throw InputError("pixel outside raster");
    const PointIndex idx = rp.index_at(p);
    if (idx == RenderProduct::kEmpty || seen[idx]) continue;
    seen[idx] = true;
    out.push_back(idx);
  }
  return PointIndexSet::from_unsorted(std::move(out));
}

PointIndexSet visible_subset(const RenderProduct& rp) { return rp.visible(); }

std::vector<Pixel> keypoint_pixels(const PointIndexSet& points,
                                   const RenderProduct& rp) {
  std::vector<Pixel> out;
  out.reserve(points.size());
  for (PointIndex i : points) {
    if (auto p = rp.keypoint_pixel(i)) out.push_back(*p);
  }
  return out;
}

ViewGraph::ViewGraph(std::vector<int> nodes,
                     std::vector<std::pair<int, int>> edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  adjacency_.resize(nodes_.size());
  for (auto [a, b] : edges) {
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!contains(a) || !contains(b)) {
      throw InputError("view graph edge refers to an unknown viewpoint");
    }
    edges_.emplace_back(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto [a, b] : edges_) {
    adjacency_[position(a)].push_back(b);
    adjacency_[position(b)].push_back(a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

std::size_t ViewGraph::position(int id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it == nodes_.end() || *it != id) {
    throw InputError("viewpoint " + std::to_string(id) + " not in view graph");
  }
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool ViewGraph::contains(int id) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), id);
}

const std::vector<int>& ViewGraph::neighbors(int id) const {
  return adjacency_[position(id)];
}

bool ViewGraph::adjacent(int a, int b) const {
  const auto& adj = neighbors(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

ViewGraph build_view_graph(std::span<const Viewpoint> viewpoints) {
  std::vector<int> nodes;
  std::map<double, std::vector<const Viewpoint*>> rings;
  for (const Viewpoint& vp : viewpoints) {
    nodes.push_back(vp.id);
    rings[vp.elevation_deg].push_back(&vp);
  }

  std::vector<std::pair<int, int>> edges;
  for (auto& [elevation, ring] : rings) {
    std::sort(ring.begin(), ring.end(), [](const Viewpoint* a, const Viewpoint* b) {
      const double za = std::fmod(a->azimuth_deg + 720.0, 360.0);
      const double zb = std::fmod(b->azimuth_deg + 720.0, 360.0);
      return za != zb ? za < zb : a->id < b->id;
    });
    for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
      edges.emplace_back(ring[k]->id, ring[k + 1]->id);
    }
    if (ring.size() > 2) edges.emplace_back(ring.back()->id, ring.front()->id);
  }

  auto link_nearest = [&edges](const std::vector<const Viewpoint*>& from,
                               const std::vector<const Viewpoint*>& to) {
    for (const Viewpoint* a : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Viewpoint* b : to) {
        best = std::min(best, azimuth_gap(a->azimuth_deg, b->azimuth_deg));
      }
      for (const Viewpoint* b : to) {
        if (azimuth_gap(a->azimuth_deg, b->azimuth_deg) <= best + 1e-9) {
          edges.emplace_back(a->id, b->id);
        }
      }
    }
  };
  for (auto it = rings.begin(); it != rings.end(); ++it) {
    auto next = std::next(it);
    if (next == rings.end()) break;
    link_nearest(it->second, next->second);
    link_nearest(next->second, it->second);
  }
  return ViewGraph(std::move(nodes), std::move(edges));
}

std::vector<int> extension_sequence(const ViewGraph& graph, int start) {
  if (!graph.contains(start)) {
    throw InputError("start viewpoint " + std::to_string(start) +
                     " not in view graph");
  }
  std::vector<int> order{start};
  std::vector<int> seen{start};
  std::deque<int> queue{start};
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u : graph.neighbors(v)) {
      if (std::find(seen.begin(), seen.end(), u) != seen.end()) continue;
      seen.push_back(u);
      order.push_back(u);
      queue.push_back(u);
    }
  }
  if (order.size() != graph.nodes().size()) {
    throw InputError("unreachable viewpoints");
  }
  return order;
}

}  // namespace partlift
