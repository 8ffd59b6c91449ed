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

#include <cmath>
#include <queue>
#include <random>
#include <set>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "partlift/errors.hpp"
#include "partlift/scenes.hpp"

namespace partlift {
namespace {

ColoredPointCloud cloud_of(const std::vector<Vec3>& pts) {
  ColoredPointCloud c;
  c.positions = pts;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    c.colors.push_back(Rgb{static_cast<std::uint8_t>(i), 7, 9});
  }
  return c;
}

// Camera built from a view matrix, written independently of the library.
struct RefCamera {
  Eigen::Matrix3d rows;  // right, up, -forward as rows
  Vec3 eye;
  double focal;  // 1 / tan(half fov)

  explicit RefCamera(double elev, double azim, double dist = 2.2) {
    const double e = elev * M_PI / 180, a = azim * M_PI / 180;
    eye = Vec3(dist * std::cos(e) * std::cos(a), dist * std::cos(e) * std::sin(a),
               dist * std::sin(e));
    const Vec3 back = eye.normalized();
    const Vec3 right = Vec3(0, 0, 1).cross(back).normalized();
    const Vec3 up = back.cross(right);
    rows.row(0) = right;
    rows.row(1) = up;
    rows.row(2) = back;
    focal = std::sqrt(dist * dist - 1.0);  // cot(asin(1/d))
  }
  // (column, row, depth) at resolution n
  std::tuple<int, int, double> project(const Vec3& p, int n) const {
    const Vec3 v = rows * (p - eye);
    const double depth = -v.z();
    const double sx = focal * v.x() / depth, sy = focal * v.y() / depth;
    return {static_cast<int>(std::floor((sx + 1) / 2 * n)),
            static_cast<int>(std::floor((1 - sy) / 2 * n)), depth};
  }
};

TEST(ViewpointTest, CanonicalTable) {
  const auto vps = place_viewpoints(20);
  const double table[20][2] = {
      {35, -35}, {35, 10},   {35, 55},   {35, 100},  {35, 145},
      {35, 190}, {35, 235},  {35, 280},  {-10, -35}, {-10, 55},
      {-10, 145}, {-10, 235}, {-55, -35}, {-55, 10},  {-55, 55},
      {-55, 100}, {-55, 145}, {-55, 190}, {-55, 235}, {-55, 280}};
  const std::set<int> starts{1, 3, 5, 7, 13, 15, 17, 19};
  ASSERT_EQ(vps.size(), 20u);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(vps[i].id, i + 1);
    EXPECT_EQ(vps[i].elevation_deg, table[i][0]);
    EXPECT_EQ(vps[i].azimuth_deg, table[i][1]);
    EXPECT_EQ(vps[i].distance, 2.2);
    EXPECT_EQ(vps[i].is_start, starts.count(i + 1) == 1);
  }
}

TEST(ViewpointTest, ReducedCounts) {
  const auto eight = place_viewpoints(8);
  ASSERT_EQ(eight.size(), 8u);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(eight[i].id, i + 1);
    EXPECT_TRUE(eight[i].is_start);
    EXPECT_TRUE(eight[i].elevation_deg == 35 || eight[i].elevation_deg == -55);
  }
  const auto four = place_viewpoints(4);
  ASSERT_EQ(four.size(), 4u);
  int starts = 0;
  for (const auto& v : four) starts += v.is_start;
  EXPECT_GE(starts, 1);
  EXPECT_THROW(place_viewpoints(0), InputError);
  const auto odd = place_viewpoints(13);
  EXPECT_EQ(odd.size(), 13u);
  EXPECT_EQ(odd.back().id, 13);
}

TEST(RenderTest, SinglePointAtOrigin) {
  const auto rp = render(cloud_of({{0, 0, 0}}), place_viewpoints(20)[0], 800, 1);
  EXPECT_EQ(rp.width(), 800);
  EXPECT_EQ(rp.height(), 800);
  EXPECT_EQ(rp.index_at({400, 400}), 0u);
  std::size_t filled = 0;
  for (auto v : rp.index_map()) filled += v != RenderProduct::kEmpty;
  EXPECT_EQ(filled, 9u);
  EXPECT_EQ(rp.pixels_of(0).size(), 9u);
  // The exact center is a pixel corner; rounding picks one of its four pixels.
  const Pixel kp = *rp.keypoint_pixel(0);
  EXPECT_TRUE(kp.x >= 399 && kp.x <= 400 && kp.y >= 399 && kp.y <= 400);
  EXPECT_EQ(rp.visible(), PointIndexSet{0});
}

TEST(RenderTest, NearerPointOccludes) {
  const Viewpoint vp = place_viewpoints(20)[0];
  const Camera cam = Camera::look_at_origin(vp);
  // Both on one camera ray that crosses a pixel interior. Index 0 is the
  // farther one so the depth test, not the tie rule, decides.
  const Vec3 q = 0.0123 * cam.right + 0.0071 * cam.up;
  const Vec3 dir = q - cam.position;
  const auto c = cloud_of({cam.position + 1.2 * dir, cam.position + 0.8 * dir});
  const auto rp = render(c, vp, 200, 1);
  EXPECT_EQ(bip_forward({1}, rp).size(), 9u);
  EXPECT_EQ(rp.visible(), PointIndexSet{1});
  EXPECT_TRUE(bip_forward({0}, rp).empty());
  EXPECT_TRUE(bip_backward(bip_forward({0}, rp), rp).empty());
}

TEST(RenderTest, CubeCornersLandOnProjectedCenters) {
  std::vector<Vec3> corners;
  for (int k = 0; k < 8; ++k) {
    corners.emplace_back(k & 1 ? 1 : -1, k & 2 ? 1 : -1, k & 4 ? 1 : -1);
    corners.back() /= std::sqrt(3.0);
  }
  const auto rp = render(cloud_of(corners), place_viewpoints(20)[0], 800, 1);
  const RefCamera ref(35, -35);
  for (PointIndex k = 0; k < 8; ++k) {
    const auto [x, y, d] = ref.project(corners[k], 800);
    ASSERT_TRUE(rp.in_bounds({x, y})) << k;
    EXPECT_EQ(rp.index_at({x, y}), k);
  }
}

TEST(RenderTest, MugMatchesReferenceRasterizer) {
  SceneSpec spec;
  const Scene scene = generate_scene(spec);
  const auto cloud = normalize_to_unit_sphere(scene.cloud).first;
  const int n = 800;
  const auto rp = render(cloud, place_viewpoints(20)[0], n, 1);

  const RefCamera ref(35, -35);
  std::vector<std::pair<float, PointIndex>> best(
      n * n, {std::numeric_limits<float>::infinity(), RenderProduct::kEmpty});
  for (PointIndex i = 0; i < cloud.size(); ++i) {
    const auto [cx, cy, d] = ref.project(cloud.positions[i], n);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = cx + dx, y = cy + dy;
        if (x < 0 || y < 0 || x >= n || y >= n) continue;
        const std::pair<float, PointIndex> cand{static_cast<float>(d), i};
        best[y * n + x] = std::min(best[y * n + x], cand);
      }
    }
  }
  std::size_t mismatches = 0;
  for (int c = 0; c < n * n; ++c) mismatches += best[c].second != rp.index_map()[c];
  // Float rounding in the two projection routes may flip a handful of
  // boundary pixels; anything beyond that is a real disagreement.
  EXPECT_LE(mismatches, 20u);
  for (int c = 0; c < n * n; ++c) {
    if (rp.index_map()[c] != RenderProduct::kEmpty) {
      ASSERT_EQ(rp.image()[c], cloud.colors[rp.index_map()[c]]);
    } else {
      ASSERT_EQ(rp.image()[c], (Rgb{255, 255, 255}));
    }
  }
}

TEST(RenderTest, Deterministic) {
  SceneSpec spec;
  spec.template_name = "lamp";
  const auto cloud = normalize_to_unit_sphere(generate_scene(spec).cloud).first;
  const auto vp = place_viewpoints(20)[4];
  const auto a = render(cloud, vp, 300, 2);
  const auto b = render(cloud, vp, 300, 2);
  EXPECT_EQ(a.index_map(), b.index_map());
  EXPECT_EQ(a.image(), b.image());
}

TEST(BipTest, ForwardAndBackwardExamples) {
  SceneSpec spec;
  const auto cloud = normalize_to_unit_sphere(generate_scene(spec).cloud).first;
  const auto rp = render(cloud, place_viewpoints(20)[2], 256, 1);

  const auto all = bip_forward(PointIndexSet::all(cloud.size()), rp);
  std::vector<Pixel> nonempty;
  for (std::size_t c = 0; c < rp.index_map().size(); ++c) {
    if (rp.index_map()[c] != RenderProduct::kEmpty) nonempty.push_back(rp.pixel(c));
  }
  EXPECT_EQ(all, nonempty);

  const PointIndex one = rp.visible()[rp.visible().size() / 2];
  std::vector<Pixel> won;
  for (std::size_t c = 0; c < rp.index_map().size(); ++c) {
    if (rp.index_map()[c] == one) won.push_back(rp.pixel(c));
  }
  EXPECT_EQ(bip_forward({one}, rp), won);

  EXPECT_TRUE(bip_backward({}, rp).empty());
  std::vector<Pixel> raster;
  for (int y = 0; y < rp.height(); ++y) {
    for (int x = 0; x < rp.width(); ++x) raster.push_back({x, y});
  }
  EXPECT_EQ(bip_backward(raster, rp), visible_subset(rp));
  EXPECT_EQ(visible_subset(rp), rp.visible());
  const std::vector<Pixel> bad{{256, 0}};
  EXPECT_THROW(bip_backward(bad, rp), InputError);
}

TEST(BipTest, RoundTripOnRandomSubsets) {
  SceneSpec spec;
  spec.template_name = "kettle";
  const auto cloud = normalize_to_unit_sphere(generate_scene(spec).cloud).first;
  std::mt19937 rng(5);
  for (const Viewpoint& vp : place_viewpoints(20)) {
    const auto rp = render(cloud, vp, 200, 1);
    std::vector<PointIndex> pick;
    for (PointIndex i = 0; i < cloud.size(); ++i) {
      if (rng() % 4 == 0) pick.push_back(i);
    }
    const auto x = PointIndexSet::from_sorted(pick);
    EXPECT_TRUE(bip_backward(bip_forward(x, rp), rp).subtract(x).empty());
    const auto vis = x.intersect(rp.visible());
    EXPECT_EQ(bip_backward(bip_forward(vis, rp), rp), vis);
  }
}

TEST(VisibleSubsetTest, SelfOccludingPair) {
  const auto c = cloud_of({{0, 0, 0}, {0, 0, 0}});
  EXPECT_EQ(visible_subset(render(c, place_viewpoints(20)[0], 64, 1)).size(), 1u);
}

TEST(ViewGraphTest, CanonicalAdjacency) {
  const ViewGraph g = build_view_graph(place_viewpoints(20));
  EXPECT_TRUE(g.adjacent(2, 1));
  EXPECT_TRUE(g.adjacent(2, 3));
  EXPECT_TRUE(g.adjacent(1, 8));  // ring wraps
  EXPECT_FALSE(g.adjacent(1, 13));  // rings that are not neighbors
  EXPECT_TRUE(g.adjacent(1, 9));
  EXPECT_TRUE(g.adjacent(9, 13));
}

std::set<int> reach(const ViewGraph& g, int start) {
  std::set<int> seen{start};
  std::queue<int> q;
  q.push(start);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (auto [a, b] : g.edges()) {
      for (int w : {a == v ? b : -1, b == v ? a : -1}) {
        if (w > 0 && seen.insert(w).second) q.push(w);
      }
    }
  }
  return seen;
}

TEST(ViewGraphTest, ConnectedForAllCounts) {
  for (int count : {20, 8, 4, 2, 3, 7, 30}) {
    const auto vps = place_viewpoints(count);
    const ViewGraph g = build_view_graph(vps);
    EXPECT_EQ(reach(g, 1).size(), vps.size()) << count;
  }
  EXPECT_EQ(build_view_graph(place_viewpoints(2)).edges().size(), 1u);
}

TEST(ExtensionSequenceTest, PathGraph) {
  const ViewGraph g({1, 2, 3}, {{1, 2}, {2, 3}});
  EXPECT_EQ(extension_sequence(g, 2), (std::vector<int>{2, 1, 3}));
  const ViewGraph one({4}, {});
  EXPECT_EQ(extension_sequence(one, 4), (std::vector<int>{4}));
  const ViewGraph split({1, 2, 3}, {{1, 2}});
  EXPECT_THROW(extension_sequence(split, 1), InputError);
}

TEST(ExtensionSequenceTest, CanonicalMatchesReferenceBfs) {
  const ViewGraph g = build_view_graph(place_viewpoints(20));
  for (int start : {1, 3, 5, 7, 13, 15, 17, 19}) {
    std::vector<int> order{start};
    std::set<int> seen{start};
    for (std::size_t head = 0; head < order.size(); ++head) {
      std::set<int> next;  // ascending ids
      for (auto [a, b] : g.edges()) {
        if (a == order[head]) next.insert(b);
        if (b == order[head]) next.insert(a);
      }
      for (int w : next) {
        if (seen.insert(w).second) order.push_back(w);
      }
    }
    EXPECT_EQ(extension_sequence(g, start), order);
  }
}

}  // namespace
}  // namespace partlift
