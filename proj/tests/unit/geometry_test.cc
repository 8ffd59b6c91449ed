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

#include "partlift/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "partlift/errors.hpp"

namespace partlift {
namespace {

ColoredPointCloud cloud_of(const std::vector<Vec3>& pts) {
  ColoredPointCloud c;
  c.positions = pts;
  c.colors.assign(pts.size(), Rgb{10, 20, 30});
  return c;
}

ColoredPointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(g(rng) + 5, g(rng), g(rng) - 2);
  return cloud_of(pts);
}

// Greedy rule spelled out directly: O(n^2) per step.
std::vector<PointIndex> brute_fps(const ColoredPointCloud& c,
                                  const std::vector<PointIndex>& dom,
                                  std::size_t n) {
  Vec3 mean = Vec3::Zero();
  for (auto i : dom) mean += c.positions[i];
  mean /= static_cast<double>(dom.size());
  PointIndex seed = dom[0];
  for (auto i : dom) {
    if ((c.positions[i] - mean).norm() < (c.positions[seed] - mean).norm()) seed = i;
  }
  std::vector<PointIndex> chosen{seed};
  while (chosen.size() < std::min(n, dom.size())) {
    PointIndex best = 0;
    double best_d = -1;
    for (auto i : dom) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      double d = std::numeric_limits<double>::infinity();
      for (auto j : chosen) d = std::min(d, (c.positions[i] - c.positions[j]).squaredNorm());
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    chosen.push_back(best);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

TEST(PointIndexSetTest, SetAlgebra) {
  const PointIndexSet a{5, 1, 3, 3};
  const PointIndexSet b{3, 4, 5};
  EXPECT_EQ(a.indices(), (std::vector<PointIndex>{1, 3, 5}));
  EXPECT_EQ(a.unite(b).indices(), (std::vector<PointIndex>{1, 3, 4, 5}));
  EXPECT_EQ(a.intersect(b).indices(), (std::vector<PointIndex>{3, 5}));
  EXPECT_EQ(a.subtract(b).indices(), (std::vector<PointIndex>{1}));
  EXPECT_EQ(a.intersection_size(b), 2u);
  EXPECT_TRUE(a.contains(3));
  EXPECT_FALSE(a.contains(4));
  EXPECT_EQ(PointIndexSet::all(3).indices(), (std::vector<PointIndex>{0, 1, 2}));
}

TEST(SetIouTest, Examples) {
  EXPECT_DOUBLE_EQ(set_iou({1, 2}, {1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(set_iou({1, 2}, {3}), 0.0);
  EXPECT_DOUBLE_EQ(set_iou({1, 2, 3}, {2, 3, 4}), 0.5);
  EXPECT_DOUBLE_EQ(set_iou({}, {}), 0.0);
}

TEST(SetIouTest, SymmetricOnRandomSets) {
  std::mt19937 rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<PointIndex> x, y;
    for (PointIndex i = 0; i < 60; ++i) {
      if (rng() % 3 == 0) x.push_back(i);
      if (rng() % 2 == 0) y.push_back(i);
    }
    const auto a = PointIndexSet::from_sorted(x);
    const auto b = PointIndexSet::from_sorted(y);
    EXPECT_DOUBLE_EQ(set_iou(a, b), set_iou(b, a));
    std::size_t inter = 0;
    for (auto i : x) inter += std::count(y.begin(), y.end(), i);
    const double uni = static_cast<double>(x.size() + y.size() - inter);
    EXPECT_DOUBLE_EQ(set_iou(a, b), uni == 0 ? 0.0 : inter / uni);
  }
}

TEST(NormalizeTest, SymmetricPair) {
  const auto [out, rec] = normalize_to_unit_sphere(cloud_of({{0, 0, 0}, {2, 0, 0}}));
  EXPECT_TRUE(out.positions[0].isApprox(Vec3(-1, 0, 0)));
  EXPECT_TRUE(out.positions[1].isApprox(Vec3(1, 0, 0)));
  EXPECT_TRUE(rec.centroid.isApprox(Vec3(1, 0, 0)));
  EXPECT_DOUBLE_EQ(rec.scale, 1.0);
}

TEST(NormalizeTest, AlreadyNormalizedIsUntouched) {
  const auto input = cloud_of({{-1, 0, 0}, {1, 0, 0}, {0, 0.5, 0}, {0, -0.5, 0}});
  const auto [out, rec] = normalize_to_unit_sphere(input);
  EXPECT_EQ(out.positions, input.positions);
  EXPECT_TRUE(rec.is_identity());
}

TEST(NormalizeTest, RandomCloudMaxNormAndInverse) {
  const auto input = random_cloud(100, 11);
  const auto [out, rec] = normalize_to_unit_sphere(input);
  double max_norm = 0;
  for (const Vec3& p : out.positions) max_norm = std::max(max_norm, p.norm());
  EXPECT_NEAR(max_norm, 1.0, 1e-9);
  for (std::size_t i = 0; i < input.size(); ++i) {
    EXPECT_LE((rec.restore(out.positions[i]) - input.positions[i]).norm(),
              1e-6 * std::max(1.0, input.positions[i].norm()));
  }
}

TEST(NormalizeTest, SinglePointGoesToOrigin) {
  const auto [out, rec] = normalize_to_unit_sphere(cloud_of({{3, 4, 5}}));
  EXPECT_TRUE(out.positions[0].isZero());
}

TEST(ClosestToCentroidTest, TieTakesLowerIndex) {
  const auto c = cloud_of({{-1, 0, 0}, {1, 0, 0}});
  EXPECT_EQ(closest_to_centroid(c, {0, 1}), 0u);
  EXPECT_EQ(closest_to_centroid(c, {1}), 1u);
}

TEST(ClosestToCentroidTest, MatchesExhaustiveScan) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto c = random_cloud(5, s);
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : c.positions) mean += p;
    mean /= 5.0;
    PointIndex best = 0;
    for (PointIndex i = 1; i < 5; ++i) {
      if ((c.positions[i] - mean).norm() < (c.positions[best] - mean).norm()) best = i;
    }
    EXPECT_EQ(closest_to_centroid(c, PointIndexSet::all(5)), best);
  }
}

TEST(ClosestToCentroidTest, EmptyThrows) {
  EXPECT_THROW(closest_to_centroid(cloud_of({{0, 0, 0}}), {}), InputError);
}

TEST(FpsTest, CollinearExample) {
  const auto c = cloud_of({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {10, 0, 0}});
  EXPECT_EQ(fps(c, PointIndexSet::all(4), 1).indices(), (std::vector<PointIndex>{2}));
  EXPECT_EQ(fps(c, PointIndexSet::all(4), 2).indices(), (std::vector<PointIndex>{2, 3}));
  EXPECT_EQ(fps(c, PointIndexSet::all(4), 3).indices(), (std::vector<PointIndex>{0, 2, 3}));
  EXPECT_EQ(fps(c, PointIndexSet::all(4), 9), PointIndexSet::all(4));
}

TEST(FpsTest, MatchesBruteForce) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto c = random_cloud(80, 100 + s);
    std::vector<PointIndex> dom;
    for (PointIndex i = 0; i < 80; i += 1 + s % 3) dom.push_back(i);
    const auto got = fps(c, PointIndexSet::from_sorted(dom), 12);
    EXPECT_EQ(got.indices(), brute_fps(c, dom, 12)) << "seed " << s;
  }
}

TEST(FpsTest, DuplicatesAreNotPickedTwice) {
  const auto c = cloud_of({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  EXPECT_EQ(fps(c, PointIndexSet::all(3), 2).size(), 2u);
}

TEST(FpsTest, Errors) {
  const auto c = cloud_of({{0, 0, 0}});
  EXPECT_THROW(fps(c, {}, 3), InputError);
  EXPECT_THROW(fps(c, {0}, 0), InputError);
}

TEST(RotationTest, EulerComposition) {
  const Mat3 r = rotation_from_euler_deg(0, 0, 90);
  EXPECT_TRUE((r * Vec3(1, 0, 0)).isApprox(Vec3(0, 1, 0)));
  const Mat3 rx = rotation_from_euler_deg(90, 0, 0);
  EXPECT_TRUE((rx * Vec3(0, 1, 0)).isApprox(Vec3(0, 0, 1)));
  const Mat3 full = rotation_from_euler_deg(30, -40, 75);
  EXPECT_TRUE((full * full.transpose()).isApprox(Mat3::Identity()));
  EXPECT_NEAR(full.determinant(), 1.0, 1e-12);
  const Mat3 expect = rotation_from_euler_deg(0, 0, 75) *
                      rotation_from_euler_deg(0, -40, 0) *
                      rotation_from_euler_deg(30, 0, 0);
  EXPECT_TRUE(full.isApprox(expect));
}

TEST(CloudTest, ValidateRejectsMismatch) {
  ColoredPointCloud c = cloud_of({{0, 0, 0}});
  c.colors.clear();
  EXPECT_THROW(c.validate(), InputError);
  EXPECT_THROW(ColoredPointCloud{}.validate(), InputError);
}

}  // namespace
}  // namespace partlift
