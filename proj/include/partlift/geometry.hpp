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

// Point-cloud value types and the deterministic geometric primitives the
// rest of the pipeline is built on. Every tie in this file is broken by the
// lowest point index so that pipeline runs are reproducible bit for bit.

#ifndef PARTLIFT_GEOMETRY_HPP_
#define PARTLIFT_GEOMETRY_HPP_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace partlift {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using PointIndex = std::uint32_t;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct ColoredPointCloud {
  std::vector<Vec3> positions;
  std::vector<Rgb> colors;

  std::size_t size() const { return positions.size(); }

  // Throws InputError unless positions and colors have equal nonzero length.
  void validate() const;
};

// Sorted, duplicate-free list of point indices.
class PointIndexSet {
 public:
  PointIndexSet() = default;
  PointIndexSet(std::initializer_list<PointIndex> indices);

  // Sorts and deduplicates.
  static PointIndexSet from_unsorted(std::vector<PointIndex> indices);
  // Caller guarantees strict ascending order.
  static PointIndexSet from_sorted(std::vector<PointIndex> indices);
  // {0, 1, ..., n-1}
  static PointIndexSet all(std::size_t n);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(PointIndex i) const;
  PointIndex operator[](std::size_t k) const { return indices_[k]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  const std::vector<PointIndex>& indices() const { return indices_; }

  PointIndexSet unite(const PointIndexSet& other) const;
  PointIndexSet intersect(const PointIndexSet& other) const;
  PointIndexSet subtract(const PointIndexSet& other) const;
  std::size_t intersection_size(const PointIndexSet& other) const;

  friend bool operator==(const PointIndexSet&, const PointIndexSet&) = default;

 private:
  std::vector<PointIndex> indices_;
};

// |a ∩ b| / |a ∪ b|, and 0 when both are empty.
double set_iou(const PointIndexSet& a, const PointIndexSet& b);

// Maps normalized coordinates back to the input frame:
// original = normalized * scale + centroid.
struct NormalizationRecord {
  Vec3 centroid = Vec3::Zero();
  double scale = 1.0;

  bool is_identity() const { return scale == 1.0 && centroid.isZero(0.0); }
  Vec3 restore(const Vec3& normalized) const {
    return normalized * scale + centroid;
  }
};

// Moves the centroid to the origin and scales the farthest point to norm 1.
// A cloud whose points all coincide is translated to the origin only.
std::pair<ColoredPointCloud, NormalizationRecord> normalize_to_unit_sphere(
    const ColoredPointCloud& cloud);

// Member of `subset` nearest to the subset's arithmetic mean.
PointIndex closest_to_centroid(const ColoredPointCloud& cloud,
                               const PointIndexSet& subset);

// Farthest point sampling over `subset`, seeded at closest_to_centroid.
// Returns min(n, |subset|) indices.
PointIndexSet fps(const ColoredPointCloud& cloud, const PointIndexSet& subset,
                  std::size_t n);

// Intrinsic rotation R = Rz(yaw) * Ry(pitch) * Rx(roll), all in degrees.
Mat3 rotation_from_euler_deg(double roll, double pitch, double yaw);

ColoredPointCloud rotate(const ColoredPointCloud& cloud, const Mat3& rotation);

}  // namespace partlift

#endif  // PARTLIFT_GEOMETRY_HPP_
