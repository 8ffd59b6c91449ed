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

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

#include <Eigen/Geometry>

#include "partlift/errors.hpp"

namespace partlift {

void ColoredPointCloud::validate() const {
  if (positions.empty()) throw InputError("point cloud is empty");
  if (positions.size() != colors.size()) {
    throw InputError("point cloud has " + std::to_string(positions.size()) +
                     " positions but " + std::to_string(colors.size()) +
                     " colors");
  }
}

PointIndexSet::PointIndexSet(std::initializer_list<PointIndex> indices)
    : PointIndexSet(from_unsorted(std::vector<PointIndex>(indices))) {}

PointIndexSet PointIndexSet::from_unsorted(std::vector<PointIndex> indices) {
  if (!std::is_sorted(indices.begin(), indices.end())) {
    std::sort(indices.begin(), indices.end());
  }
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return from_sorted(std::move(indices));
}

PointIndexSet PointIndexSet::from_sorted(std::vector<PointIndex> indices) {
  PointIndexSet s;
  s.indices_ = std::move(indices);
  return s;
}

PointIndexSet PointIndexSet::all(std::size_t n) {
  std::vector<PointIndex> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<PointIndex>(i);
  return from_sorted(std::move(v));
}

bool PointIndexSet::contains(PointIndex i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

PointIndexSet PointIndexSet::unite(const PointIndexSet& other) const {
  std::vector<PointIndex> out;
  out.reserve(indices_.size() + other.indices_.size());
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(out));
  return from_sorted(std::move(out));
}

PointIndexSet PointIndexSet::intersect(const PointIndexSet& other) const {
  std::vector<PointIndex> out;
  std::set_intersection(indices_.begin(), indices_.end(),
                        other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(out));
  return from_sorted(std::move(out));
}

PointIndexSet PointIndexSet::subtract(const PointIndexSet& other) const {
  std::vector<PointIndex> out;
  std::set_difference(indices_.begin(), indices_.end(), other.indices_.begin(),
                      other.indices_.end(), std::back_inserter(out));
  return from_sorted(std::move(out));
}

std::size_t PointIndexSet::intersection_size(const PointIndexSet& other) const {
  std::size_t count = 0;
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

double set_iou(const PointIndexSet& a, const PointIndexSet& b) {
  const std::size_t inter = a.intersection_size(b);
  const std::size_t uni = a.size() + b.size() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::pair<ColoredPointCloud, NormalizationRecord> normalize_to_unit_sphere(
    const ColoredPointCloud& cloud) {
  cloud.validate();
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : cloud.positions) centroid += p;
  centroid /= static_cast<double>(cloud.size());

  double max_norm = 0.0;
  for (const Vec3& p : cloud.positions) {
    max_norm = std::max(max_norm, (p - centroid).norm());
  }

  // Already normalized: hand back the input untouched so that repeated
  // normalization is exactly idempotent.
  if (centroid.norm() < 1e-12 && std::abs(max_norm - 1.0) < 1e-12) {
    return {cloud, NormalizationRecord{}};
  }

  NormalizationRecord record;
  record.centroid = centroid;
  record.scale = max_norm > 0.0 ? max_norm : 1.0;

  ColoredPointCloud out;
  out.colors = cloud.colors;
  out.positions.reserve(cloud.size());
  for (const Vec3& p : cloud.positions) {
    out.positions.push_back((p - centroid) / record.scale);
  }
  return {std::move(out), record};
}

PointIndex closest_to_centroid(const ColoredPointCloud& cloud,
                               const PointIndexSet& subset) {
  if (subset.empty()) throw InputError("empty sample domain");
  Vec3 centroid = Vec3::Zero();
  for (PointIndex i : subset) centroid += cloud.positions[i];
  centroid /= static_cast<double>(subset.size());

  PointIndex best = subset[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (PointIndex i : subset) {
    const double d = (cloud.positions[i] - centroid).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

PointIndexSet fps(const ColoredPointCloud& cloud, const PointIndexSet& subset,
                  std::size_t n) {
  if (subset.empty()) throw InputError("empty sample domain");
  if (n == 0) throw InputError("fps sample count must be at least 1");
  if (n >= subset.size()) return subset;

  const std::size_t m = subset.size();
  std::vector<double> xs(m), ys(m), zs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3& p = cloud.positions[subset[k]];
    xs[k] = p.x();
    ys[k] = p.y();
    zs[k] = p.z();
  }
  // Selected members get a negative distance so they are never re-picked.
  std::vector<double> min_d(m, std::numeric_limits<double>::infinity());
  std::vector<PointIndex> picked;
  picked.reserve(n);

  const PointIndex seed = closest_to_centroid(cloud, subset);
  std::size_t current = static_cast<std::size_t>(
      std::lower_bound(subset.begin(), subset.end(), seed) - subset.begin());
  min_d[current] = -1.0;
  picked.push_back(seed);
  while (picked.size() < n) {
    const double cx = xs[current], cy = ys[current], cz = zs[current];
    for (std::size_t k = 0; k < m; ++k) {
      const double dx = xs[k] - cx, dy = ys[k] - cy, dz = zs[k] - cz;
      const double d = dx * dx + dy * dy + dz * dz;
      min_d[k] = d < min_d[k] ? d : min_d[k];
    }
    // Strict comparison keeps the lowest index on ties.
    std::size_t best_k = 0;
    double best_d = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (min_d[k] > best_d) {
        best_d = min_d[k];
        best_k = k;
      }
    }
    min_d[best_k] = -1.0;
    current = best_k;
    picked.push_back(subset[best_k]);
  }
  return PointIndexSet::from_unsorted(std::move(picked));
}

Mat3 rotation_from_euler_deg(double roll, double pitch, double yaw) {
  constexpr double kDeg = M_PI / 180.0;
  return (Eigen::AngleAxisd(yaw * kDeg, Vec3::UnitZ()) *
          Eigen::AngleAxisd(pitch * kDeg, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll * kDeg, Vec3::UnitX()))
      .toRotationMatrix();
}

ColoredPointCloud rotate(const ColoredPointCloud& cloud, const Mat3& rotation) {
  ColoredPointCloud out;
  out.colors = cloud.colors;
  out.positions.reserve(cloud.size());
  for (const Vec3& p : cloud.positions) out.positions.push_back(rotation * p);
  return out;
}

}  // namespace partlift
