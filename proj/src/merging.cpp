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

#include "partlift/merging.hpp"

#include <algorithm>
#include <numeric>

#include "partlift/errors.hpp"

namespace partlift {

std::vector<Part3D> merge_groups(std::span<const Group3D> groups,
                                 double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InputError("merge threshold must lie in (0, 1)");
  }
  std::vector<std::size_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return groups[a].points.size() > groups[b].points.size();
  });

  std::vector<PointIndexSet> merged;
  for (std::size_t g : order) {
    const PointIndexSet& candidate = groups[g].points;
    bool absorbed = false;
    for (PointIndexSet& m : merged) {
      if (set_iou(candidate, m) > threshold) {
        m = m.unite(candidate);
        absorbed = true;
        break;
      }
    }
    if (!absorbed) merged.push_back(candidate);
  }

  std::vector<PointIndexSet> parts;
  for (const PointIndexSet& m : merged) {
    for (PointIndexSet& earlier : parts) earlier = earlier.subtract(m);
    parts.push_back(m);
  }

  std::vector<Part3D> out;
  for (PointIndexSet& p : parts) {
    if (p.empty()) continue;
    Part3D part;
    part.points = std::move(p);
    part.part_id = static_cast<int>(out.size());
    out.push_back(std::move(part));
  }
  return out;
}

}  // namespace partlift
