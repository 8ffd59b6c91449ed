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

#ifndef PARTLIFT_MASK_HPP_
#define PARTLIFT_MASK_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "partlift/multiview.hpp"

namespace partlift {

// Run-length code over a row-major raster: alternating (start offset, run
// length) pairs covering the foreground cells, runs in ascending order and
// never adjacent.
namespace rle {

// `cells` must be sorted ascending and duplicate-free.
std::vector<std::uint32_t> encode(std::span<const std::uint32_t> cells);

// Throws InputError on odd length, overlapping or unordered runs, or runs
// that leave a raster of `cell_count` cells.
std::vector<std::uint32_t> decode(std::span<const std::uint32_t> runs,
                                  std::size_t cell_count);

}  // namespace rle

// A 2D segment returned by a segmenter for one view.
class Mask2D {
 public:
  Mask2D() = default;
  Mask2D(int viewpoint_id, int width, int height,
         std::vector<std::uint32_t> runs, double score);

  // `cells` are row-major linear offsets in any order.
  static Mask2D from_cells(int viewpoint_id, int width, int height,
                           std::vector<std::uint32_t> cells, double score);

  int viewpoint_id() const { return viewpoint_id_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double score() const { return score_; }
  const std::vector<std::uint32_t>& runs() const { return runs_; }

  std::size_t area() const;
  bool empty() const { return runs_.empty(); }
  std::vector<std::uint32_t> cells() const;
  std::vector<Pixel> pixels() const;

 private:
  int viewpoint_id_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint32_t> runs_;
  double score_ = 0.0;
};

// Morphology with a (2r+1)×(2r+1) square structuring element. Cells outside
// the raster count as background.
std::vector<std::uint32_t> erode_cells(std::span<const std::uint32_t> cells,
                                       int width, int height, int radius);
std::vector<std::uint32_t> dilate_cells(std::span<const std::uint32_t> cells,
                                        int width, int height, int radius);

}  // namespace partlift

#endif  // PARTLIFT_MASK_HPP_
