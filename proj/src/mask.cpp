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

#include "partlift/mask.hpp"

#include <algorithm>

#include "partlift/errors.hpp"

namespace partlift {
namespace rle {

std::vector<std::uint32_t> encode(std::span<const std::uint32_t> cells) {
  std::vector<std::uint32_t> runs;
  std::size_t k = 0;
  while (k < cells.size()) {
    const std::uint32_t start = cells[k];
    std::uint32_t len = 1;
    while (k + len < cells.size() && cells[k + len] == start + len) ++len;
    runs.push_back(start);
    runs.push_back(len);
    k += len;
  }
  return runs;
}

std::vector<std::uint32_t> decode(std::span<const std::uint32_t> runs,
                                  std::size_t cell_count) {
  if (runs.size() % 2 != 0) throw InputError("run-length code has odd length");
  std::vector<std::uint32_t> cells;
  std::uint64_t cursor = 0;
  for (std::size_t k = 0; k < runs.size(); k += 2) {
    const std::uint64_t start = runs[k];
    const std::uint64_t len = runs[k + 1];
    if (len == 0 || start < cursor || start + len > cell_count) {
      throw InputError("run-length code is out of order or out of bounds");
    }
    for (std::uint64_t c = start; c < start + len; ++c) {
      cells.push_back(static_cast<std::uint32_t>(c));
    }
    cursor = start + len;
  }
  return cells;
}

}  // namespace rle

Mask2D::Mask2D(int viewpoint_id, int width, int height,
               std::vector<std::uint32_t> runs, double score)
    : viewpoint_id_(viewpoint_id),
      width_(width),
      height_(height),
      runs_(std::move(runs)),
      score_(score) {
  // Validates bounds and ordering.
  (void)rle::decode(runs_, static_cast<std::size_t>(width_) * height_);
}

Mask2D Mask2D::from_cells(int viewpoint_id, int width, int height,
                          std::vector<std::uint32_t> cells, double score) {
  if (!std::is_sorted(cells.begin(), cells.end())) {
    std::sort(cells.begin(), cells.end());
  }
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  if (!cells.empty() &&
      cells.back() >= static_cast<std::size_t>(width) * height) {
    throw InputError("mask cell outside raster");
  }
  Mask2D m;
  m.viewpoint_id_ = viewpoint_id;
  m.width_ = width;
  m.height_ = height;
  m.runs_ = rle::encode(cells);
  m.score_ = score;
  return m;
}

std::size_t Mask2D::area() const {
  std::size_t a = 0;
  for (std::size_t k = 1; k < runs_.size(); k += 2) a += runs_[k];
  return a;
}

std::vector<std::uint32_t> Mask2D::cells() const {
  return rle::decode(runs_, static_cast<std::size_t>(width_) * height_);
}

std::vector<Pixel> Mask2D::pixels() const {
  std::vector<Pixel> out;
  out.reserve(area());
  for (std::uint32_t c : cells()) {
    out.push_back({static_cast<int>(c % width_), static_cast<int>(c / width_)});
  }
  return out;
}

namespace {

// Square-element min/max filter on the mask's bounding box grown by the
// radius, done as two separable passes.
std::vector<std::uint32_t> morph(std::span<const std::uint32_t> cells,
                                 int width, int height, int radius,
                                 bool erode) {
  if (cells.empty() || radius <= 0) {
    return {cells.begin(), cells.end()};
  }
  int x0 = width, y0 = height, x1 = -1, y1 = -1;
  for (std::uint32_t c : cells) {
    const int x = static_cast<int>(c % width);
    const int y = static_cast<int>(c / width);
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  x0 = std::max(0, x0 - radius);
  y0 = std::max(0, y0 - radius);
  x1 = std::min(width - 1, x1 + radius);
  y1 = std::min(height - 1, y1 + radius);
  const int bw = x1 - x0 + 1;
  const int bh = y1 - y0 + 1;

  std::vector<std::uint8_t> grid(static_cast<std::size_t>(bw) * bh, 0);
  for (std::uint32_t c : cells) {
    const int x = static_cast<int>(c % width) - x0;
    const int y = static_cast<int>(c / width) - y0;
    grid[static_cast<std::size_t>(y) * bw + x] = 1;
  }

  // Outside the box (and outside the raster) is background, which matters
  // only for erosion: a window reaching past the box edge sees a 0.
  auto at = [&](const std::vector<std::uint8_t>& g, int x, int y) -> int {
    if (x < 0 || y < 0 || x >= bw || y >= bh) return 0;
    return g[static_cast<std::size_t>(y) * bw + x];
  };
  std::vector<std::uint8_t> tmp(grid.size(), 0);
  for (int y = 0; y < bh; ++y) {
    for (int x = 0; x < bw; ++x) {
      int v = erode ? 1 : 0;
      for (int d = -radius; d <= radius; ++d) {
        const int s = at(grid, x + d, y);
        v = erode ? std::min(v, s) : std::max(v, s);
      }
      tmp[static_cast<std::size_t>(y) * bw + x] = static_cast<std::uint8_t>(v);
    }
  }
  std::vector<std::uint32_t> out;
  for (int y = 0; y < bh; ++y) {
    for (int x = 0; x < bw; ++x) {
      int v = erode ? 1 : 0;
      for (int d = -radius; d <= radius; ++d) {
        const int s = at(tmp, x, y + d);
        v = erode ? std::min(v, s) : std::max(v, s);
      }
      if (v) {
        out.push_back(static_cast<std::uint32_t>(y + y0) * width +
                      static_cast<std::uint32_t>(x + x0));
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> erode_cells(std::span<const std::uint32_t> cells,
                                       int width, int height, int radius) {
  return morph(cells, width, height, radius, true);
}

std::vector<std::uint32_t> dilate_cells(std::span<const std::uint32_t> cells,
                                        int width, int height, int radius) {
  return morph(cells, width, height, radius, false);
}

}  // namespace partlift
