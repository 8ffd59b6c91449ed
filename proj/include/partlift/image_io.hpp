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

#ifndef PARTLIFT_IMAGE_IO_HPP_
#define PARTLIFT_IMAGE_IO_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "partlift/multiview.hpp"

namespace partlift {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major
};

// 8-bit RGB PNG, in memory.
std::string encode_png(const RgbImage& image);
RgbImage decode_png(std::string_view bytes);

std::string base64_encode(std::string_view bytes);
// Throws InputError on malformed input.
std::string base64_decode(std::string_view text);

// Index-map debug format: int32 width, int32 height, then width*height
// int32 point indices row-major, -1 for empty. All little-endian.
std::string encode_index_map(const RenderProduct& rp);
struct IndexMapFile {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> cells;
};
IndexMapFile decode_index_map(std::string_view bytes);

}  // namespace partlift

#endif  // PARTLIFT_IMAGE_IO_HPP_
