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

#include "partlift/image_io.hpp"

#include <png.h>

#include <cstring>

#include <openssl/evp.h>

#include "partlift/errors.hpp"

namespace partlift {
namespace {

void put_i32(std::string& out, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
}

std::int32_t get_i32(std::string_view in, std::size_t pos) {
  std::uint32_t u = 0;
  for (int b = 0; b < 4; ++b) {
    u |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + b]))
         << (8 * b);
  }
  return static_cast<std::int32_t>(u);
}

}  // namespace

std::string encode_png(const RgbImage& image) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(image.width);
  desc.height = static_cast<png_uint_32>(image.height);
  desc.format = PNG_FORMAT_RGB;
  static_assert(sizeof(Rgb) == 3);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0,
                                 image.pixels.data(), 0, nullptr)) {
    throw InputError(std::string("png: ") + desc.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0,
                                 image.pixels.data(), 0, nullptr)) {
    throw InputError(std::string("png: ") + desc.message);
  }
  out.resize(size);
  return out;
}

RgbImage decode_png(std::string_view bytes) {
  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size())) {
    throw InputError(std::string("png: ") + desc.message);
  }
  desc.format = PNG_FORMAT_RGB;
  RgbImage image;
  image.width = static_cast<int>(desc.width);
  image.height = static_cast<int>(desc.height);
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  if (!png_image_finish_read(&desc, nullptr, image.pixels.data(), 0,
                             nullptr)) {
    png_image_free(&desc);
    throw InputError(std::string("png: ") + desc.message);
  }
  return image;
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw InputError("malformed base64");
  std::string out(3 * (text.size() / 4), '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw InputError("malformed base64");
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string encode_index_map(const RenderProduct& rp) {
  std::string out;
  out.reserve(8 + 4 * rp.index_map().size());
  put_i32(out, rp.width());
  put_i32(out, rp.height());
  for (PointIndex idx : rp.index_map()) {
    put_i32(out, idx == RenderProduct::kEmpty ? -1 : static_cast<std::int32_t>(idx));
  }
  return out;
}

IndexMapFile decode_index_map(std::string_view bytes) {
  if (bytes.size() < 8) throw InputError("index map file is truncated");
  IndexMapFile f;
  f.width = get_i32(bytes, 0);
  f.height = get_i32(bytes, 4);
  if (f.width < 0 || f.height < 0) throw InputError("negative index map size");
  const std::size_t cells = static_cast<std::size_t>(f.width) * f.height;
  if (bytes.size() != 8 + 4 * cells) {
    throw InputError("index map file size does not match its dimensions");
  }
  f.cells.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) f.cells[c] = get_i32(bytes, 8 + 4 * c);
  return f;
}

}  // namespace partlift
