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

#include "partlift/backends.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "partlift/errors.hpp"
#include "partlift/image_io.hpp"

namespace partlift {

using json = nlohmann::json;

void GroundTruth::validate(std::size_t num_points) const {
  if (semantic.size() != num_points || instance.size() != num_points) {
    throw InputError("ground truth has " + std::to_string(instance.size()) +
                     " labels for " + std::to_string(num_points) + " points");
  }
  std::map<int, int> owner;
  for (std::size_t i = 0; i < num_points; ++i) {
    const int c = semantic[i];
    const int inst = instance[i];
    if (c < -1 || c >= static_cast<int>(class_names.size())) {
      throw InputError("ground truth class id out of range");
    }
    if (inst < 0) continue;
    if (c < 0) throw InputError("annotated instance without a class");
    auto [it, inserted] = owner.emplace(inst, c);
    if (!inserted && it->second != c) {
      throw InputError("instance " + std::to_string(inst) +
                       " spans more than one class");
    }
  }
}

std::vector<int> GroundTruth::instance_ids() const {
  std::vector<int> ids;
  for (int inst : instance) {
    if (inst >= 0) ids.push_back(inst);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

int GroundTruth::class_of_instance(int instance_id) const {
  for (std::size_t i = 0; i < instance.size(); ++i) {
    if (instance[i] == instance_id) return semantic[i];
  }
  return -1;
}

PointIndexSet GroundTruth::instance_points(int instance_id) const {
  std::vector<PointIndex> pts;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    if (instance[i] == instance_id) pts.push_back(static_cast<PointIndex>(i));
  }
  return PointIndexSet::from_sorted(std::move(pts));
}

PointIndexSet GroundTruth::annotated_points() const {
  std::vector<PointIndex> pts;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    if (instance[i] >= 0) pts.push_back(static_cast<PointIndex>(i));
  }
  return PointIndexSet::from_sorted(std::move(pts));
}

TextPrompt TextPrompt::parse(const std::string& comma_separated) {
  TextPrompt prompt;
  std::size_t pos = 0;
  while (pos <= comma_separated.size()) {
    std::size_t comma = comma_separated.find(',', pos);
    if (comma == std::string::npos) comma = comma_separated.size();
    std::string name = comma_separated.substr(pos, comma - pos);
    const auto first = name.find_first_not_of(" \t");
    const auto last = name.find_last_not_of(" \t");
    if (first != std::string::npos) {
      prompt.class_names.push_back(name.substr(first, last - first + 1));
    }
    pos = comma + 1;
  }
  if (prompt.class_names.empty()) throw InputError("text prompt is empty");
  return prompt;
}

int TextPrompt::index_of(const std::string& name) const {
  auto it = std::find(class_names.begin(), class_names.end(), name);
  return it == class_names.end() ? -1
                                 : static_cast<int>(it - class_names.begin());
}

namespace {

// Visible cells of each annotated instance, row-major.
// Raster scans keep the cells sorted without a sort pass.
std::map<int, std::vector<std::uint32_t>> instance_cells(
    const RenderProduct& view, const GroundTruth& gt) {
  std::map<int, std::vector<std::uint32_t>> out;
  const auto& map = view.index_map();
  for (std::size_t c = 0; c < map.size(); ++c) {
    if (map[c] == RenderProduct::kEmpty) continue;
    const int inst = gt.instance[map[c]];
    if (inst < 0) continue;
    out[inst].push_back(static_cast<std::uint32_t>(c));
  }
  return out;
}

std::vector<std::uint32_t> cells_of_instance(const RenderProduct& view,
                                             const GroundTruth& gt, int inst) {
  // Mark owned pixels in a bitmap, then read them back in order.
  const std::size_t total = static_cast<std::size_t>(view.width()) * view.height();
  std::vector<std::uint64_t> bits((total + 63) / 64, 0);
  std::size_t count = 0;
  for (PointIndex idx : view.visible()) {
    if (gt.instance[idx] != inst) continue;
    for (std::uint32_t c : view.pixels_of(idx)) {
      bits[c >> 6] |= std::uint64_t{1} << (c & 63);
      ++count;
    }
  }
  std::vector<std::uint32_t> cells;
  cells.reserve(count);
  for (std::size_t w = 0; w < bits.size(); ++w) {
    std::uint64_t word = bits[w];
    while (word) {
      cells.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(word)));
      word &= word - 1;
    }
  }
  return cells;
}

int majority_instance(const RenderProduct& view, const GroundTruth& gt,
                      std::span<const Pixel> prompts) {
  std::map<int, int> counts;
  for (const Pixel& p : prompts) {
    if (!view.in_bounds(p)) throw InputError("prompt point outside raster");
    const PointIndex idx = view.index_at(p);
    if (idx == RenderProduct::kEmpty) continue;
    const int inst = gt.instance[idx];
    if (inst >= 0) ++counts[inst];
  }
  int best = -1;
  int best_count = 0;
  for (const auto& [inst, count] : counts) {
    if (count > best_count) {
      best = inst;
      best_count = count;
    }
  }
  return best;
}

std::vector<std::uint32_t> merge_cells(const std::vector<std::uint32_t>& a,
                                       const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

std::vector<Mask2D> OracleSegmenter::segment_auto(const RenderProduct& view,
                                                  std::span<const Pixel>,
                                                  CallKey) {
  std::vector<Mask2D> masks;
  for (auto& [inst, cells] : instance_cells(view, *gt_)) {
    masks.push_back(Mask2D::from_cells(view.viewpoint_id(), view.width(),
                                       view.height(), std::move(cells), 1.0));
  }
  return masks;
}

std::vector<Mask2D> OracleSegmenter::segment_prompted(
    const RenderProduct& view, std::span<const Pixel> prompts, CallKey) {
  const int inst = majority_instance(view, *gt_, prompts);
  if (inst < 0) return {};
  std::vector<std::uint32_t> cells = cells_of_instance(view, *gt_, inst);
  return {Mask2D::from_cells(view.viewpoint_id(), view.width(), view.height(),
                             std::move(cells), 1.0)};
}

std::vector<DetectionBox> OracleDetector::detect(const RenderProduct& view,
                                                 const TextPrompt& prompt) {
  if (prompt.class_names.empty()) throw InputError("text prompt is empty");
  std::vector<DetectionBox> boxes;
  for (const auto& [inst, cells] : instance_cells(view, *gt_)) {
    const int gt_class = gt_->class_of_instance(inst);
    const int row = prompt.index_of(gt_->class_names[gt_class]);
    if (row < 0) continue;
    DetectionBox box{view.viewpoint_id(), row, view.width(), view.height(),
                     -1, -1, 1.0};
    for (std::uint32_t c : cells) {
      const Pixel p = view.pixel(c);
      box.x0 = std::min(box.x0, p.x);
      box.y0 = std::min(box.y0, p.y);
      box.x1 = std::max(box.x1, p.x);
      box.y1 = std::max(box.y1, p.y);
    }
    boxes.push_back(box);
  }
  return boxes;
}

std::mt19937_64 call_rng(std::uint64_t seed, int viewpoint_id,
                         std::uint64_t ordinal) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(viewpoint_id),
                    static_cast<std::uint32_t>(ordinal),
                    static_cast<std::uint32_t>(ordinal >> 32)};
  return std::mt19937_64(seq);
}

Mask2D NoisySegmenter::perturb(const Mask2D& mask) const {
  std::vector<std::uint32_t> cells = mask.cells();
  if (noise_.erosion > 0) {
    cells = erode_cells(cells, mask.width(), mask.height(), noise_.erosion);
  }
  if (noise_.dilation > 0) {
    cells = dilate_cells(cells, mask.width(), mask.height(), noise_.dilation);
  }
  return Mask2D::from_cells(mask.viewpoint_id(), mask.width(), mask.height(),
                            std::move(cells), mask.score());
}

std::vector<Mask2D> NoisySegmenter::segment_auto(const RenderProduct& view,
                                                 std::span<const Pixel> seeds,
                                                 CallKey key) {
  const std::vector<Mask2D> clean = oracle_.segment_auto(view, seeds, key);
  auto rng = call_rng(seed_, view.viewpoint_id(), key.ordinal);
  std::vector<Mask2D> out;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const bool drop = uniform01(rng) < noise_.drop_rate;
    const bool merge = uniform01(rng) < noise_.merge_rate;
    if (drop) continue;
    Mask2D m = clean[k];
    if (merge && k + 1 < clean.size()) {
      m = Mask2D::from_cells(view.viewpoint_id(), view.width(), view.height(),
                             merge_cells(m.cells(), clean[k + 1].cells()),
                             m.score());
      ++k;
    }
    m = perturb(m);
    if (!m.empty()) out.push_back(std::move(m));
  }
  return out;
}

std::vector<Mask2D> NoisySegmenter::segment_prompted(
    const RenderProduct& view, std::span<const Pixel> prompts, CallKey key) {
  std::vector<Mask2D> clean = oracle_.segment_prompted(view, prompts, key);
  if (clean.empty()) return {};
  auto rng = call_rng(seed_, view.viewpoint_id(), key.ordinal);
  const bool drop = uniform01(rng) < noise_.drop_rate;
  const bool merge = uniform01(rng) < noise_.merge_rate;
  const std::uint64_t pick = rng();
  if (drop) return {};
  Mask2D m = std::move(clean.front());
  if (merge) {
    const std::vector<Mask2D> all = oracle_.segment_auto(view, {}, key);
    const std::vector<std::uint32_t> own = m.cells();
    std::vector<const Mask2D*> others;
    for (const Mask2D& o : all) {
      if (o.runs() != m.runs()) others.push_back(&o);
    }
    if (!others.empty()) {
      const Mask2D& other = *others[pick % others.size()];
      m = Mask2D::from_cells(view.viewpoint_id(), view.width(), view.height(),
                             merge_cells(own, other.cells()), m.score());
    }
  }
  m = perturb(m);
  if (m.empty()) return {};
  return {std::move(m)};
}

std::vector<DetectionBox> NoisyDetector::detect(const RenderProduct& view,
                                                const TextPrompt& prompt) {
  const std::vector<DetectionBox> clean = oracle_.detect(view, prompt);
  auto rng = call_rng(seed_, view.viewpoint_id(), 0);
  const int classes = static_cast<int>(prompt.class_names.size());
  std::vector<DetectionBox> out;
  for (DetectionBox box : clean) {
    // Fixed number of draws per box keeps later boxes' noise independent of
    // earlier outcomes.
    const bool drop = uniform01(rng) < noise_.drop_rate;
    const bool mislabel = uniform01(rng) < noise_.mislabel_rate;
    const std::uint64_t wrong = rng();
    int shift[4];
    for (int& s : shift) {
      s = noise_.jitter > 0
              ? static_cast<int>(rng() % (2 * noise_.jitter + 1)) - noise_.jitter
              : 0;
    }
    if (drop) continue;
    if (mislabel && classes > 1) {
      int k = static_cast<int>(wrong % static_cast<std::uint64_t>(classes - 1));
      if (k >= box.class_index) ++k;
      box.class_index = k;
    }
    box.x0 = std::clamp(box.x0 + shift[0], 0, view.width() - 1);
    box.y0 = std::clamp(box.y0 + shift[1], 0, view.height() - 1);
    box.x1 = std::clamp(box.x1 + shift[2], 0, view.width() - 1);
    box.y1 = std::clamp(box.y1 + shift[3], 0, view.height() - 1);
    if (box.x0 > box.x1) std::swap(box.x0, box.x1);
    if (box.y0 > box.y1) std::swap(box.y0, box.y1);
    out.push_back(box);
  }
  return out;
}

namespace wire {
namespace {

std::string image_b64(const RenderProduct& view) {
  return base64_encode(
      encode_png(RgbImage{view.width(), view.height(), view.image()}));
}

json parse_body(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed bridge response: ") + e.what(),
                       false);
  }
}

}  // namespace

std::string segment_request(const RenderProduct& view,
                            std::span<const Pixel> points,
                            const std::string& mode) {
  json pts = json::array();
  for (const Pixel& p : points) pts.push_back({p.x, p.y});
  return json{{"image_png_b64", image_b64(view)},
              {"points", std::move(pts)},
              {"mode", mode}}
      .dump();
}

std::string detect_request(const RenderProduct& view,
                           const TextPrompt& prompt) {
  return json{{"image_png_b64", image_b64(view)},
              {"classes", prompt.class_names}}
      .dump();
}

std::vector<Mask2D> parse_segment_response(const std::string& body,
                                           int viewpoint_id, int width,
                                           int height) {
  const json doc = parse_body(body);
  std::vector<Mask2D> masks;
  try {
    for (const json& m : doc.at("masks")) {
      if (m.at("width").get<int>() != width ||
          m.at("height").get<int>() != height) {
        throw BackendError("bridge mask size does not match the image", false);
      }
      masks.emplace_back(viewpoint_id, width, height,
                         m.at("rle").get<std::vector<std::uint32_t>>(),
                         m.at("score").get<double>());
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed bridge response: ") + e.what(),
                       false);
  } catch (const InputError& e) {
    throw BackendError(std::string("malformed bridge mask: ") + e.what(), false);
  }
  return masks;
}

std::vector<DetectionBox> parse_detect_response(const std::string& body,
                                                int viewpoint_id, int width,
                                                int height,
                                                std::size_t class_count) {
  const json doc = parse_body(body);
  std::vector<DetectionBox> boxes;
  try {
    for (const json& b : doc.at("boxes")) {
      DetectionBox box{viewpoint_id,
                       b.at("class_index").get<int>(),
                       b.at("x0").get<int>(),
                       b.at("y0").get<int>(),
                       b.at("x1").get<int>(),
                       b.at("y1").get<int>(),
                       b.at("score").get<double>()};
      const bool ok = box.class_index >= 0 &&
                      static_cast<std::size_t>(box.class_index) < class_count &&
                      box.x0 >= 0 && box.y0 >= 0 && box.x0 <= box.x1 &&
                      box.y0 <= box.y1 && box.x1 < width && box.y1 < height;
      if (!ok) throw BackendError("bridge returned an invalid box", false);
      boxes.push_back(box);
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed bridge response: ") + e.what(),
                       false);
  }
  return boxes;
}

std::string segment_response(std::span<const Mask2D> masks) {
  json arr = json::array();
  for (const Mask2D& m : masks) {
    arr.push_back({{"rle", m.runs()},
                   {"width", m.width()},
                   {"height", m.height()},
                   {"score", m.score()}});
  }
  return json{{"masks", std::move(arr)}}.dump();
}

std::string detect_response(std::span<const DetectionBox> boxes) {
  json arr = json::array();
  for (const DetectionBox& b : boxes) {
    arr.push_back({{"class_index", b.class_index},
                   {"x0", b.x0},
                   {"y0", b.y0},
                   {"x1", b.x1},
                   {"y1", b.y1},
                   {"score", b.score}});
  }
  return json{{"boxes", std::move(arr)}}.dump();
}

}  // namespace wire

struct RemoteBackend::Impl {
  explicit Impl(const std::string& url) : client(url) {}
  httplib::Client client;
  std::mutex mutex;
};

RemoteBackend::RemoteBackend(std::string base_url, RemoteOptions options)
    : impl_(std::make_unique<Impl>(base_url)), options_(options) {
  if (!impl_->client.is_valid()) {
    throw InputError("invalid bridge url: " + base_url);
  }
  impl_->client.set_connection_timeout(options_.timeout);
  impl_->client.set_read_timeout(options_.timeout);
  impl_->client.set_write_timeout(options_.timeout);
}

RemoteBackend::~RemoteBackend() = default;

std::string RemoteBackend::post(const std::string& path,
                                const std::string& body) {
  std::lock_guard lock(impl_->mutex);
  std::string last_error;
  auto backoff = options_.initial_backoff;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = impl_->client.Post(path, body, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    if (res->status == 503) {
      last_error = "model unavailable (HTTP 503)";
      continue;
    }
    throw BackendError(path + " rejected the request (HTTP " +
                           std::to_string(res->status) + "): " + res->body,
                       false);
  }
  throw BackendError(path + " failed after " +
                         std::to_string(options_.max_retries) +
                         " retries: " + last_error,
                     true);
}

std::vector<Mask2D> RemoteBackend::segment(const RenderProduct& view,
                                           std::span<const Pixel> points,
                                           const char* mode) {
  const std::string body = post("/v1/segment", wire::segment_request(view, points, mode));
  return wire::parse_segment_response(body, view.viewpoint_id(), view.width(),
                                      view.height());
}

std::vector<Mask2D> RemoteBackend::segment_auto(const RenderProduct& view,
                                                std::span<const Pixel> seeds,
                                                CallKey) {
  return segment(view, seeds, "auto");
}

std::vector<Mask2D> RemoteBackend::segment_prompted(
    const RenderProduct& view, std::span<const Pixel> prompts, CallKey) {
  if (prompts.empty()) throw InputError("prompted segmentation needs a point");
  return segment(view, prompts, "prompt");
}

std::vector<DetectionBox> RemoteBackend::detect(const RenderProduct& view,
                                                const TextPrompt& prompt) {
  if (prompt.class_names.empty()) throw InputError("text prompt is empty");
  const std::string body = post("/v1/detect", wire::detect_request(view, prompt));
  return wire::parse_detect_response(body, view.viewpoint_id(), view.width(),
                                     view.height(), prompt.class_names.size());
}

}  // namespace partlift
