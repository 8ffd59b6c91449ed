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

#include "partlift/labeling.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "partlift/errors.hpp"
#include "partlift/parallel.hpp"

namespace partlift {

double rect_iou(const Rect& a, const Rect& b) {
  const Rect inter{std::max(a.x0, b.x0), std::max(a.y0, b.y0),
                   std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
  const long i = inter.area();
  const long u = a.area() + b.area() - i;
  return u > 0 ? static_cast<double>(i) / static_cast<double>(u) : 0.0;
}

PointIndexSet box_visible_points(const DetectionBox& box,
                                 const RenderProduct& view) {
  std::vector<PointIndex> pts;
  const int x0 = std::max(box.x0, 0);
  const int y0 = std::max(box.y0, 0);
  const int x1 = std::min(box.x1, view.width() - 1);
  const int y1 = std::min(box.y1, view.height() - 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const PointIndex idx = view.index_at({x, y});
      if (idx != RenderProduct::kEmpty) pts.push_back(idx);
    }
  }
  return PointIndexSet::from_unsorted(std::move(pts));
}

std::optional<Rect> part_box_2d(const Part3D& part, const RenderProduct& view) {
  std::optional<Rect> box;
  for (PointIndex i : part.points) {
    if (i >= view.num_points()) continue;
    for (std::uint32_t c : view.pixels_of(i)) {
      const Pixel p = view.pixel(c);
      if (!box) {
        box = Rect{p.x, p.y, p.x, p.y};
      } else {
        box->x0 = std::min(box->x0, p.x);
        box->y0 = std::min(box->y0, p.y);
        box->x1 = std::max(box->x1, p.x);
        box->y1 = std::max(box->y1, p.y);
      }
    }
  }
  return box;
}

VoteResult tdcm_vote(std::span<const DetectionBox> boxes,
                     std::span<const Part3D> parts,
                     std::span<const RenderProduct> renders,
                     std::size_t class_count, VoteMode mode) {
  VoteResult result;
  result.votes = VoteMatrix(class_count, parts.size());
  std::map<int, std::vector<std::optional<Rect>>> part_boxes;
  auto view_of = [&](int viewpoint_id) -> const RenderProduct& {
    for (const RenderProduct& rp : renders) {
      if (rp.viewpoint_id() == viewpoint_id) return rp;
    }
    throw InputError("no render for viewpoint " + std::to_string(viewpoint_id));
  };

  for (const DetectionBox& box : boxes) {
    const Rect bb{box.x0, box.y0, box.x1, box.y1};
    if (bb.area() == 0 || box.class_index < 0 ||
        static_cast<std::size_t>(box.class_index) >= class_count ||
        parts.empty()) {
      ++result.discarded;
      continue;
    }
    const RenderProduct& view = view_of(box.viewpoint_id);
    auto [it, fresh] = part_boxes.try_emplace(box.viewpoint_id);
    if (fresh) {
      for (const Part3D& p : parts) it->second.push_back(part_box_2d(p, view));
    }

    const PointIndexSet inside = box_visible_points(box, view);
    std::optional<std::size_t> best3d;
    std::optional<std::size_t> best2d;
    double iou3d = 0.0;
    double iou2d = 0.0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const double a = set_iou(inside, parts[k].points);
      if (a > iou3d) {
        iou3d = a;
        best3d = k;
      }
      if (const auto& pb = it->second[k]) {
        const double b = rect_iou(bb, *pb);
        if (b > iou2d) {
          iou2d = b;
          best2d = k;
        }
      }
    }

    std::optional<std::size_t> target;
    switch (mode) {
      case VoteMode::kBoth:
        if (best3d && best2d && *best3d == *best2d) target = best3d;
        break;
      case VoteMode::kOnly2D:
        target = best2d;
        break;
      case VoteMode::kOnly3D:
        target = best3d;
        break;
    }
    if (!target) {
      ++result.discarded;
      continue;
    }
    ++result.votes.at(static_cast<std::size_t>(box.class_index), *target);
    ++result.accepted;
  }
  return result;
}

DecisionMatrix cnvp(const VoteMatrix& votes) {
  DecisionMatrix out(votes.rows(), votes.cols());
  for (std::size_t r = 0; r < votes.rows(); ++r) {
    long row_max = 0;
    for (std::size_t c = 0; c < votes.cols(); ++c) {
      row_max = std::max(row_max, votes.at(r, c));
    }
    if (row_max == 0) continue;
    for (std::size_t c = 0; c < votes.cols(); ++c) {
      const long a = votes.at(r, c);
      // Integer forms of a / row_max == 1 and a / row_max >= 0.5.
      if (a == row_max) {
        out.at(r, c) = static_cast<double>(a);
      } else if (2 * a >= row_max) {
        out.at(r, c) = static_cast<double>(a) / 2.0;
      }
    }
  }
  return out;
}

DecisionMatrix to_decision(const VoteMatrix& votes) {
  DecisionMatrix out(votes.rows(), votes.cols());
  for (std::size_t r = 0; r < votes.rows(); ++r) {
    for (std::size_t c = 0; c < votes.cols(); ++c) {
      out.at(r, c) = static_cast<double>(votes.at(r, c));
    }
  }
  return out;
}

std::vector<Part3D> assign_labels(const DecisionMatrix& decision,
                                  std::span<const Part3D> parts) {
  if (decision.cols() != parts.size()) {
    throw InputError("decision matrix does not match the part count");
  }
  double global_max = 0.0;
  for (std::size_t r = 0; r < decision.rows(); ++r) {
    for (std::size_t c = 0; c < decision.cols(); ++c) {
      global_max = std::max(global_max, decision.at(r, c));
    }
  }
  std::vector<Part3D> out(parts.begin(), parts.end());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c].label.reset();
    out[c].confidence = 0.0;
    double best = 0.0;
    for (std::size_t r = 0; r < decision.rows(); ++r) {
      if (decision.at(r, c) > best) {
        best = decision.at(r, c);
        out[c].label = static_cast<int>(r);
      }
    }
    if (out[c].label) out[c].confidence = best / global_max;
  }
  return out;
}

LabelingResult multi_model_labeling(std::span<const Part3D> parts,
                                    std::span<const RenderProduct> renders,
                                    Detector& detector,
                                    const TextPrompt& prompt,
                                    const LabelingConfig& config) {
  if (prompt.class_names.empty()) throw InputError("text prompt is empty");
  std::vector<std::vector<DetectionBox>> per_view(renders.size());
  std::vector<char> skipped(renders.size(), 0);
  parallel_for(renders.size(), config.jobs, [&](std::size_t v) {
    try {
      per_view[v] = detector.detect(renders[v], prompt);
    } catch (const BackendError& e) {
      if (!config.skip_failed_views || !e.retryable()) throw;
      skipped[v] = 1;
    }
  });

  LabelingResult result;
  std::vector<DetectionBox> boxes;
  for (std::size_t v = 0; v < renders.size(); ++v) {
    result.views_skipped += skipped[v];
    boxes.insert(boxes.end(), per_view[v].begin(), per_view[v].end());
  }
  result.boxes = boxes.size();

  VoteResult vr = tdcm_vote(boxes, parts, renders, prompt.class_names.size(),
                            config.mode);
  result.discarded = vr.discarded;
  result.decision = config.use_cnvp ? cnvp(vr.votes) : to_decision(vr.votes);
  result.votes = std::move(vr.votes);
  result.parts = assign_labels(result.decision, parts);
  return result;
}

template <typename T>
std::string matrix_csv(const ClassPartMatrix<T>& m,
                       std::span<const std::string> class_names) {
  std::ostringstream out;
  out << "class";
  for (std::size_t c = 0; c < m.cols(); ++c) out << ",part_" << c;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << (r < class_names.size() ? class_names[r] : std::to_string(r));
    for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << m.at(r, c);
    out << '\n';
  }
  return out.str();
}

template std::string matrix_csv(const ClassPartMatrix<long>&,
                                std::span<const std::string>);
template std::string matrix_csv(const ClassPartMatrix<double>&,
                                std::span<const std::string>);

}  // namespace partlift
