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

// Turning detector boxes into part labels.
//
// Every box is matched to a part twice: in 3D, by the IoU between the points
// visible inside the box and each part's point set, and in 2D, by the IoU
// between the box and each part's projected bounding box in the same view.
// A box votes for its class on the part only when both matches agree. Per
// class, votes far below the class's best part are then penalized before
// each part takes the class with the most remaining votes.

#ifndef PARTLIFT_LABELING_HPP_
#define PARTLIFT_LABELING_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partlift/backends.hpp"
#include "partlift/merging.hpp"
#include "partlift/multiview.hpp"

namespace partlift {

// Inclusive pixel rectangle.
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  long area() const {
    return x1 < x0 || y1 < y0 ? 0L : static_cast<long>(x1 - x0 + 1) * (y1 - y0 + 1);
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

double rect_iou(const Rect& a, const Rect& b);

template <typename T>
class ClassPartMatrix {
 public:
  ClassPartMatrix() = default;
  ClassPartMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), cells_(rows * cols, T{}) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& at(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
  const T& at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
  friend bool operator==(const ClassPartMatrix&, const ClassPartMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> cells_;
};

using VoteMatrix = ClassPartMatrix<long>;
using DecisionMatrix = ClassPartMatrix<double>;

enum class VoteMode {
  kBoth,    // 2D and 3D best matches must agree
  kOnly2D,  // best box-IoU match
  kOnly3D,  // best point-set-IoU match
};

PointIndexSet box_visible_points(const DetectionBox& box,
                                 const RenderProduct& view);

std::optional<Rect> part_box_2d(const Part3D& part, const RenderProduct& view);

struct VoteResult {
  VoteMatrix votes;
  std::size_t accepted = 0;
  std::size_t discarded = 0;
};

// `renders` must include the view of every box. Rows follow the prompt
// order, columns the order of `parts`.
VoteResult tdcm_vote(std::span<const DetectionBox> boxes,
                     std::span<const Part3D> parts,
                     std::span<const RenderProduct> renders,
                     std::size_t class_count, VoteMode mode = VoteMode::kBoth);

// Keeps each row maximum, halves votes of at least half the row maximum and
// zeroes the rest.
DecisionMatrix cnvp(const VoteMatrix& votes);

DecisionMatrix to_decision(const VoteMatrix& votes);

// Labels each part with its column's best row (lowest row on ties). Parts
// whose column is all zero stay unlabeled. Confidence is the column maximum
// over the global maximum.
std::vector<Part3D> assign_labels(const DecisionMatrix& decision,
                                  std::span<const Part3D> parts);

struct LabelingConfig {
  bool use_cnvp = true;
  VoteMode mode = VoteMode::kBoth;
  bool skip_failed_views = false;
  int jobs = 1;
};

struct LabelingResult {
  std::vector<Part3D> parts;
  VoteMatrix votes;
  DecisionMatrix decision;
  std::size_t boxes = 0;
  std::size_t discarded = 0;
  std::size_t views_skipped = 0;
};

LabelingResult multi_model_labeling(std::span<const Part3D> parts,
                                    std::span<const RenderProduct> renders,
                                    Detector& detector,
                                    const TextPrompt& prompt,
                                    const LabelingConfig& config = {});

// Comma-separated, one row per class with the class name first.
template <typename T>
std::string matrix_csv(const ClassPartMatrix<T>& m,
                       std::span<const std::string> class_names);

}  // namespace partlift

#endif  // PARTLIFT_LABELING_HPP_
