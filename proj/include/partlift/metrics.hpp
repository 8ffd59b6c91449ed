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

// Segmentation quality against per-point ground truth. Unannotated points
// are removed from predicted parts before any IoU is taken.

#ifndef PARTLIFT_METRICS_HPP_
#define PARTLIFT_METRICS_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partlift/backends.hpp"
#include "partlift/merging.hpp"

namespace partlift {

// Mean over ground-truth instances of the best IoU with any predicted part.
// Empty when the object has no annotated instance.
std::optional<double> average_iou(std::span<const Part3D> parts,
                                  const GroundTruth& gt);

// Ranked predictions of one class, pooled over any number of objects.
struct ClassDetections {
  struct Entry {
    double confidence;
    std::size_t object;
    int part_id;
    bool true_positive;
  };
  std::vector<Entry> entries;
  std::size_t gt_count = 0;
};

// Adds one object's predictions to `pool`, keyed by class name. Predicted
// labels index `label_names`. Matching is greedy in confidence order
// (ties by part id): each prediction takes the unmatched ground-truth
// instance of its class with the highest IoU, if that IoU is at least 0.5.
void accumulate_ap50(std::span<const Part3D> parts,
                     std::span<const std::string> label_names,
                     const GroundTruth& gt, std::size_t object,
                     std::map<std::string, ClassDetections>& pool);

// Area under the monotone precision envelope (all-point interpolation).
// Zero without ground truth.
double average_precision(const ClassDetections& detections);

struct ApReport {
  std::map<std::string, double> per_class;
  std::optional<double> mean;  // empty when no class qualifies
};

ApReport map50(std::span<const Part3D> parts,
               std::span<const std::string> label_names, const GroundTruth& gt);
ApReport map50_from_pool(const std::map<std::string, ClassDetections>& pool);

// Per ground-truth class: IoU of the union of parts labeled with it against
// the union of its instances; averaged over classes present in ground truth.
std::optional<double> semantic_miou(std::span<const Part3D> parts,
                                    std::span<const std::string> label_names,
                                    const GroundTruth& gt);

// Fraction of ground-truth instances whose best-IoU part carries the
// instance's class.
double instance_label_accuracy(std::span<const Part3D> parts,
                               std::span<const std::string> label_names,
                               const GroundTruth& gt);

struct ObjectInput {
  std::string name;
  std::vector<Part3D> parts;
  std::vector<std::string> label_names;  // empty for unlabeled predictions
  bool labeled = false;
  GroundTruth gt;
};

struct ObjectReport {
  std::string name;
  std::string category;
  std::optional<double> average_iou;
  std::optional<double> map50;
  std::optional<double> miou;
};

struct CategoryReport {
  std::string category;
  std::size_t objects = 0;
  std::optional<double> average_iou;
  std::optional<double> map50;  // pooled over the category's objects
  std::map<std::string, double> ap50;
  std::optional<double> miou;
};

struct EvaluationReport {
  std::vector<ObjectReport> objects;
  std::vector<CategoryReport> categories;
};

EvaluationReport evaluate(std::span<const ObjectInput> objects);
std::string report_json(const EvaluationReport& report);
std::string report_table(const EvaluationReport& report);

}  // namespace partlift

#endif  // PARTLIFT_METRICS_HPP_
