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

#include "partlift/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

namespace partlift {
namespace {

std::vector<PointIndexSet> annotated_parts(std::span<const Part3D> parts,
                                           const PointIndexSet& annotated) {
  std::vector<PointIndexSet> out;
  out.reserve(parts.size());
  for (const Part3D& p : parts) out.push_back(p.points.intersect(annotated));
  return out;
}

std::optional<std::string> label_name(const Part3D& part,
                                      std::span<const std::string> names) {
  if (!part.label || *part.label < 0 ||
      static_cast<std::size_t>(*part.label) >= names.size()) {
    return std::nullopt;
  }
  return names[static_cast<std::size_t>(*part.label)];
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::optional<double> average_iou(std::span<const Part3D> parts,
                                  const GroundTruth& gt) {
  const std::vector<int> ids = gt.instance_ids();
  if (ids.empty()) {
    spdlog::warn("object has no annotated instance; excluded from Average IoU");
    return std::nullopt;
  }
  const auto preds = annotated_parts(parts, gt.annotated_points());
  std::vector<double> best;
  for (int id : ids) {
    const PointIndexSet inst = gt.instance_points(id);
    double b = 0.0;
    for (const PointIndexSet& p : preds) b = std::max(b, set_iou(inst, p));
    best.push_back(b);
  }
  return mean_of(best);
}

void accumulate_ap50(std::span<const Part3D> parts,
                     std::span<const std::string> label_names,
                     const GroundTruth& gt, std::size_t object,
                     std::map<std::string, ClassDetections>& pool) {
  const auto preds = annotated_parts(parts, gt.annotated_points());

  // Ground-truth instances per class name.
  std::map<std::string, std::vector<PointIndexSet>> gt_by_class;
  for (int id : gt.instance_ids()) {
    gt_by_class[gt.class_names[gt.class_of_instance(id)]].push_back(
        gt.instance_points(id));
  }
  for (const auto& [name, instances] : gt_by_class) {
    pool[name].gt_count += instances.size();
  }

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (auto name = label_name(parts[k], label_names)) by_class[*name].push_back(k);
  }
  for (auto& [name, members] : by_class) {
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (parts[a].confidence != parts[b].confidence) {
        return parts[a].confidence > parts[b].confidence;
      }
      return parts[a].part_id < parts[b].part_id;
    });
    const auto it = gt_by_class.find(name);
    const std::vector<PointIndexSet> none;
    const std::vector<PointIndexSet>& instances =
        it == gt_by_class.end() ? none : it->second;
    std::vector<bool> matched(instances.size(), false);
    ClassDetections& cd = pool[name];
    for (std::size_t k : members) {
      double best = 0.0;
      std::optional<std::size_t> hit;
      for (std::size_t g = 0; g < instances.size(); ++g) {
        if (matched[g]) continue;
        const double iou = set_iou(preds[k], instances[g]);
        if (iou >= 0.5 && iou > best) {
          best = iou;
          hit = g;
        }
      }
      if (hit) matched[*hit] = true;
      cd.entries.push_back({parts[k].confidence, object, parts[k].part_id,
                            hit.has_value()});
    }
  }
}

double average_precision(const ClassDetections& detections) {
  if (detections.gt_count == 0) return 0.0;
  std::vector<ClassDetections::Entry> ranked = detections.entries;
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.object != b.object) return a.object < b.object;
    return a.part_id < b.part_id;
  });
  std::vector<double> recall{0.0};
  std::vector<double> precision{0.0};
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k].true_positive) ++tp;
    recall.push_back(static_cast<double>(tp) /
                     static_cast<double>(detections.gt_count));
    precision.push_back(static_cast<double>(tp) / static_cast<double>(k + 1));
  }
  recall.push_back(1.0);
  precision.push_back(0.0);
  for (std::size_t k = precision.size() - 1; k > 0; --k) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0.0;
  for (std::size_t k = 1; k < recall.size(); ++k) {
    ap += (recall[k] - recall[k - 1]) * precision[k];
  }
  return ap;
}

ApReport map50_from_pool(const std::map<std::string, ClassDetections>& pool) {
  ApReport report;
  std::vector<double> aps;
  for (const auto& [name, cd] : pool) {
    if (cd.gt_count == 0 && cd.entries.empty()) continue;
    const double ap = average_precision(cd);
    report.per_class[name] = ap;
    aps.push_back(ap);
  }
  report.mean = mean_of(aps);
  return report;
}

ApReport map50(std::span<const Part3D> parts,
               std::span<const std::string> label_names, const GroundTruth& gt) {
  std::map<std::string, ClassDetections> pool;
  accumulate_ap50(parts, label_names, gt, 0, pool);
  return map50_from_pool(pool);
}

std::optional<double> semantic_miou(std::span<const Part3D> parts,
                                    std::span<const std::string> label_names,
                                    const GroundTruth& gt) {
  const PointIndexSet annotated = gt.annotated_points();
  std::vector<double> ious;
  for (std::size_t c = 0; c < gt.class_names.size(); ++c) {
    std::vector<PointIndex> truth;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (gt.instance[i] >= 0 && gt.semantic[i] == static_cast<int>(c)) {
        truth.push_back(static_cast<PointIndex>(i));
      }
    }
    if (truth.empty()) continue;
    PointIndexSet predicted;
    for (const Part3D& p : parts) {
      const auto name = label_name(p, label_names);
      if (name && *name == gt.class_names[c]) predicted = predicted.unite(p.points);
    }
    ious.push_back(set_iou(predicted.intersect(annotated),
                           PointIndexSet::from_sorted(std::move(truth))));
  }
  return mean_of(ious);
}

double instance_label_accuracy(std::span<const Part3D> parts,
                               std::span<const std::string> label_names,
                               const GroundTruth& gt) {
  const std::vector<int> ids = gt.instance_ids();
  if (ids.empty()) return 0.0;
  const auto preds = annotated_parts(parts, gt.annotated_points());
  std::size_t correct = 0;
  for (int id : ids) {
    const PointIndexSet inst = gt.instance_points(id);
    double best = 0.0;
    std::optional<std::size_t> owner;
    for (std::size_t k = 0; k < preds.size(); ++k) {
      const double iou = set_iou(inst, preds[k]);
      if (iou > best) {
        best = iou;
        owner = k;
      }
    }
    if (!owner) continue;
    const auto name = label_name(parts[*owner], label_names);
    if (name && *name == gt.class_names[gt.class_of_instance(id)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ids.size());
}

EvaluationReport evaluate(std::span<const ObjectInput> objects) {
  EvaluationReport report;
  struct CategoryAccumulator {
    std::size_t objects = 0;
    std::vector<double> aiou;
    std::vector<double> miou;
    std::map<std::string, ClassDetections> pool;
    bool labeled = false;
  };
  std::map<std::string, CategoryAccumulator> categories;

  for (std::size_t k = 0; k < objects.size(); ++k) {
    const ObjectInput& in = objects[k];
    ObjectReport obj;
    obj.name = in.name;
    obj.category = in.gt.category;
    obj.average_iou = average_iou(in.parts, in.gt);
    CategoryAccumulator& cat = categories[obj.category];
    ++cat.objects;
    if (obj.average_iou) cat.aiou.push_back(*obj.average_iou);
    if (in.labeled) {
      obj.map50 = map50(in.parts, in.label_names, in.gt).mean;
      obj.miou = semantic_miou(in.parts, in.label_names, in.gt);
      accumulate_ap50(in.parts, in.label_names, in.gt, k, cat.pool);
      if (obj.miou) cat.miou.push_back(*obj.miou);
      cat.labeled = true;
    }
    report.objects.push_back(std::move(obj));
  }

  for (auto& [name, cat] : categories) {
    CategoryReport cr;
    cr.category = name;
    cr.objects = cat.objects;
    cr.average_iou = mean_of(cat.aiou);
    if (cat.labeled) {
      ApReport ap = map50_from_pool(cat.pool);
      cr.map50 = ap.mean;
      cr.ap50 = std::move(ap.per_class);
      cr.miou = mean_of(cat.miou);
    }
    report.categories.push_back(std::move(cr));
  }
  return report;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * *v);
  return buf;
}

}  // namespace

std::string report_json(const EvaluationReport& report) {
  nlohmann::json objs = nlohmann::json::array();
  for (const ObjectReport& o : report.objects) {
    objs.push_back({{"name", o.name},
                    {"category", o.category},
                    {"average_iou", opt(o.average_iou)},
                    {"map50", opt(o.map50)},
                    {"miou", opt(o.miou)}});
  }
  nlohmann::json cats = nlohmann::json::array();
  for (const CategoryReport& c : report.categories) {
    cats.push_back({{"category", c.category},
                    {"objects", c.objects},
                    {"average_iou", opt(c.average_iou)},
                    {"map50", opt(c.map50)},
                    {"ap50", c.ap50},
                    {"miou", opt(c.miou)}});
  }
  return nlohmann::json{{"objects", objs}, {"categories", cats}}.dump(2);
}

std::string report_table(const EvaluationReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %-12s %8s %8s %8s\n", "object",
                "category", "AvgIoU", "mAP50", "mIoU");
  out << line;
  for (const ObjectReport& o : report.objects) {
    std::snprintf(line, sizeof(line), "%-24s %-12s %8s %8s %8s\n",
                  o.name.c_str(), o.category.c_str(), cell(o.average_iou).c_str(),
                  cell(o.map50).c_str(), cell(o.miou).c_str());
    out << line;
  }
  out << '\n';
  std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %8s\n", "category",
                "objects", "AvgIoU", "mAP50", "mIoU");
  out << line;
  for (const CategoryReport& c : report.categories) {
    std::snprintf(line, sizeof(line), "%-24s %8zu %8s %8s %8s\n",
                  c.category.c_str(), c.objects, cell(c.average_iou).c_str(),
                  cell(c.map50).c_str(), cell(c.miou).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace partlift
