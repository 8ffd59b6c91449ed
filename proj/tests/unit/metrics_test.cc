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

#include <random>
#include <set>

#include <gtest/gtest.h>
#include <json.hpp>

namespace partlift {
namespace {

Part3D part(std::vector<PointIndex> pts, int id, std::optional<int> label = {},
            double conf = 0.0) {
  Part3D p;
  p.points = PointIndexSet::from_unsorted(std::move(pts));
  p.part_id = id;
  p.label = label;
  p.confidence = conf;
  return p;
}

// Points 0-3 body, 4-5 lid, 6-7 unannotated.
GroundTruth small_gt() {
  return GroundTruth{{"body", "lid"}, {0, 0, 0, 0, 1, 1, -1, -1},
                     {0, 0, 0, 0, 1, 1, -1, -1}, "mug"};
}

// Nested-loop references over std::set.
double ref_iou(const std::set<PointIndex>& a, const std::set<PointIndex>& b) {
  std::size_t inter = 0;
  for (auto v : a) inter += b.count(v);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni ? static_cast<double>(inter) / uni : 0.0;
}

std::set<PointIndex> annotated(const Part3D& p, const GroundTruth& gt) {
  std::set<PointIndex> out;
  for (auto i : p.points) {
    if (gt.instance[i] >= 0) out.insert(i);
  }
  return out;
}

double ref_average_iou(const std::vector<Part3D>& parts, const GroundTruth& gt) {
  double sum = 0;
  const auto ids = gt.instance_ids();
  for (int id : ids) {
    std::set<PointIndex> inst;
    for (PointIndex i = 0; i < gt.size(); ++i) {
      if (gt.instance[i] == id) inst.insert(i);
    }
    double best = 0;
    for (const Part3D& p : parts) best = std::max(best, ref_iou(inst, annotated(p, gt)));
    sum += best;
  }
  return sum / ids.size();
}

TEST(AverageIouTest, Examples) {
  const GroundTruth gt = small_gt();
  const std::vector<Part3D> exact{part({0, 1, 2, 3}, 0), part({4, 5}, 1)};
  EXPECT_DOUBLE_EQ(*average_iou(exact, gt), 1.0);

  const GroundTruth halves{{"a"}, {0, 0, 0, 0}, {0, 0, 1, 1}, "x"};
  const std::vector<Part3D> whole{part({0, 1, 2, 3}, 0)};
  EXPECT_DOUBLE_EQ(*average_iou(whole, halves), 0.5);

  // Unannotated points in a prediction do not count against it.
  const std::vector<Part3D> spill{part({0, 1, 2, 3, 6, 7}, 0), part({4, 5}, 1)};
  EXPECT_DOUBLE_EQ(*average_iou(spill, gt), 1.0);

  const GroundTruth none{{"a"}, {-1, -1}, {-1, -1}, "x"};
  EXPECT_FALSE(average_iou(whole, none).has_value());
}

TEST(AverageIouTest, MatchesReferenceAndIgnoresOrder) {
  std::mt19937 rng(4);
  for (int t = 0; t < 100; ++t) {
    GroundTruth gt{{"a", "b", "c"}, {}, {}, "x"};
    const int n = 30;
    for (int i = 0; i < n; ++i) {
      const int inst = static_cast<int>(rng() % 4) - 1;
      gt.instance.push_back(inst);
      gt.semantic.push_back(inst < 0 ? -1 : inst);
    }
    if (gt.instance_ids().empty()) continue;
    std::vector<Part3D> parts;
    for (int k = 0; k < 3; ++k) {
      std::vector<PointIndex> pts;
      for (PointIndex i = 0; i < n; ++i) {
        if (rng() % 3 == 0) pts.push_back(i);
      }
      parts.push_back(part(pts, k));
    }
    EXPECT_NEAR(*average_iou(parts, gt), ref_average_iou(parts, gt), 1e-12);
    std::reverse(parts.begin(), parts.end());
    EXPECT_NEAR(*average_iou(parts, gt), ref_average_iou(parts, gt), 1e-12);
  }
}

TEST(Map50Test, Examples) {
  const GroundTruth gt = small_gt();
  const std::vector<std::string> names{"body", "lid"};
  const std::vector<Part3D> perfect{part({0, 1, 2, 3}, 0, 0, 0.9), part({4, 5}, 1, 1, 0.7)};
  const ApReport p = map50(perfect, names, gt);
  EXPECT_DOUBLE_EQ(p.per_class.at("body"), 1.0);
  EXPECT_DOUBLE_EQ(p.per_class.at("lid"), 1.0);
  EXPECT_DOUBLE_EQ(*p.mean, 1.0);

  const ApReport empty = map50({}, names, gt);
  EXPECT_DOUBLE_EQ(*empty.mean, 0.0);

  // One correct at 0.9 and one wrong at 0.8 against one body instance.
  const GroundTruth one{{"body"}, {0, 0, 0, 0}, {0, 0, 0, 0}, "x"};
  const std::vector<std::string> body{"body"};
  const std::vector<Part3D> two{part({0, 1, 2, 3}, 0, 0, 0.9), part({0}, 1, 0, 0.8)};
  EXPECT_DOUBLE_EQ(map50(two, body, one).per_class.at("body"), 1.0);
  // Reversed confidences: precision 1/2 at full recall.
  const std::vector<Part3D> flipped{part({0, 1, 2, 3}, 0, 0, 0.8), part({0}, 1, 0, 0.9)};
  EXPECT_DOUBLE_EQ(map50(flipped, body, one).per_class.at("body"), 0.5);
}

TEST(Map50Test, ConfidenceScaleInvariant) {
  const GroundTruth gt = small_gt();
  const std::vector<std::string> names{"body", "lid"};
  std::vector<Part3D> parts{part({0, 1, 2}, 0, 0, 0.4), part({3, 4, 5}, 1, 1, 0.8),
                            part({4, 5}, 2, 1, 0.3), part({0, 1, 2, 3}, 3, 0, 0.2)};
  const double a = *map50(parts, names, gt).mean;
  for (auto& p : parts) p.confidence *= 3.5;
  EXPECT_DOUBLE_EQ(*map50(parts, names, gt).mean, a);
}

// All-point AP written as a plain loop over the ranked list.
double ref_ap(std::vector<std::pair<double, bool>> ranked, std::size_t gt_count) {
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](auto& x, auto& y) { return x.first > y.first; });
  std::vector<double> prec, rec;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    tp += ranked[k].second;
    prec.push_back(static_cast<double>(tp) / (k + 1));
    rec.push_back(static_cast<double>(tp) / gt_count);
  }
  double ap = 0, prev_r = 0;
  for (std::size_t k = 0; k < prec.size(); ++k) {
    double env = 0;
    for (std::size_t j = k; j < prec.size(); ++j) env = std::max(env, prec[j]);
    ap += (rec[k] - prev_r) * env;
    prev_r = rec[k];
  }
  return ap;
}

TEST(AveragePrecisionTest, MatchesReference) {
  std::mt19937 rng(6);
  for (int t = 0; t < 200; ++t) {
    ClassDetections d;
    d.gt_count = 1 + rng() % 6;
    std::vector<std::pair<double, bool>> ranked;
    std::size_t tps = 0;
    const int n = rng() % 10;
    for (int k = 0; k < n; ++k) {
      const bool tp = tps < d.gt_count && rng() % 2;
      tps += tp;
      const double conf = (rng() % 1000) / 1000.0;
      d.entries.push_back({conf, 0, k, tp});
      ranked.push_back({conf, tp});
    }
    EXPECT_NEAR(average_precision(d), ref_ap(ranked, d.gt_count), 1e-12);
  }
  EXPECT_EQ(average_precision(ClassDetections{}), 0.0);
}

TEST(SemanticMiouTest, Examples) {
  const GroundTruth gt = small_gt();
  const std::vector<std::string> names{"body", "lid"};
  const std::vector<Part3D> perfect{part({0, 1, 2, 3}, 0, 0), part({4, 5}, 1, 1)};
  EXPECT_DOUBLE_EQ(*semantic_miou(perfect, names, gt), 1.0);
  const std::vector<Part3D> unlabeled{part({0, 1, 2, 3}, 0), part({4, 5}, 1)};
  EXPECT_DOUBLE_EQ(*semantic_miou(unlabeled, names, gt), 0.0);
  // Point 3 labeled lid: body 3/4, lid 2/3.
  const std::vector<Part3D> swap{part({0, 1, 2}, 0, 0), part({3, 4, 5}, 1, 1)};
  EXPECT_DOUBLE_EQ(*semantic_miou(swap, names, gt), (3.0 / 4.0 + 2.0 / 3.0) / 2.0);
}

TEST(InstanceLabelAccuracyTest, CountsBestMatchLabels) {
  const GroundTruth gt = small_gt();
  const std::vector<std::string> names{"body", "lid"};
  const std::vector<Part3D> half{part({0, 1, 2, 3}, 0, 0), part({4, 5}, 1, 0)};
  EXPECT_DOUBLE_EQ(instance_label_accuracy(half, names, gt), 0.5);
}

TEST(EvaluateTest, PoolsByCategoryAndSerializes) {
  ObjectInput a{"a", {part({0, 1, 2, 3}, 0, 0, 0.9), part({4, 5}, 1, 1, 0.8)},
                {"body", "lid"}, true, small_gt()};
  ObjectInput b{"b", {part({0, 1, 2, 3, 4, 5}, 0, 0, 0.9)}, {"body", "lid"}, true, small_gt()};
  const std::vector<ObjectInput> objs{a, b};
  const EvaluationReport r = evaluate(objs);
  ASSERT_EQ(r.objects.size(), 2u);
  ASSERT_EQ(r.categories.size(), 1u);
  EXPECT_EQ(r.categories[0].category, "mug");
  EXPECT_EQ(r.categories[0].objects, 2u);
  EXPECT_DOUBLE_EQ(*r.objects[1].average_iou, (4.0 / 6.0 + 2.0 / 6.0) / 2.0);
  EXPECT_DOUBLE_EQ(*r.categories[0].average_iou,
                   (*r.objects[0].average_iou + *r.objects[1].average_iou) / 2.0);
  // b's single part still matches its body at IoU 4/6; b's lid goes unfound.
  EXPECT_DOUBLE_EQ(r.categories[0].ap50.at("body"), 1.0);
  EXPECT_DOUBLE_EQ(r.categories[0].ap50.at("lid"), 0.5);
  const auto doc = nlohmann::json::parse(report_json(r));
  EXPECT_TRUE(doc.contains("categories"));
  EXPECT_NE(report_table(r).find("mug"), std::string::npos);
}

}  // namespace
}  // namespace partlift
