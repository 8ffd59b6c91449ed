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

#include "partlift/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include <Eigen/Geometry>

#include "partlift/errors.hpp"
#include "partlift/multiview.hpp"

namespace partlift {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// A sampled surface in a local frame whose z axis is `axis`.
struct Surface {
  double area = 0.0;
  std::function<Vec3(Rng&)> sample;
};

Mat3 frame_for(const Vec3& axis) {
  return Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), axis.normalized())
      .toRotationMatrix();
}

Surface placed(Surface local, const Vec3& origin, const Mat3& frame) {
  auto inner = std::move(local.sample);
  local.sample = [inner, origin, frame](Rng& rng) {
    return Vec3(origin + frame * inner(rng));
  };
  return local;
}

// Open cylinder or cone frustum around local z.
Surface frustum(double r0, double r1, double z0, double z1) {
  const double slant = std::hypot(r1 - r0, z1 - z0);
  Surface s;
  s.area = M_PI * (r0 + r1) * slant;
  s.sample = [=](Rng& rng) {
    const double rmax = std::max(r0, r1);
    for (;;) {
      const double t = uniform(rng, 0.0, 1.0);
      const double r = r0 + (r1 - r0) * t;
      if (uniform(rng, 0.0, rmax) > r) continue;
      const double a = uniform(rng, 0.0, 2.0 * M_PI);
      return Vec3(r * std::cos(a), r * std::sin(a), z0 + (z1 - z0) * t);
    }
  };
  return s;
}

// Annulus in the plane z = z0.
Surface disc(double radius, double z0, double inner = 0.0) {
  Surface s;
  s.area = M_PI * (radius * radius - inner * inner);
  s.sample = [=](Rng& rng) {
    const double r = std::sqrt(uniform(rng, inner * inner, radius * radius));
    const double a = uniform(rng, 0.0, 2.0 * M_PI);
    return Vec3(r * std::cos(a), r * std::sin(a), z0);
  };
  return s;
}

// Sphere of `radius` restricted to z in [z0, z1].
Surface sphere_zone(double radius, double z0, double z1) {
  Surface s;
  s.area = 2.0 * M_PI * radius * (z1 - z0);
  s.sample = [=](Rng& rng) {
    const double z = uniform(rng, z0, z1);
    const double r = std::sqrt(std::max(0.0, radius * radius - z * z));
    const double a = uniform(rng, 0.0, 2.0 * M_PI);
    return Vec3(r * std::cos(a), r * std::sin(a), z);
  };
  return s;
}

// Torus around local z, swept over azimuth [u0, u1] (radians).
Surface torus_arc(double major, double minor, double u0, double u1) {
  Surface s;
  s.area = (u1 - u0) * major * 2.0 * M_PI * minor;
  s.sample = [=](Rng& rng) {
    for (;;) {
      const double u = uniform(rng, u0, u1);
      const double v = uniform(rng, 0.0, 2.0 * M_PI);
      const double ring = major + minor * std::cos(v);
      if (uniform(rng, 0.0, major + minor) > ring) continue;
      return Vec3(ring * std::cos(u), ring * std::sin(u), minor * std::sin(v));
    }
  };
  return s;
}

// Axis-aligned box surface centred at the origin. `faces` selects
// -x, +x, -y, +y, -z, +z in that order.
Surface box(const Vec3& half, std::array<bool, 6> faces = {true, true, true,
                                                          true, true, true}) {
  std::array<double, 6> areas{};
  for (int f = 0; f < 6; ++f) {
    const int axis = f / 2;
    const int a = (axis + 1) % 3;
    const int b = (axis + 2) % 3;
    areas[f] = faces[f] ? 4.0 * half[a] * half[b] : 0.0;
  }
  Surface s;
  s.area = std::accumulate(areas.begin(), areas.end(), 0.0);
  s.sample = [=](Rng& rng) {
    double pick = uniform(rng, 0.0, s.area);
    int f = 0;
    while (f < 5 && pick >= areas[f]) pick -= areas[f++];
    while (areas[f] == 0.0) --f;
    const int axis = f / 2;
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = uniform(rng, -half[k], half[k]);
    p[axis] = (f % 2 == 0 ? -1.0 : 1.0) * half[axis];
    return p;
  };
  return s;
}

struct InstanceDef {
  std::string class_name;
  std::vector<Surface> surfaces;
};

struct TemplateDef {
  std::vector<InstanceDef> instances;
};

TemplateDef mug() {
  const Mat3 id = Mat3::Identity();
  TemplateDef t;
  t.instances.push_back({"body",
                         {placed(frustum(0.5, 0.5, 0.0, 1.2), Vec3::Zero(), id),
                          placed(disc(0.5, 0.0), Vec3::Zero(), id)}});
  // Outer half of a torus standing in the xz plane.
  t.instances.push_back(
      {"handle",
       {placed(torus_arc(0.33, 0.07, -M_PI / 2, M_PI / 2), Vec3(0.5, 0.0, 0.6),
               frame_for(Vec3::UnitY()))}});
  t.instances.push_back({"lid",
                         {placed(disc(0.53, 1.27), Vec3::Zero(), id),
                          placed(frustum(0.53, 0.53, 1.2, 1.27), Vec3::Zero(), id)}});
  return t;
}

TemplateDef table() {
  const Mat3 id = Mat3::Identity();
  TemplateDef t;
  t.instances.push_back(
      {"tabletop", {placed(box(Vec3(0.8, 0.5, 0.05)), Vec3(0, 0, 1.05), id)}});
  // Leg tops are hidden under the tabletop and are not sampled.
  const std::array<bool, 6> leg_faces{true, true, true, true, true, false};
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      t.instances.push_back(
          {"leg",
           {placed(box(Vec3(0.05, 0.05, 0.5), leg_faces),
                   Vec3(sx * 0.68, sy * 0.38, 0.5), id)}});
    }
  }
  return t;
}

TemplateDef kettle() {
  const Mat3 id = Mat3::Identity();
  const Vec3 c(0.0, 0.0, 0.6);
  const double r = 0.6;
  TemplateDef t;
  const double bottom = -0.55;
  const double top = 0.45;
  t.instances.push_back(
      {"body",
       {placed(sphere_zone(r, bottom, top), c, id),
        placed(disc(std::sqrt(r * r - bottom * bottom), bottom), c, id)}});
  const Vec3 spout_dir = Vec3(1.0, 0.0, 1.0).normalized();
  const Vec3 spout_base = c + 0.7 * Vec3(1.0, 0.0, 0.1).normalized();
  t.instances.push_back(
      {"spout",
       {placed(frustum(0.12, 0.06, 0.0, 0.5), spout_base, frame_for(spout_dir))}});
  t.instances.push_back(
      {"handle",
       {placed(torus_arc(0.3, 0.05, M_PI / 2, 3 * M_PI / 2),
               c + Vec3(-0.62, 0.0, 0.05), frame_for(Vec3::UnitY()))}});
  const double lid_r = std::sqrt(r * r - top * top) + 0.02;
  t.instances.push_back({"lid",
                         {placed(disc(lid_r, top + 0.05), c, id),
                          placed(frustum(lid_r, lid_r, top - 0.01, top + 0.05), c, id),
                          placed(frustum(0.06, 0.06, top + 0.05, top + 0.15), c, id),
                          placed(disc(0.06, top + 0.15), c, id)}});
  return t;
}

TemplateDef stapler() {
  const Mat3 id = Mat3::Identity();
  TemplateDef t;
  t.instances.push_back(
      {"base", {placed(box(Vec3(0.8, 0.2, 0.05)), Vec3(0, 0, 0.05), id)}});
  t.instances.push_back(
      {"lid", {placed(box(Vec3(0.65, 0.16, 0.07)), Vec3(0.05, 0, 0.45), id)}});
  // Hinge post joining the two at the back end.
  t.instances.push_back(
      {"hinge",
       {placed(frustum(0.09, 0.09, 0.1, 0.38), Vec3(-0.68, 0, 0), id)}});
  return t;
}

TemplateDef lamp() {
  const Mat3 id = Mat3::Identity();
  TemplateDef t;
  t.instances.push_back({"base",
                         {placed(frustum(0.5, 0.5, 0.0, 0.08), Vec3::Zero(), id),
                          placed(disc(0.5, 0.08), Vec3::Zero(), id),
                          placed(disc(0.5, 0.0), Vec3::Zero(), id)}});
  t.instances.push_back(
      {"pole", {placed(frustum(0.045, 0.045, 0.08, 1.22), Vec3::Zero(), id)}});
  t.instances.push_back(
      {"shade", {placed(frustum(0.45, 0.22, 1.15, 1.6), Vec3::Zero(), id)}});
  return t;
}

TemplateDef lookup(const std::string& name) {
  if (name == "mug") return mug();
  if (name == "table") return table();
  if (name == "kettle") return kettle();
  if (name == "stapler") return stapler();
  if (name == "lamp") return lamp();
  throw InputError("unknown scene template: " + name);
}

// Splits `total` proportionally to `weights` by largest remainder.
std::vector<std::size_t> apportion(std::size_t total,
                                   const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rest;
  std::size_t used = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double exact = total * weights[k] / sum;
    out[k] = static_cast<std::size_t>(std::floor(exact));
    used += out[k];
    rest.emplace_back(exact - std::floor(exact), k);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < total; ++k, ++used) ++out[rest[k].second];
  return out;
}

constexpr Rgb kPalette[] = {
    {200, 70, 60},  {60, 140, 200}, {90, 180, 90},  {220, 180, 60},
    {150, 90, 190}, {80, 190, 190}, {230, 120, 170}, {120, 120, 60},
};

std::uint8_t shade(int base, int delta) {
  return static_cast<std::uint8_t>(std::clamp(base + delta, 0, 255));
}

void check_visibility(const ColoredPointCloud& cloud, const GroundTruth& gt,
                      const std::string& name) {
  const auto [normalized, record] = normalize_to_unit_sphere(cloud);
  const auto views = place_viewpoints(20);
  const std::vector<int> ids = gt.instance_ids();
  std::vector<int> good_views(ids.size(), 0);
  for (const Viewpoint& vp : views) {
    const RenderProduct rp = render(normalized, vp);
    std::vector<std::size_t> counts(ids.size(), 0);
    for (PointIndex i : rp.visible()) ++counts[gt.instance[i]];
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (counts[k] >= 50) ++good_views[k];
    }
  }
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (good_views[k] < 4) {
      throw InputError("template " + name + ": instance " +
                       std::to_string(ids[k]) + " is visible from only " +
                       std::to_string(good_views[k]) + " views");
    }
  }
}

}  // namespace

const std::vector<std::string>& scene_templates() {
  static const std::vector<std::string> names{"mug", "table", "kettle",
                                              "stapler", "lamp"};
  return names;
}

Scene generate_scene(const SceneSpec& spec) {
  const TemplateDef def = lookup(spec.template_name);
  const std::size_t n_inst = def.instances.size();

  std::vector<std::size_t> counts;
  if (!spec.part_points.empty()) {
    if (spec.part_points.size() != n_inst) {
      throw InputError("template " + spec.template_name + " has " +
                       std::to_string(n_inst) + " parts");
    }
    counts = spec.part_points;
  } else {
    std::vector<double> areas;
    for (const InstanceDef& inst : def.instances) {
      double a = 0.0;
      for (const Surface& s : inst.surfaces) a += s.area;
      areas.push_back(a);
    }
    counts = apportion(spec.total_points, areas);
  }
  if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) < 1000) {
    throw InputError("a scene needs at least 1000 points");
  }

  std::vector<std::string> classes;
  std::vector<int> instance_class;
  for (const InstanceDef& inst : def.instances) {
    auto it = std::find(classes.begin(), classes.end(), inst.class_name);
    if (it == classes.end()) {
      classes.push_back(inst.class_name);
      it = classes.end() - 1;
    }
    instance_class.push_back(static_cast<int>(it - classes.begin()));
  }

  Rng rng(spec.seed);
  struct Sample {
    Vec3 p;
    int instance;
  };
  std::vector<Sample> samples;
  for (std::size_t k = 0; k < n_inst; ++k) {
    const auto& surfaces = def.instances[k].surfaces;
    std::vector<double> areas;
    for (const Surface& s : surfaces) areas.push_back(s.area);
    const auto per_surface = apportion(counts[k], areas);
    for (std::size_t s = 0; s < surfaces.size(); ++s) {
      for (std::size_t j = 0; j < per_surface[s]; ++j) {
        samples.push_back({surfaces[s].sample(rng), static_cast<int>(k)});
      }
    }
  }
  std::shuffle(samples.begin(), samples.end(), rng);

  Scene scene;
  scene.gt.class_names = classes;
  scene.gt.category = spec.template_name;
  std::uniform_int_distribution<int> jitter(-12, 12);
  for (const Sample& s : samples) {
    const int cls = instance_class[static_cast<std::size_t>(s.instance)];
    Rgb base{170, 170, 170};
    if (spec.colors == ColorScheme::kByInstance) base = kPalette[s.instance % 8];
    if (spec.colors == ColorScheme::kByClass) base = kPalette[cls % 8];
    const int d = jitter(rng);
    scene.cloud.positions.push_back(s.p);
    scene.cloud.colors.push_back(
        Rgb{shade(base.r, d), shade(base.g, d), shade(base.b, d)});
    scene.gt.semantic.push_back(cls);
    scene.gt.instance.push_back(s.instance);
  }

  if (spec.rotation_deg) {
    const auto& e = *spec.rotation_deg;
    const Mat3 rot = rotation_from_euler_deg(e[0], e[1], e[2]);
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : scene.cloud.positions) centroid += p;
    centroid /= static_cast<double>(scene.cloud.size());
    for (Vec3& p : scene.cloud.positions) p = rot * (p - centroid) + centroid;
  }

  scene.gt.validate(scene.cloud.size());
  check_visibility(scene.cloud, scene.gt, spec.template_name);
  return scene;
}

}  // namespace partlift
