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

#include "partlift/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "partlift/errors.hpp"

namespace partlift {

using json = nlohmann::json;

namespace {

struct PlyProperty {
  std::string type;
  std::string name;
};

std::size_t type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "float" || t == "int32" ||
      t == "uint32" || t == "float32") {
    return 4;
  }
  if (t == "double" || t == "float64") return 8;
  throw InputError("unsupported PLY property type: " + t);
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double binary_value(const std::string& t, const char* p) {
  if (t == "char" || t == "int8") return load_le<std::int8_t>(p);
  if (t == "uchar" || t == "uint8") return load_le<std::uint8_t>(p);
  if (t == "short" || t == "int16") return load_le<std::int16_t>(p);
  if (t == "ushort" || t == "uint16") return load_le<std::uint16_t>(p);
  if (t == "int" || t == "int32") return load_le<std::int32_t>(p);
  if (t == "uint" || t == "uint32") return load_le<std::uint32_t>(p);
  if (t == "float" || t == "float32") return load_le<float>(p);
  return load_le<double>(p);
}

std::uint8_t to_channel(double v) {
  if (v < 0.0) return 0;
  if (v > 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace

ColoredPointCloud parse_ply(std::string_view bytes) {
  const auto header_end = bytes.find("end_header");
  if (bytes.substr(0, 3) != "ply" || header_end == std::string_view::npos) {
    throw InputError("not a PLY file");
  }
  std::size_t body = bytes.find('\n', header_end);
  if (body == std::string_view::npos) throw InputError("truncated PLY header");
  ++body;

  std::istringstream header{std::string(bytes.substr(0, header_end))};
  std::string line;
  std::string format;
  std::size_t vertex_count = 0;
  bool in_vertex = false;
  bool vertex_first = true;
  bool seen_element = false;
  std::vector<PlyProperty> props;
  while (std::getline(header, line)) {
    std::istringstream words(line);
    std::string key;
    words >> key;
    if (key == "format") {
      words >> format;
    } else if (key == "element") {
      std::string name;
      std::size_t count = 0;
      words >> name >> count;
      in_vertex = name == "vertex";
      if (in_vertex) {
        vertex_count = count;
        vertex_first = !seen_element;
      }
      seen_element = true;
    } else if (key == "property" && in_vertex) {
      PlyProperty p;
      words >> p.type;
      if (p.type == "list") throw InputError("list properties on vertices");
      words >> p.name;
      props.push_back(p);
    }
  }
  if (format != "ascii" && format != "binary_little_endian") {
    throw InputError("unsupported PLY format: " + format);
  }
  if (!vertex_first) throw InputError("PLY vertex element must come first");

  std::map<std::string, std::size_t> slot;
  for (std::size_t k = 0; k < props.size(); ++k) slot[props[k].name] = k;
  for (const char* axis : {"x", "y", "z"}) {
    if (!slot.count(axis)) throw InputError(std::string("PLY lacks property ") + axis);
  }
  const bool has_color = slot.count("red") && slot.count("green") && slot.count("blue");

  ColoredPointCloud cloud;
  cloud.positions.reserve(vertex_count);
  cloud.colors.reserve(vertex_count);
  std::vector<double> values(props.size());
  auto emit = [&] {
    cloud.positions.emplace_back(values[slot["x"]], values[slot["y"]],
                                 values[slot["z"]]);
    if (has_color) {
      cloud.colors.push_back(Rgb{to_channel(values[slot["red"]]),
                                 to_channel(values[slot["green"]]),
                                 to_channel(values[slot["blue"]])});
    } else {
      cloud.colors.push_back(Rgb{128, 128, 128});
    }
  };

  if (format == "ascii") {
    std::istringstream in{std::string(bytes.substr(body))};
    for (std::size_t i = 0; i < vertex_count; ++i) {
      for (double& v : values) {
        if (!(in >> v)) throw InputError("truncated PLY vertex data");
      }
      emit();
    }
  } else {
    std::size_t stride = 0;
    std::vector<std::size_t> offsets;
    for (const PlyProperty& p : props) {
      offsets.push_back(stride);
      stride += type_size(p.type);
    }
    if (bytes.size() < body + stride * vertex_count) {
      throw InputError("truncated PLY vertex data");
    }
    for (std::size_t i = 0; i < vertex_count; ++i) {
      const char* row = bytes.data() + body + i * stride;
      for (std::size_t k = 0; k < props.size(); ++k) {
        values[k] = binary_value(props[k].type, row + offsets[k]);
      }
      emit();
    }
  }
  cloud.validate();
  return cloud;
}

std::string write_ply(const ColoredPointCloud& cloud) {
  std::ostringstream out;
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << cloud.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  std::string s = out.str();
  s.reserve(s.size() + cloud.size() * 27);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      const double v = cloud.positions[i][k];
      char buf[8];
      std::memcpy(buf, &v, 8);
      s.append(buf, 8);
    }
    s.push_back(static_cast<char>(cloud.colors[i].r));
    s.push_back(static_cast<char>(cloud.colors[i].g));
    s.push_back(static_cast<char>(cloud.colors[i].b));
  }
  return s;
}

GroundTruth parse_ground_truth(std::string_view text) {
  try {
    const json doc = json::parse(text);
    GroundTruth gt;
    gt.class_names = doc.at("classes").get<std::vector<std::string>>();
    gt.semantic = doc.at("semantic").get<std::vector<int>>();
    gt.instance = doc.at("instance").get<std::vector<int>>();
    if (doc.contains("category")) gt.category = doc.at("category").get<std::string>();
    gt.validate(gt.instance.size());
    return gt;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed ground truth: ") + e.what());
  }
}

std::string write_ground_truth(const GroundTruth& gt) {
  return json{{"category", gt.category},
              {"classes", gt.class_names},
              {"semantic", gt.semantic},
              {"instance", gt.instance}}
      .dump();
}

PartsFile parse_parts(std::string_view text) {
  try {
    const json doc = json::parse(text);
    PartsFile f;
    f.num_points = doc.at("num_points").get<std::size_t>();
    for (const json& p : doc.at("parts")) {
      Part3D part;
      part.part_id = p.at("part_id").get<int>();
      auto indices = p.at("indices").get<std::vector<PointIndex>>();
      for (PointIndex i : indices) {
        if (i >= f.num_points) throw InputError("part index beyond num_points");
      }
      part.points = PointIndexSet::from_unsorted(std::move(indices));
      if (p.contains("label")) {
        f.labeled = true;
        if (!p.at("label").is_null()) {
          const auto name = p.at("label").get<std::string>();
          auto it = std::find(f.label_names.begin(), f.label_names.end(), name);
          if (it == f.label_names.end()) {
            f.label_names.push_back(name);
            it = f.label_names.end() - 1;
          }
          part.label = static_cast<int>(it - f.label_names.begin());
        }
        part.confidence = p.value("confidence", 0.0);
      }
      f.parts.push_back(std::move(part));
    }
    return f;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed parts file: ") + e.what());
  }
}

std::string write_parts(std::size_t num_points, std::span<const Part3D> parts,
                        std::span<const std::string> label_names,
                        bool labeled) {
  json arr = json::array();
  for (const Part3D& p : parts) {
    json entry{{"part_id", p.part_id}, {"indices", p.points.indices()}};
    if (labeled) {
      if (p.label && static_cast<std::size_t>(*p.label) < label_names.size()) {
        entry["label"] = label_names[static_cast<std::size_t>(*p.label)];
      } else {
        entry["label"] = nullptr;
      }
      entry["confidence"] = p.confidence;
    }
    arr.push_back(std::move(entry));
  }
  return json{{"num_points", num_points}, {"parts", std::move(arr)}}.dump();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace partlift
