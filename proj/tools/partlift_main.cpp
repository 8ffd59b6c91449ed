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

// partlift: command-line front end.
//
//   partlift gen      --template mug --out mug.ply --gt-out mug.gt.json
//   partlift render   --input mug.ply --view 1 --png v1.png --index-map v1.bin
//   partlift segment  --input mug.ply --gt mug.gt.json --backend oracle --out parts.json
//   partlift label    --input mug.ply --parts parts.json --prompt body,handle,lid ...
//   partlift pipeline --input mug.ply --prompt body,handle,lid --out labeled.json ...
//   partlift eval     --pred labeled.json --gt mug.gt.json [--pred ... --gt ...]
//
// Exit codes: 0 success, 2 usage or input error, 3 backend failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "partlift/errors.hpp"
#include "partlift/image_io.hpp"
#include "partlift/io.hpp"
#include "partlift/metrics.hpp"
#include "partlift/pipeline.hpp"
#include "partlift/scenes.hpp"

namespace {

using namespace partlift;

constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;

struct CommonOptions {
  PipelineConfig config;
  std::string backend = "oracle";
  std::string vote_mode = "both";
  bool no_extend = false;
  bool no_cnvp = false;
};

void add_pipeline_options(CLI::App* cmd, CommonOptions& o) {
  auto& c = o.config;
  cmd->add_option("--views", c.views, "Number of viewpoints")->capture_default_str();
  cmd->add_option("--resolution", c.resolution, "Render side in pixels")
      ->capture_default_str()
      ->check(CLI::Range(64, 8192));
  cmd->add_option("--splat", c.splat_radius, "Point splat radius in pixels")
      ->capture_default_str();
  cmd->add_option("--fps", c.fps_count, "Keypoints for the start view")
      ->capture_default_str();
  cmd->add_option("--sve-fps", c.sve_fps_count, "Keypoints per extension prompt")
      ->capture_default_str();
  cmd->add_option("--threshold", c.merge_threshold, "Merge IoU threshold")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--backend", o.backend,
                  "oracle | noisy:key=value,... | remote:http://host:port")
      ->capture_default_str();
  cmd->add_flag("--no-extend", o.no_extend, "Keep start-view groups only");
  cmd->add_flag("--no-cnvp", o.no_cnvp, "Label from raw votes");
  cmd->add_option("--vote-mode", o.vote_mode, "both | 2d | 3d")
      ->capture_default_str()
      ->check(CLI::IsMember({"both", "2d", "3d"}));
  cmd->add_flag("--skip-failed-views", c.skip_failed_views,
                "Skip views whose backend call keeps failing");
  cmd->add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
  cmd->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str();
}

PipelineConfig finish(const CommonOptions& o) {
  PipelineConfig c = o.config;
  c.extend = !o.no_extend;
  c.use_cnvp = !o.no_cnvp;
  c.vote_mode = o.vote_mode == "2d"   ? VoteMode::kOnly2D
                : o.vote_mode == "3d" ? VoteMode::kOnly3D
                                      : VoteMode::kBoth;
  return c;
}

std::optional<GroundTruth> load_gt(const std::string& path, std::size_t n) {
  if (path.empty()) return std::nullopt;
  GroundTruth gt = parse_ground_truth(read_file(path));
  gt.validate(n);
  return gt;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("partlift"));
  spdlog::set_pattern("[%H:%M:%S.%e] %v");

  CLI::App app{"Zero-shot 3D part segmentation from multi-view 2D models"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic object");
  SceneSpec spec;
  std::string gen_out, gen_gt_out;
  std::vector<double> rotation;
  gen->add_option("--template", spec.template_name, "mug | table | kettle | stapler | lamp")
      ->required();
  gen->add_option("--points", spec.total_points)->capture_default_str();
  gen->add_option("--seed", spec.seed)->capture_default_str();
  gen->add_option("--rotate", rotation, "roll,pitch,yaw in degrees")
      ->delimiter(',')
      ->expected(3);
  gen->add_option("--out", gen_out, "PLY output")->required();
  gen->add_option("--gt-out", gen_gt_out, "Ground-truth JSON output")->required();

  // render
  auto* rend = app.add_subcommand("render", "Export one view as PNG and index map");
  std::string render_input, render_png, render_index;
  int render_view = 1;
  CommonOptions render_opts;
  rend->add_option("--input", render_input)->required();
  rend->add_option("--view", render_view, "Viewpoint id")->required();
  rend->add_option("--views", render_opts.config.views)->capture_default_str();
  rend->add_option("--resolution", render_opts.config.resolution)->capture_default_str();
  rend->add_option("--splat", render_opts.config.splat_radius)->capture_default_str();
  rend->add_option("--png", render_png);
  rend->add_option("--index-map", render_index);

  // segment / label / pipeline share the pipeline options.
  auto* seg = app.add_subcommand("segment", "Unlabeled part segmentation");
  auto* lab = app.add_subcommand("label", "Label existing parts");
  auto* pipe = app.add_subcommand("pipeline", "Segment and label");
  CommonOptions opts;
  std::string input, gt_path, out, parts_path, prompt_text, votes_csv;
  for (auto* cmd : {seg, lab, pipe}) {
    cmd->add_option("--input", input, "Input PLY")->required();
    cmd->add_option("--gt", gt_path, "Ground truth (oracle and noisy backends)");
    cmd->add_option("--out", out, "Output parts JSON")->required();
    add_pipeline_options(cmd, opts);
  }
  lab->add_option("--parts", parts_path, "Parts JSON from segment")->required();
  for (auto* cmd : {lab, pipe}) {
    cmd->add_option("--prompt", prompt_text, "Comma-separated part names")->required();
    cmd->add_option("--votes-csv", votes_csv, "Dump vote and decision matrices");
  }

  // eval
  auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
  std::vector<std::string> preds, gts;
  std::string report_out;
  ev->add_option("--pred", preds, "Parts JSON, paired with --gt in order")->required();
  ev->add_option("--gt", gts, "Ground-truth JSON")->required();
  ev->add_option("--json", report_out, "Write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    if (*gen) {
      if (!rotation.empty()) spec.rotation_deg = {rotation[0], rotation[1], rotation[2]};
      const Scene scene = generate_scene(spec);
      write_file(gen_out, write_ply(scene.cloud));
      write_file(gen_gt_out, write_ground_truth(scene.gt));
      spdlog::info("{}: {} points, {} instances", spec.template_name,
                   scene.cloud.size(), scene.gt.instance_ids().size());
      return 0;
    }

    if (*rend) {
      const ColoredPointCloud cloud = parse_ply(read_file(render_input));
      const auto [normalized, record] = normalize_to_unit_sphere(cloud);
      const auto views = place_viewpoints(render_opts.config.views);
      if (render_view < 1 || render_view > static_cast<int>(views.size())) {
        throw InputError("invalid view id " + std::to_string(render_view));
      }
      const RenderProduct rp =
          render(normalized, views[static_cast<std::size_t>(render_view - 1)],
                 render_opts.config.resolution, render_opts.config.splat_radius);
      if (!render_png.empty()) {
        write_file(render_png, encode_png(RgbImage{rp.width(), rp.height(), rp.image()}));
      }
      if (!render_index.empty()) write_file(render_index, encode_index_map(rp));
      spdlog::info("view {}: {} visible points", render_view, rp.visible().size());
      return 0;
    }

    if (*ev) {
      if (preds.size() != gts.size()) {
        throw InputError("--pred and --gt must be given the same number of times");
      }
      std::vector<ObjectInput> objects;
      for (std::size_t k = 0; k < preds.size(); ++k) {
        PartsFile pf = parse_parts(read_file(preds[k]));
        GroundTruth gt = parse_ground_truth(read_file(gts[k]));
        if (pf.num_points != gt.size()) {
          throw InputError(preds[k] + " has " + std::to_string(pf.num_points) +
                           " points but " + gts[k] + " has " +
                           std::to_string(gt.size()));
        }
        objects.push_back(ObjectInput{preds[k], std::move(pf.parts),
                                      std::move(pf.label_names), pf.labeled,
                                      std::move(gt)});
      }
      const EvaluationReport report = evaluate(objects);
      std::cout << report_table(report);
      if (!report_out.empty()) write_file(report_out, report_json(report));
      return 0;
    }

    const PipelineConfig config = finish(opts);
    const ColoredPointCloud cloud = parse_ply(read_file(input));
    const std::optional<GroundTruth> gt = load_gt(gt_path, cloud.size());
    const Backends backends = make_backends(opts.backend, gt ? &*gt : nullptr, config.seed);
    const PreparedObject object = prepare(cloud, config);

    std::vector<Part3D> parts;
    if (*lab) {
      PartsFile pf = parse_parts(read_file(parts_path));
      if (pf.num_points != cloud.size()) {
        throw InputError("parts file does not match the input cloud");
      }
      parts = std::move(pf.parts);
    } else {
      parts = segment_parts(object, *backends.segmenter, config);
    }

    if (*seg) {
      write_file(out, write_parts(cloud.size(), parts));
      return 0;
    }

    const TextPrompt prompt = TextPrompt::parse(prompt_text);
    const LabelingResult labeled =
        label_parts(object, parts, *backends.detector, prompt, config);
    write_file(out, write_parts(cloud.size(), labeled.parts, prompt.class_names, true));
    if (!votes_csv.empty()) {
      write_file(votes_csv, matrix_csv(labeled.votes, prompt.class_names) + "\n" +
                                matrix_csv(labeled.decision, prompt.class_names));
    }
    return 0;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const BackendError& e) {
    spdlog::error("backend failure: {}", e.what());
    return kExitBackend;
  }
}
