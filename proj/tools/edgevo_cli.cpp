// edgevo command line: run, rpe, select, merge, render.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgevo/edge_model.hpp"
#include "edgevo/edge_selection.hpp"
#include "edgevo/error.hpp"
#include "edgevo/io.hpp"
#include "edgevo/pipeline.hpp"
#include "edgevo/synth.hpp"
#include "edgevo/trajectory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTracking = 2;
constexpr int kExitConfig = 3;

using namespace edgevo;

int cmd_run(const RunOptions& opts, bool quiet) {
  const RunResult r = run_vo(opts);
  if (!quiet) {
    std::printf("scene %s: %zu frames, %zu keyframes\n", r.scene_name.c_str(), r.frames.size(), r.keyframes.size());
    if (r.rpe)
      std::printf("rpe delta %d: translation rmse %.6g (%.4f%% of path), %.6g /s, rotation rmse %.6g deg\n",
                  r.rpe->delta, r.rpe->translation.rmse,
                  r.path_length > 0 ? 100.0 * r.rpe->translation.rmse / r.path_length : 0.0,
                  r.rpe->translation_rate.rmse, r.rpe->rotation.rmse);
  }
  if (r.exit_code != 0) std::fprintf(stderr, "tracking aborted: %s\n", r.message.c_str());
  return r.exit_code;
}

int cmd_rpe(const std::string& gt_path, const std::string& est_path, int delta, const std::string& align) {
  const auto report = rpe(read_trajectory(gt_path), read_trajectory(est_path), delta, parse_scale_alignment(align));
  auto stats = [](const ErrorStats& s) {
    return nlohmann::ordered_json{{"rmse", s.rmse}, {"mean", s.mean}, {"median", s.median}, {"max", s.max}};
  };
  nlohmann::ordered_json j;
  j["delta"] = report.delta;
  j["alignment"] = to_string(report.alignment);
  j["scale"] = report.scale;
  j["pairs"] = report.translation_errors.size();
  j["translation"] = stats(report.translation);
  j["translation_per_second"] = stats(report.translation_rate);
  j["rotation_deg"] = stats(report.rotation);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_select(const std::string& seg_path, const std::string& conflict_path, int width, double overlap) {
  GroundSet ground{read_segments_file(seg_path), width};
  if (ground.image_width <= 0) {
    for (const auto& e : ground.edges)
      ground.image_width = std::max(ground.image_width, static_cast<int>(std::ceil(std::max(e.p1.u, e.p2.u))) + 1);
  }
  ground.validate();
  const auto conflicts = conflict_path.empty() ? find_conflicts(ground, overlap) : read_conflicts_file(conflict_path);
  const auto res = greedy_select(ground, conflicts);
  std::printf("# score %ld, %zu of %zu edges, %zu conflicts\n", res.score, res.selected.size(), ground.edges.size(),
              conflicts.size());
  std::vector<LineSegment2D> chosen;
  for (const auto& e : ground.edges)
    if (res.selected.count(e.id)) chosen.push_back(e);
  write_segments(std::cout, chosen);
  return kExitOk;
}

int cmd_merge(const std::string& seg_path, double min_length) {
  auto merged = merge_segments(read_segments_file(seg_path));
  if (min_length > 0.0) merged = remove_short_segments(merged, min_length);
  write_segments(std::cout, merged);
  return kExitOk;
}

int cmd_render(const std::string& scene, int frame, int frames, const std::string& noise, std::uint64_t seed,
               const std::string& out) {
  SceneConfig cfg = load_scene_config(scene);
  if (frames > 0) cfg.frames = frames;
  if (frame < 0 || frame >= cfg.frames) throw Error(ErrorCode::InvalidArgument, "frame index out of range");
  const auto poses = generate_trajectory(cfg.trajectory, cfg.frames);
  RenderedFrame f = render(cfg.scene, cfg.camera, poses[frame]);
  const NoiseSpec n = parse_noise(noise);
  if (!n.zero()) f = apply_noise(f, n, seed);
  std::filesystem::create_directories(out);
  const std::filesystem::path d(out);
  write_pgm((d / "image.pgm").string(), f.image);
  write_depth((d / "depth.evdm").string(), f.noisy_depth ? *f.noisy_depth : f.gt_depth);
  std::ofstream segs(d / "segments.txt");
  write_segments(segs, f.edges);
  Trajectory t;
  t.push_back(frame / cfg.fps, poses[frame]);
  write_trajectory((d / "pose.txt").string(), t);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-aided semi-dense visual odometry on synthetic scenes"};
  app.require_subcommand(1);

  RunOptions opts;
  std::string noise = "none", match_mode = "gt", edge_select = "off";
  int frames = 0;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run the odometry pipeline on a rendered sequence");
  run->add_option("--scene", opts.scene, "preset (textured, homogeneous, single_plane) or scene file")
      ->capture_default_str();
  run->add_option("--frames", frames, "number of frames (default: from the scene)");
  run->add_option("--noise", noise, "none | intensity[,endpoint[,outlier_rate]]")->capture_default_str();
  run->add_option("--seed", opts.seed, "noise and RANSAC seed")->capture_default_str();
  run->add_option("--match-mode", match_mode, "gt | geometric")->capture_default_str();
  run->add_option("--geometric-weight", opts.geometric_weight)->capture_default_str();
  run->add_option("--photometric-weight", opts.photometric_weight)->capture_default_str();
  run->add_option("--edge-select", edge_select, "on | off")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  run->add_option("--delta", opts.delta, "RPE frame offset")->capture_default_str();
  run->add_flag("--oracle-recover", opts.oracle_recover, "restart from the true pose after a tracking failure");
  run->add_flag("--photometric-on-edges", opts.tracker.photometric_on_edges,
                "photometric terms also on edge pixels (the photometric-only baseline of direct methods)");
  run->add_option("--out", opts.out_dir, "output directory");
  run->add_flag("--quiet", quiet);

  std::string gt_path, est_path, align = "similarity";
  int delta = 1;
  auto* rpe_cmd = app.add_subcommand("rpe", "relative pose error between two trajectory files");
  rpe_cmd->add_option("--gt", gt_path)->required();
  rpe_cmd->add_option("--est", est_path)->required();
  rpe_cmd->add_option("--delta", delta)->capture_default_str();
  rpe_cmd->add_option("--alignment", align, "similarity | positional | none")->capture_default_str();

  std::string seg_path, conflict_path;
  int width = 0;
  double overlap = 0.5;
  auto* select = app.add_subcommand("select", "greedy coverage selection under overlap conflicts");
  select->add_option("--segments", seg_path, "records: id x1 y1 x2 y2 level")->required();
  select->add_option("--conflicts", conflict_path, "records: id1 id2 overlap (computed when absent)");
  select->add_option("--width", width, "image width (default: from the segments)");
  select->add_option("--overlap", overlap, "conflict threshold")->capture_default_str();

  double min_length = 0.0;
  auto* merge = app.add_subcommand("merge", "merge broken collinear segments");
  merge->add_option("--segments", seg_path)->required();
  merge->add_option("--min-length", min_length)->capture_default_str();

  int frame = 0;
  std::string out_dir;
  auto* render_cmd = app.add_subcommand("render", "render one frame: image, depth, segments and pose");
  render_cmd->add_option("--scene", opts.scene)->capture_default_str();
  render_cmd->add_option("--frame", frame)->capture_default_str();
  render_cmd->add_option("--frames", frames);
  render_cmd->add_option("--noise", noise)->capture_default_str();
  render_cmd->add_option("--seed", opts.seed)->capture_default_str();
  render_cmd->add_option("--out", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      if (frames > 0) opts.frames = frames;
      opts.noise = parse_noise(noise);
      opts.match_mode = parse_match_mode(match_mode);
      opts.edge_select = edge_select == "on";
      return cmd_run(opts, quiet);
    }
    if (*rpe_cmd) return cmd_rpe(gt_path, est_path, delta, align);
    if (*select) return cmd_select(seg_path, conflict_path, width, overlap);
    if (*merge) return cmd_merge(seg_path, min_length);
    if (*render_cmd) return cmd_render(opts.scene, frame, frames, noise, opts.seed, out_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::TrackingFailure ? kExitTracking : kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
