#include "edgevo/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "edgevo/edge_selection.hpp"
#include "edgevo/error.hpp"
#include "edgevo/io.hpp"

namespace edgevo {

namespace {

constexpr int kReportVersion = 1;

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<LineSegment2D> select_edges(const std::vector<LineSegment2D>& edges, int width) {
  GroundSet ground{edges, width};
  const auto chosen = greedy_select(ground, find_conflicts(ground)).selected;
  std::vector<LineSegment2D> out;
  for (const auto& e : edges)
    if (chosen.count(e.id)) out.push_back(e);
  return out;
}

double visible_fraction(const KeyframeState& kf, const Pose& ref_to_cur) {
  std::size_t total = 0, visible = 0;
  for (int y = 0; y < kf.depth.height(); ++y) {
    for (int x = 0; x < kf.depth.width(); ++x) {
      const auto h = kf.depth.get(x, y);
      if (!h) continue;
      ++total;
      try {
        if (kf.K.contains(warp(kf.K, {double(x), double(y)}, h->mean, ref_to_cur))) ++visible;
      } catch (const Error&) {
      }
    }
  }
  return total ? double(visible) / double(total) : 0.0;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

NoiseSpec parse_noise(const std::string& text) {
  NoiseSpec n;
  if (text.empty() || text == "none" || text == "0") return n;
  if (text.back() == ',') throw Error(ErrorCode::ParseError, "trailing comma in noise: " + text);
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !(x >= 0.0) || !std::isfinite(x))
      throw Error(ErrorCode::ParseError, "bad noise field '" + item + "' in '" + text + "'");
    v.push_back(x);
  }
  if (v.empty() || v.size() > 3) throw Error(ErrorCode::ParseError, "noise takes 1 to 3 fields: " + text);
  n.intensity_sigma = v[0];
  if (v.size() > 1) n.endpoint_sigma = v[1];
  if (v.size() > 2) {
    if (v[2] > 1.0) throw Error(ErrorCode::ParseError, "outlier rate above 1: " + text);
    n.depth_outlier_rate = v[2];
  }
  return n;
}

std::string to_string(const NoiseSpec& noise) {
  if (noise.zero()) return "none";
  return fmt("%g", noise.intensity_sigma) + "," + fmt("%g", noise.endpoint_sigma) + "," +
         fmt("%g", noise.depth_outlier_rate);
}

RunResult run_vo(const RunOptions& options) {
  if (options.delta < 1) throw Error(ErrorCode::InvalidArgument, "delta must be at least 1");
  if (options.geometric_weight < 0.0 || options.photometric_weight < 0.0 ||
      options.geometric_weight + options.photometric_weight <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "cost weights must be non-negative and not both zero");
  if (options.frames && *options.frames < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 frames");

  SceneConfig cfg = load_scene_config(options.scene);
  if (options.frames) cfg.frames = *options.frames;
  TrackerConfig tcfg = options.tracker;
  tcfg.geometric_weight = options.geometric_weight;
  tcfg.photometric_weight = options.photometric_weight;
  // A residual differences two noisy intensities.
  const double noise_r2 = 2.0 * options.noise.intensity_sigma * options.noise.intensity_sigma;
  tcfg.variances.sigma_r2 = std::max(tcfg.variances.sigma_r2, noise_r2);
  tcfg.validate();
  MappingConfig mcfg = options.mapping;
  mcfg.variances.sigma_r2 = std::max(mcfg.variances.sigma_r2, noise_r2);
  mcfg.regularization.seed = options.seed;
  KeyframeOptions kopts = options.keyframe;
  // central-difference gradient of pure noise: sigma / sqrt(2) per component
  kopts.gradient_threshold = std::max(kopts.gradient_threshold, 3.0 * options.noise.intensity_sigma / std::sqrt(2.0));

  const CameraIntrinsics& K = cfg.camera;
  const auto poses = generate_trajectory(cfg.trajectory, cfg.frames);

  RunResult result;
  result.options = options;
  result.scene_name = cfg.name;

  auto observe = [&](int i, const RenderedFrame& gt) {
    return options.noise.zero() ? gt : apply_noise(gt, options.noise, mix(options.seed, std::uint64_t(i)));
  };
  auto edges_of = [&](const RenderedFrame& f) {
    return options.edge_select ? select_edges(f.edges, K.width) : f.edges;
  };

  int kf_index = 0;
  KeyframeState kf;
  auto start_keyframe = [&](int i, const RenderedFrame& gt, const RenderedFrame& obs, const Pose& est) {
    InverseDepthMap depth = obs.noisy_depth ? *obs.noisy_depth : gt.gt_depth;
    for (const auto& p : depth.defined_pixels()) {
      auto h = *depth.get(p.x, p.y);
      h.variance = std::max(h.variance, options.keyframe_depth_variance);
      depth.set(p.x, p.y, h);
    }
    const auto edges = edges_of(obs);
    kf = make_keyframe(K, est, obs.image, depth, edges,
                       [&](std::size_t k, const PixelPoint& foot) -> std::optional<DepthHypothesis> {
                         const double d = segment_inverse_depth(cfg.scene, K, gt.gt_pose, edges[k].id, foot);
                         return DepthHypothesis{d, options.keyframe_depth_variance};
                       },
                       kopts);
    kf_index = i;
    result.keyframes.push_back(i);
  };

  std::filesystem::path depth_dir;
  if (!options.out_dir.empty() && options.depth_snapshots) {
    depth_dir = std::filesystem::path(options.out_dir) / "depth";
    std::filesystem::create_directories(depth_dir);
  }
  auto snapshot = [&]() {
    if (depth_dir.empty()) return;
    char name[32];
    std::snprintf(name, sizeof name, "kf_%04d.evdm", kf_index);
    write_depth((depth_dir / name).string(), kf.depth);
  };

  Pose guess;  // keyframe to current, carried over as the next initial estimate
  for (int i = 0; i < cfg.frames; ++i) {
    const double stamp = i / cfg.fps;
    const RenderedFrame gt = render(cfg.scene, K, poses[i]);
    const RenderedFrame obs = observe(i, gt);
    result.ground_truth.push_back(stamp, poses[i]);

    FrameRecord rec;
    rec.index = i;
    rec.stamp = stamp;

    if (i == 0) {
      // The first pose anchors the estimate in the world frame.
      start_keyframe(0, gt, obs, poses[0]);
      rec.status = "keyframe";
      rec.new_keyframe = true;
      rec.edges = static_cast<int>(kf.edges.size());
      result.estimate.push_back(stamp, poses[0]);
      result.frames.push_back(rec);
      continue;
    }

    rec.keyframe = kf_index;
    const auto cur_edges = edges_of(obs);
    const auto matches = match_edges(kf.edges, cur_edges, options.match_mode);
    rec.edges = static_cast<int>(cur_edges.size());
    rec.matches = static_cast<int>(matches.size());

    Pose est;
    Pose ref_to_cur;
    bool tracked = false;
    try {
      const TrackingResult tr = track_frame(kf, obs.image, cur_edges, matches, log_map(guess), tcfg);
      rec.levels = tr.levels;
      rec.final_cost = tr.final_cost;
      ref_to_cur = tr.ref_to_cur;
      est = kf.pose * ref_to_cur.inverse();
      tracked = true;
    } catch (const Error& e) {
      rec.status = "failed";
      rec.error = e.what();
    }

    if (!tracked) {
      if (!options.oracle_recover) {
        result.frames.push_back(rec);
        result.exit_code = 2;
        result.message = "frame " + std::to_string(i) + " (keyframe " + std::to_string(kf_index) + "): " + rec.error;
        break;
      }
      rec.status = "recovered";
      snapshot();
      start_keyframe(i, gt, obs, poses[i]);
      rec.new_keyframe = true;
      guess = Pose();
      result.estimate.push_back(stamp, poses[i]);
      result.frames.push_back(rec);
      continue;
    }

    const Pose err = poses[i].inverse() * est;
    rec.translation_error = err.translation().norm();
    rec.rotation_error_deg = err.rotation_angle() * 180.0 / std::numbers::pi;
    result.estimate.push_back(stamp, est);

    if (options.update_depth) {
      try {
        rec.mapping = update_keyframe_depth(kf, obs.image, cur_edges, matches, ref_to_cur, mcfg);
      } catch (const Error& e) {
        rec.error = e.what();
      }
    }

    rec.baseline = ref_to_cur.translation().norm() * kf.depth.mean_inverse_depth();
    rec.visible_fraction = visible_fraction(kf, ref_to_cur);
    guess = ref_to_cur;
    if (rec.baseline > options.keyframe_baseline || rec.visible_fraction < options.min_visible_fraction) {
      snapshot();
      start_keyframe(i, gt, obs, est);
      rec.new_keyframe = true;
      guess = Pose();
    }
    result.frames.push_back(rec);
  }
  snapshot();

  result.path_length = result.ground_truth.path_length();
  if (result.estimate.size() >= static_cast<std::size_t>(options.delta) + 1) {
    try {
      result.rpe = rpe(result.ground_truth, result.estimate, options.delta);
    } catch (const Error&) {
      result.rpe.reset();
    }
  }
  if (!options.out_dir.empty()) write_run_artifacts(result, options.out_dir);
  return result;
}

namespace {

nlohmann::ordered_json stats_json(const ErrorStats& s) {
  return {{"rmse", s.rmse}, {"mean", s.mean}, {"median", s.median}, {"max", s.max}};
}

}  // namespace

std::string report_json(const RunResult& r) {
  using nlohmann::ordered_json;
  const RunOptions& o = r.options;
  ordered_json j;
  j["report_version"] = kReportVersion;
  j["scene"] = r.scene_name;
  j["frames_requested"] = o.frames ? *o.frames : -1;
  j["seed"] = o.seed;
  j["noise"] = {{"intensity_sigma", o.noise.intensity_sigma},
                {"endpoint_sigma", o.noise.endpoint_sigma},
                {"depth_outlier_rate", o.noise.depth_outlier_rate}};
  j["match_mode"] = o.match_mode == MatchMode::GroundTruth ? "gt" : "geometric";
  j["photometric_weight"] = o.photometric_weight;
  j["geometric_weight"] = o.geometric_weight;
  j["edge_select"] = o.edge_select;
  j["oracle_recover"] = o.oracle_recover;
  j["exit_code"] = r.exit_code;
  j["message"] = r.message;
  j["frames_processed"] = r.frames.size();
  j["keyframes"] = r.keyframes;
  j["path_length"] = r.path_length;

  int failed = 0, recovered = 0, photo = 0, geo = 0, dphoto = 0, dgeo = 0;
  long lg = 0, ex = 0, fused = 0;
  ordered_json frames = ordered_json::array();
  for (const auto& f : r.frames) {
    if (f.status == "failed") ++failed;
    if (f.status == "recovered") ++recovered;
    lg += f.mapping.line_guided;
    ex += f.mapping.exhaustive;
    fused += f.mapping.fused;
    ordered_json levels = ordered_json::array();
    for (const auto& l : f.levels) {
      photo += l.photometric_rows;
      geo += l.geometric_rows;
      dphoto += l.dropped_photometric;
      dgeo += l.dropped_geometric;
      levels.push_back({{"level", l.level},
                        {"iterations", l.iterations},
                        {"costs", l.costs},
                        {"photometric_rows", l.photometric_rows},
                        {"geometric_rows", l.geometric_rows},
                        {"dropped_photometric", l.dropped_photometric},
                        {"dropped_geometric", l.dropped_geometric}});
    }
    const auto& m = f.mapping;
    frames.push_back({{"index", f.index},
                      {"stamp", f.stamp},
                      {"keyframe", f.keyframe},
                      {"new_keyframe", f.new_keyframe},
                      {"status", f.status},
                      {"error", f.error},
                      {"edges", f.edges},
                      {"matches", f.matches},
                      {"final_cost", f.final_cost},
                      {"levels", levels},
                      {"mapping",
                       {{"attempted", m.attempted},
                        {"line_guided", m.line_guided},
                        {"exhaustive", m.exhaustive},
                        {"fused", m.fused},
                        {"gated", m.gated},
                        {"ambiguous", m.ambiguous},
                        {"out_of_bounds", m.out_of_bounds},
                        {"no_parallax", m.no_parallax},
                        {"degenerate", m.degenerate},
                        {"invalid", m.invalid},
                        {"regularized_edges", m.regularized_edges},
                        {"regularization_failures", m.regularization_failures}}},
                      {"baseline", f.baseline},
                      {"visible_fraction", f.visible_fraction},
                      {"translation_error", f.translation_error},
                      {"rotation_error_deg", f.rotation_error_deg}});
  }
  j["totals"] = {{"failed_frames", failed},
                 {"recovered_frames", recovered},
                 {"photometric_rows", photo},
                 {"geometric_rows", geo},
                 {"dropped_photometric", dphoto},
                 {"dropped_geometric", dgeo},
                 {"line_guided_matches", lg},
                 {"exhaustive_matches", ex},
                 {"fused", fused}};

  ordered_json rj;
  rj["available"] = r.rpe.has_value();
  rj["delta"] = o.delta;
  rj["alignment"] = to_string(r.rpe ? r.rpe->alignment : ScaleAlignment::Similarity);
  rj["scale"] = r.rpe ? r.rpe->scale : 1.0;
  rj["pairs"] = r.rpe ? r.rpe->translation_errors.size() : 0;
  const ErrorStats none;
  rj["translation"] = stats_json(r.rpe ? r.rpe->translation : none);
  rj["translation_per_second"] = stats_json(r.rpe ? r.rpe->translation_rate : none);
  rj["rotation_deg"] = stats_json(r.rpe ? r.rpe->rotation : none);
  rj["translation_rmse_fraction_of_path"] =
      r.rpe && r.path_length > 0.0 ? r.rpe->translation.rmse / r.path_length : 0.0;
  j["rpe"] = rj;
  j["frames"] = frames;
  return j.dump(2) + "\n";
}

std::string frames_csv(const RunResult& r) {
  std::ostringstream out;
  out << "frame,stamp,keyframe,new_keyframe,status,edges,matches,iterations,photometric_rows,geometric_rows,"
         "dropped_photometric,dropped_geometric,final_cost,fused,line_guided,exhaustive,baseline,"
         "visible_fraction,translation_error,rotation_error_deg\n";
  for (const auto& f : r.frames) {
    int it = 0, pr = 0, gr = 0, dp = 0, dg = 0;
    for (const auto& l : f.levels) it += l.iterations;
    if (!f.levels.empty()) {
      // row counts of the finest level
      const auto& l = f.levels.back();
      pr = l.photometric_rows;
      gr = l.geometric_rows;
      dp = l.dropped_photometric;
      dg = l.dropped_geometric;
    }
    out << f.index << ',' << fmt("%.6f", f.stamp) << ',' << f.keyframe << ',' << (f.new_keyframe ? 1 : 0) << ','
        << f.status << ',' << f.edges << ',' << f.matches << ',' << it << ',' << pr << ',' << gr << ',' << dp << ','
        << dg << ',' << fmt("%.9g", f.final_cost) << ',' << f.mapping.fused << ',' << f.mapping.line_guided << ','
        << f.mapping.exhaustive << ',' << fmt("%.9g", f.baseline) << ',' << fmt("%.6f", f.visible_fraction) << ','
        << fmt("%.9g", f.translation_error) << ',' << fmt("%.9g", f.rotation_error_deg) << '\n';
  }
  return out.str();
}

void write_run_artifacts(const RunResult& result, const std::string& dir) {
  const std::filesystem::path d(dir);
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir + ": " + ec.message());
  write_trajectory((d / "trajectory.txt").string(), result.estimate);
  write_trajectory((d / "groundtruth.txt").string(), result.ground_truth);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream f(d / name, std::ios::binary);
    if (!(f << text)) throw Error(ErrorCode::IoError, std::string("cannot write ") + name);
  };
  put("report.json", report_json(result));
  put("frames.csv", frames_csv(result));
}

}  // namespace edgevo
