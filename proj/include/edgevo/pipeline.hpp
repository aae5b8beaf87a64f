#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgevo/edge_model.hpp"
#include "edgevo/mapping.hpp"
#include "edgevo/synth.hpp"
#include "edgevo/tracking.hpp"
#include "edgevo/trajectory.hpp"

namespace edgevo {

/// "none", or "intensity[,endpoint[,outlier_rate]]". Throws ParseError.
NoiseSpec parse_noise(const std::string& text);
std::string to_string(const NoiseSpec& noise);

struct RunOptions {
  std::string scene = "textured";  // preset name or scene file
  std::optional<int> frames;       // overrides the scene's frame count
  NoiseSpec noise;
  std::uint64_t seed = 1;
  MatchMode match_mode = MatchMode::GroundTruth;
  double geometric_weight = 1.0;
  double photometric_weight = 1.0;
  bool edge_select = false;
  int delta = 1;
  bool oracle_recover = false;
  std::string out_dir;  // empty: nothing written

  /// New keyframe once |t| times the keyframe's mean inverse depth exceeds this.
  double keyframe_baseline = 0.06;
  double min_visible_fraction = 0.4;
  /// Inverse-depth variance given to a fresh keyframe's depth samples.
  double keyframe_depth_variance = 1e-4;
  bool update_depth = true;
  bool depth_snapshots = true;

  TrackerConfig tracker;
  MappingConfig mapping;
  /// The gradient threshold is raised to 3 standard deviations of the gradient that the
  /// configured intensity noise alone produces.
  KeyframeOptions keyframe;
};

struct FrameRecord {
  int index = 0;
  double stamp = 0.0;
  int keyframe = 0;  // frame index of the keyframe tracked against
  bool new_keyframe = false;
  std::string status = "ok";  // ok | keyframe | failed | recovered
  std::string error;
  int edges = 0;
  int matches = 0;
  std::vector<LevelTrace> levels;
  double final_cost = 0.0;
  MappingStats mapping;
  double visible_fraction = 1.0;
  double baseline = 0.0;
  double translation_error = 0.0;  // against ground truth, scene units
  double rotation_error_deg = 0.0;
};

struct RunResult {
  RunOptions options;
  std::string scene_name;
  int exit_code = 0;  // 0 success, 2 tracking abort
  std::string message;
  Trajectory estimate;
  Trajectory ground_truth;
  std::vector<FrameRecord> frames;
  std::vector<int> keyframes;
  std::optional<RpeReport> rpe;
  double path_length = 0.0;
};

/// Renders the sequence and runs match, track and depth update per frame. Tracking failures
/// end the run with exit code 2 unless oracle recovery is on. Configuration errors throw.
RunResult run_vo(const RunOptions& options);

/// trajectory.txt, groundtruth.txt, report.json, frames.csv and depth/ under `dir`.
void write_run_artifacts(const RunResult& result, const std::string& dir);
std::string report_json(const RunResult& result);
std::string frames_csv(const RunResult& result);

}  // namespace edgevo
