#pragma once

#include <string>
#include <vector>

#include "edgevo/edge_model.hpp"
#include "edgevo/synth.hpp"
#include "edgevo/tracking.hpp"

namespace edgevo::testing {

/// Two rendered frames of a preset dolly with a keyframe built from ground-truth depth.
struct PairFixture {
  SyntheticScene scene;
  CameraIntrinsics K;
  std::vector<Pose> poses;
  RenderedFrame ref;
  RenderedFrame cur;
  KeyframeState kf;
  std::vector<EdgeMatch> matches;
  Pose gt;  // reference to current
  double mean_depth = 1.0;
};

/// Keyframe with the rendered depth and exact line depths, every sample at `variance`.
KeyframeState keyframe_from_render(const SyntheticScene& scene, const CameraIntrinsics& K, const RenderedFrame& frame,
                                   double variance = 1e-4, const KeyframeOptions& options = {});

PairFixture make_pair(const std::string& preset, int ref_frame, int cur_frame, int frames = 30,
                      double variance = 1e-4);

/// Cached per (preset, ref, cur); rendering dominates the cost of most tracking tests.
const PairFixture& shared_pair(const std::string& preset, int ref_frame, int cur_frame);

struct JacobianCheck {
  double max_relative_error = 0.0;
  int photometric_rows = 0;
  int geometric_rows = 0;
  int skipped = 0;  // rows whose stencil straddles a bilinear cell boundary
};

/// Analytic rows of build_system against central differences of the residual functions under
/// the left perturbation exp(δ)·T. Rows are compared per family; the error of a row is
/// ‖J_analytic − J_fd‖∞ / max(‖J_fd‖∞, floor).
JacobianCheck check_jacobian(const KeyframeState& kf, int level, const Image& cur_full,
                             const std::vector<LineSegment2D>& cur_edges, const std::vector<EdgeMatch>& matches,
                             const Pose& T, TrackerConfig config, double step = 1e-6, double floor = 1e-3);

/// Recovery test for a pose: rotation and translation error of the tracked pose against gt.
struct Recovery {
  bool converged = false;
  double rotation_deg = 0.0;
  double translation = 0.0;
};
Recovery recover(const PairFixture& pair, const Pose& init, const TrackerConfig& config);

/// Largest rotation perturbation (degrees, multiples of `step_deg`) from which every axis in
/// {±x, ±y, ±z, ±(1,1,1)} converges within the given tolerances; the sweep stops at the first failure.
double basin_limit(const PairFixture& pair, const TrackerConfig& config, double max_deg, double step_deg,
                   double rotation_tol_deg, double translation_tol);

}  // namespace edgevo::testing
