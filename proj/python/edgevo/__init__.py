"""Python access to the edgevo core.

Poses are 4x4 homogeneous matrices, twists are (tx, ty, tz, wx, wy, wz).
Trajectories come back as arrays of rows (stamp, tx, ty, tz, qx, qy, qz, qw).
"""

import json

from ._edgevo import (
    EdgevoError,
    disparity_variance,
    ekf_depth_update,
    exp_map,
    line_coefficient_covariance,
    log_map,
    read_trajectory,
    rpe,
    run,
    select_edges,
)


def run_report(**kwargs):
    """Runs the pipeline and returns the parsed report alongside the raw result."""
    result = run(**kwargs)
    return json.loads(result["report_json"]), result


__all__ = [
    "EdgevoError",
    "disparity_variance",
    "ekf_depth_update",
    "exp_map",
    "line_coefficient_covariance",
    "log_map",
    "read_trajectory",
    "rpe",
    "run",
    "run_report",
    "select_edges",
]
