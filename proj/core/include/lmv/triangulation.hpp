#pragma once

#include <cstdint>
#include <vector>

#include "lmv/cameras.hpp"
#include "lmv/multiview.hpp"

namespace lmv {

struct TriangulationConfig {
  double grad_tol = 1e-12;  ///< on the chart gradient of the squared distance
  int max_iterations = 200;
  int max_restarts = 5;
  /// Designated-Plücker-coordinate magnitude below which the solve switches
  /// to a rotated coordinate chart.
  double chart_threshold = 1e-3;
  /// Seed for the deterministic restart rotations.
  std::uint64_t rotation_seed = 0x5eed;
};

struct TriangulationResult {
  PlueckerLine line = chart(ChartPoint());
  double objective = 0.0;  ///< squared product distance at the optimum
  int iterations = 0;
  bool converged = false;
  int restarts_used = 0;
};

/// Reconstructs a 3D line from m >= 2 real image lines by minimizing the
/// squared angular product distance over the chart, by damped least squares
/// initialized from the kernel of M(u)^T. A exhausted budget returns the best
/// iterate with converged = false rather than failing.
TriangulationResult triangulate_line(const CameraRig& rig, const LineTuple& u,
                                     const TriangulationConfig& config = {});

/// Objective sum_i d(camera_i . tau(V), u_i)^2 with real unit image lines u.
double line_objective(const CameraRig& rig,
                      const std::vector<Eigen::Vector3d>& u,
                      const Eigen::Vector4d& chart_vars);

/// Analytic gradient of line_objective with respect to (v11, v12, v21, v22).
Eigen::Vector4d line_objective_gradient(const CameraRig& rig,
                                        const std::vector<Eigen::Vector3d>& u,
                                        const Eigen::Vector4d& chart_vars);

struct PointTriangulationResult {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Reconstructs an affine 3D point from m affine image points (the chart
/// fixes the first homogeneous coordinate to 1), by damped least squares on
/// the reprojection error initialized from a linear solve.
PointTriangulationResult triangulate_point(
    const CameraRig& rig, const std::vector<Eigen::Vector2d>& image_points,
    const TriangulationConfig& config = {});

enum class SensitivityKind { kLines, kPoints };

struct SensitivityRecord {
  int trial = 0;
  SensitivityKind kind = SensitivityKind::kLines;
  /// log10 of the error amplification factor.
  double e_value = 0.0;
  double objective = 0.0;
  bool converged = false;
  int restarts = 0;
  /// Sampling or reconstruction failed; e_value is meaningless.
  bool failed = false;
};

/// Per-trial noise-amplification experiment: sample a line (or point),
/// project, perturb every component on the sphere of radius eps times its
/// norm, reconstruct, and record the log10 amplification. Deterministic per
/// seed; failures are recorded per trial, never fatal.
std::vector<SensitivityRecord> sensitivity_experiment(
    const CameraRig& rig, SensitivityKind kind, int trials, double eps,
    std::uint64_t seed, const TriangulationConfig& config = {},
    int threads = 0);

}  // namespace lmv
