#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ipose/pose.hpp"

namespace ipose {

/// u = scale * X + tx, v = scale * Y + ty; depth is scaled by the same factor.
struct WeakPerspectiveCamera {
  double scale = 1.0;  // pixels per millimeter
  double tx = 0.0;
  double ty = 0.0;

  /// Throws InvalidInput unless scale is finite and positive and t is finite.
  void validate() const;
};

struct FitDiagnostics {
  double rms_residual = 0.0;  // sqrt(mean over valid joints of |residual|^2), pixels
  std::size_t inlier_count = 0;
};

struct CameraFit {
  WeakPerspectiveCamera camera;
  FitDiagnostics diagnostics;
};

/// Closed-form least squares for (s, tx, ty) minimizing
/// sum_j |s * (X_j, Y_j) + t - (u_j, v_j)|^2 over joints with mask[j] set.
/// An empty mask means every joint is valid.
CameraFit fit_weak_perspective(const Pose& points3d, const Pose& points2d,
                               const std::vector<bool>& mask = {});

Pose project(const WeakPerspectiveCamera& camera, const Pose& points3d);

struct CameraFitInput {
  Pose points3d;
  Pose points2d;
  std::vector<bool> mask;
};

struct FrameFailure {
  std::size_t frame = 0;
  std::string kind;
  std::string message;
};

struct PerFrameFitReport {
  std::vector<std::optional<CameraFit>> fits;  // nullopt for failed frames
  std::vector<FrameFailure> failures;          // ascending frame order
};

/// Independent fit per frame; failures are collected instead of thrown.
PerFrameFitReport fit_per_frame(const std::vector<CameraFitInput>& frames);

}  // namespace ipose
