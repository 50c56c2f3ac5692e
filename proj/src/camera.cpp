#include "ipose/camera.hpp"

#include <cmath>
#include <cstdint>
#include <exception>

#include "ipose/error.hpp"

namespace ipose {

void WeakPerspectiveCamera::validate() const {
  if (!std::isfinite(scale) || !(scale > 0.0)) {
    throw InvalidInput("camera scale must be finite and positive, got " + std::to_string(scale));
  }
  if (!std::isfinite(tx) || !std::isfinite(ty)) {
    throw InvalidInput("camera translation must be finite");
  }
}

CameraFit fit_weak_perspective(const Pose& points3d, const Pose& points2d,
                               const std::vector<bool>& mask) {
  require_units(points3d, Units::Millimeters, "3D points");
  require_units(points2d, Units::ImagePixels, "2D points");
  const std::size_t n = points3d.size();
  if (points2d.size() != n || (!mask.empty() && mask.size() != n)) {
    throw ShapeError("camera fit inputs disagree on joint count");
  }
  auto valid = [&](std::size_t j) { return mask.empty() || mask[j]; };

  std::size_t count = 0;
  double mx = 0, my = 0, mu = 0, mv = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!valid(j)) continue;
    ++count;
    mx += points3d.joints[j].x;
    my += points3d.joints[j].y;
    mu += points2d.joints[j].x;
    mv += points2d.joints[j].y;
  }
  if (count < 2) {
    throw DegenerateFit("camera fit needs at least 2 valid joints, got " + std::to_string(count));
  }
  const double inv = 1.0 / static_cast<double>(count);
  mx *= inv;
  my *= inv;
  mu *= inv;
  mv *= inv;

  double cross = 0, spread = 0, magnitude = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!valid(j)) continue;
    const double X = points3d.joints[j].x - mx;
    const double Y = points3d.joints[j].y - my;
    cross += X * (points2d.joints[j].x - mu) + Y * (points2d.joints[j].y - mv);
    spread += X * X + Y * Y;
    magnitude += points3d.joints[j].x * points3d.joints[j].x +
                 points3d.joints[j].y * points3d.joints[j].y;
  }
  // Identical points can leave rounding-level spread after centering.
  if (!(spread > 1e-24 * magnitude)) {
    throw DegenerateFit("3D points have no spread in x,y; scale is unidentifiable");
  }
  const double s = cross / spread;
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw DegenerateFit("fitted scale " + std::to_string(s) +
                        " is not positive (reflected or degenerate correspondence)");
  }

  CameraFit fit;
  fit.camera = WeakPerspectiveCamera{s, mu - s * mx, mv - s * my};
  double sq = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!valid(j)) continue;
    const double ru = s * points3d.joints[j].x + fit.camera.tx - points2d.joints[j].x;
    const double rv = s * points3d.joints[j].y + fit.camera.ty - points2d.joints[j].y;
    sq += ru * ru + rv * rv;
  }
  fit.diagnostics.rms_residual = std::sqrt(sq * inv);
  fit.diagnostics.inlier_count = count;
  return fit;
}

Pose project(const WeakPerspectiveCamera& camera, const Pose& points3d) {
  camera.validate();
  require_units(points3d, Units::Millimeters, "points to project");
  Pose out{Units::ImagePixels, Space::Absolute, {}};
  out.joints.reserve(points3d.size());
  for (const Vec3& p : points3d.joints) {
    out.joints.push_back(
        {camera.scale * p.x + camera.tx, camera.scale * p.y + camera.ty, camera.scale * p.z});
  }
  return out;
}

PerFrameFitReport fit_per_frame(const std::vector<CameraFitInput>& frames) {
  PerFrameFitReport report;
  report.fits.resize(frames.size());
  std::vector<std::optional<FrameFailure>> failed(frames.size());
  const auto n = static_cast<std::int64_t>(frames.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t f = 0; f < n; ++f) {
    const auto i = static_cast<std::size_t>(f);
    try {
      report.fits[i] = fit_weak_perspective(frames[i].points3d, frames[i].points2d, frames[i].mask);
    } catch (const Error& e) {
      failed[i] = FrameFailure{i, e.kind(), e.what()};
    } catch (const std::exception& e) {
      failed[i] = FrameFailure{i, "internal", e.what()};
    }
  }
  for (auto& f : failed)
    if (f) report.failures.push_back(std::move(*f));
  return report;
}

}  // namespace ipose
