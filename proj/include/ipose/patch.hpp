#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ipose/integral.hpp"
#include "ipose/pose.hpp"
#include "ipose/skeleton.hpp"

namespace ipose {

/// Person bounding box in image pixels.
struct PersonBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  void validate() const;
};

struct PatchSize {
  std::size_t width = 256;
  std::size_t height = 256;
};

/// Training-time jitter. `dx`, `dy` are fractions of the (aspect-corrected)
/// box size; `scale` multiplies the crop size; `rotation_deg` rotates about the
/// box center.
struct AugmentParams {
  double dx = 0.0;
  double dy = 0.0;
  double scale = 1.0;
  double rotation_deg = 0.0;
  bool flip = false;

  static constexpr double kMaxShift = 0.02;
  static constexpr double kMinScale = 0.75;
  static constexpr double kMaxScale = 1.25;
  static constexpr double kMaxRotationDeg = 30.0;

  bool within_training_ranges() const;
};

/// Affine map from image pixels to patch pixels. z is scaled by the
/// isotropic scale sqrt(|det A|) so depth stays consistent with x, y.
class PatchTransform {
 public:
  /// `m` is row-major [a b c; d e f]: x' = a x + b y + c, y' = d x + e y + f.
  /// Throws InvalidInput if the linear block is singular or non-finite.
  PatchTransform(std::array<double, 6> m, PatchSize patch);

  const std::array<double, 6>& matrix() const { return forward_; }
  const std::array<double, 6>& inverse_matrix() const { return inverse_; }
  PatchSize patch_size() const { return patch_; }
  double isotropic_scale() const { return iso_scale_; }

  Vec3 apply(Vec3 p) const;
  Vec3 invert(Vec3 p) const;

  /// Image pixels -> patch pixels.
  Pose apply(const Pose& image_pose) const;
  /// Patch pixels -> image pixels.
  Pose invert(const Pose& patch_pose) const;

 private:
  std::array<double, 6> forward_;
  std::array<double, 6> inverse_;
  PatchSize patch_;
  double iso_scale_;
};

/// Expands the box to the patch aspect ratio, then composes
/// translate -> rotate -> scale -> flip. The box center lands on the patch
/// center ((W-1)/2, (H-1)/2); flip mirrors x' -> (W-1) - x'.
PatchTransform build_patch_transform(const PersonBox& box, const AugmentParams& aug,
                                     PatchSize patch);

/// Uniform sampler over the training augmentation ranges; flip with p = 0.5.
/// Holds generator state, so use one per worker.
class AugmentSampler {
 public:
  explicit AugmentSampler(std::uint64_t seed) : rng_(seed) {}
  AugmentParams operator()();

 private:
  std::mt19937_64 rng_;
};

/// Un-mirrors the prediction made on the flipped input (x -> (width-1) - x),
/// swaps left/right joints and averages with the original prediction.
JointEstimate flip_merge(const JointEstimate& pred, const JointEstimate& pred_flipped,
                         const Skeleton& skeleton, std::size_t width);

/// Weighted elementwise mean of poses (uniform when `weights` is empty).
/// Terms are summed in sorted order so the result does not depend on the
/// order of `preds`.
Pose ensemble_average(std::span<const Pose> preds, std::span<const double> weights = {});

}  // namespace ipose
