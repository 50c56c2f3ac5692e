#include "ipose/patch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ipose/error.hpp"

namespace ipose {

void PersonBox::validate() const {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h)) {
    throw InvalidInput("person box has non-finite fields");
  }
  if (!(w > 0.0) || !(h > 0.0)) throw InvalidInput("person box width and height must be > 0");
}

bool AugmentParams::within_training_ranges() const {
  return std::abs(dx) <= kMaxShift && std::abs(dy) <= kMaxShift && scale >= kMinScale &&
         scale <= kMaxScale && std::abs(rotation_deg) <= kMaxRotationDeg;
}

PatchTransform::PatchTransform(std::array<double, 6> m, PatchSize patch)
    : forward_(m), patch_(patch) {
  for (double v : m)
    if (!std::isfinite(v)) throw InvalidInput("patch transform has non-finite entries");
  if (patch.width == 0 || patch.height == 0) throw InvalidInput("patch size must be positive");
  const double det = m[0] * m[4] - m[1] * m[3];
  if (det == 0.0 || !std::isfinite(1.0 / det)) {
    throw InvalidInput("patch transform is not invertible");
  }
  const double id = 1.0 / det;
  const double a = m[4] * id, b = -m[1] * id, d = -m[3] * id, e = m[0] * id;
  inverse_ = {a, b, -(a * m[2] + b * m[5]), d, e, -(d * m[2] + e * m[5])};
  iso_scale_ = std::sqrt(std::abs(det));
}

Vec3 PatchTransform::apply(Vec3 p) const {
  const auto& m = forward_;
  return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5], iso_scale_ * p.z};
}

Vec3 PatchTransform::invert(Vec3 p) const {
  const auto& m = inverse_;
  return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5], p.z / iso_scale_};
}

Pose PatchTransform::apply(const Pose& image_pose) const {
  require_units(image_pose, Units::ImagePixels, "pose to crop");
  Pose out{Units::PatchPixels, image_pose.space, {}};
  out.joints.reserve(image_pose.size());
  for (const Vec3& p : image_pose.joints) out.joints.push_back(apply(p));
  return out;
}

Pose PatchTransform::invert(const Pose& patch_pose) const {
  require_units(patch_pose, Units::PatchPixels, "patch pose");
  Pose out{Units::ImagePixels, patch_pose.space, {}};
  out.joints.reserve(patch_pose.size());
  for (const Vec3& p : patch_pose.joints) out.joints.push_back(invert(p));
  return out;
}

PatchTransform build_patch_transform(const PersonBox& box, const AugmentParams& aug,
                                     PatchSize patch) {
  box.validate();
  if (patch.width == 0 || patch.height == 0) throw InvalidInput("patch size must be positive");
  if (!std::isfinite(aug.dx) || !std::isfinite(aug.dy) || !std::isfinite(aug.rotation_deg) ||
      !std::isfinite(aug.scale)) {
    throw InvalidInput("augmentation parameters must be finite");
  }
  const double pw = static_cast<double>(patch.width);
  const double ph = static_cast<double>(patch.height);

  // Expand, never squeeze, to the patch aspect ratio.
  double bw = box.w;
  double bh = box.h;
  if (bw * ph < bh * pw) {
    bw = bh * pw / ph;
  } else {
    bh = bw * ph / pw;
  }

  const double cx = box.cx + aug.dx * bw;
  const double cy = box.cy + aug.dy * bh;
  const double crop_w = bw * aug.scale;
  if (!(crop_w > 0.0) || !(bh * aug.scale > 0.0)) {
    throw InvalidInput("scaled box is degenerate (scale " + std::to_string(aug.scale) + ")");
  }
  const double k = pw / crop_w;
  const double theta = aug.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  // q = k R (p - center) + patch_center
  const double ox = (pw - 1.0) / 2.0;
  const double oy = (ph - 1.0) / 2.0;
  std::array<double, 6> m = {k * c, -k * s, ox - k * (c * cx - s * cy),
                             k * s, k * c,  oy - k * (s * cx + c * cy)};
  if (aug.flip) {
    m[0] = -m[0];
    m[1] = -m[1];
    m[2] = (pw - 1.0) - m[2];
  }
  return PatchTransform(m, patch);
}

AugmentParams AugmentSampler::operator()() {
  std::uniform_real_distribution<double> shift(-AugmentParams::kMaxShift,
                                               AugmentParams::kMaxShift);
  std::uniform_real_distribution<double> scale(AugmentParams::kMinScale,
                                               AugmentParams::kMaxScale);
  std::uniform_real_distribution<double> rot(-AugmentParams::kMaxRotationDeg,
                                             AugmentParams::kMaxRotationDeg);
  std::bernoulli_distribution flip(0.5);
  AugmentParams p;
  p.dx = shift(rng_);
  p.dy = shift(rng_);
  p.scale = scale(rng_);
  p.rotation_deg = rot(rng_);
  p.flip = flip(rng_);
  return p;
}

JointEstimate flip_merge(const JointEstimate& pred, const JointEstimate& pred_flipped,
                         const Skeleton& skeleton, std::size_t width) {
  const std::size_t n = pred.joints.size();
  if (pred_flipped.joints.size() != n) {
    throw ShapeError("flip-merge inputs have " + std::to_string(n) + " and " +
                     std::to_string(pred_flipped.joints.size()) + " joints");
  }
  if (skeleton.size() != n) {
    throw ShapeError("flip-merge inputs have " + std::to_string(n) + " joints, skeleton has " +
                     std::to_string(skeleton.size()));
  }
  if (width == 0) throw InvalidInput("mirror width must be positive");
  const auto mirror = skeleton.mirror_permutation();
  const double edge = static_cast<double>(width) - 1.0;
  JointEstimate out{std::vector<Vec3>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    Vec3 back = pred_flipped.joints[mirror[j]];
    back.x = edge - back.x;
    out.joints[j] = 0.5 * (pred.joints[j] + back);
  }
  return out;
}

namespace {

double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

}  // namespace

Pose ensemble_average(std::span<const Pose> preds, std::span<const double> weights) {
  if (preds.empty()) throw InvalidInput("ensemble needs at least one prediction");
  if (!weights.empty() && weights.size() != preds.size()) {
    throw ShapeError("got " + std::to_string(weights.size()) + " weights for " +
                     std::to_string(preds.size()) + " predictions");
  }
  const Pose& first = preds.front();
  for (std::size_t i = 1; i < preds.size(); ++i) {
    if (preds[i].size() != first.size()) {
      throw ShapeError("ensemble member " + std::to_string(i) + " has " +
                       std::to_string(preds[i].size()) + " joints, expected " +
                       std::to_string(first.size()));
    }
    require_units(preds[i], first.units, "ensemble member " + std::to_string(i));
    if (preds[i].space != first.space) {
      throw UnitError("ensemble members mix absolute and root-relative poses");
    }
  }
  std::vector<double> w(preds.size(), 1.0);
  if (!weights.empty()) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
        throw InvalidInput("ensemble weights must be finite and non-negative");
      }
      w[i] = weights[i];
    }
  }
  std::vector<double> terms = w;
  const double wsum = sorted_sum(terms);
  if (!(wsum > 0.0)) throw InvalidInput("ensemble weights sum to zero");

  Pose out{first.units, first.space, std::vector<Vec3>(first.size())};
  for (std::size_t j = 0; j < first.size(); ++j) {
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t i = 0; i < preds.size(); ++i) terms[i] = w[i] * preds[i].joints[j][a];
      out.joints[j][a] = sorted_sum(terms) / wsum;
    }
  }
  return out;
}

}  // namespace ipose
