#include "ipose/metrics.hpp"

#include <cmath>
#include <limits>

#include "ipose/error.hpp"
#include "ipose/kernels.hpp"

namespace ipose {

std::string_view to_string(BoneLengthSource s) {
  switch (s) {
    case BoneLengthSource::PerFrame: return "per-frame";
    case BoneLengthSource::AvgVal: return "avg-val";
    case BoneLengthSource::AvgTrain: return "avg-train";
    case BoneLengthSource::AvgTrainVal: return "avg-train+val";
    case BoneLengthSource::Explicit: return "explicit";
  }
  return "?";
}

namespace {

void require_joint_count(const Pose& pose, const Skeleton& skeleton, std::string_view what) {
  if (pose.size() != skeleton.size()) {
    throw ShapeError(std::string(what) + " has " + std::to_string(pose.size()) +
                     " joints, skeleton '" + skeleton.name + "' has " +
                     std::to_string(skeleton.size()));
  }
}

std::vector<Vec3> flatten(std::span<const Pose> poses, std::size_t joints) {
  std::vector<Vec3> out;
  out.reserve(poses.size() * joints);
  for (const Pose& p : poses) out.insert(out.end(), p.joints.begin(), p.joints.end());
  return out;
}

template <typename Kernel>
EvalReport evaluate(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton,
                    Kernel kernel) {
  skeleton.validate();
  if (pred.size() != gt.size()) {
    throw ShapeError("prediction has " + std::to_string(pred.size()) + " frames, ground truth " +
                     std::to_string(gt.size()));
  }
  for (std::size_t f = 0; f < pred.size(); ++f) {
    require_units(pred[f], Units::Millimeters, "prediction frame " + std::to_string(f));
    require_units(gt[f], Units::Millimeters, "ground-truth frame " + std::to_string(f));
    require_joint_count(pred[f], skeleton, "prediction frame " + std::to_string(f));
    require_joint_count(gt[f], skeleton, "ground-truth frame " + std::to_string(f));
  }
  const std::size_t frames = pred.size();
  const std::size_t joints = skeleton.size();
  EvalReport report;
  report.frames = frames;
  report.per_joint_error.assign(joints, 0.0);
  report.per_frame_error.assign(frames, 0.0);
  if (frames == 0) return report;

  const auto p = flatten(pred, joints);
  const auto g = flatten(gt, joints);
  std::vector<double> errors(frames * joints);
  kernel(p, g, frames, joints, skeleton.root, errors);

  double total = 0.0;
  for (std::size_t f = 0; f < frames; ++f) {
    double frame_sum = 0.0;
    for (std::size_t j = 0; j < joints; ++j) {
      frame_sum += errors[f * joints + j];
      report.per_joint_error[j] += errors[f * joints + j];
    }
    report.per_frame_error[f] = frame_sum / static_cast<double>(joints);
    total += report.per_frame_error[f];
  }
  for (double& e : report.per_joint_error) e /= static_cast<double>(frames);
  report.mpjpe = total / static_cast<double>(frames);
  return report;
}

}  // namespace

BoneLengthSummary mean_bone_length(const Pose& pose, const Skeleton& skeleton) {
  skeleton.validate();
  require_joint_count(pose, skeleton, "pose");
  BoneLengthSummary out;
  const auto bones = skeleton.bones();
  if (bones.empty()) {
    out.warnings.push_back("skeleton has no bones");
    return out;
  }
  double total = 0.0;
  for (const auto& [parent, child] : bones) {
    const double len = norm(pose.joints[child] - pose.joints[parent]);
    if (!std::isfinite(len)) {
      out.warnings.push_back("bone " + skeleton.joint_names[parent] + "->" +
                             skeleton.joint_names[child] + " has non-finite length");
    } else if (len == 0.0) {
      out.warnings.push_back("bone " + skeleton.joint_names[parent] + "->" +
                             skeleton.joint_names[child] + " has zero length");
    }
    total += len;
  }
  out.mean = total / static_cast<double>(bones.size());
  return out;
}

BoneLengthStat dataset_bone_length(std::span<const Pose> poses, const Skeleton& skeleton,
                                   BoneLengthSource source) {
  if (poses.empty()) throw InvalidInput("cannot average bone length over zero frames");
  double total = 0.0;
  for (const Pose& p : poses) total += mean_bone_length(p, skeleton).mean;
  const double mean = total / static_cast<double>(poses.size());
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw DegeneratePose("dataset mean bone length is not positive");
  }
  return BoneLengthStat{mean, source};
}

Pose rescale_to_bone_length(const Pose& pose, double target_length, const Skeleton& skeleton) {
  if (!(target_length > 0.0) || !std::isfinite(target_length)) {
    throw InvalidInput("target bone length must be finite and positive");
  }
  const Pose aligned = root_aligned(pose, skeleton.root);
  const double current = mean_bone_length(aligned, skeleton).mean;
  if (!(current > 0.0) || !std::isfinite(current)) {
    throw DegeneratePose("pose has zero or non-finite mean bone length");
  }
  const double lambda = target_length / current;
  Pose out{Units::Millimeters, Space::RootRelative, {}};
  out.joints.reserve(aligned.size());
  for (const Vec3& j : aligned.joints) out.joints.push_back(lambda * j);
  return out;
}

EvalReport mpjpe(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton) {
  return evaluate(pred, gt, skeleton, kernels::omp::root_aligned_errors);
}

EvalReport mpjpe_serial(std::span<const Pose> pred, std::span<const Pose> gt,
                        const Skeleton& skeleton) {
  return evaluate(pred, gt, skeleton, kernels::serial::root_aligned_errors);
}

std::vector<PolicyResult> bone_length_policy_experiment(std::span<const Pose> gt_mm,
                                                        std::span<const Pose> pred_px,
                                                        std::span<const BoneLengthPolicy> policies,
                                                        const Skeleton& skeleton) {
  if (policies.empty()) throw InvalidInput("no bone-length policies given");
  if (gt_mm.size() != pred_px.size()) {
    throw ShapeError("ground truth and predictions have different frame counts");
  }
  for (std::size_t f = 0; f < pred_px.size(); ++f) {
    if (!is_pixel(pred_px[f].units)) {
      throw UnitError("prediction frame " + std::to_string(f) + " must be in pixels, got " +
                      std::string(to_string(pred_px[f].units)));
    }
  }
  std::vector<double> own_length(gt_mm.size());
  for (std::size_t f = 0; f < gt_mm.size(); ++f) {
    require_units(gt_mm[f], Units::Millimeters, "ground-truth frame " + std::to_string(f));
    own_length[f] = mean_bone_length(gt_mm[f], skeleton).mean;
  }

  std::vector<PolicyResult> rows;
  std::vector<Pose> rescaled(pred_px.size());
  for (const BoneLengthPolicy& policy : policies) {
    const bool per_frame = policy.stat.source == BoneLengthSource::PerFrame;
    for (std::size_t f = 0; f < pred_px.size(); ++f) {
      const double target = per_frame ? own_length[f] : policy.stat.mean_bone_length;
      rescaled[f] = rescale_to_bone_length(pred_px[f], target, skeleton);
    }
    rows.push_back(PolicyResult{
        policy.label, policy.stat.source,
        per_frame ? std::numeric_limits<double>::quiet_NaN() : policy.stat.mean_bone_length,
        mpjpe(rescaled, gt_mm, skeleton).mpjpe});
  }
  return rows;
}

}  // namespace ipose
