#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipose/pose.hpp"
#include "ipose/skeleton.hpp"

namespace ipose {

enum class BoneLengthSource { PerFrame, AvgVal, AvgTrain, AvgTrainVal, Explicit };

std::string_view to_string(BoneLengthSource s);

/// Target average bone length. For PerFrame the value is taken from each
/// frame's own ground truth and `mean_bone_length` is ignored.
struct BoneLengthStat {
  double mean_bone_length = 0.0;
  BoneLengthSource source = BoneLengthSource::Explicit;
};

struct BoneLengthSummary {
  double mean = 0.0;
  std::vector<std::string> warnings;  // zero-length or non-finite bones
};

/// Mean Euclidean length over all parent-child edges, in the pose's units.
BoneLengthSummary mean_bone_length(const Pose& pose, const Skeleton& skeleton);

/// Mean over frames of each frame's mean bone length.
BoneLengthStat dataset_bone_length(std::span<const Pose> poses, const Skeleton& skeleton,
                                   BoneLengthSource source);

/// Root-aligns `pose` and scales it so its mean bone length equals
/// `target_length`. The result is tagged millimeters, root-relative.
Pose rescale_to_bone_length(const Pose& pose, double target_length, const Skeleton& skeleton);

struct EvalReport {
  std::vector<double> per_joint_error;  // mean over frames, mm
  std::vector<double> per_frame_error;  // mean over joints, mm
  double mpjpe = 0.0;                   // mean of per_frame_error
  std::size_t frames = 0;
};

/// Root-aligned mean per joint position error. Both sides must be in mm.
EvalReport mpjpe(std::span<const Pose> pred, std::span<const Pose> gt, const Skeleton& skeleton);
EvalReport mpjpe_serial(std::span<const Pose> pred, std::span<const Pose> gt,
                        const Skeleton& skeleton);

struct BoneLengthPolicy {
  std::string label;
  BoneLengthStat stat;
};

struct PolicyResult {
  std::string label;
  BoneLengthSource source = BoneLengthSource::Explicit;
  double bone_length = 0.0;  // NaN for per-frame policies
  double mpjpe = 0.0;
};

/// Rescales each pixel-space prediction under every policy and scores it
/// against the paired millimeter ground truth.
std::vector<PolicyResult> bone_length_policy_experiment(std::span<const Pose> gt_mm,
                                                        std::span<const Pose> pred_px,
                                                        std::span<const BoneLengthPolicy> policies,
                                                        const Skeleton& skeleton);

}  // namespace ipose
