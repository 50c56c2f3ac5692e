#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ipose/grid.hpp"
#include "ipose/pose.hpp"

namespace ipose {

/// Per-joint (x, y, z) in grid-cell units.
struct JointEstimate {
  std::vector<Vec3> joints;
};

Pose to_pose(const JointEstimate& e);
JointEstimate from_pose(const Pose& p);

/// Expected cell coordinate per joint, computed from per-axis marginals.
JointEstimate soft_argmax(const ProbGrid& probs);
JointEstimate soft_argmax_serial(const ProbGrid& probs);

/// d estimate[k][axis] / d logit[k][cell] = p(cell) * (coord_axis(cell) - estimate[k][axis]).
/// Logits of other joints have zero influence, so only the diagonal blocks are stored,
/// in the grid layout (joint-major, z, y, x).
struct SoftArgmaxJacobian {
  GridDims dims;
  std::size_t joints = 0;
  std::array<std::vector<double>, 3> by_axis;  // x, y, z

  std::span<const double> block(std::size_t axis, std::size_t joint) const;
};

SoftArgmaxJacobian soft_argmax_jacobian(const LikelihoodGrid& logits);

/// Vector-Jacobian product: gradient w.r.t. the logits given the gradient
/// w.r.t. each joint estimate. Avoids materializing the Jacobian.
std::vector<double> soft_argmax_backward(const ProbGrid& probs, const JointEstimate& estimate,
                                         std::span<const Vec3> upstream);

/// Which axes of which joints are supervised. 2D samples mask z.
struct AxisMask {
  std::vector<std::array<bool, 3>> axes;

  static AxisMask all(std::size_t joints);
  static AxisMask planar(std::size_t joints);
  static AxisMask none(std::size_t joints);
  std::size_t active() const;
};

struct LossValue {
  double value = 0.0;
  /// d loss / d estimate, per joint.
  std::vector<Vec3> estimate_gradient;
  /// d loss / d logit, in the grid layout.
  std::vector<double> gradient;
};

/// Mean absolute error over unmasked joint-axes together with its subgradient
/// w.r.t. the estimate (sign(0) = 0). A fully masked sample has zero loss.
/// `target` must be in grid cells. The logit gradient is left empty.
LossValue l1_estimate_loss(const JointEstimate& pred, const Pose& target, const AxisMask& mask);

/// L1 joint loss evaluated end to end from logits, with the gradient
/// chained through the softmax and soft-argmax.
LossValue l1_joint_loss(const LikelihoodGrid& logits, const Pose& target, const AxisMask& mask);

/// Same as above for an already normalized grid and its estimate.
LossValue l1_joint_loss(const ProbGrid& probs, const JointEstimate& pred, const Pose& target,
                        const AxisMask& mask);

}  // namespace ipose
