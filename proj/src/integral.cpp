#include "ipose/integral.hpp"

#include <cmath>
#include <string>

#include "ipose/error.hpp"
#include "ipose/kernels.hpp"

namespace ipose {

Pose to_pose(const JointEstimate& e) { return Pose{Units::Cells, Space::Absolute, e.joints}; }

JointEstimate from_pose(const Pose& p) {
  require_units(p, Units::Cells, "joint estimate");
  return JointEstimate{p.joints};
}

JointEstimate soft_argmax(const ProbGrid& probs) {
  JointEstimate e{std::vector<Vec3>(probs.joints())};
  kernels::omp::expectation(probs.probs(), probs.dims(), probs.joints(), e.joints);
  return e;
}

JointEstimate soft_argmax_serial(const ProbGrid& probs) {
  JointEstimate e{std::vector<Vec3>(probs.joints())};
  kernels::serial::expectation(probs.probs(), probs.dims(), probs.joints(), e.joints);
  return e;
}

std::span<const double> SoftArgmaxJacobian::block(std::size_t axis, std::size_t joint) const {
  return std::span<const double>(by_axis.at(axis)).subspan(joint * dims.cells(), dims.cells());
}

SoftArgmaxJacobian soft_argmax_jacobian(const LikelihoodGrid& logits) {
  const ProbGrid probs = normalize(logits);
  const JointEstimate est = soft_argmax(probs);
  SoftArgmaxJacobian jac;
  jac.dims = logits.dims();
  jac.joints = logits.joints();
  for (auto& a : jac.by_axis) a.resize(logits.scores().size());
  kernels::omp::expectation_jacobian(probs.probs(), probs.dims(), probs.joints(), est.joints,
                                     jac.by_axis[0], jac.by_axis[1], jac.by_axis[2]);
  return jac;
}

std::vector<double> soft_argmax_backward(const ProbGrid& probs, const JointEstimate& estimate,
                                         std::span<const Vec3> upstream) {
  if (estimate.joints.size() != probs.joints() || upstream.size() != probs.joints()) {
    throw ShapeError("backward pass joint count mismatch");
  }
  std::vector<double> grad(probs.probs().size());
  kernels::omp::expectation_vjp(probs.probs(), probs.dims(), probs.joints(), estimate.joints,
                                upstream, grad);
  return grad;
}

AxisMask AxisMask::all(std::size_t joints) {
  return AxisMask{std::vector<std::array<bool, 3>>(joints, {true, true, true})};
}

AxisMask AxisMask::planar(std::size_t joints) {
  return AxisMask{std::vector<std::array<bool, 3>>(joints, {true, true, false})};
}

AxisMask AxisMask::none(std::size_t joints) {
  return AxisMask{std::vector<std::array<bool, 3>>(joints, {false, false, false})};
}

std::size_t AxisMask::active() const {
  std::size_t n = 0;
  for (const auto& a : axes)
    for (bool b : a) n += b ? 1 : 0;
  return n;
}

LossValue l1_estimate_loss(const JointEstimate& pred, const Pose& target, const AxisMask& mask) {
  require_units(target, Units::Cells, "loss target");
  const std::size_t n = pred.joints.size();
  if (target.size() != n || mask.axes.size() != n) {
    throw ShapeError("loss operands disagree on joint count: pred " + std::to_string(n) +
                     ", target " + std::to_string(target.size()) + ", mask " +
                     std::to_string(mask.axes.size()));
  }
  LossValue out;
  out.estimate_gradient.assign(n, Vec3{});
  const std::size_t active = mask.active();
  if (active == 0) return out;
  const double inv = 1.0 / static_cast<double>(active);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < 3; ++a) {
      if (!mask.axes[k][a]) continue;
      const double diff = pred.joints[k][a] - target.joints[k][a];
      total += std::abs(diff);
      const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      out.estimate_gradient[k][a] = sign * inv;
    }
  }
  out.value = total * inv;
  return out;
}

LossValue l1_joint_loss(const ProbGrid& probs, const JointEstimate& pred, const Pose& target,
                        const AxisMask& mask) {
  LossValue out = l1_estimate_loss(pred, target, mask);
  out.gradient = soft_argmax_backward(probs, pred, out.estimate_gradient);
  return out;
}

LossValue l1_joint_loss(const LikelihoodGrid& logits, const Pose& target, const AxisMask& mask) {
  const ProbGrid probs = normalize(logits);
  return l1_joint_loss(probs, soft_argmax(probs), target, mask);
}

}  // namespace ipose
