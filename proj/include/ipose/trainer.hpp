#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ipose/grid.hpp"
#include "ipose/integral.hpp"
#include "ipose/pose.hpp"

namespace ipose {

struct ToySample {
  std::vector<double> features;
  Pose target;  // grid cells
  AxisMask mask;
};

struct ToyTaskSpec {
  GridDims dims{4, 4, 4};
  std::size_t joints = 1;
  std::size_t features = 4;
  std::size_t train_samples = 1;
  std::size_t val_samples = 0;
  /// Fraction of samples supervised in x, y only (rounded down).
  double planar_fraction = 0.0;
  std::uint64_t seed = 0;
};

/// Fixed random feature -> target-pose pairs.
struct ToyTask {
  GridDims dims;
  std::size_t joints = 0;
  std::size_t features = 0;
  std::vector<ToySample> train;
  std::vector<ToySample> val;
};

ToyTask make_toy_task(const ToyTaskSpec& spec);

/// One affine layer from features to joints x cells logits.
/// Parameters are the row-major weight block followed by the bias.
class ToyModel {
 public:
  /// Weights and bias drawn from N(0, init_std^2).
  ToyModel(GridDims dims, std::size_t joints, std::size_t features, std::uint64_t seed,
           double init_std = 1e-3);

  const GridDims& dims() const { return dims_; }
  std::size_t joints() const { return joints_; }
  std::size_t features() const { return features_; }
  std::size_t outputs() const { return joints_ * dims_.cells(); }
  std::size_t weight_count() const { return outputs() * features_; }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

  LikelihoodGrid forward(std::span<const double> features) const;

  struct Evaluation {
    double loss = 0.0;
    JointEstimate estimate;
    std::vector<double> gradient;  // same layout as parameters()
  };

  double loss(const ToySample& sample) const;
  Evaluation evaluate(const ToySample& sample) const;

 private:
  GridDims dims_;
  std::size_t joints_;
  std::size_t features_;
  std::vector<double> params_;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 64;
  std::size_t max_steps = 1000;
  std::uint64_t seed = 0;
  double lr_drop_to = 1e-6;
  /// The rate drops once when the validation loss improves by less than
  /// `plateau_min_improvement` (relative) over `plateau_window` steps.
  std::size_t plateau_window = 200;
  double plateau_min_improvement = 1e-3;
  double init_std = 1e-3;
};

struct TraceRow {
  std::size_t step = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  std::vector<TraceRow> trace;  // one row per step plus the final state
  double final_joint_error = 0.0;  // cells, over supervised axes
  ToyModel model;
};

struct ToyRun {
  ToyTaskSpec task;
  TrainConfig config;
};

/// Single sample, one joint, 4x4x4 grid.
ToyRun reference_single_run();
/// Two joints, 16 samples, half of them supervised in x, y only.
ToyRun reference_mixed_run();

/// Plain SGD on the mean L1 joint loss. Deterministic for a fixed seed.
/// Throws DivergenceError when the loss becomes non-finite.
TrainResult train(const TrainConfig& config, const ToyTask& task);

/// Mean Euclidean error over supervised axes, averaged over joints and samples.
double mean_joint_error(const ToyModel& model, std::span<const ToySample> samples);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // both gradients below 1e-8 in magnitude
};

/// Central differences on a seeded random subset of parameters.
GradCheckResult grad_check(const ToyModel& model, const ToySample& sample,
                           std::size_t parameter_count = 200, std::uint64_t seed = 0,
                           double step = 1e-5);

}  // namespace ipose
