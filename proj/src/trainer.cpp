#include "ipose/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "ipose/error.hpp"

namespace ipose {

ToyTask make_toy_task(const ToyTaskSpec& spec) {
  spec.dims.validate();
  if (spec.joints == 0 || spec.features == 0) {
    throw InvalidInput("toy task needs at least one joint and one feature");
  }
  if (spec.train_samples == 0) throw InvalidInput("toy task needs at least one training sample");
  if (!(spec.planar_fraction >= 0.0 && spec.planar_fraction <= 1.0)) {
    throw InvalidInput("planar fraction must lie in [0, 1]");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Targets stay half a cell inside the border, where soft-argmax can reach.
  auto coordinate = [&](std::size_t size) {
    if (size < 3) return (static_cast<double>(size) - 1.0) / 2.0;
    std::uniform_real_distribution<double> u(0.5, static_cast<double>(size) - 1.5);
    return u(rng);
  };
  auto make = [&](std::size_t count) {
    std::vector<ToySample> out(count);
    const auto planar = static_cast<std::size_t>(spec.planar_fraction * static_cast<double>(count));
    for (std::size_t i = 0; i < count; ++i) {
      ToySample& s = out[i];
      s.features.resize(spec.features);
      for (double& f : s.features) f = gauss(rng);
      s.target = Pose{Units::Cells, Space::Absolute, std::vector<Vec3>(spec.joints)};
      for (Vec3& j : s.target.joints) {
        j.x = coordinate(spec.dims.width);
        j.y = coordinate(spec.dims.height);
        j.z = coordinate(spec.dims.depth);
      }
      // Planar samples are interleaved so every prefix sees both kinds.
      const bool is_planar = planar > 0 && (i * planar) / count != ((i + 1) * planar) / count;
      s.mask = is_planar ? AxisMask::planar(spec.joints) : AxisMask::all(spec.joints);
    }
    return out;
  };
  ToyTask task{spec.dims, spec.joints, spec.features, make(spec.train_samples),
               make(spec.val_samples)};
  return task;
}

ToyModel::ToyModel(GridDims dims, std::size_t joints, std::size_t features, std::uint64_t seed,
                   double init_std)
    : dims_(dims), joints_(joints), features_(features) {
  dims_.validate();
  if (joints == 0 || features == 0) throw InvalidInput("toy model needs joints and features");
  params_.resize(outputs() * (features_ + 1));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, init_std);
  for (double& p : params_) p = gauss(rng);
}

LikelihoodGrid ToyModel::forward(std::span<const double> features) const {
  if (features.size() != features_) {
    throw ShapeError("toy model expects " + std::to_string(features_) + " features, got " +
                     std::to_string(features.size()));
  }
  const std::size_t n = outputs();
  const double* bias = params_.data() + weight_count();
  std::vector<double> logits(n);
  for (std::size_t o = 0; o < n; ++o) {
    const double* row = params_.data() + o * features_;
    double acc = bias[o];
    for (std::size_t f = 0; f < features_; ++f) acc += row[f] * features[f];
    logits[o] = acc;
  }
  return LikelihoodGrid(dims_, joints_, std::move(logits));
}

double ToyModel::loss(const ToySample& sample) const {
  const ProbGrid probs = normalize(forward(sample.features));
  return l1_estimate_loss(soft_argmax(probs), sample.target, sample.mask).value;
}

ToyModel::Evaluation ToyModel::evaluate(const ToySample& sample) const {
  const ProbGrid probs = normalize(forward(sample.features));
  Evaluation ev;
  ev.estimate = soft_argmax(probs);
  const LossValue lv = l1_joint_loss(probs, ev.estimate, sample.target, sample.mask);
  ev.loss = lv.value;
  ev.gradient.assign(params_.size(), 0.0);
  double* dbias = ev.gradient.data() + weight_count();
  for (std::size_t o = 0; o < outputs(); ++o) {
    const double g = lv.gradient[o];
    dbias[o] = g;
    double* row = ev.gradient.data() + o * features_;
    for (std::size_t f = 0; f < features_; ++f) row[f] = g * sample.features[f];
  }
  return ev;
}

namespace {

double mean_loss(const ToyModel& model, std::span<const ToySample> samples) {
  double total = 0.0;
  for (const ToySample& s : samples) total += model.loss(s);
  return total / static_cast<double>(samples.size());
}

}  // namespace

double mean_joint_error(const ToyModel& model, std::span<const ToySample> samples) {
  double total = 0.0;
  std::size_t count = 0;
  for (const ToySample& s : samples) {
    const JointEstimate est = soft_argmax(normalize(model.forward(s.features)));
    for (std::size_t k = 0; k < est.joints.size(); ++k) {
      double sq = 0.0;
      bool any = false;
      for (std::size_t a = 0; a < 3; ++a) {
        if (!s.mask.axes[k][a]) continue;
        const double d = est.joints[k][a] - s.target.joints[k][a];
        sq += d * d;
        any = true;
      }
      if (any) {
        total += std::sqrt(sq);
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

ToyRun reference_single_run() {
  ToyRun run;
  run.task.seed = 1;
  run.config.learning_rate = 0.05;
  run.config.max_steps = 2000;
  run.config.seed = 3;
  return run;
}

ToyRun reference_mixed_run() {
  ToyRun run;
  run.task.joints = 2;
  run.task.features = 16;
  run.task.train_samples = 16;
  run.task.planar_fraction = 0.5;
  run.task.seed = 1;
  run.config.learning_rate = 0.2;
  run.config.max_steps = 2000;
  run.config.seed = 3;
  return run;
}

TrainResult train(const TrainConfig& config, const ToyTask& task) {
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    throw InvalidInput("learning rate must be finite and non-negative");
  }
  if (config.batch_size == 0) throw InvalidInput("batch size must be >= 1");
  if (task.train.empty()) throw InvalidInput("toy task has no training samples");

  TrainResult result{{}, 0.0,
                     ToyModel(task.dims, task.joints, task.features, config.seed, config.init_std)};
  ToyModel& model = result.model;
  const std::span<const ToySample> train_set = task.train;
  const std::span<const ToySample> val_set = task.val.empty() ? train_set : task.val;

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  const std::size_t batch = std::min(config.batch_size, train_set.size());

  double lr = config.learning_rate;
  bool dropped = false;
  std::vector<double> val_history;
  std::vector<double> grad(model.parameters().size());

  for (std::size_t step = 0; step <= config.max_steps; ++step) {
    const double train_loss = mean_loss(model, train_set);
    const double val_loss = val_set.data() == train_set.data() ? train_loss
                                                               : mean_loss(model, val_set);
    if (!std::isfinite(train_loss) || !std::isfinite(val_loss)) {
      throw DivergenceError(step, "loss became non-finite at step " + std::to_string(step));
    }
    result.trace.push_back({step, train_loss, val_loss, lr});
    val_history.push_back(val_loss);
    if (step == config.max_steps) break;

    if (!dropped && config.plateau_window > 0 && step >= config.plateau_window) {
      const double before = val_history[step - config.plateau_window];
      if (before - val_loss < config.plateau_min_improvement * before) {
        lr = std::min(lr, config.lr_drop_to);
        dropped = true;
      }
    }

    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const ToyModel::Evaluation ev = model.evaluate(train_set[order[cursor++]]);
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += ev.gradient[i];
    }
    const double scale = lr / static_cast<double>(batch);
    auto params = model.parameters();
    for (std::size_t i = 0; i < grad.size(); ++i) params[i] -= scale * grad[i];
    if (!std::all_of(params.begin(), params.end(), [](double v) { return std::isfinite(v); })) {
      throw DivergenceError(step + 1, "parameters became non-finite after step " +
                                          std::to_string(step));
    }
  }
  result.final_joint_error = mean_joint_error(model, train_set);
  return result;
}

namespace {

// Loss of the toy model re-evaluated in extended precision. Finite
// differences taken on this keep roundoff far below the 1e-5 step's
// truncation error.
long double extended_loss(const ToyModel& model, std::span<const long double> params,
                          const ToySample& sample) {
  const GridDims& d = model.dims();
  const std::size_t cells = d.cells();
  const std::size_t nf = model.features();
  const long double* bias = params.data() + model.weight_count();
  std::vector<long double> logits(cells);
  long double total = 0.0L;
  std::size_t active = 0;
  for (std::size_t k = 0; k < model.joints(); ++k) {
    for (std::size_t c = 0; c < cells; ++c) {
      const std::size_t o = k * cells + c;
      long double acc = bias[o];
      for (std::size_t f = 0; f < nf; ++f) {
        acc += params[o * nf + f] * static_cast<long double>(sample.features[f]);
      }
      logits[c] = acc;
    }
    const long double peak = *std::max_element(logits.begin(), logits.end());
    long double mass = 0.0L;
    std::array<long double, 3> e{};
    std::size_t c = 0;
    for (std::size_t z = 0; z < d.depth; ++z)
      for (std::size_t y = 0; y < d.height; ++y)
        for (std::size_t x = 0; x < d.width; ++x, ++c) {
          const long double w = std::exp(logits[c] - peak);
          mass += w;
          e[0] += w * static_cast<long double>(x);
          e[1] += w * static_cast<long double>(y);
          e[2] += w * static_cast<long double>(z);
        }
    for (std::size_t a = 0; a < 3; ++a) {
      if (!sample.mask.axes[k][a]) continue;
      total += std::abs(e[a] / mass - static_cast<long double>(sample.target.joints[k][a]));
      ++active;
    }
  }
  return active == 0 ? 0.0L : total / static_cast<long double>(active);
}

}  // namespace

GradCheckResult grad_check(const ToyModel& model, const ToySample& sample,
                           std::size_t parameter_count, std::uint64_t seed, double step) {
  const ToyModel::Evaluation ev = model.evaluate(sample);
  const std::size_t total = model.parameters().size();
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(parameter_count, total));

  if (sample.target.size() != model.joints() || sample.mask.axes.size() != model.joints() ||
      sample.features.size() != model.features()) {
    throw ShapeError("gradient check sample does not match the model");
  }
  GradCheckResult out;
  std::vector<long double> probe(model.parameters().begin(), model.parameters().end());
  const auto h = static_cast<long double>(step);
  for (std::size_t i : idx) {
    const long double saved = probe[i];
    probe[i] = saved + h;
    const long double up = extended_loss(model, probe, sample);
    probe[i] = saved - h;
    const long double down = extended_loss(model, probe, sample);
    probe[i] = saved;
    const auto numeric = static_cast<double>((up - down) / (2.0L * h));
    const double analytic = ev.gradient[i];
    const double mag = std::max(std::abs(numeric), std::abs(analytic));
    if (mag <= 1e-8) {
      ++out.skipped;
      continue;
    }
    ++out.checked;
    out.max_relative_error = std::max(out.max_relative_error, std::abs(numeric - analytic) / mag);
  }
  return out;
}

}  // namespace ipose
