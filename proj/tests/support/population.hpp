#pragma once

// Seeded synthetic subjects for bone-length policy experiments.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ipose/camera.hpp"
#include "ipose/pose.hpp"

namespace ipose::testing {

/// Standing 17-joint pose in mm, pelvis at the origin (h36m17 order).
inline std::vector<Vec3> template_pose_mm() {
  return {{0, 0, 0},        {-130, 0, 0},     {-130, 450, 0},  {-130, 900, 0},
          {130, 0, 0},      {130, 450, 0},    {130, 900, 0},   {0, -230, 0},
          {0, -480, 0},     {0, -580, 0},     {0, -700, 0},    {170, -460, 0},
          {170, -190, 0},   {170, 60, 0},     {-170, -460, 0}, {-170, -190, 0},
          {-170, 60, 0}};
}

struct Population {
  std::vector<Pose> train_gt;  // mm, root-relative
  std::vector<Pose> val_gt;    // mm, root-relative
  std::vector<Pose> val_pred;  // image px, weak-perspective projection of a noisy estimate
};

struct PopulationSpec {
  std::size_t subjects_train = 5;
  std::size_t subjects_val = 4;
  std::size_t frames_per_subject = 300;
  double subject_scale_spread = 0.15;  // subject scale ~ U[1 - spread, 1 + spread]
  double pose_jitter_mm = 25.0;
  double prediction_noise_mm = 10.0;
  std::uint64_t seed = 7;
};

inline Population make_population(const PopulationSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> subject_scale(1.0 - spec.subject_scale_spread,
                                                       1.0 + spec.subject_scale_spread);
  std::uniform_real_distribution<double> yaw(-3.14159, 3.14159);
  std::uniform_real_distribution<double> cam_scale(1.5, 3.0);
  std::uniform_real_distribution<double> cam_shift(100.0, 900.0);
  std::normal_distribution<double> jitter(0.0, spec.pose_jitter_mm);
  std::normal_distribution<double> noise(0.0, spec.prediction_noise_mm);
  const auto base = template_pose_mm();

  auto frame = [&](double scale) {
    const double a = yaw(rng);
    const double c = std::cos(a), s = std::sin(a);
    Pose p{Units::Millimeters, Space::RootRelative, {}};
    for (std::size_t j = 0; j < base.size(); ++j) {
      Vec3 v = scale * base[j];
      if (j != 0) v = v + Vec3{jitter(rng), jitter(rng), jitter(rng)};
      p.joints.push_back({c * v.x + s * v.z, v.y, -s * v.x + c * v.z});
    }
    return p;
  };

  Population pop;
  for (std::size_t s = 0; s < spec.subjects_train; ++s) {
    const double scale = subject_scale(rng);
    for (std::size_t f = 0; f < spec.frames_per_subject; ++f) pop.train_gt.push_back(frame(scale));
  }
  for (std::size_t s = 0; s < spec.subjects_val; ++s) {
    const double scale = subject_scale(rng);
    for (std::size_t f = 0; f < spec.frames_per_subject; ++f) {
      Pose gt = frame(scale);
      Pose noisy = gt;
      for (std::size_t j = 1; j < noisy.size(); ++j) {
        noisy.joints[j] = noisy.joints[j] + Vec3{noise(rng), noise(rng), noise(rng)};
      }
      const WeakPerspectiveCamera cam{cam_scale(rng), cam_shift(rng), cam_shift(rng)};
      pop.val_pred.push_back(project(cam, noisy));
      pop.val_gt.push_back(std::move(gt));
    }
  }
  return pop;
}

}  // namespace ipose::testing
