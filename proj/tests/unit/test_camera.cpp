#include <gtest/gtest.h>

#include <random>

#include "ipose/camera.hpp"
#include "ipose/error.hpp"
#include "support/oracles.hpp"

namespace ipose {
namespace {

Pose mm(std::vector<Vec3> j) { return Pose{Units::Millimeters, Space::RootRelative, std::move(j)}; }
Pose px(std::vector<Vec3> j) { return Pose{Units::ImagePixels, Space::Absolute, std::move(j)}; }

Pose random_mm(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 300.0);
  Pose p = mm({});
  for (std::size_t j = 0; j < n; ++j) p.joints.push_back({g(rng), g(rng), g(rng)});
  return p;
}

TEST(FitWeakPerspective, ExactThreePoints) {
  const auto fit = fit_weak_perspective(mm({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}),
                                        px({{10, 20, 0}, {12, 20, 0}, {10, 22, 0}}));
  EXPECT_NEAR(fit.camera.scale, 2.0, 1e-12);
  EXPECT_NEAR(fit.camera.tx, 10.0, 1e-12);
  EXPECT_NEAR(fit.camera.ty, 20.0, 1e-12);
  EXPECT_NEAR(fit.diagnostics.rms_residual, 0.0, 1e-12);
  EXPECT_EQ(fit.diagnostics.inlier_count, 3u);
}

TEST(FitWeakPerspective, RecoversSyntheticCamera) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const WeakPerspectiveCamera truth{0.5 + trial * 0.1, -300.0 + trial, 40.0 * trial};
    const Pose p3 = random_mm(17, rng);
    const auto fit = fit_weak_perspective(p3, project(truth, p3));
    EXPECT_NEAR(fit.camera.scale, truth.scale, 1e-9);
    EXPECT_NEAR(fit.camera.tx, truth.tx, 1e-9);
    EXPECT_NEAR(fit.camera.ty, truth.ty, 1e-9);
  }
}

TEST(FitWeakPerspective, NoisyFitMatchesLeastSquaresOracle) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 1.0);
  const Pose p3 = random_mm(17, rng);
  Pose p2 = project(WeakPerspectiveCamera{1.7, 320.0, 240.0}, p3);
  for (auto& v : p2.joints) v = v + Vec3{noise(rng), noise(rng), 0.0};
  const auto fit = fit_weak_perspective(p3, p2);
  const auto ref = oracle::weak_perspective_lstsq(p3.joints, p2.joints);
  EXPECT_NEAR(fit.camera.scale, ref.scale, 1e-9);
  EXPECT_NEAR(fit.camera.tx, ref.tx, 1e-9);
  EXPECT_NEAR(fit.camera.ty, ref.ty, 1e-9);
  EXPECT_NEAR(fit.diagnostics.rms_residual, ref.rms, 1e-9);
  EXPECT_GT(fit.diagnostics.rms_residual, 0.1);
}

TEST(FitWeakPerspective, MaskExcludesJoints) {
  const Pose p3 = mm({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 5, 5}});
  const Pose p2 = px({{10, 20, 0}, {12, 20, 0}, {10, 22, 0}, {-999, 999, 0}});
  const auto fit = fit_weak_perspective(p3, p2, {true, true, true, false});
  EXPECT_NEAR(fit.camera.scale, 2.0, 1e-12);
  EXPECT_EQ(fit.diagnostics.inlier_count, 3u);
}

TEST(FitWeakPerspective, DegenerateInputs) {
  EXPECT_THROW(fit_weak_perspective(mm({{1, 1, 0}}), px({{3, 3, 0}})), DegenerateFit);
  EXPECT_THROW(fit_weak_perspective(mm({{0.1, 0.3, 0}, {0.1, 0.3, 9}, {0.1, 0.3, 4}}),
                                    px({{1, 2, 0}, {3, 4, 0}, {5, 6, 0}})),
               DegenerateFit);
  // Reflected correspondence gives a negative scale.
  EXPECT_THROW(fit_weak_perspective(mm({{0, 0, 0}, {1, 0, 0}}), px({{0, 0, 0}, {-2, 0, 0}})),
               DegenerateFit);
  EXPECT_THROW(fit_weak_perspective(mm({{0, 0, 0}, {1, 0, 0}}), px({{0, 0, 0}, {2, 0, 0}}),
                                    {true, false}),
               DegenerateFit);
}

TEST(FitWeakPerspective, RejectsSwappedUnits) {
  const Pose a = mm({{0, 0, 0}, {1, 0, 0}});
  EXPECT_THROW(fit_weak_perspective(a, a), UnitError);
}

TEST(FitWeakPerspective, TranslationAndScaleEquivariance) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 2.0);
  const Pose p3 = random_mm(17, rng);
  Pose p2 = project(WeakPerspectiveCamera{2.2, 100, 50}, p3);
  for (auto& v : p2.joints) v = v + Vec3{noise(rng), noise(rng), 0};
  const auto base = fit_weak_perspective(p3, p2);

  Pose shifted = p2;
  for (auto& v : shifted.joints) v = v + Vec3{37.5, -12.25, 0};
  const auto fs = fit_weak_perspective(p3, shifted);
  EXPECT_NEAR(fs.camera.scale, base.camera.scale, 1e-12);
  EXPECT_NEAR(fs.camera.tx, base.camera.tx + 37.5, 1e-12);
  EXPECT_NEAR(fs.camera.ty, base.camera.ty - 12.25, 1e-12);

  Pose scaled = p2;
  for (auto& v : scaled.joints) v = 3.0 * v;
  const auto fc = fit_weak_perspective(p3, scaled);
  EXPECT_NEAR(fc.camera.scale, 3.0 * base.camera.scale, 1e-12);
  EXPECT_NEAR(fc.camera.tx, 3.0 * base.camera.tx, 1e-9);
  EXPECT_NEAR(fc.camera.ty, 3.0 * base.camera.ty, 1e-9);
}

TEST(FitWeakPerspective, NoCandidateBeatsTheFit) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 3.0);
  const Pose p3 = random_mm(17, rng);
  Pose p2 = project(WeakPerspectiveCamera{1.1, 10, 20}, p3);
  for (auto& v : p2.joints) v = v + Vec3{noise(rng), noise(rng), 0};
  const auto fit = fit_weak_perspective(p3, p2);
  auto rms = [&](const WeakPerspectiveCamera& c) {
    double sq = 0;
    for (std::size_t j = 0; j < 17; ++j) {
      const double du = c.scale * p3.joints[j].x + c.tx - p2.joints[j].x;
      const double dv = c.scale * p3.joints[j].y + c.ty - p2.joints[j].y;
      sq += du * du + dv * dv;
    }
    return std::sqrt(sq / 17.0);
  };
  std::uniform_real_distribution<double> jit(-0.5, 0.5);
  for (int i = 0; i < 500; ++i) {
    const WeakPerspectiveCamera cand{fit.camera.scale * (1 + 0.05 * jit(rng)),
                                     fit.camera.tx + 10 * jit(rng), fit.camera.ty + 10 * jit(rng)};
    EXPECT_GE(rms(cand), fit.diagnostics.rms_residual - 1e-12);
  }
}

TEST(Project, IdentityCamera) {
  const Pose p = mm({{1, 2, 3}, {-4, 5, -6}});
  const Pose out = project(WeakPerspectiveCamera{1, 0, 0}, p);
  EXPECT_EQ(out.units, Units::ImagePixels);
  EXPECT_EQ(out.joints, p.joints);
}

TEST(Project, HandComputed) {
  const Pose out = project(WeakPerspectiveCamera{2, 10, 20}, mm({{1, 1, 5}, {0, 0, 0}}));
  EXPECT_EQ(out.joints[0], (Vec3{12, 22, 10}));
  EXPECT_EQ(out.joints[1], (Vec3{10, 20, 0}));
}

TEST(Project, RejectsBadCameraAndUnits) {
  EXPECT_THROW(project(WeakPerspectiveCamera{0, 0, 0}, mm({{0, 0, 0}})), InvalidInput);
  EXPECT_THROW(project(WeakPerspectiveCamera{1, 0, 0}, px({{0, 0, 0}})), UnitError);
}

TEST(Project, ThenFitIsIdentity) {
  std::mt19937_64 rng(5);
  const Pose p3 = random_mm(17, rng);
  const WeakPerspectiveCamera cam{0.731, -55.5, 812.0};
  const auto fit = fit_weak_perspective(p3, project(cam, p3));
  EXPECT_NEAR(fit.camera.scale, cam.scale, 1e-9);
  EXPECT_NEAR(fit.camera.tx, cam.tx, 1e-9);
  EXPECT_NEAR(fit.camera.ty, cam.ty, 1e-9);
}

TEST(FitPerFrame, IdenticalFramesGiveIdenticalCameras) {
  std::mt19937_64 rng(6);
  const Pose p3 = random_mm(17, rng);
  const Pose p2 = project(WeakPerspectiveCamera{2, 1, 1}, p3);
  const auto report = fit_per_frame({{p3, p2, {}}, {p3, p2, {}}});
  ASSERT_TRUE(report.fits[0] && report.fits[1]);
  EXPECT_EQ(report.fits[0]->camera.scale, report.fits[1]->camera.scale);
  EXPECT_EQ(report.fits[0]->camera.tx, report.fits[1]->camera.tx);
  EXPECT_TRUE(report.failures.empty());
}

TEST(FitPerFrame, FailuresAreIsolatedAndReported) {
  std::mt19937_64 rng(7);
  const Pose p3 = random_mm(17, rng);
  const Pose p2 = project(WeakPerspectiveCamera{2, 1, 1}, p3);
  const auto report =
      fit_per_frame({{p3, p2, {}}, {p3, p2, std::vector<bool>(17, false)}, {p3, p2, {}}});
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].frame, 1u);
  EXPECT_EQ(report.failures[0].kind, "degenerate-fit");
  EXPECT_TRUE(report.fits[0].has_value());
  EXPECT_FALSE(report.fits[1].has_value());
  EXPECT_TRUE(report.fits[2].has_value());
}

TEST(FitPerFrame, RecoversPerFrameScales) {
  std::mt19937_64 rng(8);
  std::vector<CameraFitInput> frames;
  const std::vector<double> scales = {1.5, 2.0, 2.5};
  for (double s : scales) {
    const Pose p3 = random_mm(17, rng);
    frames.push_back({p3, project(WeakPerspectiveCamera{s, 5 * s, -3 * s}, p3), {}});
  }
  const auto report = fit_per_frame(frames);
  for (std::size_t f = 0; f < 3; ++f) {
    ASSERT_TRUE(report.fits[f]);
    EXPECT_NEAR(report.fits[f]->camera.scale, scales[f], 1e-9);
    EXPECT_NEAR(report.fits[f]->camera.tx, 5 * scales[f], 1e-9);
  }
}

}  // namespace
}  // namespace ipose
