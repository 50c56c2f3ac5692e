#include <gtest/gtest.h>

#include <random>

#include "ipose/camera.hpp"
#include "ipose/error.hpp"
#include "ipose/metrics.hpp"
#include "support/oracles.hpp"
#include "support/population.hpp"

namespace ipose {
namespace {

Pose mm(std::vector<Vec3> j, Space s = Space::RootRelative) {
  return Pose{Units::Millimeters, s, std::move(j)};
}

Skeleton two_joint() {
  Skeleton s;
  s.name = "pair";
  s.joint_names = {"a", "b"};
  s.parent = {-1, 0};
  return s;
}

Skeleton random_tree(std::size_t n, std::mt19937_64& rng) {
  Skeleton s;
  s.name = "random";
  s.parent.push_back(-1);
  s.joint_names.push_back("j0");
  for (std::size_t j = 1; j < n; ++j) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(j) - 1);
    s.parent.push_back(pick(rng));
    s.joint_names.push_back("j" + std::to_string(j));
  }
  return s;
}

Pose random_pose(std::size_t n, std::mt19937_64& rng, Units u = Units::Millimeters) {
  std::normal_distribution<double> g(0.0, 200.0);
  Pose p{u, Space::Absolute, {}};
  for (std::size_t j = 0; j < n; ++j) p.joints.push_back({g(rng), g(rng), g(rng)});
  return p;
}

TEST(Skeleton, DefaultIsValid) {
  const Skeleton s = Skeleton::h36m17();
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.size(), 17u);
  EXPECT_EQ(s.bones().size(), 16u);
  const auto m = s.mirror_permutation();
  for (std::size_t j = 0; j < 17; ++j) EXPECT_EQ(m[m[j]], j);
  EXPECT_EQ(m[0], 0u);
  EXPECT_EQ(m[4], 1u);
}

TEST(Skeleton, RejectsCyclesAndBadPairs) {
  Skeleton s = two_joint();
  s.joint_names.push_back("c");
  s.parent = {-1, 2, 1};
  EXPECT_THROW(s.validate(), SkeletonError);
  s.parent = {-1, 0, 0};
  s.flip_pairs = {{1, 2}, {2, 0}};
  EXPECT_THROW(s.validate(), SkeletonError);
  s.flip_pairs = {{1, 5}};
  EXPECT_THROW(s.validate(), SkeletonError);
  s.flip_pairs = {{1, 2}};
  EXPECT_NO_THROW(s.validate());
  s.parent = {0, 0, 0};
  EXPECT_THROW(s.validate(), SkeletonError);
}

TEST(MeanBoneLength, ThreeFourFive) {
  EXPECT_DOUBLE_EQ(mean_bone_length(mm({{0, 0, 0}, {0, 3, 4}}), two_joint()).mean, 5.0);
}

TEST(MeanBoneLength, Homogeneous) {
  std::mt19937_64 rng(1);
  const Skeleton s = Skeleton::h36m17();
  const Pose p = random_pose(17, rng);
  Pose q = p;
  for (auto& v : q.joints) v = 2.5 * v;
  EXPECT_NEAR(mean_bone_length(q, s).mean, 2.5 * mean_bone_length(p, s).mean, 1e-9);
}

TEST(MeanBoneLength, MatchesEdgeSumOracleOnRandomTrees) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const Skeleton s = random_tree(17, rng);
    const Pose p = random_pose(17, rng);
    EXPECT_NEAR(mean_bone_length(p, s).mean, oracle::mean_edge_length(p.joints, s.parent), 1e-12);
  }
}

TEST(MeanBoneLength, WarnsOnZeroLengthBone) {
  const auto r = mean_bone_length(mm({{1, 1, 1}, {1, 1, 1}}), two_joint());
  EXPECT_EQ(r.mean, 0.0);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("zero length"), std::string::npos);
}

TEST(Rescale, SingleBone) {
  const Pose px{Units::ImagePixels, Space::RootRelative, {{0, 0, 0}, {0, 2, 0}}};
  const Pose out = rescale_to_bone_length(px, 50.0, two_joint());
  EXPECT_EQ(out.units, Units::Millimeters);
  EXPECT_EQ(out.joints[1], (Vec3{0, 50, 0}));
}

TEST(Rescale, AlreadyAtTargetIsIdentity) {
  const Pose p{Units::ImagePixels, Space::RootRelative, {{0, 0, 0}, {0, 3, 4}}};
  EXPECT_EQ(rescale_to_bone_length(p, 5.0, two_joint()).joints, p.joints);
}

TEST(Rescale, HitsTargetKeepsRootAndDirection) {
  std::mt19937_64 rng(3);
  const Skeleton s = Skeleton::h36m17();
  for (int t = 0; t < 50; ++t) {
    const Pose p = root_aligned(random_pose(17, rng, Units::ImagePixels), 0);
    const Pose out = rescale_to_bone_length(p, 123.0, s);
    EXPECT_NEAR(mean_bone_length(out, s).mean / 123.0, 1.0, 1e-9);
    EXPECT_EQ(out.joints[0], (Vec3{0, 0, 0}));
    const double lambda = out.joints[5].x / p.joints[5].x;
    EXPECT_GT(lambda, 0.0);
    for (std::size_t j = 1; j < 17; ++j)
      for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(out.joints[j][a], lambda * p.joints[j][a], 1e-9);
  }
}

TEST(Rescale, Idempotent) {
  std::mt19937_64 rng(4);
  const Skeleton s = Skeleton::h36m17();
  const Pose once = rescale_to_bone_length(random_pose(17, rng, Units::ImagePixels), 250.0, s);
  const Pose twice = rescale_to_bone_length(once, 250.0, s);
  for (std::size_t j = 0; j < 17; ++j)
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(twice.joints[j][a], once.joints[j][a], 1e-12);
}

TEST(Rescale, RoundTripThroughCamera) {
  std::mt19937_64 rng(5);
  const Skeleton s = Skeleton::h36m17();
  const Pose gt = root_aligned(random_pose(17, rng), 0);
  const Pose projected = project(WeakPerspectiveCamera{2.0, 300, 200}, gt);
  const Pose back = rescale_to_bone_length(projected, mean_bone_length(gt, s).mean, s);
  for (std::size_t j = 0; j < 17; ++j)
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(back.joints[j][a], gt.joints[j][a], 1e-9);
}

TEST(Rescale, DegeneratePose) {
  const Pose flat{Units::ImagePixels, Space::RootRelative, {{2, 2, 2}, {2, 2, 2}}};
  EXPECT_THROW(rescale_to_bone_length(flat, 10.0, two_joint()), DegeneratePose);
  EXPECT_THROW(rescale_to_bone_length(flat, -1.0, two_joint()), InvalidInput);
}

TEST(Mpjpe, ZeroForIdentical) {
  std::mt19937_64 rng(6);
  const std::vector<Pose> p = {random_pose(17, rng), random_pose(17, rng)};
  EXPECT_EQ(mpjpe(p, p, Skeleton::h36m17()).mpjpe, 0.0);
}

TEST(Mpjpe, OneJointDisplaced) {
  std::vector<Vec3> joints(17, Vec3{});
  const Pose gt = mm(joints);
  joints[3] = {3, 4, 0};
  const Pose pred = mm(joints);
  const auto r = mpjpe(std::vector<Pose>{pred}, std::vector<Pose>{gt}, Skeleton::h36m17());
  EXPECT_NEAR(r.mpjpe, 5.0 / 17.0, 1e-15);
  EXPECT_NEAR(r.per_joint_error[3], 5.0, 1e-15);
  EXPECT_EQ(r.frames, 1u);
}

TEST(Mpjpe, TranslationInvariantAndSymmetric) {
  std::mt19937_64 rng(7);
  const Skeleton s = Skeleton::h36m17();
  std::vector<Pose> pred, gt;
  for (int f = 0; f < 10; ++f) {
    pred.push_back(random_pose(17, rng));
    gt.push_back(random_pose(17, rng));
  }
  const double base = mpjpe(pred, gt, s).mpjpe;
  EXPECT_NEAR(mpjpe(gt, pred, s).mpjpe, base, 1e-12);
  auto shifted = pred;
  for (auto& p : shifted)
    for (auto& v : p.joints) v = v + Vec3{1000.5, -20.25, 7.0};
  EXPECT_NEAR(mpjpe(shifted, gt, s).mpjpe, base, 1e-9);
}

TEST(Mpjpe, SerialAndParallelAgree) {
  std::mt19937_64 rng(8);
  const Skeleton s = Skeleton::h36m17();
  std::vector<Pose> pred, gt;
  for (int f = 0; f < 64; ++f) {
    pred.push_back(random_pose(17, rng));
    gt.push_back(random_pose(17, rng));
  }
  const auto a = mpjpe(pred, gt, s);
  const auto b = mpjpe_serial(pred, gt, s);
  EXPECT_EQ(a.mpjpe, b.mpjpe);
  EXPECT_EQ(a.per_joint_error, b.per_joint_error);
}

TEST(Mpjpe, Errors) {
  const Skeleton s = Skeleton::h36m17();
  std::mt19937_64 rng(9);
  const std::vector<Pose> a = {random_pose(17, rng)};
  const std::vector<Pose> short_pose = {random_pose(16, rng)};
  const std::vector<Pose> pixels = {random_pose(17, rng, Units::ImagePixels)};
  EXPECT_THROW(mpjpe(a, short_pose, s), ShapeError);
  EXPECT_THROW(mpjpe(a, pixels, s), UnitError);
  EXPECT_THROW(mpjpe(a, std::vector<Pose>{}, s), ShapeError);
}

TEST(PolicyExperiment, ZeroNoisePerFrameIsExact) {
  const Skeleton s = Skeleton::h36m17();
  std::mt19937_64 rng(10);
  std::vector<Pose> gt, pred;
  for (int f = 0; f < 20; ++f) {
    gt.push_back(root_aligned(random_pose(17, rng), 0));
    pred.push_back(project(WeakPerspectiveCamera{1.0 + 0.1 * f, 5, 5}, gt.back()));
  }
  const std::vector<BoneLengthPolicy> policies = {
      {"per-frame", {0.0, BoneLengthSource::PerFrame}}};
  const auto rows = bone_length_policy_experiment(gt, pred, policies, s);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].mpjpe, 0.0, 1e-9);
  EXPECT_TRUE(std::isnan(rows[0].bone_length));
}

TEST(PolicyExperiment, RejectsMillimeterPredictions) {
  const Skeleton s = Skeleton::h36m17();
  std::mt19937_64 rng(11);
  const std::vector<Pose> gt = {random_pose(17, rng)};
  const std::vector<BoneLengthPolicy> policies = {{"x", {100.0, BoneLengthSource::Explicit}}};
  EXPECT_THROW(bone_length_policy_experiment(gt, gt, policies, s), UnitError);
  EXPECT_THROW(bone_length_policy_experiment(gt, gt, std::vector<BoneLengthPolicy>{}, s),
               InvalidInput);
}

TEST(PolicyExperiment, PerFrameBeatsDatasetAverages) {
  testing::PopulationSpec spec;
  spec.frames_per_subject = 60;
  const auto pop = testing::make_population(spec);
  const Skeleton s = Skeleton::h36m17();
  std::vector<Pose> both = pop.train_gt;
  both.insert(both.end(), pop.val_gt.begin(), pop.val_gt.end());
  const std::vector<BoneLengthPolicy> policies = {
      {"per-frame", {0.0, BoneLengthSource::PerFrame}},
      {"avg-val", dataset_bone_length(pop.val_gt, s, BoneLengthSource::AvgVal)},
      {"avg-train", dataset_bone_length(pop.train_gt, s, BoneLengthSource::AvgTrain)},
      {"avg-train+val", dataset_bone_length(both, s, BoneLengthSource::AvgTrainVal)}};
  const auto rows = bone_length_policy_experiment(pop.val_gt, pop.val_pred, policies, s);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[0].mpjpe, rows[i].mpjpe) << rows[i].label;
}

}  // namespace
}  // namespace ipose
