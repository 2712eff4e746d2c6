#include <gtest/gtest.h>

#include <random>

#include "mmalign/kinematics.hpp"
#include "oracles.hpp"

using namespace mmalign;

namespace {

PoseFrame transformed(PoseFrame f, double scale, double dx, double dy) {
  for (auto& p : f.keypoints) {
    if (p.valid()) p = Point2{p.x * scale + dx, p.y * scale + dy};
  }
  f.bbox = BoundingBox{f.bbox.xmin * scale + dx, f.bbox.ymin * scale + dy, f.bbox.xmax * scale + dx,
                       f.bbox.ymax * scale + dy};
  return f;
}

void expect_same(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  ASSERT_EQ(a.has_value(), b.has_value());
  if (a) {
    EXPECT_NEAR(*a, *b, tol);
  }
}

}  // namespace

TEST(Kinematics, NeutralStanceAndUpright) {
  PoseFrame f;
  f.has_detection = true;
  f.bbox = {0, 0, 100, 200};
  f.keypoints[joint::left_shoulder] = {40, 50};
  f.keypoints[joint::right_shoulder] = {60, 50};
  f.keypoints[joint::left_wrist] = {40, 100};
  f.keypoints[joint::right_wrist] = {60, 100};
  f.keypoints[joint::left_hip] = {45, 120};
  f.keypoints[joint::right_hip] = {55, 120};
  EXPECT_DOUBLE_EQ(*arm_spread(f), 1.0);
  EXPECT_DOUBLE_EQ(*trunk_lean(f), 0.0);
  f.keypoints[joint::left_hip] = {115, 120};
  f.keypoints[joint::right_hip] = {125, 120};
  EXPECT_NEAR(*trunk_lean(f), 45.0, 1e-12);
}

TEST(Kinematics, InvalidJointsNeverContribute) {
  std::mt19937_64 g(1);
  PoseFrame a = oracle::random_pose(g, 0.0);
  PoseFrame b = oracle::random_pose(g, 1.0);
  const double full = *kinetic_energy(b, a);
  // Drop the nose in one frame: its displacement must vanish from the sum.
  const double nose = distance(a.keypoints[joint::nose], b.keypoints[joint::nose]);
  a.keypoints[joint::nose] = Point2{0, 0};
  EXPECT_NEAR(*kinetic_energy(b, a), full - nose / b.bbox.height(), 1e-12);

  b.keypoints[joint::left_wrist] = Point2{0, 0};
  EXPECT_FALSE(arm_spread(b).has_value());
  b.keypoints[joint::left_wrist] = Point2{0, 5};  // only (0, 0) is the sentinel
  EXPECT_TRUE(arm_spread(b).has_value());
  b.keypoints[joint::right_hip] = Point2{0, 0};
  EXPECT_FALSE(trunk_lean(b).has_value());
  b.has_detection = false;
  EXPECT_FALSE(kinetic_energy(b, a).has_value());
}

TEST(Kinematics, DegenerateGeometryIsMissing) {
  std::mt19937_64 g(2);
  PoseFrame f = oracle::random_pose(g, 0.0);
  f.keypoints[joint::right_shoulder] = f.keypoints[joint::left_shoulder];
  EXPECT_FALSE(arm_spread(f).has_value());
  f = oracle::random_pose(g, 0.0);
  f.keypoints[joint::left_hip].y = f.keypoints[joint::left_shoulder].y;
  f.keypoints[joint::right_hip].y = f.keypoints[joint::right_shoulder].y;
  EXPECT_FALSE(trunk_lean(f).has_value());
}

TEST(Kinematics, MatchesPerJointRecomputation) {
  std::mt19937_64 g(4);
  for (int i = 0; i < 1000; ++i) {
    PoseFrame a = oracle::random_pose(g, 0.0);
    PoseFrame b = oracle::random_pose(g, 1.0);
    for (auto& p : b.keypoints) {
      if (g() % 6 == 0) p = Point2{0, 0};
    }
    expect_same(arm_spread(b), oracle::arm_spread(b), 1e-12);
    expect_same(trunk_lean(b), oracle::trunk_lean(b), 1e-12);
    expect_same(kinetic_energy(b, a), oracle::kinetic_energy(b, a), 1e-12);
  }
}

TEST(Kinematics, ScaleAndTranslationInvariance) {
  std::mt19937_64 g(6);
  for (int i = 0; i < 200; ++i) {
    const PoseFrame a = oracle::random_pose(g, 0.0);
    const PoseFrame b = oracle::random_pose(g, 1.0);
    const double dx = static_cast<double>(g() % 4000) / 8.0;
    const double dy = static_cast<double>(g() % 4000) / 8.0;
    const PoseFrame a2 = transformed(a, 2.0, dx, dy);
    const PoseFrame b2 = transformed(b, 2.0, dx, dy);
    EXPECT_EQ(arm_spread(b), arm_spread(b2));
    EXPECT_EQ(trunk_lean(b), trunk_lean(b2));
    EXPECT_EQ(kinetic_energy(b, a), kinetic_energy(b2, a2));
  }
}

TEST(Kinematics, EnergyPairsWithPreviousDetection) {
  std::mt19937_64 g(9);
  std::vector<PoseFrame> frames = {oracle::random_pose(g, 0), oracle::random_pose(g, 1), PoseFrame{},
                                   oracle::random_pose(g, 3), oracle::random_pose(g, 10)};
  frames[2].time = 2;
  const auto k = compute_kinematics(frames);
  EXPECT_FALSE(k[0].kinetic_energy);
  EXPECT_TRUE(k[1].kinetic_energy);
  EXPECT_FALSE(k[2].detected);
  EXPECT_EQ(k[3].kinetic_energy, kinetic_energy(frames[3], frames[1]));
  EXPECT_FALSE(k[4].kinetic_energy);  // gap above kMaxPairGap
}

TEST(Kinematics, SinglePerformerKeepsLargestBox) {
  PoseFrame small, big;
  small.time = big.time = 1.0;
  small.has_detection = big.has_detection = true;
  small.bbox = {0, 0, 10, 10};
  big.bbox = {0, 0, 50, 50};
  const std::vector<PoseFrame> frames = {small, big};
  Warnings w;
  const auto out = single_performer(frames, &w);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].bbox, big.bbox);
  EXPECT_EQ(w.count(), 1u);
}

TEST(Kinematics, ShotFilterUsesNearestFrame) {
  std::vector<PoseFrame> frames(4);
  for (int i = 0; i < 4; ++i) frames[static_cast<std::size_t>(i)].time = i;
  const std::vector<ShotFrame> shots = {{0, ShotLabel::full_shot, 0, 1}, {1, ShotLabel::medium_close_up, 0, 1},
                                        {2.4, ShotLabel::medium_long_shot, 0, 1}};
  const auto kept = filter_by_shot(frames, shots, {ShotLabel::full_shot, ShotLabel::medium_long_shot});
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].time, 0.0);
  EXPECT_EQ(kept[1].time, 2.0);
}

TEST(Smoothing, MatchesQuadraticOracle) {
  std::mt19937_64 g(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<KinematicSample> s;
    double t = 0.0;
    for (int i = 0; i < 600; ++i) {
      t += (g() % 5 == 0) ? 3.0 : 1.0;
      KinematicSample k;
      k.time = t;
      if (g() % 4 != 0) k.arm_spread = oracle::uniform(g, 0.2, 3.0);
      if (g() % 3 != 0) k.kinetic_energy = oracle::uniform(g, 0.0, 40.0);
      if (g() % 2 != 0) k.trunk_lean = oracle::uniform(g, -30.0, 30.0);
      s.push_back(k);
    }
    const auto out = smooth(s, 30.0);
    std::vector<double> ts;
    std::vector<std::optional<double>> a, e, th;
    for (const auto& k : s) ts.push_back(k.time), a.push_back(k.arm_spread), e.push_back(k.kinetic_energy), th.push_back(k.trunk_lean);
    const auto ra = oracle::windowed_mean(ts, a, 30.0);
    const auto re = oracle::windowed_mean(ts, e, 30.0);
    const auto rt = oracle::windowed_mean(ts, th, 30.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      expect_same(out[i].arm_spread, ra[i], 1e-12);
      expect_same(out[i].kinetic_energy, re[i], 1e-12);
      expect_same(out[i].trunk_lean, rt[i], 1e-12);
    }
  }
}

TEST(Smoothing, ConstantSignalIsFixedPoint) {
  std::vector<KinematicSample> s(100);
  for (std::size_t i = 0; i < s.size(); ++i) s[i].time = static_cast<double>(i), s[i].arm_spread = 1.25;
  for (const auto& k : smooth(s, 30.0)) EXPECT_EQ(*k.arm_spread, 1.25);
  EXPECT_THROW(smooth(s, 0.0), InvariantError);
}
