#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lfrl/kinematics.hpp"

using namespace lfrl;

namespace {

constexpr double kPi = std::numbers::pi;

RobotGeometry geom() { return RobotGeometry{}; }

StepConfig dt(double ts) {
  StepConfig c;
  c.sampling_period = ts;
  return c;
}

// Independent oracle: rotate the pose about the instantaneous centre of
// curvature, located explicitly in world coordinates.
Pose icc_oracle(const Pose& p, double wl, double wr, const RobotGeometry& g, double ts) {
  const double v = g.wheel_radius * (wl + wr) / 2.0;
  const double w = g.wheel_radius * (wr - wl) / g.track_width;
  const double fx = -std::sin(p.delta), fy = std::cos(p.delta);
  if (w == 0.0) return {p.x + fx * v * ts, p.y + fy * v * ts, p.delta};
  const double radius = v / w;
  // left of the robot is -x in its frame, i.e. (-cos d, -sin d) in the world
  const double cx = p.x - radius * std::cos(p.delta);
  const double cy = p.y - radius * std::sin(p.delta);
  const double th = w * ts;
  const double rx = p.x - cx, ry = p.y - cy;
  return {cx + rx * std::cos(th) - ry * std::sin(th), cy + rx * std::sin(th) + ry * std::cos(th),
          normalize_angle(p.delta + th)};
}

double gap(const Pose& a, const Pose& b) { return std::hypot(a.x - b.x, a.y - b.y); }

WheelSpeeds ws(double l, double r) { return WheelSpeeds(l, r, geom().max_wheel_speed); }

}  // namespace

TEST(Kinematics, ForwardComponentExamples) {
  const auto m = forward_component(ws(10, 10), Pose{}, geom(), dt(0.01));
  EXPECT_DOUBLE_EQ(m.v_forward, 0.25);
  EXPECT_DOUBLE_EQ(m.x_forward, 0.0);
  EXPECT_DOUBLE_EQ(m.y_forward, 0.0025);
  EXPECT_DOUBLE_EQ(forward_component(ws(5, 10), Pose{}, geom(), dt(0.01)).w_forward, 5.0);
  EXPECT_DOUBLE_EQ(forward_component(ws(-5, -10), Pose{}, geom(), dt(0.01)).w_forward, -5.0);
  const auto z = forward_component(ws(0, 0), Pose{}, geom(), dt(0.01));
  EXPECT_EQ(z.x_forward, 0.0);
  EXPECT_EQ(z.y_forward, 0.0);
  EXPECT_THROW(forward_component(ws(-1, 1), Pose{}, geom(), dt(0.01)), std::invalid_argument);
}

TEST(Kinematics, EqualSpeedsHaveNoRotation) {
  const auto m = rotation_about_wheel(ws(7, 7), Pose{0, 0, 0.3}, geom(), dt(0.01));
  EXPECT_EQ(m.w_rotation, 0.0);
  EXPECT_EQ(m.alpha, 0.0);
  EXPECT_EQ(m.x_rot, 0.0);
  EXPECT_EQ(m.y_rot, 0.0);
}

TEST(Kinematics, PivotGeometryWithCentreOfMassAtMidBody) {
  RobotGeometry g;
  g.axle_offset = g.length / 2.0;
  EXPECT_NEAR(g.pivot_distance(), std::sqrt(0.1 * 0.1 + 0.125 * 0.125), 1e-15);
  EXPECT_NEAR(g.pivot_distance(), 0.160078, 1e-6);
  EXPECT_NEAR(g.pivot_angle(), std::atan(0.25 / 0.20), 1e-15);
  EXPECT_NEAR(g.pivot_angle(), 0.896055, 1e-6);
  // alpha = 0 still gives no displacement
  const auto m = rotation_about_wheel(ws(3, 3), Pose{}, g, dt(0.01));
  EXPECT_EQ(m.x_rot_body, 0.0);
  EXPECT_EQ(m.y_rot_body, 0.0);
}

TEST(Kinematics, DefaultGeometryPivotIsOnTheAxle) {
  EXPECT_DOUBLE_EQ(geom().pivot_distance(), 0.1);
  EXPECT_EQ(geom().pivot_angle(), 0.0);
}

TEST(Kinematics, SingleWheelRotationMatchesIcc) {
  const Pose p{0, 0, 0};
  const Pose got = step(p, ws(0, 10), geom(), dt(0.001));
  const Pose want = icc_oracle(p, 0, 10, geom(), 0.001);
  EXPECT_LT(gap(got, want), 1e-6);
  EXPECT_NEAR(got.delta, want.delta, 1e-12);
  // right wheel faster turns left (counter-clockwise) and moves toward -x
  EXPECT_GT(got.delta, 0.0);
  EXPECT_LT(got.x, 0.0);
}

TEST(Kinematics, OriginTransferExamples) {
  auto [x1, y1] = origin_transfer(1, 0, 0);
  EXPECT_DOUBLE_EQ(x1, 1.0);
  EXPECT_DOUBLE_EQ(y1, 0.0);
  auto [x2, y2] = origin_transfer(1, 0, kPi / 2);
  EXPECT_NEAR(x2, 0.0, 1e-15);
  EXPECT_NEAR(y2, 1.0, 1e-15);
  for (double d : {-3.0, -1.0, 0.2, 2.5}) {
    auto [x, y] = origin_transfer(0.3, 0.4, d);
    EXPECT_NEAR(std::hypot(x, y), 0.5, 1e-15);
  }
}

TEST(Kinematics, SameDirectionExamples) {
  const Pose p = same_direction_step(Pose{}, ws(10, 10), geom(), dt(0.01));
  EXPECT_DOUBLE_EQ(p.x, 0.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0025);
  EXPECT_EQ(p.delta, 0.0);
  const Pose q{0.3, -0.2, 1.1};
  const Pose same = same_direction_step(q, ws(0, 0), geom(), dt(0.01));
  EXPECT_EQ(same.x, q.x);
  EXPECT_EQ(same.y, q.y);
  EXPECT_EQ(same.delta, q.delta);
  EXPECT_THROW(same_direction_step(q, ws(1, -1), geom(), dt(0.01)), std::invalid_argument);
}

TEST(Kinematics, RandomSameDirectionStepsTrackTheOracle) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double wmax = geom().max_wheel_speed;
  for (int i = 0; i < 2000; ++i) {
    const Pose p{u(gen), u(gen), kPi * u(gen)};
    double l = wmax * u(gen);
    double r = wmax * u(gen);
    if (l * r < 0) r = -r;
    const Pose got = step(p, ws(l, r), geom(), dt(1e-3));
    EXPECT_LT(gap(got, icc_oracle(p, l, r, geom(), 1e-3)), 1e-5);
  }
}

TEST(Kinematics, OppositeExamples) {
  const Pose p = opposite_step(Pose{}, ws(-10, 10), geom(), dt(0.01));
  EXPECT_EQ(p.x, 0.0);
  EXPECT_EQ(p.y, 0.0);
  EXPECT_NEAR(p.delta, 0.025, 1e-15);
  const Pose m = opposite_step(Pose{}, ws(10, -10), geom(), dt(0.01));
  EXPECT_EQ(m.x, 0.0);
  EXPECT_EQ(m.y, 0.0);
  EXPECT_NEAR(m.delta, -0.025, 1e-15);

  const Pose q{0.1, 0.2, 0.7};
  const Pose got = opposite_step(q, ws(-5, 10), geom(), dt(1e-3));
  EXPECT_LT(gap(got, icc_oracle(q, -5, 10, geom(), 1e-3)), 1e-5);
  EXPECT_NEAR(got.delta, icc_oracle(q, -5, 10, geom(), 1e-3).delta, 1e-12);
  EXPECT_THROW(opposite_step(q, ws(1, 1), geom(), dt(0.01)), std::invalid_argument);
}

TEST(Kinematics, OppositeHeadingRateIsExact) {
  // the turn and the residual rotation add up to r (w_r - w_l) / a
  for (auto [l, r] : {std::pair{-5.0, 10.0}, {12.0, -3.0}, {-20.0, 1.0}, {0.5, -0.25}}) {
    const Pose got = opposite_step(Pose{}, ws(l, r), geom(), dt(1e-3));
    EXPECT_NEAR(got.delta, 0.025 * (r - l) / 0.2 * 1e-3, 1e-15);
  }
}

TEST(Kinematics, StepDispatchesAndIsTotal) {
  const Pose p{0.5, 0.5, 0.5};
  auto eq = [](const Pose& a, const Pose& b) {
    return a.x == b.x && a.y == b.y && a.delta == b.delta;
  };
  EXPECT_TRUE(eq(step(p, ws(10, 10), geom(), dt(0.01)), same_direction_step(p, ws(10, 10), geom(), dt(0.01))));
  EXPECT_TRUE(eq(step(p, ws(10, -10), geom(), dt(0.01)), opposite_step(p, ws(10, -10), geom(), dt(0.01))));
  EXPECT_TRUE(eq(step(p, ws(0, 0), geom(), dt(0.01)), p));
}

TEST(Kinematics, WheelSpeedsClampToLimit) {
  const WheelSpeeds s(100, -100, 62.0);
  EXPECT_EQ(s.left(), 62.0);
  EXPECT_EQ(s.right(), -62.0);
  EXPECT_NEAR(rpm_to_rad_per_s(600), 20 * kPi, 1e-12);
}

TEST(Kinematics, ExactUnicycleProperties) {
  const Pose p{0.2, -0.1, 0.4};
  for (double ts : {1e-3, 0.01, 0.1}) {
    const Pose a = exact_unicycle_step(p, ws(9, 9), geom(), dt(ts));
    const Pose b = same_direction_step(p, ws(9, 9), geom(), dt(ts));
    EXPECT_NEAR(a.x, b.x, 1e-15);
    EXPECT_NEAR(a.y, b.y, 1e-15);
  }
  const Pose spin = exact_unicycle_step(p, ws(-8, 8), geom(), dt(0.01));
  EXPECT_NEAR(spin.x, p.x, 1e-15);
  EXPECT_NEAR(spin.y, p.y, 1e-15);
  EXPECT_NEAR(spin.delta, p.delta + 0.025 * 16 / 0.2 * 0.01, 1e-15);

  const Pose one = exact_unicycle_step(p, ws(3, 17), geom(), dt(0.02));
  const Pose two = exact_unicycle_step(exact_unicycle_step(p, ws(3, 17), geom(), dt(0.01)),
                                       ws(3, 17), geom(), dt(0.01));
  EXPECT_NEAR(one.x, two.x, 1e-12);
  EXPECT_NEAR(one.y, two.y, 1e-12);
  EXPECT_NEAR(one.delta, two.delta, 1e-12);
  const Pose icc = icc_oracle(p, 3, 17, geom(), 0.02);
  EXPECT_NEAR(one.x, icc.x, 1e-12);
  EXPECT_NEAR(one.y, icc.y, 1e-12);
}

TEST(Kinematics, StraightMotionIsAlongHeading) {
  const Pose p{1, 2, 2.2};
  const Pose q = step(p, ws(-6, -6), geom(), dt(0.01));
  const double dx = q.x - p.x, dy = q.y - p.y;
  EXPECT_NEAR(dx * std::cos(p.delta) + dy * std::sin(p.delta), 0.0, 1e-15);  // no sideways part
  EXPECT_LT(-dx * std::sin(p.delta) + dy * std::cos(p.delta), 0.0);           // backwards
  EXPECT_EQ(q.delta, p.delta);
}

TEST(Kinematics, HeadingStaysNormalized) {
  EXPECT_DOUBLE_EQ(normalize_angle(-kPi), kPi);
  EXPECT_DOUBLE_EQ(normalize_angle(3 * kPi), kPi);
  Pose p{0, 0, 3.1};
  for (int i = 0; i < 5000; ++i) {
    p = step(p, ws(-30, 40), geom(), dt(0.01));
    ASSERT_GT(p.delta, -kPi);
    ASSERT_LE(p.delta, kPi);
  }
}

TEST(Kinematics, ConvergesAtSecondOrder) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double wmax = geom().max_wheel_speed;
  std::vector<double> errs;
  for (double ts : {4e-3, 2e-3, 1e-3, 5e-4}) {
    std::mt19937_64 g = gen;
    double total = 0.0;
    for (int i = 0; i < 300; ++i) {
      const Pose p{u(g), u(g), kPi * u(g)};
      const double l = wmax * u(g), r = wmax * u(g);
      total += gap(step(p, ws(l, r), geom(), dt(ts)), icc_oracle(p, l, r, geom(), ts));
    }
    errs.push_back(total);
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    EXPECT_GT(errs[i - 1] / errs[i], 3.5);
    EXPECT_LT(errs[i - 1] / errs[i], 4.5);
  }
}

TEST(Kinematics, MirrorSymmetry) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double wm = geom().max_wheel_speed;
  for (int i = 0; i < 2000; ++i) {
    const Pose p{u(gen), u(gen), kPi * u(gen)};
    const double l = wm * u(gen), r = wm * u(gen);
    const Pose a = step(p, ws(l, r), geom(), dt(0.01));
    const Pose b = step(Pose{-p.x, p.y, normalize_angle(-p.delta)}, ws(r, l), geom(), dt(0.01));
    EXPECT_NEAR(a.x, -b.x, 1e-12);
    EXPECT_NEAR(a.y, b.y, 1e-12);
    EXPECT_NEAR(std::abs(normalize_angle(a.delta + b.delta)), 0.0, 1e-12);
  }
}
