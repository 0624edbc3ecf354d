#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lfrl/environment.hpp"

using namespace lfrl;

namespace {

// Straight line along +y through the origin, robot heading +y.
Track straight() { return Track({{0, -2}, {0, 2}}, 0.02, false); }

SensorArray bar() { return SensorArray::for_robot(RobotGeometry{}); }

// Brute-force sensing oracle: each sensor position from first principles,
// distance to every span of the polyline.
std::vector<std::size_t> oracle_active(const Pose& pose, const Track& track, const SensorArray& a) {
  std::vector<std::size_t> out;
  const auto pts = track.points();
  for (std::size_t i = 0; i < a.count; ++i) {
    const double lx = -a.span / 2 + a.span * i / (a.count - 1);
    const double ly = a.forward_offset;
    const double c = std::cos(pose.delta), s = std::sin(pose.delta);
    const double px = pose.x + lx * c - ly * s, py = pose.y + lx * s + ly * c;
    double best = 1e9;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const double ux = pts[k + 1].x - pts[k].x, uy = pts[k + 1].y - pts[k].y;
      double t = ((px - pts[k].x) * ux + (py - pts[k].y) * uy) / (ux * ux + uy * uy);
      t = std::clamp(t, 0.0, 1.0);
      best = std::min(best, std::hypot(px - pts[k].x - t * ux, py - pts[k].y - t * uy));
    }
    if (best <= track.line_width() / 2) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST(Environment, SensorGeometryFollowsRobot) {
  const SensorArray a = bar();
  EXPECT_EQ(a.count, 32u);
  EXPECT_DOUBLE_EQ(a.span, 0.2);
  EXPECT_DOUBLE_EQ(a.forward_offset, 0.125);
  EXPECT_DOUBLE_EQ(a.lateral(0), -0.1);
  EXPECT_DOUBLE_EQ(a.lateral(31), 0.1);
  EXPECT_NEAR(a.max_error(), std::atan(0.1 / 0.125), 1e-15);
  EXPECT_NEAR(a.max_error(), 0.6747, 1e-4);
}

TEST(Environment, CentredRobotSeesMiddleSensors) {
  const SensorReading r = sense(Pose{}, straight(), bar());
  // pitch 0.2 / 31 puts sensors 14..17 within the 10 mm half width
  EXPECT_EQ(r.active, (std::vector<std::size_t>{14, 15, 16, 17}));
  EXPECT_EQ(r.lost_side, Side::none);
  EXPECT_EQ(error_angle(r, bar()).e, 0.0);
}

TEST(Environment, SensingMatchesBruteForce) {
  const Track t = straight();
  EXPECT_EQ(sense(Pose{0.05, 0, 0}, t, bar()).active, oracle_active(Pose{0.05, 0, 0}, t, bar()));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const Track oval = bundled_track("oval_simple");
  for (int i = 0; i < 500; ++i) {
    const Pose p{1.5 * u(gen), 0.5 + 0.6 * u(gen), 3.14 * u(gen)};
    ASSERT_EQ(sense(p, oval, bar()).active, oracle_active(p, oval, bar()));
  }
}

TEST(Environment, LostSideRemembersLastContact) {
  const Track t = straight();
  // robot to the right of the line: line seen on the left of the bar
  const SensorReading seen = sense(Pose{0.08, 0, 0}, t, bar());
  ASSERT_TRUE(seen.line_visible());
  EXPECT_GT(error_angle(seen, bar()).e, 0.0);
  const SensorReading lost = sense(Pose{0.2, 0, 0}, t, bar(), seen);
  EXPECT_FALSE(lost.line_visible());
  EXPECT_EQ(lost.lost_side, Side::left);
  EXPECT_DOUBLE_EQ(error_angle(lost, bar()).e, bar().max_error());
  const SensorReading still = sense(Pose{0.3, 0, 0}, t, bar(), lost);
  EXPECT_EQ(still.lost_side, Side::left);

  SensorReading right_lost;
  right_lost.lost_side = Side::right;
  EXPECT_DOUBLE_EQ(error_angle(right_lost, bar()).e, -bar().max_error());
  // a line lost from the middle of the bar has no side
  const SensorReading centred = sense(Pose{}, t, bar());
  EXPECT_EQ(sense(Pose{0.5, 0, 0}, t, bar(), centred).lost_side, Side::none);
}

TEST(Environment, ErrorAtEdgeSensor) {
  SensorReading r;
  r.active = {0};
  EXPECT_NEAR(error_angle(r, bar()).e, std::atan(0.1 / 0.125), 1e-15);
}

TEST(Environment, ErrorIsOddInLateralOffset) {
  const Track t = straight();
  for (double off : {0.01, 0.03, 0.06, 0.09}) {
    const double left = error_angle(sense(Pose{-off, 0, 0}, t, bar()), bar()).e;
    const double right = error_angle(sense(Pose{off, 0, 0}, t, bar()), bar()).e;
    EXPECT_DOUBLE_EQ(left, -right) << off;
  }
}

TEST(Environment, SensingIsEquivariant) {
  const Track t = bundled_track("complex_01");
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-1, 1);
  const double angle = 0.9;
  const Point2 shift{2.0, -1.0};
  const Track moved = t.transformed(angle, shift);
  for (int i = 0; i < 200; ++i) {
    const Point2 on = t.point_at((u(gen) + 1) / 2 * t.length());
    const Pose p{on.x + 0.05 * u(gen), on.y + 0.05 * u(gen), 3.0 * u(gen)};
    const auto [dx, dy] = origin_transfer(p.x, p.y, angle);
    const Pose q{dx + shift.x, dy + shift.y, p.delta + angle};
    const auto a = sense(p, t, bar()).active;
    const auto b = sense(q, moved, bar()).active;
    for (std::size_t k = 0; k < bar().count; ++k) {
      const bool in_a = std::find(a.begin(), a.end(), k) != a.end();
      const bool in_b = std::find(b.begin(), b.end(), k) != b.end();
      // rounding may only flip a sensor sitting on the tape edge
      if (in_a != in_b) {
        EXPECT_NEAR(t.distance_to(bar().world_position(k, p)), t.line_width() / 2, 1e-9);
      }
    }
  }
}

TEST(Environment, RewardExamples) {
  const RobotGeometry g;
  const StepConfig c;
  const double w = g.max_wheel_speed;
  EXPECT_NEAR(reward({0.2}, {0.1}, WheelSpeeds(w, w, w), g, c), 1.099, 1e-12);
  EXPECT_NEAR(reward({-0.2}, {0.1}, WheelSpeeds(w, w, w), g, c), 1.099, 1e-12);
  EXPECT_EQ(reward({0}, {0}, WheelSpeeds(0, 0, w), g, c), 0.0);
  EXPECT_NEAR(reward({0}, {0}, WheelSpeeds(-w, -w, w), g, c), -1.0, 1e-12);
}

TEST(Environment, ScoreExamples) {
  EXPECT_NEAR(score(8, 20.0), 77.5, 1e-12);
  EXPECT_NEAR(score(10, 25.0), 97.5, 1e-12);
  EXPECT_EQ(score(0, 12.0), 0.0);
  EXPECT_LT(score(5, 11.0), score(5, 10.0));
  EXPECT_GT(score(6, 10.0), score(5, 10.0));
}

TEST(Environment, OutcomeNames) {
  for (Outcome o : {Outcome::running, Outcome::completed, Outcome::lost_track,
                    Outcome::wrong_direction, Outcome::step_limit}) {
    EXPECT_EQ(outcome_from_string(to_string(o)), o);
  }
  EXPECT_THROW(outcome_from_string("done"), std::invalid_argument);
}

namespace {

struct Drive {
  Track track = straight();
  StepConfig cfg;
  TerminationLimits limits;
  EpisodeStatus status;
  SensorReading reading;
  Drive(Track t) : track(std::move(t)) {}
  void to(const Pose& p) {
    reading = sense(p, track, bar(), reading);
    status = update_progress(status, p, track, reading, cfg, limits);
  }
};

// Pose at arc length s with the sensor bar centred on the line ahead.
Pose on_line(const Track& track, double s) {
  const double len = track.length();
  const Point2 p = track.point_at(std::fmod(s + len, len));
  const Point2 q = track.point_at(std::fmod(s + bar().forward_offset + len, len));
  return Pose{p.x, p.y, std::atan2(-(q.x - p.x), q.y - p.y)};
}

}  // namespace

TEST(Environment, CompletesAtFinalMark) {
  Drive d(Track({{0, 0}, {0, 1}, {0, 2}}, 0.02, false));
  d.status = start_status(Pose{}, d.track, d.limits);
  for (int i = 1; i <= 100 && d.status.outcome == Outcome::running; ++i) d.to(Pose{0, 0.021 * i, 0});
  EXPECT_EQ(d.status.outcome, Outcome::completed);
  EXPECT_EQ(d.status.segments_done, 2u);
  EXPECT_DOUBLE_EQ(d.status.elapsed, d.status.steps * 0.01);
}

TEST(Environment, LostAfterThreshold) {
  Drive d(straight());
  d.status = start_status(Pose{0, -1.9, 0}, d.track, d.limits);
  for (int i = 0; i < 49; ++i) d.to(Pose{1.0, -1.9, 0});
  EXPECT_EQ(d.status.outcome, Outcome::running);
  d.to(Pose{1.0, -1.9, 0});
  EXPECT_EQ(d.status.outcome, Outcome::lost_track);
  EXPECT_EQ(d.status.steps, 50u);
}

TEST(Environment, WrongDirectionAfterThreshold) {
  Drive d(straight());
  d.status = start_status(Pose{0, 1.5, 0}, d.track, d.limits);
  for (int i = 1; i <= 99; ++i) d.to(Pose{0, 1.5 - 0.001 * i, 0});
  EXPECT_EQ(d.status.outcome, Outcome::running);
  d.to(Pose{0, 1.5 - 0.1, 0});
  EXPECT_EQ(d.status.outcome, Outcome::wrong_direction);
}

TEST(Environment, StepCapAndMonotoneSegments) {
  Drive d(bundled_track("oval_simple"));
  d.limits.max_steps = 300;
  d.status = start_status(on_line(d.track, 0.0), d.track, d.limits);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-0.02, 0.05);
  double s = 0.0;
  std::size_t last = 0;
  while (d.status.outcome == Outcome::running) {
    s += u(gen);
    d.to(on_line(d.track, s));
    ASSERT_GE(d.status.segments_done, last);
    last = d.status.segments_done;
  }
  EXPECT_EQ(d.status.outcome, Outcome::step_limit);
  EXPECT_EQ(d.status.steps, 300u);
}

TEST(Environment, ClosedTrackCountsAcrossTheSeam) {
  Drive d(bundled_track("oval_simple"));
  d.status = start_status(on_line(d.track, 0.0), d.track, d.limits);
  for (int i = 1; d.status.outcome == Outcome::running && i < 10000; ++i) d.to(on_line(d.track, 0.01 * i));
  EXPECT_EQ(d.status.outcome, Outcome::completed);
  EXPECT_EQ(d.status.segments_done, 8u);
}
