#include "lfrl/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace lfrl {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

bool opposite_signs(const WheelSpeeds& s) { return sign(s.left()) * sign(s.right()) < 0.0; }

}  // namespace

void RobotGeometry::validate() const {
  if (!(track_width > 0.0) || !(length > 0.0) || !(wheel_radius > 0.0) ||
      !(max_wheel_speed > 0.0)) {
    throw std::invalid_argument("robot geometry: a, b, r and w_max must be positive");
  }
  if (!(axle_offset >= 0.0)) {
    throw std::invalid_argument("robot geometry: axle_offset must be non-negative");
  }
}

double RobotGeometry::pivot_distance() const {
  return std::hypot(track_width / 2.0, axle_offset);
}

double RobotGeometry::pivot_angle() const { return std::atan2(2.0 * axle_offset, track_width); }

double rpm_to_rad_per_s(double rpm) { return rpm * 2.0 * std::numbers::pi / 60.0; }

double normalize_angle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

WheelSpeeds::WheelSpeeds(double left, double right, double limit)
    : left_(std::clamp(left, -limit, limit)), right_(std::clamp(right, -limit, limit)) {}

void StepConfig::validate() const {
  if (!(sampling_period > 0.0)) {
    throw std::invalid_argument("step config: sampling period must be positive");
  }
}

std::pair<double, double> origin_transfer(double dx, double dy, double delta) {
  const double c = std::cos(delta);
  const double s = std::sin(delta);
  return {dx * c - dy * s, dx * s + dy * c};
}

MotionDecomposition forward_component(const WheelSpeeds& speeds, const Pose& pose,
                                      const RobotGeometry& geom, const StepConfig& cfg) {
  if (opposite_signs(speeds)) {
    throw std::invalid_argument("forward_component: wheel speeds have opposite signs");
  }
  MotionDecomposition m;
  m.w_forward = sign(speeds.left()) * std::min(std::abs(speeds.left()), std::abs(speeds.right()));
  m.v_forward = m.w_forward * geom.wheel_radius;
  m.x_forward = -std::sin(pose.delta) * m.v_forward * cfg.sampling_period;
  m.y_forward = std::cos(pose.delta) * m.v_forward * cfg.sampling_period;
  return m;
}

MotionDecomposition rotation_about_wheel(const WheelSpeeds& speeds, const Pose& pose,
                                         const RobotGeometry& geom, const StepConfig& cfg) {
  MotionDecomposition m;
  const double gamma = geom.pivot_angle();
  const double l = std::abs(speeds.left());
  const double r = std::abs(speeds.right());
  m.w_rotation = std::max(l, r) - std::min(l, r);
  m.sigma = gamma;
  m.pivot_to_center = geom.axle_offset;
  if (m.w_rotation == 0.0) return m;

  // Canonical case: right wheel drives forward around the stopped left wheel.
  const double a = geom.track_width;
  const double c = geom.pivot_distance();
  const double angle = m.w_rotation * (geom.wheel_radius / a) * cfg.sampling_period;
  m.sigma = gamma + angle;
  m.pivot_to_center =
      std::sqrt(std::max(0.0, (a / 2.0) * (a / 2.0) + c * c - a * c * std::cos(m.sigma)));
  double xb = -m.pivot_to_center * std::sin(angle);
  double yb = m.pivot_to_center * std::cos(angle) - geom.axle_offset;
  double alpha = angle;

  const bool right_moves = r > l;
  if (!right_moves) {
    // pivot on the right wheel: mirror through the robot's long axis
    xb = -xb;
    alpha = -alpha;
  }
  const double faster = right_moves ? speeds.right() : speeds.left();
  if (faster < 0.0) {
    // driving the faster wheel backwards undoes the forward rotation
    const auto [ux, uy] = origin_transfer(xb, yb, -alpha);
    xb = -ux;
    yb = -uy;
    alpha = -alpha;
  }

  m.alpha = alpha;
  m.x_rot_body = xb;
  m.y_rot_body = yb;
  std::tie(m.x_rot, m.y_rot) = origin_transfer(xb, yb, pose.delta);
  return m;
}

Pose same_direction_step(const Pose& pose, const WheelSpeeds& speeds, const RobotGeometry& geom,
                         const StepConfig& cfg) {
  if (opposite_signs(speeds)) {
    throw std::invalid_argument("same_direction_step: wheel speeds have opposite signs");
  }
  const MotionDecomposition fwd = forward_component(speeds, pose, geom, cfg);
  const MotionDecomposition rot = rotation_about_wheel(speeds, pose, geom, cfg);
  return Pose{fwd.x_forward + rot.x_rot + pose.x, fwd.y_forward + rot.y_rot + pose.y,
              normalize_angle(pose.delta + rot.alpha)};
}

Pose opposite_step(const Pose& pose, const WheelSpeeds& speeds, const RobotGeometry& geom,
                   const StepConfig& cfg) {
  if (!opposite_signs(speeds)) {
    throw std::invalid_argument("opposite_step: wheel speeds must have opposite signs");
  }
  const MotionDecomposition rot = rotation_about_wheel(speeds, pose, geom, cfg);
  // The in-place part spins both wheels at the smaller magnitude; the right
  // wheel's sign gives the turn direction.
  const double w_turn =
      sign(speeds.right()) * std::min(std::abs(speeds.left()), std::abs(speeds.right()));
  const double alpha_turn = (2.0 * geom.wheel_radius / geom.track_width) * w_turn * cfg.sampling_period;
  return Pose{rot.x_rot + pose.x, rot.y_rot + pose.y,
              normalize_angle(rot.alpha + alpha_turn + pose.delta)};
}

Pose step(const Pose& pose, const WheelSpeeds& speeds, const RobotGeometry& geom,
          const StepConfig& cfg) {
  return opposite_signs(speeds) ? opposite_step(pose, speeds, geom, cfg)
                                : same_direction_step(pose, speeds, geom, cfg);
}

Pose exact_unicycle_step(const Pose& pose, const WheelSpeeds& speeds, const RobotGeometry& geom,
                         const StepConfig& cfg) {
  const double r = geom.wheel_radius;
  const double v = r * (speeds.left() + speeds.right()) / 2.0;
  const double omega = r * (speeds.right() - speeds.left()) / geom.track_width;
  const double dt = cfg.sampling_period;
  const double theta = omega * dt;

  double xb = 0.0;
  double yb = v * dt;
  if (theta != 0.0) {
    // chord of the arc about the ICC, in forms that stay accurate for small theta
    const double half = std::sin(theta / 2.0);
    xb = -v * dt * (2.0 * half * half / theta);
    yb = v * dt * (std::sin(theta) / theta);
  }
  const auto [dx, dy] = origin_transfer(xb, yb, pose.delta);
  return Pose{pose.x + dx, pose.y + dy, normalize_angle(pose.delta + theta)};
}

}  // namespace lfrl
