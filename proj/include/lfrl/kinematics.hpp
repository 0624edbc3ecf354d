#pragma once

#include <numbers>
#include <utility>

namespace lfrl {

// Physical constants of the two-wheel robot.
//
// Robot frame: +y is forward (heading), +x is to the robot's right. The
// heading delta is the angle between the forward axis and world +y,
// counter-clockwise positive, so forward is (-sin delta, cos delta).
struct RobotGeometry {
  double track_width = 0.20;     // a: lateral distance between wheel contacts (m)
  double length = 0.25;          // b: body length (m)
  double wheel_radius = 0.025;   // r (m)
  double max_wheel_speed = 20.0 * std::numbers::pi;  // w_max (rad/s), 600 RPM
  // Longitudinal distance from the wheel axle to the center of mass (m).
  // Zero places the center of mass on the axle, which is the geometry the
  // in-place turn assumes. length / 2 puts it at the body center.
  double axle_offset = 0.0;

  // Throws std::invalid_argument on non-positive dimensions.
  void validate() const;

  // c: distance from a wheel contact point to the center of mass.
  double pivot_distance() const;
  // gamma: angle at the wheel contact between the axle and the center of mass.
  double pivot_angle() const;
};

double rpm_to_rad_per_s(double rpm);

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double delta = 0.0;  // normalized to (-pi, pi]
};

// Maps any angle into (-pi, pi].
double normalize_angle(double angle);

// Signed wheel angular speeds (rad/s), clamped to the robot's limit.
class WheelSpeeds {
 public:
  WheelSpeeds() = default;
  WheelSpeeds(double left, double right, double limit);

  double left() const { return left_; }
  double right() const { return right_; }

 private:
  double left_ = 0.0;
  double right_ = 0.0;
};

struct StepConfig {
  double sampling_period = 0.01;  // T_s (s)

  void validate() const;
};

// Intermediate quantities of one discrete step. Forward fields are filled by
// forward_component, rotation fields by rotation_about_wheel.
struct MotionDecomposition {
  // straight part
  double w_forward = 0.0;       // common wheel speed (rad/s)
  double v_forward = 0.0;       // linear speed (m/s)
  double x_forward = 0.0;       // world-frame displacement (m)
  double y_forward = 0.0;
  // rotation about the slower wheel
  double w_rotation = 0.0;      // residual speed of the faster wheel (rad/s, >= 0)
  double alpha = 0.0;           // signed rotation angle, CCW positive (rad)
  double sigma = 0.0;           // gamma + |alpha|
  double pivot_to_center = 0.0; // G (m)
  double x_rot_body = 0.0;      // robot-frame displacement (m)
  double y_rot_body = 0.0;
  double x_rot = 0.0;           // world-frame displacement (m)
  double y_rot = 0.0;
  // in-place turn (opposite wheel directions only)
  double w_turn = 0.0;
  double alpha_turn = 0.0;
};

// Rotates a robot-frame displacement by delta into the world frame.
std::pair<double, double> origin_transfer(double dx, double dy, double delta);

// Straight movement shared by both wheels. Rejects opposite-signed speeds.
MotionDecomposition forward_component(const WheelSpeeds& speeds, const Pose& pose,
                                      const RobotGeometry& geom, const StepConfig& cfg);

// Rotation of the robot about the contact point of the slower wheel, driven by
// the faster wheel's excess speed. Defined for any speed pair: for opposite
// signs the excess equals |w_l + w_r| and the pivot is the wheel with the
// smaller magnitude.
MotionDecomposition rotation_about_wheel(const WheelSpeeds& speeds, const Pose& pose,
                                         const RobotGeometry& geom, const StepConfig& cfg);

// Both wheels turning the same way (or one stopped).
Pose same_direction_step(const Pose& pose, const WheelSpeeds& speeds,
                         const RobotGeometry& geom, const StepConfig& cfg);

// Wheels turning in opposite directions: in-place turn plus residual rotation.
Pose opposite_step(const Pose& pose, const WheelSpeeds& speeds,
                   const RobotGeometry& geom, const StepConfig& cfg);

// Total step function: dispatches on the sign pattern of the wheel speeds.
Pose step(const Pose& pose, const WheelSpeeds& speeds, const RobotGeometry& geom,
          const StepConfig& cfg);

// Closed-form differential-drive integration about the instantaneous center of
// curvature. Reference for validating the discrete model; not used in
// simulation.
Pose exact_unicycle_step(const Pose& pose, const WheelSpeeds& speeds,
                         const RobotGeometry& geom, const StepConfig& cfg);

}  // namespace lfrl
