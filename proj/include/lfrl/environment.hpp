#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lfrl/kinematics.hpp"
#include "lfrl/track.hpp"

namespace lfrl {

// A straight row of evenly spaced line sensors ahead of the center of mass.
// Index 0 is the robot's leftmost sensor.
struct SensorArray {
  std::size_t count = 32;
  double span = 0.20;            // lateral extent, outermost sensor to outermost (m)
  double forward_offset = 0.125; // center of mass to the sensor row (m)

  // Bar as wide as the wheel track, mounted at the front edge.
  static SensorArray for_robot(const RobotGeometry& geom, std::size_t count = 32);

  void validate() const;
  // Lateral offset of sensor i, robot frame (+ is right).
  double lateral(std::size_t i) const;
  Point2 world_position(std::size_t i, const Pose& pose) const;
  // Saturation angle used while the line is lost.
  double max_error() const;
};

enum class Side { none, left, right };

struct SensorReading {
  std::vector<std::size_t> active;  // ascending
  Side lost_side = Side::none;      // last side the line was seen on; none while seen

  bool line_visible() const { return !active.empty(); }
};

// Active sensors for the pose. When nothing is active the side memory is
// taken from `previous`: its centroid side if it saw the line, else its own
// memory.
SensorReading sense(const Pose& pose, const Track& track, const SensorArray& array,
                    const SensorReading& previous = {});

// Signed angle between the sensed line and the robot's axis, seen from the
// center of mass; positive when the line is to the left.
struct ErrorAngle {
  double e = 0.0;
};

// Mean lateral position of the active sensors (robot frame, + right).
double active_centroid(const SensorReading& reading, const SensorArray& array);

// Lost line saturates at +/- max_error with the sign of the remembered side;
// with no memory the error is 0.
ErrorAngle error_angle(const SensorReading& reading, const SensorArray& array);

// Per-step reward: correction of |e|, plus mean wheel speed as a fraction of
// w_max, minus T_s * |e|.
double reward(ErrorAngle previous, ErrorAngle current, const WheelSpeeds& speeds,
              const RobotGeometry& geom, const StepConfig& cfg);

enum class Outcome { running, completed, lost_track, wrong_direction, step_limit };

std::string_view to_string(Outcome outcome);
Outcome outcome_from_string(std::string_view text);

struct TerminationLimits {
  std::size_t lost_steps = 50;     // consecutive readings without the line
  std::size_t reverse_steps = 100; // consecutive steps of negative progress
  std::size_t max_steps = 20000;   // step cap
  double projection_window = 0.25; // arc-length search window for progress (m)
};

struct EpisodeStatus {
  Outcome outcome = Outcome::running;
  std::size_t segments_done = 0;
  std::size_t steps = 0;
  double elapsed = 0.0;      // steps * T_s
  double progress = 0.0;     // unwrapped arc length of the center of mass (m)
  double max_progress = 0.0;
  std::size_t lost_run = 0;
  std::size_t reverse_run = 0;
};

// Status at the start pose, with the initial progress projection.
EpisodeStatus start_status(const Pose& pose, const Track& track, const TerminationLimits& limits);

// Advances one step: projects the pose onto the course, counts crossed
// segment marks and applies the termination rules in order completed,
// lost_track, wrong_direction, step_limit.
EpisodeStatus update_progress(const EpisodeStatus& status, const Pose& pose, const Track& track,
                              const SensorReading& reading, const StepConfig& cfg,
                              const TerminationLimits& limits);

// 10 n - t_rec / n, or 0 when no segment was completed.
double score(const EpisodeStatus& status);
double score(std::size_t segments, double elapsed);

// Multiplicative uniform actuation noise on the wheel speeds; amplitude 0
// turns it off.
struct ActuationNoise {
  double amplitude = 0.0;
};

}  // namespace lfrl
