#include "lfrl/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfrl {

SensorArray SensorArray::for_robot(const RobotGeometry& geom, std::size_t count) {
  return SensorArray{count, geom.track_width, geom.length / 2.0};
}

void SensorArray::validate() const {
  if (count < 3) throw std::invalid_argument("sensor array: need at least 3 sensors");
  if (!(span > 0.0)) throw std::invalid_argument("sensor array: span must be positive");
  if (!(forward_offset > 0.0)) {
    throw std::invalid_argument("sensor array: forward_offset must be positive");
  }
}

double SensorArray::lateral(std::size_t i) const {
  return -span / 2.0 + span * static_cast<double>(i) / static_cast<double>(count - 1);
}

Point2 SensorArray::world_position(std::size_t i, const Pose& pose) const {
  const auto [dx, dy] = origin_transfer(lateral(i), forward_offset, pose.delta);
  return {pose.x + dx, pose.y + dy};
}

double SensorArray::max_error() const { return std::atan((span / 2.0) / forward_offset); }

namespace {

Side centroid_side(const SensorReading& reading, const SensorArray& array) {
  // A line seen within half a sensor pitch of the midpoint has no side.
  const double c = active_centroid(reading, array);
  const double deadband = array.span / static_cast<double>(array.count - 1) / 2.0;
  if (c < -deadband) return Side::left;
  if (c > deadband) return Side::right;
  return Side::none;
}

}  // namespace

SensorReading sense(const Pose& pose, const Track& track, const SensorArray& array,
                    const SensorReading& previous) {
  SensorReading reading;
  for (std::size_t i = 0; i < array.count; ++i) {
    if (track.covers(array.world_position(i, pose))) reading.active.push_back(i);
  }
  if (reading.active.empty()) {
    reading.lost_side =
        previous.line_visible() ? centroid_side(previous, array) : previous.lost_side;
  }
  return reading;
}

double active_centroid(const SensorReading& reading, const SensorArray& array) {
  if (reading.active.empty()) return 0.0;
  // Mean index first: symmetric sets land exactly on the row midpoint.
  double sum = 0.0;
  for (std::size_t i : reading.active) sum += static_cast<double>(i);
  const double mean_index = sum / static_cast<double>(reading.active.size());
  const double mid = static_cast<double>(array.count - 1) / 2.0;
  return (mean_index - mid) * array.span / static_cast<double>(array.count - 1);
}

ErrorAngle error_angle(const SensorReading& reading, const SensorArray& array) {
  if (reading.line_visible()) {
    return {std::atan(-active_centroid(reading, array) / array.forward_offset)};
  }
  switch (reading.lost_side) {
    case Side::left:
      return {array.max_error()};
    case Side::right:
      return {-array.max_error()};
    case Side::none:
      break;
  }
  return {0.0};
}

double reward(ErrorAngle previous, ErrorAngle current, const WheelSpeeds& speeds,
              const RobotGeometry& geom, const StepConfig& cfg) {
  const double correction = std::abs(previous.e) - std::abs(current.e);
  const double speed = (speeds.left() + speeds.right()) / (2.0 * geom.max_wheel_speed);
  return correction + speed - cfg.sampling_period * std::abs(current.e);
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::running:
      return "running";
    case Outcome::completed:
      return "completed";
    case Outcome::lost_track:
      return "lost_track";
    case Outcome::wrong_direction:
      return "wrong_direction";
    case Outcome::step_limit:
      return "step_limit";
  }
  return "unknown";
}

Outcome outcome_from_string(std::string_view text) {
  for (Outcome o : {Outcome::running, Outcome::completed, Outcome::lost_track,
                    Outcome::wrong_direction, Outcome::step_limit}) {
    if (to_string(o) == text) return o;
  }
  throw std::invalid_argument("unknown outcome '" + std::string(text) + "'");
}

namespace {

double wrap_arc(double s, const Track& track) {
  if (!track.closed()) return std::clamp(s, 0.0, track.length());
  const double m = std::fmod(s, track.length());
  return m < 0.0 ? m + track.length() : m;
}

}  // namespace

EpisodeStatus start_status(const Pose& pose, const Track& track, const TerminationLimits& limits) {
  EpisodeStatus status;
  const TrackProjection p = track.project({pose.x, pose.y}, 0.0, limits.projection_window);
  double s = p.arc_length;
  if (track.closed() && s > track.length() / 2.0) s -= track.length();
  status.progress = s;
  status.max_progress = std::max(0.0, s);
  return status;
}

EpisodeStatus update_progress(const EpisodeStatus& status, const Pose& pose, const Track& track,
                              const SensorReading& reading, const StepConfig& cfg,
                              const TerminationLimits& limits) {
  EpisodeStatus next = status;
  if (status.outcome != Outcome::running) return next;

  next.steps = status.steps + 1;
  next.elapsed = static_cast<double>(next.steps) * cfg.sampling_period;

  const double hint = wrap_arc(status.progress, track);
  const TrackProjection p = track.project({pose.x, pose.y}, hint, limits.projection_window);
  double delta = p.arc_length - hint;
  if (track.closed()) delta = std::remainder(delta, track.length());
  next.progress = status.progress + delta;
  next.max_progress = std::max(status.max_progress, next.progress);

  const auto marks = track.segment_marks();
  std::size_t done = status.segments_done;
  while (done < marks.size() && next.max_progress + 1e-9 >= marks[done]) ++done;
  next.segments_done = done;

  next.lost_run = reading.line_visible() ? 0 : status.lost_run + 1;
  next.reverse_run = delta < 0.0 ? status.reverse_run + 1 : 0;

  if (done == marks.size()) {
    next.outcome = Outcome::completed;
  } else if (next.lost_run >= limits.lost_steps) {
    next.outcome = Outcome::lost_track;
  } else if (next.reverse_run >= limits.reverse_steps) {
    next.outcome = Outcome::wrong_direction;
  } else if (next.steps >= limits.max_steps) {
    next.outcome = Outcome::step_limit;
  }
  return next;
}

double score(std::size_t segments, double elapsed) {
  if (segments == 0) return 0.0;
  const double n = static_cast<double>(segments);
  return 10.0 * n - elapsed / n;
}

double score(const EpisodeStatus& status) { return score(status.segments_done, status.elapsed); }

}  // namespace lfrl
