#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lfrl/kinematics.hpp"

namespace lfrl {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(Point2 p, Point2 q);

// Closest point on a polyline location, parameterized by arc length.
struct TrackProjection {
  double arc_length = 0.0;
  double distance = 0.0;
  Point2 point;
};

// A line course: a polyline of waypoints with a painted width.
//
// Segment marks are the arc lengths at which each countable segment ends, so
// the last mark is the total length. Without explicit marks every span
// between consecutive waypoints is one segment.
class Track {
 public:
  Track(std::vector<Point2> points, double line_width, bool closed,
        std::vector<double> segment_marks = {});

  std::span<const Point2> points() const { return points_; }
  double line_width() const { return line_width_; }
  bool closed() const { return closed_; }
  double length() const { return cumulative_.back(); }
  std::span<const double> segment_marks() const { return marks_; }
  std::size_t segment_count() const { return marks_.size(); }

  Point2 start() const { return points_.front(); }
  // Heading (robot convention) that faces along the first span.
  double start_heading() const;

  Point2 point_at(double arc_length) const;

  // Distance from p to the nearest point of the polyline.
  double distance_to(Point2 p) const;

  // True when p lies on the painted line (within line_width / 2 of the
  // polyline). Grid lookup only; this is the sensing hot path.
  bool covers(Point2 p) const;

  // Nearest point whose arc length lies within `window` of `hint` (wrapping
  // on closed tracks). Used for progress tracking, where a global nearest
  // point could jump across the course.
  TrackProjection project(Point2 p, double hint, double window) const;

  // Same course driven the other way; identical length and segment
  // boundaries mirrored along the arc.
  Track reversed() const;

  // Rigid transform of every waypoint (rotation by `angle` about the origin,
  // then translation).
  Track transformed(double angle, Point2 offset) const;

 private:
  struct Grid;

  double span_distance(std::size_t i, Point2 p, double* t = nullptr) const;

  std::vector<Point2> points_;
  std::vector<double> cumulative_;
  std::vector<double> marks_;
  double line_width_;
  bool closed_;
  std::shared_ptr<const Grid> grid_;
};

// Draws the course or its reversed twin with probability 1/2.
Track randomize_direction(const Track& track, std::uint64_t seed);

// JSON track files: {"points": [[x, y], ...], "line_width": w, "closed": b,
// "segment_marks": [...]} with segment_marks optional.
Track load_track(const std::filesystem::path& path);
Track parse_track_json(const std::string& text);
std::string track_to_json(const Track& track);

// Names of the tracks compiled into the library.
std::vector<std::string> bundled_track_names();
// Builds a bundled track by name. Throws std::invalid_argument if unknown.
Track bundled_track(const std::string& name);
// A bundled track name, or else a path to a JSON track file.
Track resolve_track(const std::string& name_or_path);

}  // namespace lfrl
