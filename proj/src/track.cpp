#include "lfrl/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lfrl/rng.hpp"

namespace lfrl {

double distance(Point2 p, Point2 q) { return std::hypot(p.x - q.x, p.y - q.y); }

// Uniform bucket grid over the track's bounding box. Each cell lists the spans
// whose painted band (span inflated by half the line width) touches it.
struct Track::Grid {
  double cell = 0.05;
  double x0 = 0.0;
  double y0 = 0.0;
  long nx = 0;
  long ny = 0;
  std::vector<std::vector<std::uint32_t>> cells;

  const std::vector<std::uint32_t>* at(Point2 p) const {
    const long ix = static_cast<long>(std::floor((p.x - x0) / cell));
    const long iy = static_cast<long>(std::floor((p.y - y0) / cell));
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return nullptr;
    return &cells[static_cast<std::size_t>(iy * nx + ix)];
  }
};

Track::Track(std::vector<Point2> points, double line_width, bool closed,
             std::vector<double> segment_marks)
    : points_(std::move(points)), line_width_(line_width), closed_(closed) {
  if (points_.size() < 2) throw std::invalid_argument("track: need at least 2 waypoints");
  if (!(line_width_ > 0.0)) throw std::invalid_argument("track: line_width must be positive");
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double d = distance(points_[i - 1], points_[i]);
    if (!(d > 0.0)) throw std::invalid_argument("track: consecutive waypoints must be distinct");
    cumulative_.push_back(cumulative_.back() + d);
  }
  if (closed_ && distance(points_.front(), points_.back()) > 1e-9) {
    throw std::invalid_argument("track: closed track must end at its first point");
  }

  if (segment_marks.empty()) {
    marks_.assign(cumulative_.begin() + 1, cumulative_.end());
  } else {
    marks_ = std::move(segment_marks);
    for (std::size_t i = 0; i < marks_.size(); ++i) {
      if (!(marks_[i] > (i == 0 ? 0.0 : marks_[i - 1]))) {
        throw std::invalid_argument("track: segment marks must be positive and strictly increasing");
      }
    }
    if (std::abs(marks_.back() - length()) > 1e-6) {
      throw std::invalid_argument("track: last segment mark must equal the track length");
    }
    marks_.back() = length();
  }

  auto grid = std::make_shared<Grid>();
  const double pad = line_width_ / 2.0;
  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (const Point2& p : points_) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  grid->x0 = xmin - pad - grid->cell;
  grid->y0 = ymin - pad - grid->cell;
  grid->nx = static_cast<long>(std::ceil((xmax + pad + grid->cell - grid->x0) / grid->cell)) + 1;
  grid->ny = static_cast<long>(std::ceil((ymax + pad + grid->cell - grid->y0) / grid->cell)) + 1;
  grid->cells.resize(static_cast<std::size_t>(grid->nx * grid->ny));
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Point2 a = points_[i];
    const Point2 b = points_[i + 1];
    const long ix0 = static_cast<long>(std::floor((std::min(a.x, b.x) - pad - grid->x0) / grid->cell));
    const long ix1 = static_cast<long>(std::floor((std::max(a.x, b.x) + pad - grid->x0) / grid->cell));
    const long iy0 = static_cast<long>(std::floor((std::min(a.y, b.y) - pad - grid->y0) / grid->cell));
    const long iy1 = static_cast<long>(std::floor((std::max(a.y, b.y) + pad - grid->y0) / grid->cell));
    for (long iy = iy0; iy <= iy1; ++iy) {
      for (long ix = ix0; ix <= ix1; ++ix) {
        grid->cells[static_cast<std::size_t>(iy * grid->nx + ix)].push_back(
            static_cast<std::uint32_t>(i));
      }
    }
  }
  grid_ = std::move(grid);
}

double Track::start_heading() const {
  const Point2 d{points_[1].x - points_[0].x, points_[1].y - points_[0].y};
  return std::atan2(-d.x, d.y);
}

Point2 Track::point_at(double arc_length) const {
  const double s = std::clamp(arc_length, 0.0, length());
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, points_.size() - 1) - 1;
  const double t = (s - cumulative_[i]) / (cumulative_[i + 1] - cumulative_[i]);
  return {points_[i].x + t * (points_[i + 1].x - points_[i].x),
          points_[i].y + t * (points_[i + 1].y - points_[i].y)};
}

double Track::span_distance(std::size_t i, Point2 p, double* t_out) const {
  const Point2 a = points_[i];
  const Point2 b = points_[i + 1];
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy);
  t = std::clamp(t, 0.0, 1.0);
  if (t_out) *t_out = t;
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double Track::distance_to(Point2 p) const {
  // Exact answer from the grid when the point is close to the line.
  if (const auto* cell = grid_->at(p); cell && !cell->empty()) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t i : *cell) best = std::min(best, span_distance(i, p));
    if (best <= line_width_ / 2.0) return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) best = std::min(best, span_distance(i, p));
  return best;
}

bool Track::covers(Point2 p) const {
  const auto* cell = grid_->at(p);
  if (!cell) return false;
  const double half = line_width_ / 2.0;
  for (std::uint32_t i : *cell) {
    if (span_distance(i, p) <= half) return true;
  }
  return false;
}

TrackProjection Track::project(Point2 p, double hint, double window) const {
  const double total = length();
  TrackProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  const double offsets[3] = {-total, 0.0, total};
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    bool in_window = false;
    for (double off : offsets) {
      if (!closed_ && off != 0.0) continue;
      const double lo = cumulative_[i] + off;
      const double hi = cumulative_[i + 1] + off;
      if (hi >= hint - window && lo <= hint + window) {
        in_window = true;
        break;
      }
    }
    if (!in_window) continue;
    double t = 0.0;
    const double d = span_distance(i, p, &t);
    if (d < best.distance) {
      best.distance = d;
      best.arc_length = cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]);
      best.point = {points_[i].x + t * (points_[i + 1].x - points_[i].x),
                    points_[i].y + t * (points_[i + 1].y - points_[i].y)};
    }
  }
  return best;
}

Track Track::reversed() const {
  std::vector<Point2> pts(points_.rbegin(), points_.rend());
  const double total = length();
  std::vector<double> marks;
  marks.reserve(marks_.size());
  marks.push_back(total);  // old start becomes the new end
  for (std::size_t i = 0; i + 1 < marks_.size(); ++i) marks.push_back(total - marks_[i]);
  std::sort(marks.begin(), marks.end());
  Track out(std::move(pts), line_width_, closed_, {});
  marks.back() = out.length();
  out.marks_ = std::move(marks);
  return out;
}

Track Track::transformed(double angle, Point2 offset) const {
  std::vector<Point2> pts;
  pts.reserve(points_.size());
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (const Point2& p : points_) {
    pts.push_back({p.x * c - p.y * s + offset.x, p.x * s + p.y * c + offset.y});
  }
  if (closed_) pts.back() = pts.front();
  Track out(std::move(pts), line_width_, closed_, {});
  std::vector<double> marks = marks_;
  marks.back() = out.length();
  out.marks_ = std::move(marks);
  return out;
}

Track randomize_direction(const Track& track, std::uint64_t seed) {
  Rng rng(seed);
  return rng.coin() ? track.reversed() : track;
}

Track parse_track_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("track json: ") + e.what());
  }
  if (!j.contains("points") || !j.contains("line_width") || !j.contains("closed")) {
    throw std::invalid_argument("track json: requires points, line_width and closed");
  }
  std::vector<Point2> points;
  for (const auto& p : j.at("points")) {
    if (!p.is_array() || p.size() != 2) throw std::invalid_argument("track json: point must be [x, y]");
    points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  std::vector<double> marks;
  if (j.contains("segment_marks")) marks = j.at("segment_marks").get<std::vector<double>>();
  return Track(std::move(points), j.at("line_width").get<double>(), j.at("closed").get<bool>(),
               std::move(marks));
}

Track load_track(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open track file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_track_json(buf.str());
}

std::string track_to_json(const Track& track) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const Point2& p : track.points()) j["points"].push_back({p.x, p.y});
  j["line_width"] = track.line_width();
  j["closed"] = track.closed();
  j["segment_marks"] = std::vector<double>(track.segment_marks().begin(), track.segment_marks().end());
  return j.dump(1);
}

namespace {

// Turtle-style path builder: straights and circular arcs, tessellated finely
// enough that the chord error stays far below the sensor pitch.
class PathBuilder {
 public:
  PathBuilder(Point2 start, double heading_rad) : heading_(heading_rad) { pts_.push_back(start); }

  PathBuilder& straight(double len) {
    const int n = std::max(1, static_cast<int>(std::ceil(len / kStep)));
    const Point2 p0 = pts_.back();
    for (int i = 1; i <= n; ++i) {
      const double s = len * i / n;
      pts_.push_back({p0.x + s * std::cos(heading_), p0.y + s * std::sin(heading_)});
    }
    ends_.push_back(pts_.size() - 1);
    return *this;
  }

  // Positive sweep turns left.
  PathBuilder& arc(double radius, double sweep_deg) {
    const double sweep = sweep_deg * std::numbers::pi / 180.0;
    const double len = radius * std::abs(sweep);
    const int n = std::max(2, static_cast<int>(std::ceil(len / kStep)));
    const double side = sweep > 0 ? 1.0 : -1.0;
    const Point2 p0 = pts_.back();
    const Point2 center{p0.x - side * radius * std::sin(heading_),
                        p0.y + side * radius * std::cos(heading_)};
    const double phi0 = std::atan2(p0.y - center.y, p0.x - center.x);
    for (int i = 1; i <= n; ++i) {
      const double phi = phi0 + sweep * i / n;
      pts_.push_back({center.x + radius * std::cos(phi), center.y + radius * std::sin(phi)});
    }
    heading_ += sweep;
    ends_.push_back(pts_.size() - 1);
    return *this;
  }

  std::vector<Point2>& points() { return pts_; }

  // Polyline arc length at the end of every straight or arc piece.
  std::vector<double> piece_marks() const {
    std::vector<double> marks;
    double s = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 1; i < pts_.size(); ++i) {
      s += distance(pts_[i - 1], pts_[i]);
      if (next < ends_.size() && ends_[next] == i) {
        marks.push_back(s);
        ++next;
      }
    }
    return marks;
  }

 private:
  static constexpr double kStep = 0.02;
  std::vector<Point2> pts_;
  std::vector<std::size_t> ends_;
  double heading_;
};

constexpr double kDefaultLineWidth = 0.02;

// Stadium oval, 2 m straights and 0.5 m end radius, started mid-straight;
// eight equal segments.
Track make_oval_simple() {
  PathBuilder b({0.0, 0.0}, 0.0);
  b.straight(1.0).arc(0.5, 180).straight(2.0).arc(0.5, 180).straight(1.0);
  auto& pts = b.points();
  pts.back() = pts.front();
  const Track plain(pts, kDefaultLineWidth, true);
  std::vector<double> marks;
  for (int i = 1; i <= 8; ++i) marks.push_back(plain.length() * i / 8.0);
  return Track(pts, kDefaultLineWidth, true, marks);
}

// Open course with straights, two hairpins and S-curves. One segment per
// straight or arc piece.
Track make_complex_01() {
  PathBuilder b({0.0, 0.0}, 0.0);
  b.straight(1.0)
      .arc(0.3, 90)
      .straight(0.6)
      .arc(0.3, -60)
      .arc(0.3, 60)     // S-curve
      .straight(0.3)
      .arc(0.25, -180)  // hairpin
      .straight(1.3)
      .arc(0.25, 180)   // hairpin
      .straight(0.8)
      .arc(0.35, -90)
      .arc(0.35, 90)    // S-curve
      .straight(0.4)
      .arc(0.25, -180)  // hairpin
      .straight(0.6)
      .arc(0.5, 90)
      .straight(0.8);
  return Track(b.points(), kDefaultLineWidth, false, b.piece_marks());
}

}  // namespace

std::vector<std::string> bundled_track_names() { return {"oval_simple", "complex_01"}; }

Track bundled_track(const std::string& name) {
  if (name == "oval_simple") return make_oval_simple();
  if (name == "complex_01") return make_complex_01();
  throw std::invalid_argument("unknown bundled track '" + name + "'");
}

Track resolve_track(const std::string& name_or_path) {
  for (const auto& n : bundled_track_names()) {
    if (n == name_or_path) return bundled_track(n);
  }
  return load_track(name_or_path);
}

}  // namespace lfrl
