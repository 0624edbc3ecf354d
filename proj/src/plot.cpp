#include "lfrl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace lfrl {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 55.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// Round step in {1, 2, 5} x 10^k giving about `target` intervals.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
  std::string out = "<polyline fill=\"none\" " + style + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += num(pts[i].first) + ',' + num(pts[i].second);
  }
  out += "\"/>\n";
  return out;
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + ' ' + num(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string score_chart_svg(const std::vector<EpisodeRecord>& records, std::size_t window) {
  if (records.empty()) throw std::invalid_argument("score chart: no records");
  window = std::max<std::size_t>(window, 1);
  const double x_min = static_cast<double>(records.front().episode);
  const double x_max = static_cast<double>(records.back().episode);
  const double x_span = x_max > x_min ? x_max - x_min : 1.0;

  double y_lo = 0.0;
  double y_hi = 0.0;
  for (const auto& r : records) {
    y_lo = std::min(y_lo, r.score);
    y_hi = std::max(y_hi, r.score);
  }
  if (y_hi - y_lo < 1e-9) y_hi = y_lo + 1.0;
  const double y_step = tick_step(y_hi - y_lo, 5);
  y_lo = std::floor(y_lo / y_step) * y_step;
  y_hi = std::ceil(y_hi / y_step) * y_step;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x_min) / x_span * pw; };
  auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

  std::string svg = header(kWidth, kHeight);
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  svg += "<g id=\"x-axis\" data-min=\"" + label(x_min) + "\" data-max=\"" + label(x_max) + "\">\n";
  const double x_step = tick_step(x_span, 8);
  std::vector<double> xticks{x_min};
  for (double t = std::ceil(x_min / x_step) * x_step; t < x_max; t += x_step) {
    if (t > x_min) xticks.push_back(t);
  }
  if (x_max > x_min) xticks.push_back(x_max);
  for (double t : xticks) {
    svg += "<line x1=\"" + num(sx(t)) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(sx(t)) +
           "\" y2=\"" + num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(kTop + ph + 18) +
           "\" text-anchor=\"middle\">" + label(t) + "</text>\n";
  }
  svg += "</g>\n<g id=\"y-axis\">\n";
  for (double t = y_lo; t <= y_hi + y_step * 1e-6; t += y_step) {
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(sy(t)) + "\" x2=\"" + num(kLeft + pw) +
           "\" y2=\"" + num(sy(t)) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(sy(t) + 4) + "\" text-anchor=\"end\">" +
           label(t) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\">Episode</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(kTop + ph / 2) + ")\">Score</text>\n";

  std::vector<std::pair<double, double>> raw;
  std::vector<std::pair<double, double>> avg;
  double sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    raw.emplace_back(sx(static_cast<double>(r.episode)), sy(r.score));
    sum += r.score;
    if (i >= window) sum -= records[i - window].score;
    const double n = static_cast<double>(std::min(i + 1, window));
    avg.emplace_back(sx(static_cast<double>(r.episode)), sy(sum / n));
  }
  svg += polyline(raw, "stroke=\"#9ecae1\" stroke-width=\"1\"");
  svg += polyline(avg, "stroke=\"#08519c\" stroke-width=\"2\"");
  svg += "<text x=\"" + num(kLeft + pw - 4) + "\" y=\"" + num(kTop + 16) +
         "\" text-anchor=\"end\">score, moving average over " + std::to_string(window) +
         " episodes</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::string trajectory_svg(const Track& track, const std::vector<Pose>& trajectory) {
  double x_lo = track.points().front().x, x_hi = x_lo;
  double y_lo = track.points().front().y, y_hi = y_lo;
  auto grow = [&](double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  };
  for (const auto& p : track.points()) grow(p.x, p.y);
  for (const auto& p : trajectory) grow(p.x, p.y);
  const double margin = 0.1 * std::max({x_hi - x_lo, y_hi - y_lo, 0.1});
  x_lo -= margin;
  x_hi += margin;
  y_lo -= margin;
  y_hi += margin;

  const double scale = std::min(760.0 / (x_hi - x_lo), 760.0 / (y_hi - y_lo));
  const double w = (x_hi - x_lo) * scale + 40.0;
  const double h = (y_hi - y_lo) * scale + 40.0;
  auto sx = [&](double x) { return 20.0 + (x - x_lo) * scale; };
  auto sy = [&](double y) { return 20.0 + (y_hi - y) * scale; };

  std::string svg = header(w, h);
  std::vector<std::pair<double, double>> line;
  for (const auto& p : track.points()) line.emplace_back(sx(p.x), sy(p.y));
  const double lw = std::max(1.0, track.line_width() * scale);
  svg += "<g id=\"track\">\n" +
         polyline(line, "stroke=\"black\" stroke-linejoin=\"round\" stroke-width=\"" + num(lw) + "\"") +
         "</g>\n";

  if (!trajectory.empty()) {
    // Drop points closer than half a pixel to the last kept one.
    std::vector<std::pair<double, double>> path;
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
      const double px = sx(trajectory[i].x);
      const double py = sy(trajectory[i].y);
      const bool last = i + 1 == trajectory.size();
      if (path.empty() || last || std::hypot(px - path.back().first, py - path.back().second) >= 0.5) {
        path.emplace_back(px, py);
      }
    }
    svg += "<g id=\"trajectory\">\n" +
           polyline(path, "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-linejoin=\"round\"") +
           "<circle cx=\"" + num(path.front().first) + "\" cy=\"" + num(path.front().second) +
           "\" r=\"4\" fill=\"#2ca02c\"/>\n" + "<circle cx=\"" + num(path.back().first) + "\" cy=\"" +
           num(path.back().second) + "\" r=\"4\" fill=\"#d62728\"/>\n</g>\n";
  }
  svg += "<text x=\"20\" y=\"14\">x, y in metres; scale " + label(scale) +
         " px/m; green start, red end</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> emit_plots(const std::vector<EpisodeRecord>& records,
                                              const Track* track,
                                              const std::vector<Pose>& trajectory,
                                              const std::filesystem::path& out_dir,
                                              std::ostream& warn) {
  if (records.empty()) {
    warn << "warning: no episode records, no plots written\n";
    return {};
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  written.push_back(out_dir / "scores.svg");
  write_file(written.back(), score_chart_svg(records));
  if (track && !trajectory.empty()) {
    written.push_back(out_dir / "trajectory.svg");
    write_file(written.back(), trajectory_svg(*track, trajectory));
  }
  return written;
}

}  // namespace lfrl
