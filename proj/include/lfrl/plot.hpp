#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lfrl/harness.hpp"
#include "lfrl/track.hpp"

namespace lfrl {

// Score-vs-episode chart: raw scores plus a trailing moving average over
// `window` episodes. The x axis spans [first episode, last episode].
std::string score_chart_svg(const std::vector<EpisodeRecord>& records, std::size_t window = 50);

// Track drawn at its line width with the robot path on top.
std::string trajectory_svg(const Track& track, const std::vector<Pose>& trajectory);

// Writes scores.svg (and trajectory.svg when a track and a non-empty
// trajectory are given) into `out_dir`. Empty records write nothing and print
// a warning to `warn`. Returns the files written.
std::vector<std::filesystem::path> emit_plots(const std::vector<EpisodeRecord>& records,
                                              const Track* track,
                                              const std::vector<Pose>& trajectory,
                                              const std::filesystem::path& out_dir,
                                              std::ostream& warn);

}  // namespace lfrl
