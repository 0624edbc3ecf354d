#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lfrl/agents.hpp"
#include "lfrl/environment.hpp"
#include "lfrl/kinematics.hpp"
#include "lfrl/rng.hpp"
#include "lfrl/track.hpp"

namespace lfrl {

enum class ControllerKind { p, eps_q_miso, sa_q_miso, sa_q_mimo };

std::string_view to_string(ControllerKind kind);
ControllerKind controller_from_string(std::string_view text);

// Everything one training or evaluation run depends on.
struct RunConfig {
  ControllerKind controller = ControllerKind::sa_q_miso;
  std::size_t episodes = 2000;
  std::string track = "oval_simple";
  std::string eval_track = "complex_01";
  std::uint64_t seed = 1;
  std::size_t eval_trials = 5;

  RobotGeometry robot;
  StepConfig step;
  std::size_t sensor_count = 32;
  TerminationLimits limits;
  ActuationNoise noise;
  // Start pose lateral offset is uniform in +/- this many line widths.
  double start_offset = 1.0;

  double learning_rate = 0.01;
  double discount = 0.99;
  double epsilon = 0.1;
  double beta = 2e-6;
  double temperature_floor = 1e-3;
  bool per_step_temperature = false;
  // Empty selects miso9 for the MISO controllers and mimo21 for MIMO.
  std::string action_set;

  PControllerConfig p;

  SensorArray sensors() const { return SensorArray::for_robot(robot, sensor_count); }
  ActionSet resolved_actions() const;
  void validate() const;
};

// Controller state: Q-tables and exploration schedule, or P gains.
struct Agent {
  ControllerKind kind = ControllerKind::p;
  ActionSet actions = ActionSet::miso9();
  std::vector<QTable> tables;  // one (joint) or two (left, right); none for P
  SASchedule schedule;
  double epsilon = 0.1;
  PControllerConfig p;

  static Agent create(const RunConfig& cfg);

  bool learns() const { return kind != ControllerKind::p; }

  // Versioned text checkpoint holding everything needed to resume or evaluate.
  void write_checkpoint(std::ostream& out) const;
  static Agent read_checkpoint(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Agent load(const std::filesystem::path& path);
};

struct EpisodeRecord {
  std::size_t episode = 0;
  double score = 0.0;
  Outcome outcome = Outcome::running;
  std::size_t segments = 0;
  double elapsed = 0.0;
  std::size_t steps = 0;
  double explore_rate = 0.0;  // fraction of steps whose action differs from the greedy one

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

enum class Mode { train, greedy };

// Start pose for a (direction-resolved) track: first waypoint, facing along
// the first span, shifted sideways by `lateral` metres (+ is right).
Pose start_pose(const Track& track, double lateral);

// Runs one episode to termination or the step cap. In train mode the agent
// explores and learns; in greedy mode it is left untouched. Throws
// std::runtime_error if a Q-value becomes non-finite.
EpisodeRecord run_episode(const RunConfig& cfg, Agent& agent, const Track& track, RngStreams& rng,
                          Mode mode, std::vector<Pose>* trajectory = nullptr);

struct TrainResult {
  std::vector<EpisodeRecord> records;
  Agent agent;
};

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

// Episodes with per-episode direction randomization and temperature
// recalculation between episodes. `on_episode` runs after each one.
TrainResult train(const RunConfig& cfg, const EpisodeCallback& on_episode = {});
// Continues from an existing agent.
TrainResult train(const RunConfig& cfg, Agent agent, const EpisodeCallback& on_episode = {});

struct EvalResult {
  std::vector<EpisodeRecord> records;
  double best = 0.0;
};

// Greedy episodes on `track`; reports each score and the best.
EvalResult evaluate(const Agent& agent, const RunConfig& cfg, const Track& track, std::size_t trials,
                    std::uint64_t seed);

struct ComparisonRow {
  std::string controller;
  std::uint64_t seed = 0;
  double best_score = 0.0;
  double median_score = 0.0;
};

struct ComparisonResult {
  std::vector<ComparisonRow> rows;  // controller-major, seeds in input order

  // Median of best_score over seeds for one controller label.
  double median_best(const std::string& controller) const;
  std::vector<std::string> controllers() const;
};

struct CompareEntry {
  std::string label;
  RunConfig config;
};

// Trains every entry for every seed on its training track, then evaluates on
// its held-out track. Runs up to `jobs` trainings concurrently.
ComparisonResult compare(const std::vector<CompareEntry>& entries,
                         const std::vector<std::uint64_t>& seeds, std::size_t jobs = 1);

double median(std::vector<double> values);

// Learning-curve CSV.
inline constexpr std::string_view kLearningCurveHeader =
    "episode,score,outcome,segments,elapsed_s,steps,explore_rate";
std::string to_csv_row(const EpisodeRecord& r);
void write_learning_curve(std::ostream& out, const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_learning_curve(std::istream& in);

inline constexpr std::string_view kComparisonHeader = "controller,seed,best_score,median_score";
void write_comparison(std::ostream& out, const ComparisonResult& result);

// Trajectory CSV: x,y,delta per step.
void write_trajectory(std::ostream& out, const std::vector<Pose>& poses);
std::vector<Pose> read_trajectory(std::istream& in);

}  // namespace lfrl
