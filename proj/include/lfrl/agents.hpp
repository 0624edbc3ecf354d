#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lfrl/environment.hpp"
#include "lfrl/rng.hpp"

namespace lfrl {

// Discrete observation: the sensor nearest the active centroid, or one of two
// lost states. Sensor states are 0..count-1, then lost_left, lost_right.
struct StateKey {
  std::size_t index = 0;

  static std::size_t state_count(const SensorArray& array) { return array.count + 2; }
  static StateKey from_reading(const SensorReading& reading, const SensorArray& array);

  friend bool operator==(StateKey, StateKey) = default;
};

// Wheel-speed fractions of w_max.
struct WheelCommand {
  double left = 0.0;
  double right = 0.0;

  friend bool operator==(const WheelCommand&, const WheelCommand&) = default;
};

// Actions available to one Q-table. A joint set picks both wheels at once
// (MISO); a per-wheel set holds the levels one wheel's table chooses from
// (MIMO, one table per wheel).
class ActionSet {
 public:
  enum class Kind { joint, per_wheel };

  // {-1, 0, 1} x {-1, 0, 1}, left fraction varying slowest.
  static ActionSet miso9();
  // {-1, -0.9, ..., 1} for each wheel.
  static ActionSet mimo21();
  static ActionSet joint(std::vector<WheelCommand> commands);
  static ActionSet per_wheel(std::vector<double> levels);
  // "miso9", "mimo21" or "joint:l,r;l,r;..."
  static ActionSet parse(std::string_view spec);

  Kind kind() const { return kind_; }
  std::size_t size() const { return kind_ == Kind::joint ? joint_.size() : levels_.size(); }
  const WheelCommand& command(std::size_t i) const { return joint_.at(i); }
  double level(std::size_t i) const { return levels_.at(i); }
  std::string describe() const;

 private:
  ActionSet(Kind kind, std::vector<WheelCommand> joint, std::vector<double> levels);

  Kind kind_;
  std::vector<WheelCommand> joint_;
  std::vector<double> levels_;
};

// State x action value table with its one-step Q-learning constants.
class QTable {
 public:
  QTable(std::size_t states, std::size_t actions, double learning_rate, double discount);

  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }
  double learning_rate() const { return learning_rate_; }
  double discount() const { return discount_; }

  double at(std::size_t s, std::size_t a) const;
  double& at(std::size_t s, std::size_t a);
  std::span<const double> row(std::size_t s) const;
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  // Versioned text form: header line with dimensions and constants, then one
  // row per state, values in shortest round-trip decimal.
  void write(std::ostream& out) const;
  static QTable read(std::istream& in);

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t states_;
  std::size_t actions_;
  double learning_rate_;
  double discount_;
  std::vector<double> values_;
};

// Q(s,a) <- Q(s,a) + alpha (r + gamma max_a' Q(s',a') - Q(s,a)).
void q_update(QTable& table, StateKey s, std::size_t action, double r, StateKey next);
// Same update for a transition into a terminal state (no bootstrap).
void q_update_terminal(QTable& table, StateKey s, std::size_t action, double r);

// argmax over the row; ties go to the lowest index.
std::size_t greedy_action(const QTable& table, StateKey s);

std::size_t epsilon_greedy_select(const QTable& table, StateKey s, double epsilon, Rng& rng);

// Annealed temperature T = max(1 / (beta t), floor) on a global step clock.
struct SASchedule {
  double beta;
  double floor;
  std::uint64_t clock = 0;  // environment steps taken so far
  double current;           // last recalculated temperature

  explicit SASchedule(double beta_ = 0.01, double floor_ = 1e-3);

  // Recomputes `current` from `clock`.
  void recalculate();
  void validate() const;
};

// Temperature for the schedule's clock; 1/beta before the first step.
double temperature(const SASchedule& schedule);

// Draws a random action and the greedy one, keeps the random action with
// probability exp((Q(s,a_r) - Q(s,a_o)) / T).
std::size_t sa_select(const QTable& table, StateKey s, double temperature, Rng& rng);

struct PControllerConfig {
  double kp = 3.0;             // per rad
  double base_fraction = 1.0;  // cruise speed

  void validate() const;
};

// Proportional steering: line on the left (e > 0) speeds up the right wheel.
WheelCommand p_control(ErrorAngle e, const PControllerConfig& cfg);

// One table per wheel, both sharing the state and the reward.
struct MimoSelection {
  std::size_t left = 0;
  std::size_t right = 0;
};

MimoSelection mimo_select(const QTable& left, const QTable& right, StateKey s, double temperature,
                          Rng& rng);
void mimo_update(QTable& left, QTable& right, StateKey s, MimoSelection action, double r,
                 StateKey next, bool terminal);

}  // namespace lfrl
