#include "lfrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lfrl/text.hpp"

namespace lfrl {

StateKey StateKey::from_reading(const SensorReading& reading, const SensorArray& array) {
  if (reading.line_visible()) {
    double sum = 0.0;
    for (std::size_t i : reading.active) sum += static_cast<double>(i);
    const long nearest = std::lround(sum / static_cast<double>(reading.active.size()));
    return {static_cast<std::size_t>(nearest)};
  }
  // A lost line with no side memory shares the lost_left state.
  return {reading.lost_side == Side::right ? array.count + 1 : array.count};
}

ActionSet::ActionSet(Kind kind, std::vector<WheelCommand> joint, std::vector<double> levels)
    : kind_(kind), joint_(std::move(joint)), levels_(std::move(levels)) {
  if (size() == 0) throw std::invalid_argument("action set: empty");
  for (const auto& c : joint_) {
    if (std::abs(c.left) > 1.0 || std::abs(c.right) > 1.0) {
      throw std::invalid_argument("action set: fractions must lie in [-1, 1]");
    }
  }
  for (double l : levels_) {
    if (std::abs(l) > 1.0) throw std::invalid_argument("action set: fractions must lie in [-1, 1]");
  }
}

ActionSet ActionSet::miso9() {
  std::vector<WheelCommand> cmds;
  for (double l : {-1.0, 0.0, 1.0}) {
    for (double r : {-1.0, 0.0, 1.0}) cmds.push_back({l, r});
  }
  return joint(std::move(cmds));
}

ActionSet ActionSet::mimo21() {
  std::vector<double> levels;
  for (int i = 0; i <= 20; ++i) levels.push_back(static_cast<double>(i - 10) / 10.0);
  return per_wheel(std::move(levels));
}

ActionSet ActionSet::joint(std::vector<WheelCommand> commands) {
  return ActionSet(Kind::joint, std::move(commands), {});
}

ActionSet ActionSet::per_wheel(std::vector<double> levels) {
  return ActionSet(Kind::per_wheel, {}, std::move(levels));
}

ActionSet ActionSet::parse(std::string_view spec) {
  if (spec == "miso9") return miso9();
  if (spec == "mimo21") return mimo21();
  auto split = [](std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = s.find(sep, pos);
      parts.push_back(s.substr(pos, next - pos));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return parts;
  };
  if (spec.starts_with("joint:")) {
    std::vector<WheelCommand> cmds;
    for (auto pair : split(spec.substr(6), ';')) {
      const auto lr = split(pair, ',');
      if (lr.size() != 2) throw std::invalid_argument("action set: expected 'left,right' pairs");
      cmds.push_back({parse_double(lr[0]), parse_double(lr[1])});
    }
    return joint(std::move(cmds));
  }
  if (spec.starts_with("levels:")) {
    std::vector<double> levels;
    for (auto v : split(spec.substr(7), ',')) levels.push_back(parse_double(v));
    return per_wheel(std::move(levels));
  }
  throw std::invalid_argument("unknown action set '" + std::string(spec) + "'");
}

std::string ActionSet::describe() const {
  std::string out;
  if (kind_ == Kind::joint) {
    out = "joint:";
    for (std::size_t i = 0; i < joint_.size(); ++i) {
      if (i) out += ';';
      out += format_double(joint_[i].left) + ',' + format_double(joint_[i].right);
    }
  } else {
    out = "levels:";
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      if (i) out += ',';
      out += format_double(levels_[i]);
    }
  }
  return out;
}

QTable::QTable(std::size_t states, std::size_t actions, double learning_rate, double discount)
    : states_(states),
      actions_(actions),
      learning_rate_(learning_rate),
      discount_(discount),
      values_(states * actions, 0.0) {
  if (states == 0 || actions == 0) throw std::invalid_argument("qtable: empty dimensions");
  if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) {
    throw std::invalid_argument("qtable: learning rate must lie in [0, 1]");
  }
  if (!(discount >= 0.0 && discount <= 1.0)) {
    throw std::invalid_argument("qtable: discount must lie in [0, 1]");
  }
}

double QTable::at(std::size_t s, std::size_t a) const {
  if (s >= states_ || a >= actions_) throw std::out_of_range("qtable: index out of range");
  return values_[s * actions_ + a];
}

double& QTable::at(std::size_t s, std::size_t a) {
  if (s >= states_ || a >= actions_) throw std::out_of_range("qtable: index out of range");
  return values_[s * actions_ + a];
}

std::span<const double> QTable::row(std::size_t s) const {
  if (s >= states_) throw std::out_of_range("qtable: state out of range");
  return std::span<const double>(values_).subspan(s * actions_, actions_);
}

bool QTable::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void QTable::write(std::ostream& out) const {
  out << "qtable v1 states " << states_ << " actions " << actions_ << " alpha "
      << format_double(learning_rate_) << " gamma " << format_double(discount_) << '\n';
  for (std::size_t s = 0; s < states_; ++s) {
    for (std::size_t a = 0; a < actions_; ++a) {
      if (a) out << ' ';
      out << format_double(values_[s * actions_ + a]);
    }
    out << '\n';
  }
}

QTable QTable::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("qtable: missing header");
  std::istringstream header(line);
  std::string magic, version, k_states, states, k_actions, actions, k_alpha, alpha, k_gamma, gamma;
  header >> magic >> version >> k_states >> states >> k_actions >> actions >> k_alpha >> alpha >>
      k_gamma >> gamma;
  if (magic != "qtable" || k_states != "states" || k_actions != "actions" || k_alpha != "alpha" ||
      k_gamma != "gamma") {
    throw std::runtime_error("qtable: malformed header '" + line + "'");
  }
  if (version != "v1") throw std::runtime_error("qtable: unsupported version " + version);
  QTable table(static_cast<std::size_t>(parse_integer(states)),
               static_cast<std::size_t>(parse_integer(actions)), parse_double(alpha),
               parse_double(gamma));
  for (std::size_t s = 0; s < table.states_; ++s) {
    if (!std::getline(in, line)) throw std::runtime_error("qtable: truncated body");
    std::istringstream row(line);
    std::string tok;
    for (std::size_t a = 0; a < table.actions_; ++a) {
      if (!(row >> tok)) throw std::runtime_error("qtable: short row " + std::to_string(s));
      table.values_[s * table.actions_ + a] = parse_double(tok);
    }
    if (row >> tok) throw std::runtime_error("qtable: long row " + std::to_string(s));
  }
  return table;
}

void q_update(QTable& table, StateKey s, std::size_t action, double r, StateKey next) {
  const auto next_row = table.row(next.index);
  const double best_next = *std::max_element(next_row.begin(), next_row.end());
  double& q = table.at(s.index, action);
  q += table.learning_rate() * (r + table.discount() * best_next - q);
}

void q_update_terminal(QTable& table, StateKey s, std::size_t action, double r) {
  double& q = table.at(s.index, action);
  q += table.learning_rate() * (r - q);
}

std::size_t greedy_action(const QTable& table, StateKey s) {
  const auto row = table.row(s.index);
  // max_element returns the first maximum
  return static_cast<std::size_t>(std::distance(row.begin(), std::max_element(row.begin(), row.end())));
}

std::size_t epsilon_greedy_select(const QTable& table, StateKey s, double epsilon, Rng& rng) {
  if (rng.uniform() < epsilon) return rng.index(table.actions());
  return greedy_action(table, s);
}

SASchedule::SASchedule(double beta_, double floor_) : beta(beta_), floor(floor_) {
  validate();
  current = 1.0 / beta;
}

void SASchedule::recalculate() { current = temperature(*this); }

void SASchedule::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("sa schedule: beta must be positive");
  if (!(floor > 0.0)) throw std::invalid_argument("sa schedule: temperature floor must be positive");
}

double temperature(const SASchedule& schedule) {
  if (schedule.clock == 0) return 1.0 / schedule.beta;
  return std::max(1.0 / (schedule.beta * static_cast<double>(schedule.clock)), schedule.floor);
}

std::size_t sa_select(const QTable& table, StateKey s, double temperature, Rng& rng) {
  const std::size_t random = rng.index(table.actions());
  const std::size_t greedy = greedy_action(table, s);
  const double sigma = rng.uniform();
  if (random == greedy) return greedy;
  const double gap = table.at(s.index, random) - table.at(s.index, greedy);
  return sigma < std::exp(gap / temperature) ? random : greedy;
}

void PControllerConfig::validate() const {
  if (!(base_fraction > 0.0 && base_fraction <= 1.0)) {
    throw std::invalid_argument("p controller: base_fraction must lie in (0, 1]");
  }
  if (!std::isfinite(kp)) throw std::invalid_argument("p controller: kp must be finite");
}

WheelCommand p_control(ErrorAngle e, const PControllerConfig& cfg) {
  const double turn = cfg.kp * e.e;
  return {std::clamp(cfg.base_fraction - turn, -1.0, 1.0),
          std::clamp(cfg.base_fraction + turn, -1.0, 1.0)};
}

MimoSelection mimo_select(const QTable& left, const QTable& right, StateKey s, double temperature,
                          Rng& rng) {
  MimoSelection sel;
  sel.left = sa_select(left, s, temperature, rng);
  sel.right = sa_select(right, s, temperature, rng);
  return sel;
}

void mimo_update(QTable& left, QTable& right, StateKey s, MimoSelection action, double r,
                 StateKey next, bool terminal) {
  if (terminal) {
    q_update_terminal(left, s, action.left, r);
    q_update_terminal(right, s, action.right, r);
  } else {
    q_update(left, s, action.left, r, next);
    q_update(right, s, action.right, r, next);
  }
}

}  // namespace lfrl
