#include "lfrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lfrl/text.hpp"

namespace lfrl {

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::p:
      return "p";
    case ControllerKind::eps_q_miso:
      return "eps_q_miso";
    case ControllerKind::sa_q_miso:
      return "sa_q_miso";
    case ControllerKind::sa_q_mimo:
      return "sa_q_mimo";
  }
  return "unknown";
}

ControllerKind controller_from_string(std::string_view text) {
  for (ControllerKind k : {ControllerKind::p, ControllerKind::eps_q_miso, ControllerKind::sa_q_miso,
                           ControllerKind::sa_q_mimo}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown controller '" + std::string(text) + "'");
}

ActionSet RunConfig::resolved_actions() const {
  if (!action_set.empty()) return ActionSet::parse(action_set);
  return controller == ControllerKind::sa_q_mimo ? ActionSet::mimo21() : ActionSet::miso9();
}

void RunConfig::validate() const {
  if (episodes < 1) throw std::invalid_argument("config: episodes must be >= 1");
  if (eval_trials < 1) throw std::invalid_argument("config: eval_trials must be >= 1");
  robot.validate();
  step.validate();
  sensors().validate();
  if (limits.lost_steps < 1 || limits.reverse_steps < 1 || limits.max_steps < 1) {
    throw std::invalid_argument("config: termination thresholds must be >= 1");
  }
  if (!(noise.amplitude >= 0.0 && noise.amplitude < 1.0)) {
    throw std::invalid_argument("config: noise amplitude must lie in [0, 1)");
  }
  if (!(start_offset >= 0.0)) throw std::invalid_argument("config: start_offset must be >= 0");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("config: epsilon must lie in [0, 1]");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw std::invalid_argument("config: learning_rate must lie in (0, 1]");
  }
  if (!(discount >= 0.0 && discount <= 1.0)) throw std::invalid_argument("config: discount must lie in [0, 1]");
  SASchedule(beta, temperature_floor).validate();
  p.validate();
  const ActionSet actions = resolved_actions();
  const bool mimo = controller == ControllerKind::sa_q_mimo;
  if (controller != ControllerKind::p &&
      (actions.kind() == ActionSet::Kind::per_wheel) != mimo) {
    throw std::invalid_argument(mimo ? "config: sa_q_mimo needs a per-wheel action set"
                                     : "config: MISO controllers need a joint action set");
  }
}

Agent Agent::create(const RunConfig& cfg) {
  cfg.validate();
  Agent agent;
  agent.kind = cfg.controller;
  agent.actions = cfg.resolved_actions();
  agent.schedule = SASchedule(cfg.beta, cfg.temperature_floor);
  agent.epsilon = cfg.epsilon;
  agent.p = cfg.p;
  const std::size_t states = StateKey::state_count(cfg.sensors());
  const std::size_t tables = agent.kind == ControllerKind::p ? 0
                             : agent.kind == ControllerKind::sa_q_mimo ? 2
                                                                       : 1;
  for (std::size_t i = 0; i < tables; ++i) {
    agent.tables.emplace_back(states, agent.actions.size(), cfg.learning_rate, cfg.discount);
  }
  return agent;
}

void Agent::write_checkpoint(std::ostream& out) const {
  out << "lfrl-checkpoint v1\n";
  out << "controller " << to_string(kind) << '\n';
  out << "actions " << actions.describe() << '\n';
  out << "epsilon " << format_double(epsilon) << '\n';
  out << "beta " << format_double(schedule.beta) << '\n';
  out << "temperature_floor " << format_double(schedule.floor) << '\n';
  out << "clock " << schedule.clock << '\n';
  out << "temperature " << format_double(schedule.current) << '\n';
  out << "kp " << format_double(p.kp) << '\n';
  out << "base_fraction " << format_double(p.base_fraction) << '\n';
  out << "tables " << tables.size() << '\n';
  for (const QTable& t : tables) t.write(out);
}

namespace {

std::string expect_field(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint: missing " + std::string(key));
  const auto space = line.find(' ');
  if (space == std::string::npos || line.substr(0, space) != key) {
    throw std::runtime_error("checkpoint: expected '" + std::string(key) + "', got '" + line + "'");
  }
  return line.substr(space + 1);
}

}  // namespace

Agent Agent::read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "lfrl-checkpoint v1") {
    throw std::runtime_error("checkpoint: not an lfrl-checkpoint v1 file");
  }
  Agent agent;
  agent.kind = controller_from_string(expect_field(in, "controller"));
  agent.actions = ActionSet::parse(expect_field(in, "actions"));
  agent.epsilon = parse_double(expect_field(in, "epsilon"));
  const double beta = parse_double(expect_field(in, "beta"));
  const double floor = parse_double(expect_field(in, "temperature_floor"));
  agent.schedule = SASchedule(beta, floor);
  agent.schedule.clock = static_cast<std::uint64_t>(parse_integer(expect_field(in, "clock")));
  agent.schedule.current = parse_double(expect_field(in, "temperature"));
  agent.p.kp = parse_double(expect_field(in, "kp"));
  agent.p.base_fraction = parse_double(expect_field(in, "base_fraction"));
  const auto count = parse_integer(expect_field(in, "tables"));
  const long long expected = agent.kind == ControllerKind::p ? 0
                             : agent.kind == ControllerKind::sa_q_mimo ? 2
                                                                       : 1;
  if (count != expected) throw std::runtime_error("checkpoint: wrong table count for controller");
  for (long long i = 0; i < count; ++i) {
    agent.tables.push_back(QTable::read(in));
    if (agent.tables.back().actions() != agent.actions.size()) {
      throw std::runtime_error("checkpoint: table width does not match the action set");
    }
  }
  return agent;
}

void Agent::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Agent Agent::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

Pose start_pose(const Track& track, double lateral) {
  const double heading = track.start_heading();
  const auto [dx, dy] = origin_transfer(lateral, 0.0, heading);
  return Pose{track.start().x + dx, track.start().y + dy, normalize_angle(heading)};
}

namespace {

struct Decision {
  WheelCommand command;
  std::size_t joint = 0;
  MimoSelection mimo;
  bool explored = false;
};

Decision decide(const Agent& agent, StateKey s, ErrorAngle e, bool training, Rng& rng) {
  Decision d;
  switch (agent.kind) {
    case ControllerKind::p:
      d.command = p_control(e, agent.p);
      return d;
    case ControllerKind::eps_q_miso:
    case ControllerKind::sa_q_miso: {
      const QTable& q = agent.tables.front();
      const std::size_t greedy = greedy_action(q, s);
      if (!training) {
        d.joint = greedy;
      } else if (agent.kind == ControllerKind::eps_q_miso) {
        d.joint = epsilon_greedy_select(q, s, agent.epsilon, rng);
      } else {
        d.joint = sa_select(q, s, agent.schedule.current, rng);
      }
      d.explored = d.joint != greedy;
      d.command = agent.actions.command(d.joint);
      return d;
    }
    case ControllerKind::sa_q_mimo: {
      const QTable& left = agent.tables[0];
      const QTable& right = agent.tables[1];
      const MimoSelection greedy{greedy_action(left, s), greedy_action(right, s)};
      d.mimo = training ? mimo_select(left, right, s, agent.schedule.current, rng) : greedy;
      d.explored = d.mimo.left != greedy.left || d.mimo.right != greedy.right;
      d.command = {agent.actions.level(d.mimo.left), agent.actions.level(d.mimo.right)};
      return d;
    }
  }
  return d;
}

void learn(Agent& agent, StateKey s, const Decision& d, double r, StateKey next, bool terminal) {
  if (agent.kind == ControllerKind::sa_q_mimo) {
    mimo_update(agent.tables[0], agent.tables[1], s, d.mimo, r, next, terminal);
    if (!std::isfinite(agent.tables[0].at(s.index, d.mimo.left)) ||
        !std::isfinite(agent.tables[1].at(s.index, d.mimo.right))) {
      throw std::runtime_error("non-finite Q-value at state " + std::to_string(s.index) +
                               " (reward " + format_double(r) + "); check learning rate and discount");
    }
    return;
  }
  QTable& q = agent.tables.front();
  if (terminal) {
    q_update_terminal(q, s, d.joint, r);
  } else {
    q_update(q, s, d.joint, r, next);
  }
  if (!std::isfinite(q.at(s.index, d.joint))) {
    throw std::runtime_error("non-finite Q-value at state " + std::to_string(s.index) + ", action " +
                             std::to_string(d.joint) + " (reward " + format_double(r) +
                             "); check learning rate and discount");
  }
}

}  // namespace

EpisodeRecord run_episode(const RunConfig& cfg, Agent& agent, const Track& track, RngStreams& rng,
                          Mode mode, std::vector<Pose>* trajectory) {
  const SensorArray array = cfg.sensors();
  const RobotGeometry& geom = cfg.robot;
  const bool training = mode == Mode::train && agent.learns();

  const double lateral = rng.start.uniform(-1.0, 1.0) * cfg.start_offset * track.line_width();
  Pose pose = start_pose(track, lateral);
  SensorReading reading = sense(pose, track, array);
  ErrorAngle e = error_angle(reading, array);
  StateKey s = StateKey::from_reading(reading, array);
  EpisodeStatus status = start_status(pose, track, cfg.limits);
  if (trajectory) {
    trajectory->clear();
    trajectory->push_back(pose);
  }

  std::size_t explored = 0;
  while (status.outcome == Outcome::running) {
    const Decision d = decide(agent, s, e, training, rng.exploration);
    if (d.explored) ++explored;

    const WheelSpeeds commanded(d.command.left * geom.max_wheel_speed,
                                d.command.right * geom.max_wheel_speed, geom.max_wheel_speed);
    WheelSpeeds actual = commanded;
    if (cfg.noise.amplitude > 0.0) {
      const double a = cfg.noise.amplitude;
      const double nl = 1.0 + rng.noise.uniform(-a, a);
      const double nr = 1.0 + rng.noise.uniform(-a, a);
      actual = WheelSpeeds(commanded.left() * nl, commanded.right() * nr, geom.max_wheel_speed);
    }

    pose = step(pose, actual, geom, cfg.step);
    const SensorReading next_reading = sense(pose, track, array, reading);
    const ErrorAngle next_e = error_angle(next_reading, array);
    const double r = reward(e, next_e, commanded, geom, cfg.step);
    status = update_progress(status, pose, track, next_reading, cfg.step, cfg.limits);
    const StateKey next_s = StateKey::from_reading(next_reading, array);

    if (training) {
      // Running out of steps truncates the episode; every other ending is terminal.
      const bool terminal =
          status.outcome != Outcome::running && status.outcome != Outcome::step_limit;
      learn(agent, s, d, r, next_s, terminal);
      ++agent.schedule.clock;
      if (cfg.per_step_temperature) agent.schedule.recalculate();
    }
    if (trajectory) trajectory->push_back(pose);

    reading = next_reading;
    e = next_e;
    s = next_s;
  }

  EpisodeRecord rec;
  rec.score = score(status);
  rec.outcome = status.outcome;
  rec.segments = status.segments_done;
  rec.elapsed = status.elapsed;
  rec.steps = status.steps;
  rec.explore_rate =
      status.steps == 0 ? 0.0 : static_cast<double>(explored) / static_cast<double>(status.steps);
  return rec;
}

TrainResult train(const RunConfig& cfg, const EpisodeCallback& on_episode) {
  return train(cfg, Agent::create(cfg), on_episode);
}

TrainResult train(const RunConfig& cfg, Agent agent, const EpisodeCallback& on_episode) {
  cfg.validate();
  const Track base = resolve_track(cfg.track);
  RngStreams rng(cfg.seed);
  TrainResult result{{}, std::move(agent)};
  result.records.reserve(cfg.episodes);
  for (std::size_t ep = 1; ep <= cfg.episodes; ++ep) {
    const Track course = randomize_direction(base, rng.direction.next());
    EpisodeRecord rec = run_episode(cfg, result.agent, course, rng, Mode::train);
    rec.episode = ep;
    if (!cfg.per_step_temperature) result.agent.schedule.recalculate();
    result.records.push_back(rec);
    if (on_episode) on_episode(rec);
  }
  return result;
}

EvalResult evaluate(const Agent& agent, const RunConfig& cfg, const Track& track, std::size_t trials,
                    std::uint64_t seed) {
  Agent local = agent;
  RngStreams rng(seed);
  EvalResult result;
  result.best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= trials; ++i) {
    const Track course = randomize_direction(track, rng.direction.next());
    EpisodeRecord rec = run_episode(cfg, local, course, rng, Mode::greedy);
    rec.episode = i;
    result.best = std::max(result.best, rec.score);
    result.records.push_back(rec);
  }
  if (trials == 0) result.best = 0.0;
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double ComparisonResult::median_best(const std::string& controller) const {
  std::vector<double> best;
  for (const auto& row : rows) {
    if (row.controller == controller) best.push_back(row.best_score);
  }
  return median(std::move(best));
}

std::vector<std::string> ComparisonResult::controllers() const {
  std::vector<std::string> names;
  for (const auto& row : rows) {
    if (std::find(names.begin(), names.end(), row.controller) == names.end()) {
      names.push_back(row.controller);
    }
  }
  return names;
}

ComparisonResult compare(const std::vector<CompareEntry>& entries,
                         const std::vector<std::uint64_t>& seeds, std::size_t jobs) {
  if (entries.size() < 2) throw std::invalid_argument("compare: need at least two controllers");
  ComparisonResult result;
  result.rows.resize(entries.size() * seeds.size());

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t task = next++; task < result.rows.size(); task = next++) {
      try {
        const CompareEntry& entry = entries[task / seeds.size()];
        RunConfig cfg = entry.config;
        cfg.seed = seeds[task % seeds.size()];
        Agent agent = Agent::create(cfg);
        if (agent.learns()) agent = train(cfg, std::move(agent)).agent;
        const EvalResult eval = evaluate(agent, cfg, resolve_track(cfg.eval_track), cfg.eval_trials,
                                         Rng::stream(cfg.seed, "evaluation").next());
        std::vector<double> scores;
        for (const auto& r : eval.records) scores.push_back(r.score);
        result.rows[task] = {entry.label, cfg.seed, eval.best, median(scores)};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(jobs, result.rows.size()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return result;
}

std::string to_csv_row(const EpisodeRecord& r) {
  std::string row;
  row += std::to_string(r.episode);
  row += ',' + format_double(r.score);
  row += ',' + std::string(to_string(r.outcome));
  row += ',' + std::to_string(r.segments);
  row += ',' + format_double(r.elapsed);
  row += ',' + std::to_string(r.steps);
  row += ',' + format_double(r.explore_rate);
  return row;
}

void write_learning_curve(std::ostream& out, const std::vector<EpisodeRecord>& records) {
  out << kLearningCurveHeader << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<EpisodeRecord> read_learning_curve(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kLearningCurveHeader) {
    throw std::runtime_error("learning curve: unexpected header");
  }
  std::vector<EpisodeRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) throw std::runtime_error("learning curve: bad row '" + line + "'");
    EpisodeRecord r;
    r.episode = static_cast<std::size_t>(parse_integer(f[0]));
    r.score = parse_double(f[1]);
    r.outcome = outcome_from_string(f[2]);
    r.segments = static_cast<std::size_t>(parse_integer(f[3]));
    r.elapsed = parse_double(f[4]);
    r.steps = static_cast<std::size_t>(parse_integer(f[5]));
    r.explore_rate = parse_double(f[6]);
    records.push_back(r);
  }
  return records;
}

void write_comparison(std::ostream& out, const ComparisonResult& result) {
  out << kComparisonHeader << '\n';
  for (const auto& row : result.rows) {
    out << row.controller << ',' << row.seed << ',' << format_double(row.best_score) << ','
        << format_double(row.median_score) << '\n';
  }
}

void write_trajectory(std::ostream& out, const std::vector<Pose>& poses) {
  out << "x,y,delta\n";
  for (const Pose& p : poses) {
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.delta) << '\n';
  }
}

std::vector<Pose> read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x,y,delta") {
    throw std::runtime_error("trajectory: unexpected header");
  }
  std::vector<Pose> poses;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 3) throw std::runtime_error("trajectory: bad row '" + line + "'");
    poses.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2])});
  }
  return poses;
}

}  // namespace lfrl
