#include "lfrl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lfrl/text.hpp"

namespace lfrl {

namespace {

namespace pt = boost::property_tree;

struct Key {
  std::string section;
  std::string name;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::size_t parse_count(const std::string& text) {
  const long long v = parse_integer(text);
  if (v < 0) throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

template <typename Get>
Key real_at(std::string section, std::string name, std::string help, Get field) {
  return {std::move(section), std::move(name), std::move(help),
          [field](RunConfig& c, const std::string& v) { field(c) = parse_double(v); },
          [field](RunConfig c) { return format_double(field(c)); }};
}

template <typename Get>
Key count_at(std::string section, std::string name, std::string help, Get field) {
  return {std::move(section), std::move(name), std::move(help),
          [field](RunConfig& c, const std::string& v) { field(c) = parse_count(v); },
          [field](RunConfig c) { return std::to_string(field(c)); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({"run", "controller", "p | eps_q_miso | sa_q_miso | sa_q_mimo",
                 [](RunConfig& c, const std::string& v) { c.controller = controller_from_string(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.controller)); }});
    k.push_back(count_at("run", "episodes", "training episodes",
                         [](RunConfig& c) -> std::size_t& { return c.episodes; }));
    k.push_back({"run", "track", "training track: bundled name or JSON path",
                 [](RunConfig& c, const std::string& v) { c.track = v; },
                 [](const RunConfig& c) { return c.track; }});
    k.push_back({"run", "eval_track", "held-out evaluation track",
                 [](RunConfig& c, const std::string& v) { c.eval_track = v; },
                 [](const RunConfig& c) { return c.eval_track; }});
    k.push_back({"run", "seed", "master seed for all random streams",
                 [](RunConfig& c, const std::string& v) {
                   c.seed = static_cast<std::uint64_t>(parse_count(v));
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    k.push_back(count_at("run", "eval_trials", "greedy evaluation episodes",
                         [](RunConfig& c) -> std::size_t& { return c.eval_trials; }));

    k.push_back(real_at("robot", "track_width", "wheel separation a (m)",
                        [](RunConfig& c) -> double& { return c.robot.track_width; }));
    k.push_back(real_at("robot", "length", "body length b (m)",
                        [](RunConfig& c) -> double& { return c.robot.length; }));
    k.push_back(real_at("robot", "wheel_radius", "wheel radius r (m)",
                        [](RunConfig& c) -> double& { return c.robot.wheel_radius; }));
    k.push_back(real_at("robot", "max_wheel_speed",
                        "top wheel speed (rad/s); max_wheel_rpm may be given instead",
                        [](RunConfig& c) -> double& { return c.robot.max_wheel_speed; }));
    k.push_back(real_at("robot", "axle_offset", "axle to centre-of-mass distance (m)",
                        [](RunConfig& c) -> double& { return c.robot.axle_offset; }));

    k.push_back(real_at("environment", "sampling_period", "T_s (s)",
                        [](RunConfig& c) -> double& { return c.step.sampling_period; }));
    k.push_back(count_at("environment", "sensor_count", "sensors across the bar",
                         [](RunConfig& c) -> std::size_t& { return c.sensor_count; }));
    k.push_back(count_at("environment", "lost_steps", "consecutive lost readings that end an episode",
                         [](RunConfig& c) -> std::size_t& { return c.limits.lost_steps; }));
    k.push_back(count_at("environment", "reverse_steps",
                         "consecutive backward steps that end an episode",
                         [](RunConfig& c) -> std::size_t& { return c.limits.reverse_steps; }));
    k.push_back(count_at("environment", "max_steps", "step cap per episode",
                         [](RunConfig& c) -> std::size_t& { return c.limits.max_steps; }));
    k.push_back(real_at("environment", "projection_window", "progress search window (m)",
                        [](RunConfig& c) -> double& { return c.limits.projection_window; }));
    k.push_back(real_at("environment", "noise_amplitude",
                        "multiplicative wheel noise, uniform in +/- this (0 = off)",
                        [](RunConfig& c) -> double& { return c.noise.amplitude; }));
    k.push_back(real_at("environment", "start_offset", "start lateral offset range (line widths)",
                        [](RunConfig& c) -> double& { return c.start_offset; }));

    k.push_back(real_at("agent", "learning_rate", "alpha",
                        [](RunConfig& c) -> double& { return c.learning_rate; }));
    k.push_back(real_at("agent", "discount", "gamma",
                        [](RunConfig& c) -> double& { return c.discount; }));
    k.push_back(real_at("agent", "epsilon", "eps-greedy exploration rate",
                        [](RunConfig& c) -> double& { return c.epsilon; }));
    k.push_back(real_at("agent", "beta", "SA temperature T = 1 / (beta t)",
                        [](RunConfig& c) -> double& { return c.beta; }));
    k.push_back(real_at("agent", "temperature_floor", "lower bound on T",
                        [](RunConfig& c) -> double& { return c.temperature_floor; }));
    k.push_back({"agent", "per_step_temperature", "recalculate T every step instead of per episode",
                 [](RunConfig& c, const std::string& v) { c.per_step_temperature = parse_bool(v); },
                 [](const RunConfig& c) {
                   return std::string(c.per_step_temperature ? "true" : "false");
                 }});
    k.push_back({"agent", "action_set",
                 "miso9 | mimo21 | joint:l,r;... | levels:v,...; empty picks by controller",
                 [](RunConfig& c, const std::string& v) { c.action_set = v; },
                 [](const RunConfig& c) { return c.action_set; }});

    k.push_back(real_at("p_controller", "kp", "proportional gain (per rad)",
                        [](RunConfig& c) -> double& { return c.p.kp; }));
    k.push_back(real_at("p_controller", "base_fraction", "cruise speed as a fraction of w_max",
                        [](RunConfig& c) -> double& { return c.p.base_fraction; }));
    return k;
  }();
  return table;
}

const Key* find_key(const std::string& section, const std::string& name) {
  for (const Key& k : keys()) {
    if (k.section == section && k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config: key '" + section + "' outside a section");
    }
    bool rpm_given = false;
    bool speed_given = false;
    for (const auto& [name, node] : body) {
      const std::string value = node.get_value<std::string>();
      if (section == "robot" && name == "max_wheel_rpm") {
        try {
          cfg.robot.max_wheel_speed = rpm_to_rad_per_s(parse_double(value));
        } catch (const std::invalid_argument& e) {
          throw std::invalid_argument("config: [robot] max_wheel_rpm: " + std::string(e.what()));
        }
        rpm_given = true;
        continue;
      }
      const Key* key = find_key(section, name);
      if (!key) throw std::invalid_argument("config: unknown key [" + section + "] " + name);
      if (section == "robot" && name == "max_wheel_speed") speed_given = true;
      try {
        key->set(cfg, value);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("config: [" + section + "] " + name + ": " + e.what());
      }
    }
    if (rpm_given && speed_given) {
      throw std::invalid_argument("config: give max_wheel_rpm or max_wheel_speed, not both");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  std::string section;
  for (const Key& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
}

std::string config_reference() {
  const RunConfig defaults;
  std::ostringstream out;
  std::string section;
  for (const Key& k : keys()) {
    if (k.section != section) {
      section = k.section;
      out << '[' << section << "]\n";
    }
    std::string value = k.get(defaults);
    if (value.empty()) value = "\"\"";
    out << "  " << k.name << " = " << value << "    " << k.help << '\n';
  }
  return out.str();
}

}  // namespace lfrl
