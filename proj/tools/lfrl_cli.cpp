#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lfrl/config.hpp"
#include "lfrl/harness.hpp"
#include "lfrl/plot.hpp"
#include "lfrl/text.hpp"

namespace fs = std::filesystem;
using namespace lfrl;

namespace {

struct Options {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string checkpoint;
  std::string track;
  std::size_t trials = 0;  // 0: eval_trials from the config
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t jobs = 1;
  bool plot = false;
  std::string curve;
  std::string trajectory;
};

fs::path output_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("LF_RL_OUT"); env && *env) return env;
  return "lfrl_out";
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

RunConfig config_for(const Options& o, std::size_t i = 0) {
  RunConfig cfg = load_config(o.configs.at(i));
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

void echo_config(const fs::path& dir, const RunConfig& cfg, const std::string& name = "config.cfg") {
  auto out = open_out(dir / name);
  write_config(out, cfg);
}

std::vector<Pose> greedy_trajectory(const RunConfig& cfg, const Agent& agent, const Track& track,
                                    std::uint64_t seed, EpisodeRecord* record = nullptr) {
  Agent local = agent;
  RngStreams rng(seed);
  const Track course = randomize_direction(track, rng.direction.next());
  std::vector<Pose> poses;
  EpisodeRecord rec = run_episode(cfg, local, course, rng, Mode::greedy, &poses);
  rec.episode = 1;
  if (record) *record = rec;
  return poses;
}

int run_train(const Options& o) {
  const RunConfig cfg = config_for(o);
  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  echo_config(dir, cfg);

  Agent agent = o.checkpoint.empty() ? Agent::create(cfg) : Agent::load(o.checkpoint);
  const fs::path curve_path = dir / "learning_curve.csv";
  auto curve = open_out(curve_path);
  curve << kLearningCurveHeader << '\n';
  const TrainResult result = train(cfg, std::move(agent), [&](const EpisodeRecord& r) {
    curve << to_csv_row(r) << '\n';
    curve.flush();
    if (!curve) {
      throw std::runtime_error("failed writing " + curve_path.string() + " at episode " +
                               std::to_string(r.episode));
    }
  });
  curve.close();
  result.agent.save(dir / "checkpoint.ckpt");

  const auto& recs = result.records;
  const std::size_t tail = std::min<std::size_t>(100, recs.size());
  double tail_mean = 0.0;
  std::size_t completed = 0;
  for (std::size_t i = recs.size() - tail; i < recs.size(); ++i) tail_mean += recs[i].score;
  for (const auto& r : recs) completed += r.outcome == Outcome::completed;
  tail_mean /= static_cast<double>(tail);
  std::cout << "trained " << to_string(cfg.controller) << " for " << recs.size() << " episodes on "
            << cfg.track << " (seed " << cfg.seed << "): mean score of last " << tail << " "
            << format_double(tail_mean) << ", completed " << completed << '\n';

  if (o.plot) {
    const Track track = resolve_track(cfg.track);
    const auto poses = greedy_trajectory(cfg, result.agent, track, cfg.seed);
    {
      auto t = open_out(dir / "trajectory.csv");
      write_trajectory(t, poses);
    }
    RngStreams rng(cfg.seed);
    const Track course = randomize_direction(track, rng.direction.next());
    for (const auto& p : emit_plots(recs, &course, poses, dir, std::cerr)) {
      std::cout << "wrote " << p.string() << '\n';
    }
  }
  std::cout << "outputs in " << dir.string() << '\n';
  return 0;
}

int run_eval(const Options& o) {
  RunConfig cfg = o.configs.empty() ? RunConfig{} : config_for(o);
  if (o.seed) cfg.seed = *o.seed;
  const Agent agent = Agent::load(o.checkpoint);
  cfg.controller = agent.kind;
  const std::string track_name = o.track.empty() ? cfg.eval_track : o.track;
  const Track track = resolve_track(track_name);
  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  echo_config(dir, cfg);

  const std::uint64_t eval_seed = Rng::stream(cfg.seed, "evaluation").next();
  const std::size_t trials = o.trials ? o.trials : cfg.eval_trials;
  const EvalResult result = evaluate(agent, cfg, track, trials, eval_seed);
  for (const auto& r : result.records) {
    std::cout << "trial " << r.episode << ": score " << format_double(r.score) << " ("
              << to_string(r.outcome) << ", " << r.segments << " segments, "
              << format_double(r.elapsed) << " s)\n";
  }
  std::cout << "best of " << trials << " on " << track_name << ": " << format_double(result.best)
            << '\n';
  {
    auto out = open_out(dir / "eval.csv");
    write_learning_curve(out, result.records);
  }
  if (o.plot) {
    RngStreams rng(eval_seed);
    std::size_t best = 0;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      if (result.records[i].score > result.records[best].score) best = i;
    }
    // Replay trials up to the best one to recover its trajectory.
    Agent local = agent;
    std::vector<Pose> poses;
    Track course = track;
    for (std::size_t i = 0; i <= best; ++i) {
      course = randomize_direction(track, rng.direction.next());
      run_episode(cfg, local, course, rng, Mode::greedy, &poses);
    }
    for (const auto& p : emit_plots(result.records, &course, poses, dir, std::cerr)) {
      std::cout << "wrote " << p.string() << '\n';
    }
  }
  return 0;
}

int run_compare(const Options& o) {
  if (o.configs.size() < 2) throw std::invalid_argument("compare needs at least two --config files");
  std::vector<CompareEntry> entries;
  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < o.configs.size(); ++i) {
    RunConfig cfg = config_for(o, i);
    std::string label = fs::path(o.configs[i]).stem().string();
    for (const auto& e : entries) {
      if (e.label == label) label += "_" + std::to_string(i + 1);
    }
    echo_config(dir, cfg, label + ".cfg");
    entries.push_back({label, cfg});
  }
  const ComparisonResult result = compare(entries, o.seeds, o.jobs);
  {
    auto out = open_out(dir / "comparison.csv");
    write_comparison(out, result);
  }
  std::cout << "controller, best-of-" << entries.front().config.eval_trials << " per seed, median\n";
  for (const auto& name : result.controllers()) {
    std::cout << name << ':';
    for (const auto& row : result.rows) {
      if (row.controller == name) std::cout << ' ' << format_double(row.best_score);
    }
    std::cout << " | median " << format_double(result.median_best(name)) << '\n';
  }
  std::cout << "wrote " << (dir / "comparison.csv").string() << '\n';
  return 0;
}

int run_simulate(const Options& o) {
  RunConfig cfg = config_for(o);
  Agent agent = o.checkpoint.empty() ? Agent::create(cfg) : Agent::load(o.checkpoint);
  cfg.controller = agent.kind;
  const std::string track_name = o.track.empty() ? cfg.track : o.track;
  const Track track = resolve_track(track_name);
  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  echo_config(dir, cfg);

  RngStreams rng(cfg.seed);
  const Track course = randomize_direction(track, rng.direction.next());
  std::vector<Pose> poses;
  EpisodeRecord rec = run_episode(cfg, agent, course, rng, Mode::greedy, &poses);
  rec.episode = 1;
  std::cout << to_string(agent.kind) << " on " << track_name << ": score " << format_double(rec.score)
            << " (" << to_string(rec.outcome) << ", " << rec.segments << " segments, "
            << format_double(rec.elapsed) << " s, " << rec.steps << " steps)\n";
  {
    auto out = open_out(dir / "trajectory.csv");
    write_trajectory(out, poses);
  }
  if (o.plot) {
    const fs::path svg = dir / "trajectory.svg";
    auto out = open_out(svg);
    out << trajectory_svg(course, poses);
    std::cout << "wrote " << svg.string() << '\n';
  }
  return 0;
}

int run_plot(const Options& o) {
  std::vector<EpisodeRecord> records;
  {
    std::ifstream in(o.curve);
    if (!in) throw std::runtime_error("cannot open " + o.curve);
    records = read_learning_curve(in);
  }
  std::vector<Pose> poses;
  std::optional<Track> track;
  if (!o.trajectory.empty()) {
    std::ifstream in(o.trajectory);
    if (!in) throw std::runtime_error("cannot open " + o.trajectory);
    poses = read_trajectory(in);
    track = resolve_track(o.track.empty() ? "oval_simple" : o.track);
  }
  for (const auto& p : emit_plots(records, track ? &*track : nullptr, poses, output_dir(o), std::cerr)) {
    std::cout << "wrote " << p.string() << '\n';
  }
  return 0;
}

int run_track(const Options& o) {
  const Track track = resolve_track(o.track);
  const std::string text = track_to_json(track);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    auto out = open_out(o.out);
    out << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-follower robot simulator with P and Q-learning controllers"};
  app.footer("Config keys and defaults (INI sections):\n" + config_reference() +
             "\nOutput directory: --out, else $LF_RL_OUT, else ./lfrl_out");
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--plot", o.plot, "also write SVG plots");
  };

  auto* train = app.add_subcommand("train", "train a controller and write its learning curve");
  train->add_option("--config", o.configs, "config file")->required()->expected(1);
  train->add_option("--checkpoint", o.checkpoint, "continue from this checkpoint");
  add_common(train);

  auto* eval = app.add_subcommand("eval", "greedy best-of-N evaluation of a checkpoint");
  eval->add_option("--checkpoint", o.checkpoint, "trained agent")->required();
  eval->add_option("--config", o.configs, "config file (defaults when omitted)")->expected(1);
  eval->add_option("--track", o.track, "track name or JSON path (default: eval_track)");
  eval->add_option("--trials", o.trials, "evaluation episodes")->check(CLI::PositiveNumber);
  add_common(eval);

  auto* cmp = app.add_subcommand("compare", "train and evaluate several configs over seeds");
  cmp->add_option("--config", o.configs, "config files, one per controller")->required();
  cmp->add_option("--seeds", o.seeds, "seeds")->delimiter(',');
  cmp->add_option("--jobs", o.jobs, "concurrent trainings")->check(CLI::PositiveNumber);
  cmp->add_option("--out", o.out, "output directory");

  auto* sim = app.add_subcommand("simulate", "run one greedy episode and record the trajectory");
  sim->add_option("--config", o.configs, "config file")->required()->expected(1);
  sim->add_option("--checkpoint", o.checkpoint, "trained agent (default: untrained)");
  sim->add_option("--track", o.track, "track name or JSON path (default: track)");
  add_common(sim);

  auto* plot = app.add_subcommand("plot", "render SVG plots from CSV outputs");
  plot->add_option("--curve", o.curve, "learning-curve CSV")->required();
  plot->add_option("--trajectory", o.trajectory, "trajectory CSV");
  plot->add_option("--track", o.track, "track for the trajectory overlay");
  plot->add_option("--out", o.out, "output directory");

  auto* trk = app.add_subcommand("track", "print a track as JSON");
  trk->add_option("--track", o.track, "bundled name or JSON path")->required();
  trk->add_option("--out", o.out, "write to this file instead of stdout");

  if (argc <= 1) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*train) return run_train(o);
    if (*eval) return run_eval(o);
    if (*cmp) return run_compare(o);
    if (*sim) return run_simulate(o);
    if (*plot) return run_plot(o);
    if (*trk) return run_track(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
