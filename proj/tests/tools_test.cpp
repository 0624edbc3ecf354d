#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "lfrl/config.hpp"
#include "lfrl/plot.hpp"

using namespace lfrl;
namespace fs = std::filesystem;

namespace {

std::string config_text(const RunConfig& cfg) {
  std::ostringstream out;
  write_config(out, cfg);
  return out.str();
}

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lfrl_tools_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliRun {
  int code;
  std::string output;
};

CliRun cli(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const fs::path log = dir / "cli.log";
  const std::string cmd = env + " " + std::string(LFRL_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const RunConfig defaults;
  EXPECT_EQ(config_text(parse("")), config_text(defaults));
  EXPECT_EQ(config_text(parse(config_text(defaults))), config_text(defaults));
}

TEST(Config, KeysApply) {
  const RunConfig cfg = parse(
      "; comment\n[run]\ncontroller = sa_q_mimo\nepisodes = 7\nseed = 42\n"
      "[robot]\nmax_wheel_rpm = 60\n[environment]\nnoise_amplitude = 0.05\nsensor_count = 16\n"
      "[agent]\nbeta = 0.5\nper_step_temperature = true\n[p_controller]\nkp = 1.5\n");
  EXPECT_EQ(cfg.controller, ControllerKind::sa_q_mimo);
  EXPECT_EQ(cfg.episodes, 7u);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_NEAR(cfg.robot.max_wheel_speed, 2 * 3.14159265358979 , 1e-9);
  EXPECT_EQ(cfg.noise.amplitude, 0.05);
  EXPECT_EQ(cfg.sensor_count, 16u);
  EXPECT_EQ(cfg.beta, 0.5);
  EXPECT_TRUE(cfg.per_step_temperature);
  EXPECT_EQ(cfg.p.kp, 1.5);
  EXPECT_EQ(config_text(parse(config_text(cfg))), config_text(cfg));
}

TEST(Config, Rejects) {
  EXPECT_THROW(parse("[run]\nepisode = 3\n"), std::invalid_argument);
  EXPECT_THROW(parse("[nowhere]\nx = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse("[run]\nepisodes = many\n"), std::invalid_argument);
  EXPECT_THROW(parse("[agent]\nepsilon = 2\n"), std::invalid_argument);
  EXPECT_THROW(parse("[robot]\nmax_wheel_rpm = 60\nmax_wheel_speed = 6\n"), std::invalid_argument);
  EXPECT_THROW(parse("[run]\ncontroller = sa_q_mimo\n[agent]\naction_set = miso9\n"),
               std::invalid_argument);
}

TEST(Config, BundledConfigsLoad) {
  for (const char* name : {"p", "eps_q_miso", "sa_q_miso", "sa_q_mimo"}) {
    const RunConfig cfg = load_config(fs::path(LFRL_SOURCE_DIR) / "configs" / (std::string(name) + ".cfg"));
    EXPECT_EQ(to_string(cfg.controller), name);
  }
  EXPECT_FALSE(config_reference().empty());
}

TEST(Plot, ScoreChartAxisSpansEpisodes) {
  std::vector<EpisodeRecord> recs;
  for (std::size_t i = 1; i <= 137; ++i) recs.push_back({i, static_cast<double>(i % 17), Outcome::lost_track});
  const std::string svg = score_chart_svg(recs);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, std::regex("id=\"x-axis\" data-min=\"([^\"]+)\" data-max=\"([^\"]+)\"")));
  EXPECT_EQ(m[1], "1");
  EXPECT_EQ(m[2], "137");
  EXPECT_EQ(score_chart_svg(recs), svg);
  EXPECT_NE(svg.find("Episode"), std::string::npos);
  EXPECT_NE(svg.find("Score"), std::string::npos);
  EXPECT_THROW(score_chart_svg({}), std::invalid_argument);
}

TEST(Plot, EmptyRecordsWarn) {
  const fs::path dir = scratch("empty");
  std::ostringstream warn;
  EXPECT_TRUE(emit_plots({}, nullptr, {}, dir, warn).empty());
  EXPECT_NE(warn.str().find("warning"), std::string::npos);
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Plot, TrajectoryMarksStartAndEnd) {
  RunConfig cfg;
  cfg.controller = ControllerKind::p;
  cfg.start_offset = 0.0;
  Agent agent = Agent::create(cfg);
  const Track oval = bundled_track("oval_simple");
  RngStreams rng(1);
  std::vector<Pose> poses;
  const EpisodeRecord rec = run_episode(cfg, agent, oval, rng, Mode::greedy, &poses);
  ASSERT_EQ(rec.outcome, Outcome::completed);
  const std::string svg = trajectory_svg(oval, poses);
  std::regex circle("<circle cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\"");
  std::vector<std::pair<double, double>> centres;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), circle); it != std::sregex_iterator(); ++it) {
    centres.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  }
  ASSERT_EQ(centres.size(), 2u);
  // a completed lap on a closed course ends near where it began
  std::smatch scale;
  ASSERT_TRUE(std::regex_search(svg, scale, std::regex("scale ([0-9.e+]+) px/m")));
  const double px_per_m = std::stod(scale[1]);
  const double gap = std::hypot(centres[0].first - centres[1].first, centres[0].second - centres[1].second);
  EXPECT_LT(gap / px_per_m, 0.3);
  EXPECT_NE(svg.find("id=\"track\""), std::string::npos);

  const fs::path dir = scratch("traj");
  std::ostringstream warn;
  const auto files = emit_plots({rec}, &oval, poses, dir, warn);
  EXPECT_EQ(files.size(), 2u);
  EXPECT_EQ(slurp(dir / "trajectory.svg"), svg);
}

TEST(Cli, UsageErrors) {
  const fs::path dir = scratch("usage");
  EXPECT_EQ(cli("", dir).code, 2);
  EXPECT_EQ(cli("train", dir).code, 2);
  EXPECT_EQ(cli("frobnicate", dir).code, 2);
  const CliRun missing = cli("train --config " + (dir / "nope.cfg").string() + " --out " + dir.string(), dir);
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.output.find("error:"), std::string::npos);
  const CliRun help = cli("--help", dir);
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.output.find("max_wheel_rpm"), std::string::npos);
}

TEST(Cli, TrainEvalAndPlot) {
  const fs::path dir = scratch("train");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "[run]\ncontroller = eps_q_miso\nepisodes = 4\neval_trials = 2\n"
           "[environment]\nmax_steps = 2000\n";
  }
  const fs::path out = dir / "out";
  const CliRun train = cli("train --config " + (dir / "run.cfg").string() + " --out " + out.string() + " --plot", dir);
  ASSERT_EQ(train.code, 0) << train.output;
  for (const char* f : {"config.cfg", "learning_curve.csv", "checkpoint.ckpt", "trajectory.csv",
                        "scores.svg", "trajectory.svg"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const RunConfig echoed = load_config(out / "config.cfg");
  EXPECT_EQ(echoed.episodes, 4u);
  EXPECT_EQ(config_text(echoed), slurp(out / "config.cfg"));

  std::ifstream curve(out / "learning_curve.csv");
  const auto records = read_learning_curve(curve);
  EXPECT_EQ(records.size(), 4u);

  const CliRun eval = cli("eval --checkpoint " + (out / "checkpoint.ckpt").string() + " --config " +
                           (out / "config.cfg").string() + " --track oval_simple --out " + out.string(),
                       dir);
  ASSERT_EQ(eval.code, 0) << eval.output;
  EXPECT_NE(eval.output.find("best of 2 on oval_simple"), std::string::npos) << eval.output;

  const CliRun again = cli("train --config " + (dir / "run.cfg").string() + " --out " + (dir / "again").string(), dir);
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(dir / "again" / "learning_curve.csv"), slurp(out / "learning_curve.csv"));
  EXPECT_EQ(slurp(dir / "again" / "checkpoint.ckpt"), slurp(out / "checkpoint.ckpt"));
}

TEST(Cli, OutputDirFromEnvironment) {
  const fs::path dir = scratch("env");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "[run]\ncontroller = p\nepisodes = 1\n";
  }
  const CliRun r = cli("train --config " + (dir / "run.cfg").string(), dir, "LF_RL_OUT=" + (dir / "envout").string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir / "envout" / "learning_curve.csv"));
}

TEST(Cli, TrackExportMatchesData) {
  const fs::path dir = scratch("track");
  const CliRun r = cli("track --track complex_01 --out " + (dir / "c.json").string(), dir);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(slurp(dir / "c.json"), slurp(fs::path(LFRL_SOURCE_DIR) / "data/tracks/complex_01.json"));
}
