// Coarse grid search over P-controller gains on a training track. Prints
// every cell and the best one; the winner goes into configs/p.cfg.
#include <CLI11.hpp>

#include <iostream>
#include <vector>

#include "lfrl/config.hpp"
#include "lfrl/harness.hpp"
#include "lfrl/text.hpp"

using namespace lfrl;

int main(int argc, char** argv) {
  CLI::App app{"Grid search for P-controller gains"};
  std::string config;
  std::vector<double> kps{0.5, 1, 1.5, 2, 3, 4, 6, 8};
  std::vector<double> bases{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t trials = 10;
  app.add_option("--config", config, "base config (defaults when omitted)");
  app.add_option("--kp", kps, "kp values")->delimiter(',');
  app.add_option("--base", bases, "base_fraction values")->delimiter(',');
  app.add_option("--trials", trials, "episodes per cell")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    cfg.controller = ControllerKind::p;
    const Track track = resolve_track(cfg.track);
    double best_score = -1.0;
    PControllerConfig best;
    std::cout << "kp,base_fraction,mean_score,completed\n";
    for (double kp : kps) {
      for (double base : bases) {
        cfg.p = {kp, base};
        const Agent agent = Agent::create(cfg);
        const EvalResult r = evaluate(agent, cfg, track, trials, cfg.seed);
        double mean = 0.0;
        std::size_t completed = 0;
        for (const auto& rec : r.records) {
          mean += rec.score;
          completed += rec.outcome == Outcome::completed;
        }
        mean /= static_cast<double>(trials);
        std::cout << format_double(kp) << ',' << format_double(base) << ',' << format_double(mean)
                  << ',' << completed << '\n';
        if (mean > best_score) {
          best_score = mean;
          best = cfg.p;
        }
      }
    }
    std::cout << "best: kp = " << format_double(best.kp)
              << ", base_fraction = " << format_double(best.base_fraction)
              << ", mean score = " << format_double(best_score) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
