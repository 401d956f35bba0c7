#include "lsamarl/experiment/cli.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lsamarl/experiment/experiment.hpp"

namespace lsamarl::experiment {

namespace fs = std::filesystem;

namespace {

struct Flags {
  int scenario = 1;
  std::string algo = "mappo_lsa";
  std::string encoder;
  std::optional<int> n_obs;
  std::string mask = "full";
  std::vector<std::uint64_t> seeds{0};
  int epochs = kDefaultEpochs;
  std::string out = "runs";
  int rollout_length = train::Hyperparams{}.rollout_length;
  int n_envs = train::Hyperparams{}.n_envs;
  int passes = train::Hyperparams{}.passes;
  int minibatches = train::Hyperparams{}.minibatches;
  double lr = train::Hyperparams{}.learning_rate;
  int eval_episodes = 10;
  int checkpoint_every = 0;
  bool quiet = false;

  std::vector<int> ns{kDefaultAblationNs.begin(), kDefaultAblationNs.end()};
  std::vector<std::string> masks;

  std::vector<std::string> dirs;
  int episodes = 10;
  std::uint64_t eval_seed = 1000;
  bool sample = false;

  std::string csv;
  bool moving_average = false;
  int window = 10;
};

ExperimentSpec build_spec(const Flags& f) {
  ExperimentSpec s;
  s.scenario = f.scenario;
  s.algorithm = parse_algorithm(f.algo);
  if (!f.encoder.empty()) s.encoder = parse_encoder(f.encoder);
  s.n_obs = f.n_obs;
  s.mask = parse_mask(f.mask);
  s.seeds = f.seeds;
  s.epochs = f.epochs;
  s.out = f.out;
  s.hp.rollout_length = f.rollout_length;
  s.hp.n_envs = f.n_envs;
  s.hp.passes = f.passes;
  s.hp.minibatches = f.minibatches;
  s.hp.learning_rate = f.lr;
  s.eval_episodes = f.eval_episodes;
  s.checkpoint_every = f.checkpoint_every;
  s.validate();
  return s;
}

void add_spec_flags(CLI::App& app, Flags& f) {
  app.add_option("--scenario", f.scenario, "Scenario 1..5")->capture_default_str();
  app.add_option("--algo", f.algo, "mappo_lsa, mappo, ippo_lsa or ippo")->capture_default_str();
  app.add_option("--encoder", f.encoder, "Override the algorithm's encoder: lsa or flatten");
  app.add_option("--n-obs", f.n_obs, "Observed vehicles per agent (default: the scenario's)");
  app.add_option("--mask", f.mask, "full, no_position, no_presence_priority, no_velocity or add_angles")
      ->capture_default_str();
  app.add_option("--seeds", f.seeds, "Comma-separated seeds")->delimiter(',')->capture_default_str();
  app.add_option("--epochs", f.epochs, "Training epochs per seed")->capture_default_str();
  app.add_option("--out", f.out, "Output root")->capture_default_str();
  app.add_option("--rollout-length", f.rollout_length, "Steps per environment per epoch")->capture_default_str();
  app.add_option("--n-envs", f.n_envs, "Parallel environments")->capture_default_str();
  app.add_option("--passes", f.passes, "Optimisation passes per epoch")->capture_default_str();
  app.add_option("--minibatches", f.minibatches, "Minibatches per pass")->capture_default_str();
  app.add_option("--lr", f.lr, "Learning rate")->capture_default_str();
  app.add_option("--eval-episodes", f.eval_episodes, "Greedy evaluation episodes after training (0 skips)")
      ->capture_default_str();
  app.add_option("--checkpoint-every", f.checkpoint_every, "Extra checkpoints every k epochs")->capture_default_str();
  app.add_flag("--quiet", f.quiet, "No per-epoch progress");
}

void print_reports(std::ostream& out, const std::vector<RunReport>& reports) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  for (const auto& r : reports) {
    s << r.spec.id() << ": final reward " << r.reward_mean << " +/- " << r.reward_std << ", crash rate "
      << r.crash_mean << " +/- " << r.crash_std << " over " << r.runs.size() << " seed(s)\n";
    for (const auto& run : r.runs) {
      s << "  seed " << run.seed << ": reward " << run.final_reward << ", crash " << run.final_crash_rate;
      if (run.eval) s << ", greedy eval reward " << run.eval->mean_reward << " crash " << run.eval->crash_rate;
      s << "  (" << run.metrics_csv.string() << ")\n";
    }
  }
  out << s.str();
}

void save_comparison(const fs::path& path, const std::vector<RunReport>& reports) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  write_comparison_csv(f, reports);
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent PPO with local state attention on a highway merge"};
  app.set_config("--config", "", "INI/TOML file supplying any flag; command-line flags win");
  app.require_subcommand(1);
  Flags f;
  add_spec_flags(app, f);

  auto* train_cmd = app.add_subcommand("train", "Train one spec over its seeds");
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate the final checkpoints of run directories");
  eval_cmd->add_option("runs", f.dirs, "Run directories (<out>/<spec>/seed_<s>)")->required();
  eval_cmd->add_option("--episodes", f.episodes, "Episodes per run")->capture_default_str();
  eval_cmd->add_option("--eval-seed", f.eval_seed, "Episode seed")->capture_default_str();
  eval_cmd->add_flag("--sample", f.sample, "Sample actions instead of taking the argmax");
  auto* ablate_n_cmd = app.add_subcommand("ablate-n", "One run per observed-vehicle count");
  ablate_n_cmd->add_option("--ns", f.ns, "Comma-separated N values")->delimiter(',')->capture_default_str();
  auto* ablate_f_cmd = app.add_subcommand("ablate-features", "One run per observation feature mask");
  ablate_f_cmd->add_option("--masks", f.masks, "Comma-separated masks (default: all five)")->delimiter(',');
  auto* report_cmd = app.add_subcommand("report", "Merge run directories into curves and a summary table");
  report_cmd->add_option("dirs", f.dirs, "Run directories or parents of them")->required();
  report_cmd->add_option("--csv", f.csv, "Curve CSV path (default: <out>/report.csv)");
  report_cmd->add_flag("--moving-average", f.moving_average, "Add a trailing moving-average column");
  report_cmd->add_option("--window", f.window, "Moving-average window")->capture_default_str();
  for (auto* sub : {train_cmd, eval_cmd, ablate_n_cmd, ablate_f_cmd, report_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::ostream* log = f.quiet ? nullptr : &err;
    if (*train_cmd) {
      const auto spec = build_spec(f);
      const auto report = run(spec, log);
      save_comparison(spec.out / spec.id() / "summary.csv", {report});
      print_reports(out, {report});
    } else if (*eval_cmd) {
      if (f.episodes < 1) throw UsageError("--episodes must be at least 1");
      std::ostringstream s;
      s << std::fixed << std::setprecision(4);
      s << "run,mean_reward,crash_rate,mean_speed,pv_delay\n";
      for (const auto& d : f.dirs) {
        const auto r = evaluate_run(d, train::EvalOptions{f.episodes, f.eval_seed, !f.sample});
        s << d << ',' << r.mean_reward << ',' << r.crash_rate << ',' << r.mean_speed << ',' << r.pv_delay << '\n';
      }
      out << s.str();
    } else if (*ablate_n_cmd) {
      const auto base = build_spec(f);
      const auto reports = ablate_n(base, f.ns, log);
      save_comparison(base.out / "ablate_n.csv", reports);
      write_comparison_csv(out, reports);
    } else if (*ablate_f_cmd) {
      const auto base = build_spec(f);
      std::vector<sim::FeatureMask> masks;
      for (const auto& m : f.masks) masks.push_back(parse_mask(m));
      if (f.masks.empty()) masks.assign(kAllMasks.begin(), kAllMasks.end());
      const auto reports = ablate_features(base, masks, log);
      save_comparison(base.out / "ablate_features.csv", reports);
      write_comparison_csv(out, reports);
    } else if (*report_cmd) {
      if (f.window < 1) throw UsageError("--window must be at least 1");
      std::vector<fs::path> dirs(f.dirs.begin(), f.dirs.end());
      const auto report = collect_report(dirs);
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';
      if (report.curves.empty()) throw std::runtime_error("no readable runs");
      const fs::path csv_path = f.csv.empty() ? fs::path(f.out) / "report.csv" : fs::path(f.csv);
      if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
      std::ofstream csv(csv_path, std::ios::binary);
      write_curve_csv(csv, report, ReportOptions{f.moving_average, f.window});
      if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
      write_summary_table(out, report);
      out << "curves: " << csv_path.string() << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace lsamarl::experiment
