#include "lsamarl/experiment/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lsamarl/tensor/snapshot.hpp"

namespace lsamarl::experiment {

namespace {

constexpr std::string_view kAlgorithmNames[] = {"mappo_lsa", "mappo", "ippo_lsa", "ippo"};

template <class Range>
std::string join_names(const Range& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

struct Moments {
  double mean = 0.0, std = 0.0;
};

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(var / static_cast<double>(xs.size()));
  return m;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string_view to_string(Algorithm a) { return kAlgorithmNames[static_cast<int>(a)]; }

Algorithm parse_algorithm(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (kAlgorithmNames[i] == name) return static_cast<Algorithm>(i);
  throw UsageError("unknown algorithm '" + std::string(name) + "' (valid: " + join_names(kAlgorithmNames) + ")");
}

sim::FeatureMask parse_mask(std::string_view name) {
  try {
    return sim::parse_feature_mask(name);
  } catch (const std::invalid_argument&) {
    std::vector<std::string> names;
    for (auto m : kAllMasks) names.emplace_back(sim::to_string(m));
    throw UsageError("unknown feature mask '" + std::string(name) + "' (valid: " + join_names(names) + ")");
  }
}

nets::EncoderKind parse_encoder(std::string_view name) {
  try {
    return nets::parse_encoder(name);
  } catch (const std::invalid_argument&) {
    throw UsageError("unknown encoder '" + std::string(name) + "' (valid: lsa, flatten)");
  }
}

nets::EncoderKind ExperimentSpec::effective_encoder() const {
  if (encoder) return *encoder;
  return algorithm == Algorithm::kMappoLsa || algorithm == Algorithm::kIppoLsa ? nets::EncoderKind::kLsa
                                                                                : nets::EncoderKind::kFlatten;
}

nets::CriticScope ExperimentSpec::critic_scope() const {
  return algorithm == Algorithm::kIppoLsa || algorithm == Algorithm::kIppo ? nets::CriticScope::kLocal
                                                                            : nets::CriticScope::kJoint;
}

sim::ScenarioConfig ExperimentSpec::scenario_config() const {
  auto cfg = sim::ScenarioConfig::preset(scenario);
  if (n_obs) cfg.n_obs = *n_obs;
  cfg.feature_mask = mask;
  return cfg;
}

train::TrainerConfig ExperimentSpec::trainer_config(std::uint64_t seed) const {
  train::TrainerConfig cfg;
  cfg.scenario = scenario_config();
  cfg.scenario.seed = seed;
  cfg.hp = hp;
  cfg.hp.critic_scope = critic_scope();
  cfg.encoder = effective_encoder();
  cfg.seed = seed;
  return cfg;
}

std::string ExperimentSpec::id() const {
  std::ostringstream s;
  s << 's' << scenario << '_' << to_string(algorithm) << "_n" << scenario_config().n_obs << '_'
    << sim::to_string(mask);
  if (encoder) s << '_' << nets::to_string(*encoder);
  return s.str();
}

std::filesystem::path ExperimentSpec::run_dir(std::uint64_t seed) const {
  return out / id() / ("seed_" + std::to_string(seed));
}

void ExperimentSpec::validate() const {
  if (scenario < 1 || scenario > 5) throw UsageError("scenario must be in 1..5, got " + std::to_string(scenario));
  if (n_obs && *n_obs < 1) throw UsageError("--n-obs must be at least 1");
  if (seeds.empty()) throw UsageError("at least one seed is required");
  if (epochs < 1) throw UsageError("--epochs must be at least 1");
  if (eval_episodes < 0) throw UsageError("evaluation episodes must be non-negative");
  if (checkpoint_every < 0) throw UsageError("checkpoint interval must be non-negative");
  try {
    hp.validate();
    scenario_config().validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

double final_window_mean(const std::vector<double>& series) {
  if (series.empty()) return 0.0;
  const std::size_t w = std::max<std::size_t>(1, series.size() / 10);
  double sum = 0.0;
  for (std::size_t i = series.size() - w; i < series.size(); ++i) sum += series[i];
  return sum / static_cast<double>(w);
}

RunReport run(const ExperimentSpec& spec, std::ostream* log) {
  spec.validate();
  RunReport report;
  report.spec = spec;
  std::vector<double> rewards, crashes;
  for (std::uint64_t seed : spec.seeds) {
    RunResult r;
    r.seed = seed;
    r.dir = spec.run_dir(seed);
    r.metrics_csv = r.dir / "metrics.csv";
    std::filesystem::create_directories(r.dir);
    write_text(r.dir / "config.json", spec_to_json(spec, seed) + "\n");

    train::Trainer trainer(spec.trainer_config(seed));
    std::ofstream csv(r.metrics_csv, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + r.metrics_csv.string());
    csv << std::setprecision(10);
    train::MetricsCsv metrics(csv);
    std::vector<double> reward_curve, crash_curve;
    for (int e = 0; e < spec.epochs; ++e) {
      const auto m = trainer.train_epoch();
      metrics.append(m);
      reward_curve.push_back(m.mean_reward_norm);
      crash_curve.push_back(m.crash_rate);
      if (spec.checkpoint_every > 0 && m.epoch % spec.checkpoint_every == 0 && m.epoch < spec.epochs)
        trainer.save_checkpoint(r.dir / ("checkpoint_e" + std::to_string(m.epoch) + ".bin"));
      if (log)
        *log << spec.id() << " seed " << seed << " epoch " << m.epoch << '/' << spec.epochs << " reward "
             << m.mean_reward_norm << " crash " << m.crash_rate << '\n';
    }
    if (!csv) throw std::runtime_error("cannot write " + r.metrics_csv.string());
    trainer.save_checkpoint(r.dir / "checkpoint.bin");

    r.final_reward = final_window_mean(reward_curve);
    r.final_crash_rate = final_window_mean(crash_curve);
    if (spec.eval_episodes > 0)
      r.eval = train::evaluate(trainer.model(), trainer.config().scenario,
                               train::EvalOptions{spec.eval_episodes, seed, true});
    rewards.push_back(r.final_reward);
    crashes.push_back(r.final_crash_rate);
    report.runs.push_back(std::move(r));
  }
  const auto rm = moments(rewards), cm = moments(crashes);
  report.reward_mean = rm.mean;
  report.reward_std = rm.std;
  report.crash_mean = cm.mean;
  report.crash_std = cm.std;
  return report;
}

std::vector<RunReport> ablate_n(const ExperimentSpec& base, const std::vector<int>& ns, std::ostream* log) {
  if (ns.empty()) throw UsageError("ablate-n needs at least one N");
  std::vector<ExperimentSpec> specs;
  for (int n : ns) {
    auto s = base;
    s.n_obs = n;
    s.validate();
    specs.push_back(std::move(s));
  }
  std::vector<RunReport> out;
  for (const auto& s : specs) out.push_back(run(s, log));
  return out;
}

std::vector<RunReport> ablate_features(const ExperimentSpec& base, const std::vector<sim::FeatureMask>& masks,
                                       std::ostream* log) {
  if (masks.empty()) throw UsageError("ablate-features needs at least one mask");
  std::vector<RunReport> out;
  for (auto m : masks) {
    auto s = base;
    s.mask = m;
    out.push_back(run(s, log));
  }
  return out;
}

void write_comparison_csv(std::ostream& out, const std::vector<RunReport>& reports) {
  out << kComparisonHeader << '\n';
  const auto old_precision = out.precision(10);
  for (const auto& r : reports) {
    const auto& s = r.spec;
    std::string seeds;
    for (auto seed : s.seeds) seeds += (seeds.empty() ? "" : ";") + std::to_string(seed);
    out << s.id() << ',' << s.scenario << ',' << to_string(s.algorithm) << ',' << nets::to_string(s.effective_encoder())
        << ',' << s.scenario_config().n_obs << ',' << sim::to_string(s.mask) << ',' << seeds << ',' << s.epochs << ','
        << r.reward_mean << ',' << r.reward_std << ',' << r.crash_mean << ',' << r.crash_std << '\n';
  }
  out.precision(old_precision);
}

train::EvalResult evaluate_run(const std::filesystem::path& run_dir, const train::EvalOptions& opts) {
  const auto [spec, seed] = read_run_config(run_dir / "config.json");
  const auto cfg = spec.trainer_config(seed);
  const auto ckpt = run_dir / "checkpoint.bin";
  if (!std::filesystem::exists(ckpt)) throw std::runtime_error("no checkpoint in " + run_dir.string());
  const nets::ActorCritic model(train::policy_config(cfg), load_snapshot(ckpt));
  return train::evaluate(model, cfg.scenario, opts);
}

}  // namespace lsamarl::experiment
