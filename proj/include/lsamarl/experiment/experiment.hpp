#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lsamarl/sim/config.hpp"
#include "lsamarl/train/trainer.hpp"

namespace lsamarl::experiment {

// Bad names or flag values; the CLI maps it to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// mappo* use the joint critic, ippo* a local one; *_lsa encode with LSA and
// the bare names feed the flattened observation to the MLPs.
enum class Algorithm { kMappoLsa, kMappo, kIppoLsa, kIppo };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
// Same as the sim/nets parsers, but raising UsageError.
sim::FeatureMask parse_mask(std::string_view name);
nets::EncoderKind parse_encoder(std::string_view name);

inline constexpr int kDefaultEpochs = 200;
inline constexpr std::array<int, 3> kDefaultAblationNs{2, 4, 6};
inline constexpr std::array<sim::FeatureMask, 5> kAllMasks{
    sim::FeatureMask::kFull, sim::FeatureMask::kNoPosition, sim::FeatureMask::kNoPresencePriority,
    sim::FeatureMask::kNoVelocity, sim::FeatureMask::kAddAngles};

struct ExperimentSpec {
  int scenario = 1;
  Algorithm algorithm = Algorithm::kMappoLsa;
  std::optional<nets::EncoderKind> encoder;  // overrides the algorithm's encoder
  std::optional<int> n_obs;                  // overrides the scenario's N
  sim::FeatureMask mask = sim::FeatureMask::kFull;
  std::vector<std::uint64_t> seeds{0};
  int epochs = kDefaultEpochs;
  std::filesystem::path out = "runs";
  train::Hyperparams hp;
  int eval_episodes = 10;    // greedy evaluation after the last epoch; 0 skips it
  int checkpoint_every = 0;  // extra checkpoints every k epochs; 0 = final only

  nets::EncoderKind effective_encoder() const;
  nets::CriticScope critic_scope() const;
  sim::ScenarioConfig scenario_config() const;
  train::TrainerConfig trainer_config(std::uint64_t seed) const;

  // e.g. "s2_mappo_lsa_n4_no_velocity"; encoder overrides append "_flatten"/"_lsa".
  std::string id() const;
  std::filesystem::path run_dir(std::uint64_t seed) const;

  // Throws UsageError.
  void validate() const;
};

// config.json of a run directory: the spec fields plus the seed.
std::string spec_to_json(const ExperimentSpec& spec, std::uint64_t seed);
struct RunConfig {
  ExperimentSpec spec;  // seeds = {seed}; out = the runs root
  std::uint64_t seed = 0;
};
// Throws std::runtime_error on unreadable or malformed files.
RunConfig read_run_config(const std::filesystem::path& path);

struct RunResult {
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::filesystem::path metrics_csv;
  double final_reward = 0.0;      // mean over the last tenth of epochs
  double final_crash_rate = 0.0;  // same window, training rollouts
  std::optional<train::EvalResult> eval;
};

struct RunReport {
  ExperimentSpec spec;
  std::vector<RunResult> runs;
  double reward_mean = 0.0;
  double reward_std = 0.0;  // population std across seeds
  double crash_mean = 0.0;
  double crash_std = 0.0;
};

// Mean over the last max(1, n / 10) entries.
double final_window_mean(const std::vector<double>& series);

/// Trains every seed of `spec` and writes <out>/<id>/seed_<s>/ with
/// config.json, metrics.csv, checkpoint.bin (and checkpoint_e<k>.bin when
/// checkpoint_every > 0). Progress lines go to `log` when given.
RunReport run(const ExperimentSpec& spec, std::ostream* log = nullptr);

// One run per N (resp. mask), everything else from `base`.
std::vector<RunReport> ablate_n(const ExperimentSpec& base, const std::vector<int>& ns, std::ostream* log = nullptr);
std::vector<RunReport> ablate_features(const ExperimentSpec& base, const std::vector<sim::FeatureMask>& masks,
                                       std::ostream* log = nullptr);

inline constexpr const char* kComparisonHeader =
    "spec_id,scenario,algorithm,encoder,n_obs,mask,seeds,epochs,final_reward_mean,final_reward_std,"
    "crash_rate_mean,crash_rate_std";
void write_comparison_csv(std::ostream& out, const std::vector<RunReport>& reports);

// Evaluates the final checkpoint of a run directory with its recorded spec.
train::EvalResult evaluate_run(const std::filesystem::path& run_dir, const train::EvalOptions& opts);

struct ReportOptions {
  bool moving_average = false;
  int window = 10;
};

struct CurveSummary {
  std::string spec_id;
  std::size_t seeds = 0;
  std::vector<double> mean;  // per epoch, over seeds
  std::vector<double> std;   // population std
  double final_mean = 0.0;
  double final_std = 0.0;
};

struct ReportResult {
  std::vector<CurveSummary> curves;        // sorted by spec id
  std::vector<std::string> warnings;       // skipped directories
};

inline constexpr const char* kCurveHeader = "epoch,spec_id,mean,std";

/// Merges run directories (or parents holding them) by spec id. Directories
/// without a readable config.json and metrics.csv are skipped with a warning.
ReportResult collect_report(const std::vector<std::filesystem::path>& dirs);
// Tidy CSV: epoch,spec_id,mean,std[,moving_average].
void write_curve_csv(std::ostream& out, const ReportResult& report, const ReportOptions& opts);
// Fixed-width table of final-window mean and std per spec.
void write_summary_table(std::ostream& out, const ReportResult& report);

// Trailing mean over up to `window` points ending at each index.
std::vector<double> moving_average(const std::vector<double>& xs, int window);

}  // namespace lsamarl::experiment
