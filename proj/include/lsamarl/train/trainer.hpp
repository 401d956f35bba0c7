#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "lsamarl/nets/actor_critic.hpp"
#include "lsamarl/sim/config.hpp"
#include "lsamarl/tensor/adam.hpp"
#include "lsamarl/train/gae.hpp"
#include "lsamarl/train/hyperparams.hpp"
#include "lsamarl/train/rollout.hpp"
#include "lsamarl/train/value_norm.hpp"

namespace lsamarl::train {

struct TrainerConfig {
  sim::ScenarioConfig scenario;
  Hyperparams hp;
  nets::EncoderKind encoder = nets::EncoderKind::kLsa;
  bool share_encoder = false;
  std::uint64_t seed = 0;
};

nets::PolicyConfig policy_config(const TrainerConfig& cfg);

struct EpochMetrics {
  int epoch = 0;
  double mean_reward_norm = 0.0;
  double policy_loss = 0.0;  // negated clipped surrogate, averaged over updates
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double crash_rate = 0.0;
};

/// Advantages and targets for every sample of a batch, each (env, agent)
/// trajectory handled separately. Inactive samples get a zero advantage.
AdvantageBuffer compute_gae(const RolloutBatch& batch, double gamma, double lambda);

/// PPO with a shared actor over all CAVs. Owns the environments, the model and
/// the optimiser; one train_epoch() = collect, GAE, shuffled minibatch passes.
class Trainer {
 public:
  explicit Trainer(TrainerConfig cfg);

  EpochMetrics train_epoch();

  const TrainerConfig& config() const { return cfg_; }
  nets::ActorCritic& model() { return model_; }
  const nets::ActorCritic& model() const { return model_; }
  const AdamState& optimizer() const { return adam_; }
  int epochs_done() const { return epoch_; }
  // Entries verified against V_hat = A_hat + V_old since construction.
  std::uint64_t return_identity_checks() const { return identity_checks_; }
  const RolloutBatch& last_batch() const { return last_batch_; }
  const ValueNormalizer& value_normalizer() const { return value_norm_; }

  void save_checkpoint(const std::filesystem::path& path) const;

 private:
  TrainerConfig cfg_;
  nets::ActorCritic model_;
  AdamState adam_;
  std::vector<RolloutWorker> workers_;
  Rng shuffle_rng_;
  ValueNormalizer value_norm_;
  int epoch_ = 0;
  std::uint64_t identity_checks_ = 0;
  RolloutBatch last_batch_;
};

struct EvalOptions {
  int episodes = 10;
  std::uint64_t seed = 0;
  bool greedy = true;  // argmax; otherwise sample from the policy
};

struct EvalResult {
  double mean_reward = 0.0;  // per-episode mean step reward, averaged
  double crash_rate = 0.0;   // crashed CAVs / CAVs
  double mean_speed = 0.0;   // m/s over alive CAV-steps
  double pv_delay = 0.0;     // s per episode: sum dt * max(0, 1 - v_pv / v_target)
};

// Throws std::invalid_argument when episodes < 1.
EvalResult evaluate(const nets::ActorCritic& model, const sim::ScenarioConfig& scenario, const EvalOptions& opts);

/// epoch,mean_reward_norm,policy_loss,value_loss,entropy,clip_fraction,crash_rate
class MetricsCsv {
 public:
  static constexpr const char* kHeader = "epoch,mean_reward_norm,policy_loss,value_loss,entropy,clip_fraction,crash_rate";
  explicit MetricsCsv(std::ostream& out);
  void append(const EpochMetrics& m);

 private:
  std::ostream& out_;
};

}  // namespace lsamarl::train
