#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsamarl/nets/actor_critic.hpp"
#include "lsamarl/sim/env.hpp"
#include "lsamarl/tensor/init.hpp"
#include "lsamarl/train/value_norm.hpp"

namespace lsamarl::train {

/// One environment plus its private random stream. Episodes continue across
/// rollouts and reset automatically when they end.
struct RolloutWorker {
  sim::HighwayEnv env;
  Rng rng;
  std::vector<sim::ObservationMatrix> obs;
  std::size_t episode_crashes = 0;  // CAVs crashed so far in the running episode
  double episode_reward = 0.0;      // reward summed over the running episode
  std::size_t episode_steps = 0;

  RolloutWorker(const sim::ScenarioConfig& cfg, Rng stream);
  void reset_episode();
};

struct RolloutStats {
  double mean_reward = 0.0;           // per-episode mean step reward, averaged over episodes
  std::size_t finished_episodes = 0;  // episodes that ended inside the rollout
  std::size_t crashed_cavs = 0;       // CAV crashes in those episodes
  std::size_t cav_episodes = 0;       // n_cav * finished_episodes

  // mean_reward and crash_rate fall back to the running episodes when none
  // finished.
  double crash_rate = 0.0;
};

/// Samples are ordered [env][t][agent]. Agents that had crashed or left the
/// road before a step keep a sample with active = 0 (excluded from the losses)
/// whose value is the mean value of the agents still driving, so advantage
/// chains run on until the episode itself ends.
struct RolloutBatch {
  std::size_t n_envs = 0;
  std::size_t steps = 0;
  std::size_t n_agents = 0;
  std::size_t n_obs = 0;
  std::size_t n_features = 0;

  Tensor observations;  // (samples * N) x X
  std::vector<std::size_t> actions;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> rewards;
  std::vector<double> dones;
  std::vector<double> active;
  // Bootstrap for episode ends that are not terminal (horizon reached, or
  // the CAVs left the road); 0 otherwise.
  std::vector<double> truncation_values;
  std::vector<double> bootstrap_values;  // V(o_T) per (env, agent)
  RolloutStats stats;

  std::size_t samples() const { return n_envs * steps * n_agents; }
  std::size_t index(std::size_t env, std::size_t t, std::size_t agent) const {
    return (env * steps + t) * n_agents + agent;
  }

  // Stack of the chosen samples' own observations: (|idx| * N) x X.
  Tensor actor_input(std::span<const std::size_t> idx) const;
  // Joint scope: every agent's observation at the sample's step, in agent
  // order, (|idx| * n * N) x X. Local scope: same as actor_input.
  Tensor critic_input(std::span<const std::size_t> idx, nets::CriticScope scope) const;
};

// Stacks observations row-wise into one (count * N) x X tensor.
Tensor stack_observations(std::span<const sim::ObservationMatrix> obs);

/// Runs `steps` policy steps in every worker with actions sampled from the
/// shared actor. Log-probs and values come from the model as passed in;
/// critic outputs are mapped through `value_norm` to the return scale.
RolloutBatch collect_rollout(std::span<RolloutWorker> workers, const nets::ActorCritic& model, std::size_t steps,
                             const ValueNormalizer& value_norm = ValueNormalizer(false));

}  // namespace lsamarl::train
