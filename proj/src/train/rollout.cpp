#include "lsamarl/train/rollout.hpp"

#include <algorithm>
#include <stdexcept>

#include "lsamarl/nets/distribution.hpp"

namespace lsamarl::train {

namespace {

void copy_rows(const Tensor& src, std::size_t src_row, Tensor& dst, std::size_t dst_row, std::size_t rows) {
  const std::size_t cols = src.cols();
  std::copy_n(src.data().begin() + src_row * cols, rows * cols, dst.data().begin() + dst_row * cols);
}

}  // namespace

RolloutWorker::RolloutWorker(const sim::ScenarioConfig& cfg, Rng stream) : env(cfg), rng(std::move(stream)) {
  reset_episode();
}

void RolloutWorker::reset_episode() {
  obs = env.reset(rng());
  episode_crashes = 0;
  episode_reward = 0.0;
  episode_steps = 0;
}

Tensor stack_observations(std::span<const sim::ObservationMatrix> obs) {
  if (obs.empty()) throw std::invalid_argument("no observations to stack");
  const std::size_t rows = obs.front().rows();
  Tensor out = Tensor::zeros(rows * obs.size(), obs.front().cols());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!obs[i].same_shape(obs.front())) throw std::invalid_argument("observations differ in shape");
    copy_rows(obs[i], 0, out, i * rows, rows);
  }
  return out;
}

Tensor RolloutBatch::actor_input(std::span<const std::size_t> idx) const {
  Tensor out = Tensor::zeros(idx.size() * n_obs, n_features);
  for (std::size_t k = 0; k < idx.size(); ++k) copy_rows(observations, idx[k] * n_obs, out, k * n_obs, n_obs);
  return out;
}

Tensor RolloutBatch::critic_input(std::span<const std::size_t> idx, nets::CriticScope scope) const {
  if (scope == nets::CriticScope::kLocal) return actor_input(idx);
  const std::size_t per_sample = n_agents * n_obs;
  Tensor out = Tensor::zeros(idx.size() * per_sample, n_features);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t first = idx[k] - idx[k] % n_agents;  // agent 0 of the same step
    copy_rows(observations, first * n_obs, out, k * per_sample, per_sample);
  }
  return out;
}

RolloutBatch collect_rollout(std::span<RolloutWorker> workers, const nets::ActorCritic& model, std::size_t steps,
                             const ValueNormalizer& value_norm) {
  if (workers.empty() || steps == 0) throw std::invalid_argument("collect_rollout needs workers and steps");
  const auto& pc = model.config();
  RolloutBatch b;
  b.n_envs = workers.size();
  b.steps = steps;
  b.n_agents = pc.n_agents;
  b.n_obs = pc.n_obs;
  b.n_features = pc.n_features;
  const std::size_t n = b.n_agents, total = b.samples();
  b.observations = Tensor::zeros(total * b.n_obs, b.n_features);
  b.actions.assign(total, 0);
  b.log_probs.assign(total, 0.0);
  b.values.assign(total, 0.0);
  b.rewards.assign(total, 0.0);
  b.dones.assign(total, 0.0);
  b.active.assign(total, 0.0);
  b.truncation_values.assign(total, 0.0);
  b.bootstrap_values.assign(b.n_envs * n, 0.0);

  // Critic values of stacked per-env observation sets, one per (env, agent).
  const bool joint = pc.critic_scope == nets::CriticScope::kJoint;
  auto values_of = [&](std::span<const sim::ObservationMatrix> all) {
    Graph g;
    const Tensor v = model.critic_values(g, g.constant(stack_observations(all))).value();
    std::vector<double> out(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) out[i] = value_norm.denormalize(joint ? v[i / n] : v[i]);
    return out;
  };
  auto current_values = [&]() {
    std::vector<sim::ObservationMatrix> all;
    for (auto& w : workers) all.insert(all.end(), w.obs.begin(), w.obs.end());
    return values_of(all);
  };

  double episode_means = 0.0;
  std::size_t running_cavs = 0, running_crashes = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    std::vector<sim::ObservationMatrix> all;
    for (auto& w : workers) all.insert(all.end(), w.obs.begin(), w.obs.end());
    Graph g;
    const Tensor logits = model.actor_logits(g, g.constant(stack_observations(all))).value();
    const std::vector<double> values = current_values();

    for (std::size_t e = 0; e < workers.size(); ++e) {
      auto& w = workers[e];
      std::vector<sim::Action> joint_action(n, sim::Action::kIdle);
      double team_value = 0.0;
      std::size_t alive = 0;
      for (std::size_t a = 0; a < n; ++a) {
        const std::size_t s = b.index(e, t, a), row = e * n + a;
        copy_rows(w.obs[a], 0, b.observations, s * b.n_obs, b.n_obs);
        b.values[s] = values[row];
        if (!w.env.agent_active(static_cast<int>(a))) {
          b.actions[s] = static_cast<std::size_t>(sim::Action::kIdle);
          continue;
        }
        b.active[s] = 1.0;
        team_value += values[row];
        ++alive;
        const nets::ActionDistribution d(std::span(logits.data().data() + row * nets::kActionCount,
                                                   nets::kActionCount));
        const auto pick = nets::sample_action(d, w.rng);
        b.actions[s] = pick.action;
        b.log_probs[s] = pick.log_prob;
        joint_action[a] = static_cast<sim::Action>(pick.action);
      }
      // A retired agent's trajectory follows the team: its value is the mean
      // over the agents still driving.
      team_value = alive > 0 ? team_value / static_cast<double>(alive) : 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        const std::size_t s = b.index(e, t, a);
        if (b.active[s] == 0.0) b.values[s] = team_value;
      }

      auto result = w.env.step(joint_action);
      w.episode_reward += result.reward;
      ++w.episode_steps;
      w.episode_crashes += result.info.newly_crashed_cavs.size();
      const auto& vs = w.env.state().vehicles;
      const bool all_crashed = std::all_of(vs.begin(), vs.begin() + static_cast<std::ptrdiff_t>(n),
                                           [](const auto& v) { return v.crashed; });
      std::vector<double> final_values;
      if (result.done && !all_crashed && w.env.state().t >= w.env.config().horizon) {
        final_values = values_of(result.observations);
      }
      for (std::size_t a = 0; a < n; ++a) {
        const std::size_t s = b.index(e, t, a);
        b.rewards[s] = result.reward;
        if (!result.done) continue;
        b.dones[s] = 1.0;
        // Only a wiped-out team is terminal. The horizon and everyone having
        // left the road cut the episode short; bootstrap from the last values.
        if (all_crashed) continue;
        b.truncation_values[s] = !final_values.empty() && vs[a].alive() ? final_values[a] : b.values[s];
      }
      if (result.done) {
        ++b.stats.finished_episodes;
        b.stats.crashed_cavs += w.episode_crashes;
        episode_means += w.episode_reward / static_cast<double>(w.episode_steps);
        w.reset_episode();
      } else {
        w.obs = std::move(result.observations);
      }
    }
  }
  double running_means = 0.0;
  for (auto& w : workers) {
    running_cavs += n;
    running_crashes += w.episode_crashes;
    if (w.episode_steps > 0) running_means += w.episode_reward / static_cast<double>(w.episode_steps);
  }
  b.bootstrap_values = current_values();

  b.stats.mean_reward = b.stats.finished_episodes > 0
                            ? episode_means / static_cast<double>(b.stats.finished_episodes)
                            : running_means / static_cast<double>(workers.size());
  b.stats.cav_episodes = b.stats.finished_episodes * n;
  if (b.stats.cav_episodes > 0) {
    b.stats.crash_rate = static_cast<double>(b.stats.crashed_cavs) / static_cast<double>(b.stats.cav_episodes);
  } else {
    b.stats.crash_rate = static_cast<double>(running_crashes) / static_cast<double>(running_cavs);
  }
  return b;
}

}  // namespace lsamarl::train
