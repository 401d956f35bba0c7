#include "lsamarl/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lsamarl/nets/distribution.hpp"
#include "lsamarl/tensor/ops.hpp"
#include "lsamarl/tensor/snapshot.hpp"
#include "lsamarl/train/losses.hpp"

namespace lsamarl::train {

void Hyperparams::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(std::string("invalid hyperparameter: ") + what); };
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must lie in [0, 1]");
  if (!(clip > 0.0)) fail("clip must be positive");
  if (!(critic_coef > 0.0)) fail("critic_coef must be positive");
  if (!(entropy_coef >= 0.0)) fail("entropy_coef must be non-negative");
  if (passes < 1) fail("passes must be at least 1");
  if (minibatches < 1) fail("minibatches must be at least 1");
  if (rollout_length < 1) fail("rollout_length must be at least 1");
  if (n_envs < 1) fail("n_envs must be at least 1");
  if (!(learning_rate >= 0.0)) fail("learning_rate must be non-negative");
  if (!(max_grad_norm > 0.0)) fail("max_grad_norm must be positive");
  if (!(value_norm_decay > 0.0 && value_norm_decay < 1.0)) fail("value_norm_decay must lie in (0, 1)");
}

nets::PolicyConfig policy_config(const TrainerConfig& cfg) {
  nets::PolicyConfig pc;
  pc.n_agents = static_cast<std::size_t>(cfg.scenario.n_cav);
  pc.n_obs = static_cast<std::size_t>(cfg.scenario.n_obs);
  pc.n_features = static_cast<std::size_t>(cfg.scenario.n_features());
  pc.encoder = cfg.encoder;
  pc.critic_scope = cfg.hp.critic_scope;
  pc.share_encoder = cfg.share_encoder;
  return pc;
}

AdvantageBuffer compute_gae(const RolloutBatch& batch, double gamma, double lambda) {
  AdvantageBuffer out;
  const std::size_t total = batch.samples();
  out.deltas.assign(total, 0.0);
  out.advantages.assign(total, 0.0);
  out.returns.assign(total, 0.0);
  std::vector<double> r(batch.steps), v(batch.steps), d(batch.steps);
  for (std::size_t e = 0; e < batch.n_envs; ++e) {
    for (std::size_t a = 0; a < batch.n_agents; ++a) {
      for (std::size_t t = 0; t < batch.steps; ++t) {
        const std::size_t s = batch.index(e, t, a);
        r[t] = batch.rewards[s] + gamma * batch.truncation_values[s];
        v[t] = batch.values[s];
        d[t] = batch.dones[s];
      }
      const auto one = compute_gae(r, v, d, batch.bootstrap_values[e * batch.n_agents + a], gamma, lambda);
      for (std::size_t t = 0; t < batch.steps; ++t) {
        const std::size_t s = batch.index(e, t, a);
        if (batch.active[s] == 0.0) {
          out.returns[s] = out.advantages[s] + batch.values[s];
          continue;
        }
        out.deltas[s] = one.deltas[t];
        out.advantages[s] = one.advantages[t];
        out.returns[s] = one.returns[t];
      }
    }
  }
  return out;
}

Trainer::Trainer(TrainerConfig cfg)
    : cfg_(std::move(cfg)),
      model_(policy_config(cfg_), cfg_.seed),
      adam_(model_.params(), AdamConfig{.learning_rate = cfg_.hp.learning_rate}),
      shuffle_rng_(make_rng({cfg_.seed, 0x5u})),
      value_norm_(cfg_.hp.value_norm, cfg_.hp.value_norm_decay) {
  cfg_.hp.validate();
  cfg_.scenario.validate();
  for (int e = 0; e < cfg_.hp.n_envs; ++e) {
    workers_.emplace_back(cfg_.scenario, make_rng({cfg_.seed, static_cast<std::uint64_t>(e)}));
  }
}

EpochMetrics Trainer::train_epoch() {
  const auto& hp = cfg_.hp;
  RolloutBatch batch = collect_rollout(workers_, model_, static_cast<std::size_t>(hp.rollout_length), value_norm_);
  AdvantageBuffer adv = compute_gae(batch, hp.gamma, hp.lambda);
  identity_checks_ += verify_return_identity(adv, batch.values);

  std::vector<std::size_t> active;
  for (std::size_t s = 0; s < batch.samples(); ++s) {
    if (batch.active[s] != 0.0) active.push_back(s);
  }

  EpochMetrics m;
  m.epoch = ++epoch_;
  m.mean_reward_norm = batch.stats.mean_reward;
  m.crash_rate = batch.stats.crash_rate;
  if (active.empty()) {
    last_batch_ = std::move(batch);
    return m;
  }
  {
    std::vector<double> targets;
    for (auto s : active) targets.push_back(adv.returns[s]);
    value_norm_.update(targets);
  }

  // Advantage normalisation over the batch's active samples.
  double mean = 0.0, var = 0.0;
  for (auto s : active) mean += adv.advantages[s];
  mean /= static_cast<double>(active.size());
  for (auto s : active) var += (adv.advantages[s] - mean) * (adv.advantages[s] - mean);
  const double stddev = std::max(std::sqrt(var / static_cast<double>(active.size())), 1e-8);

  const std::size_t n_mb = std::min<std::size_t>(static_cast<std::size_t>(hp.minibatches), active.size());
  const double n_agents = static_cast<double>(cfg_.scenario.n_cav);
  std::size_t updates = 0;
  for (int pass = 0; pass < hp.passes; ++pass) {
    std::shuffle(active.begin(), active.end(), shuffle_rng_);
    for (std::size_t k = 0; k < n_mb; ++k) {
      const std::size_t lo = active.size() * k / n_mb, hi = active.size() * (k + 1) / n_mb;
      const std::span<const std::size_t> idx(active.data() + lo, hi - lo);
      std::vector<std::size_t> actions;
      std::vector<double> old_lp, norm_adv, old_v, targets;
      for (auto s : idx) {
        actions.push_back(batch.actions[s]);
        old_lp.push_back(batch.log_probs[s]);
        norm_adv.push_back((adv.advantages[s] - mean) / stddev);
        old_v.push_back(value_norm_.normalize(batch.values[s]));
        targets.push_back(value_norm_.normalize(adv.returns[s]));
      }

      Graph g;
      Var logits = model_.actor_logits(g, g.constant(batch.actor_input(idx)));
      Var new_lp = nets::log_prob_of(logits, actions);
      Var entropy = ops::mean(nets::entropy_of(logits));
      Var values = model_.critic_values(g, g.constant(batch.critic_input(idx, hp.critic_scope)));
      Var pol = policy_objective(new_lp, old_lp, norm_adv, hp.clip);
      Var crit = critic_loss(values, old_v, targets, hp.clip);
      Var loss = total_loss(pol, crit, entropy, hp.critic_coef, hp.entropy_coef, n_agents);

      const double loss_value = loss.value()[0];
      if (!std::isfinite(loss_value)) {
        throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch_) + ", pass " +
                                 std::to_string(pass) + ", minibatch " + std::to_string(k) +
                                 ": policy=" + std::to_string(pol.value()[0]) +
                                 " critic=" + std::to_string(crit.value()[0]) +
                                 " entropy=" + std::to_string(entropy.value()[0]));
      }
      m.policy_loss -= pol.value()[0];
      m.value_loss += crit.value()[0];
      m.entropy += entropy.value()[0];
      m.clip_fraction += clip_fraction(new_lp.value(), old_lp, hp.clip);
      ++updates;

      GradientMap grads = g.backward(loss);
      clip_grad_norm(grads, hp.max_grad_norm);
      adam_step(model_.params(), grads, adam_);
    }
  }
  const double u = static_cast<double>(updates);
  m.policy_loss /= u;
  m.value_loss /= u;
  m.entropy /= u;
  m.clip_fraction /= u;
  last_batch_ = std::move(batch);
  return m;
}

void Trainer::save_checkpoint(const std::filesystem::path& path) const { save_snapshot(path, model_.params()); }

EvalResult evaluate(const nets::ActorCritic& model, const sim::ScenarioConfig& scenario, const EvalOptions& opts) {
  if (opts.episodes < 1) throw std::invalid_argument("evaluate needs at least one episode");
  const auto& pc = model.config();
  if (pc.n_agents != static_cast<std::size_t>(scenario.n_cav) ||
      pc.n_obs != static_cast<std::size_t>(scenario.n_obs) ||
      pc.n_features != static_cast<std::size_t>(scenario.n_features())) {
    throw std::invalid_argument("model dimensions do not match the scenario");
  }
  Rng rng = make_rng({opts.seed, 0xe7a1u});
  sim::HighwayEnv env(scenario);
  const double v_target = scenario.vehicle.pv_target_speed();
  EvalResult res;
  double speed_sum = 0.0;
  std::size_t speed_samples = 0, crashed = 0;
  for (int ep = 0; ep < opts.episodes; ++ep) {
    auto obs = env.reset(rng());
    double reward_sum = 0.0, delay = 0.0;
    int steps = 0;
    while (!env.done()) {
      Graph g;
      const Tensor logits = model.actor_logits(g, g.constant(stack_observations(obs))).value();
      std::vector<sim::Action> actions(pc.n_agents, sim::Action::kIdle);
      for (std::size_t a = 0; a < pc.n_agents; ++a) {
        if (!env.agent_active(static_cast<int>(a))) continue;
        const nets::ActionDistribution d(
            std::span(logits.data().data() + a * nets::kActionCount, nets::kActionCount));
        actions[a] = static_cast<sim::Action>(opts.greedy ? d.argmax() : nets::sample_action(d, rng).action);
      }
      auto result = env.step(actions);
      reward_sum += result.reward;
      ++steps;
      crashed += result.info.newly_crashed_cavs.size();
      const auto& vs = env.state().vehicles;
      for (int a = 0; a < scenario.n_cav; ++a) {
        if (vs[a].alive()) {
          speed_sum += vs[a].vx;
          ++speed_samples;
        }
      }
      const int pv = env.state().pv_index();
      if (pv >= 0 && vs[pv].alive()) delay += scenario.policy_period * std::max(0.0, 1.0 - vs[pv].vx / v_target);
      obs = std::move(result.observations);
    }
    res.mean_reward += reward_sum / steps;
    res.pv_delay += delay;
  }
  const double eps = static_cast<double>(opts.episodes);
  res.mean_reward /= eps;
  res.pv_delay /= eps;
  res.crash_rate = static_cast<double>(crashed) / (eps * scenario.n_cav);
  res.mean_speed = speed_samples > 0 ? speed_sum / static_cast<double>(speed_samples) : 0.0;
  return res;
}

MetricsCsv::MetricsCsv(std::ostream& out) : out_(out) {
  out_.precision(10);
  out_ << kHeader << '\n';
}

void MetricsCsv::append(const EpochMetrics& m) {
  out_ << m.epoch << ',' << m.mean_reward_norm << ',' << m.policy_loss << ',' << m.value_loss << ',' << m.entropy
       << ',' << m.clip_fraction << ',' << m.crash_rate << '\n';
  out_.flush();
}

}  // namespace lsamarl::train
