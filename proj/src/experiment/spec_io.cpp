#include <fstream>

#include <json.hpp>

#include "lsamarl/experiment/experiment.hpp"

namespace lsamarl::experiment {

using nlohmann::json;

std::string spec_to_json(const ExperimentSpec& spec, std::uint64_t seed) {
  const auto& hp = spec.hp;
  const auto scenario = spec.scenario_config();
  json j;
  j["spec_id"] = spec.id();
  j["scenario"] = spec.scenario;
  j["algorithm"] = to_string(spec.algorithm);
  j["encoder"] = spec.encoder ? json(nets::to_string(*spec.encoder)) : json(nullptr);
  j["n_obs"] = spec.n_obs ? json(*spec.n_obs) : json(nullptr);
  j["mask"] = sim::to_string(spec.mask);
  j["seed"] = seed;
  j["epochs"] = spec.epochs;
  j["eval_episodes"] = spec.eval_episodes;
  j["checkpoint_every"] = spec.checkpoint_every;
  j["hyperparams"] = {{"gamma", hp.gamma},
                      {"lambda", hp.lambda},
                      {"clip", hp.clip},
                      {"critic_coef", hp.critic_coef},
                      {"entropy_coef", hp.entropy_coef},
                      {"passes", hp.passes},
                      {"minibatches", hp.minibatches},
                      {"rollout_length", hp.rollout_length},
                      {"n_envs", hp.n_envs},
                      {"learning_rate", hp.learning_rate},
                      {"max_grad_norm", hp.max_grad_norm},
                      {"value_norm", hp.value_norm},
                      {"value_norm_decay", hp.value_norm_decay}};
  // Resolved values, for readers that do not know the presets.
  j["resolved"] = {{"encoder", nets::to_string(spec.effective_encoder())},
                   {"critic_scope", nets::to_string(spec.critic_scope())},
                   {"n_cav", scenario.n_cav},
                   {"n_hdv", scenario.n_hdv},
                   {"n_obs", scenario.n_obs},
                   {"n_features", scenario.n_features()},
                   {"horizon", scenario.horizon}};
  return j.dump(2);
}

RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    const json j = json::parse(in);
    RunConfig rc;
    auto& s = rc.spec;
    s.scenario = j.at("scenario").get<int>();
    s.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (!j.at("encoder").is_null()) s.encoder = parse_encoder(j.at("encoder").get<std::string>());
    if (!j.at("n_obs").is_null()) s.n_obs = j.at("n_obs").get<int>();
    s.mask = parse_mask(j.at("mask").get<std::string>());
    rc.seed = j.at("seed").get<std::uint64_t>();
    s.seeds = {rc.seed};
    s.epochs = j.at("epochs").get<int>();
    s.eval_episodes = j.value("eval_episodes", s.eval_episodes);
    s.checkpoint_every = j.value("checkpoint_every", s.checkpoint_every);
    const auto& h = j.at("hyperparams");
    auto& hp = s.hp;
    hp.gamma = h.at("gamma").get<double>();
    hp.lambda = h.at("lambda").get<double>();
    hp.clip = h.at("clip").get<double>();
    hp.critic_coef = h.at("critic_coef").get<double>();
    hp.entropy_coef = h.at("entropy_coef").get<double>();
    hp.passes = h.at("passes").get<int>();
    hp.minibatches = h.at("minibatches").get<int>();
    hp.rollout_length = h.at("rollout_length").get<int>();
    hp.n_envs = h.at("n_envs").get<int>();
    hp.learning_rate = h.at("learning_rate").get<double>();
    hp.max_grad_norm = h.at("max_grad_norm").get<double>();
    hp.value_norm = h.at("value_norm").get<bool>();
    hp.value_norm_decay = h.at("value_norm_decay").get<double>();
    s.out = path.parent_path().parent_path().parent_path();
    s.validate();
    if (j.at("spec_id").get<std::string>() != s.id())
      throw std::runtime_error("spec_id does not match the recorded fields");
    return rc;
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace lsamarl::experiment
