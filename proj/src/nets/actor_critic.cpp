#include "lsamarl/nets/actor_critic.hpp"

#include <stdexcept>

#include "lsamarl/nets/distribution.hpp"
#include "lsamarl/tensor/ops.hpp"

namespace lsamarl::nets {

namespace {

std::string actor_prefix(const PolicyConfig& c) { return c.share_encoder ? "lsa." : "actor.lsa."; }
std::string critic_prefix(const PolicyConfig& c) { return c.share_encoder ? "lsa." : "critic.lsa."; }

lsa::LsaDims lsa_dims(const PolicyConfig& c) { return lsa::LsaDims::for_observation(c.n_obs, c.n_features); }

std::vector<std::size_t> actor_sizes(const PolicyConfig& c) {
  return {c.encoded_size(), c.hidden, c.hidden, kActionCount};
}
std::vector<std::size_t> critic_sizes(const PolicyConfig& c) {
  return {c.critic_input_size(), c.hidden, c.hidden, 1};
}

}  // namespace

std::string to_string(EncoderKind e) { return e == EncoderKind::kLsa ? "lsa" : "flatten"; }
std::string to_string(CriticScope s) { return s == CriticScope::kJoint ? "joint" : "local"; }

EncoderKind parse_encoder(std::string_view s) {
  if (s == "lsa") return EncoderKind::kLsa;
  if (s == "flatten") return EncoderKind::kFlatten;
  throw std::invalid_argument("unknown encoder '" + std::string(s) + "' (valid: lsa, flatten)");
}

CriticScope parse_critic_scope(std::string_view s) {
  if (s == "joint") return CriticScope::kJoint;
  if (s == "local") return CriticScope::kLocal;
  throw std::invalid_argument("unknown critic scope '" + std::string(s) + "' (valid: joint, local)");
}

ActorCritic::ActorCritic(PolicyConfig cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg_.n_agents == 0) throw std::invalid_argument("policy needs at least one agent");
  Rng rng = make_rng({seed, 0x5eed});
  if (cfg_.encoder == EncoderKind::kLsa) {
    actor_enc_.emplace(params_, actor_prefix(cfg_), lsa_dims(cfg_), rng);
    if (!cfg_.share_encoder) critic_enc_.emplace(params_, critic_prefix(cfg_), lsa_dims(cfg_), rng);
  }
  actor_ = Mlp(params_, "actor.", actor_sizes(cfg_), true, rng);
  critic_ = Mlp(params_, "critic.", critic_sizes(cfg_), false, rng);
  if (cfg_.share_encoder) critic_enc_ = actor_enc_;
}

ActorCritic::ActorCritic(PolicyConfig cfg, ParamSet params) : cfg_(cfg), params_(std::move(params)) {
  if (cfg_.n_agents == 0) throw std::invalid_argument("policy needs at least one agent");
  bind_all();
}

void ActorCritic::bind_all() {
  if (cfg_.encoder == EncoderKind::kLsa) {
    actor_enc_ = lsa::LsaEncoder::bind(params_, actor_prefix(cfg_), lsa_dims(cfg_));
    critic_enc_ = lsa::LsaEncoder::bind(params_, critic_prefix(cfg_), lsa_dims(cfg_));
  }
  actor_ = Mlp::bind(params_, "actor.", actor_sizes(cfg_), true);
  critic_ = Mlp::bind(params_, "critic.", critic_sizes(cfg_), false);
}

Var ActorCritic::encode_actor(Graph& g, const ParamSet& params, Var obs) const {
  if (actor_enc_) return actor_enc_->encode(g, params, obs);
  return ops::reshape(obs, obs.rows() / cfg_.n_obs, cfg_.encoded_size());
}

Var ActorCritic::encode_critic(Graph& g, const ParamSet& params, Var obs) const {
  if (critic_enc_) return critic_enc_->encode(g, params, obs);
  return ops::reshape(obs, obs.rows() / cfg_.n_obs, cfg_.encoded_size());
}

Var ActorCritic::actor_logits(Graph& g, const ParamSet& params, Var obs) const {
  return actor_.forward(g, params, encode_actor(g, params, obs));
}

Var ActorCritic::critic_values(Graph& g, const ParamSet& params, Var obs) const {
  const std::size_t per_sample = cfg_.critic_obs_count() * cfg_.n_obs;
  if (obs.rows() % per_sample != 0) {
    throw std::invalid_argument("critic input rows are not a multiple of " + std::to_string(per_sample));
  }
  Var encoded = encode_critic(g, params, obs);  // (B*c) x K, row-major, so B x (c*K) is a free reshape
  return critic_.forward(g, params, ops::reshape(encoded, obs.rows() / per_sample, cfg_.critic_input_size()));
}

}  // namespace lsamarl::nets
