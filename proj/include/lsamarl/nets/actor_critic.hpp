#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lsamarl/lsa/encoder.hpp"
#include "lsamarl/nets/mlp.hpp"

namespace lsamarl::nets {

enum class EncoderKind { kLsa, kFlatten };
enum class CriticScope { kLocal, kJoint };

std::string to_string(EncoderKind e);
std::string to_string(CriticScope s);
EncoderKind parse_encoder(std::string_view s);     // throws std::invalid_argument
CriticScope parse_critic_scope(std::string_view s);  // throws std::invalid_argument

struct PolicyConfig {
  std::size_t n_agents = 2;
  std::size_t n_obs = 4;
  std::size_t n_features = 6;
  EncoderKind encoder = EncoderKind::kLsa;
  CriticScope critic_scope = CriticScope::kJoint;
  bool share_encoder = false;  // one LSA instance feeding both heads
  std::size_t hidden = 256;

  std::size_t encoded_size() const { return n_obs * n_features; }  // K
  std::size_t critic_input_size() const {
    return critic_scope == CriticScope::kJoint ? n_agents * encoded_size() : encoded_size();
  }
  std::size_t critic_obs_count() const { return critic_scope == CriticScope::kJoint ? n_agents : 1; }
};

/// Shared-parameter actor and critic with their state encoders. Parameter
/// names: "actor.l{k}.{W|b}", "critic.l{k}.{W|b}", and for the LSA encoder
/// "actor.lsa.*" / "critic.lsa.*", or "lsa.*" when the encoder is shared.
class ActorCritic {
 public:
  ActorCritic(PolicyConfig cfg, std::uint64_t seed);
  // Adopts existing parameters (e.g. a loaded snapshot); names and shapes must match.
  ActorCritic(PolicyConfig cfg, ParamSet params);

  const PolicyConfig& config() const { return cfg_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  const std::optional<lsa::LsaEncoder>& actor_encoder() const { return actor_enc_; }
  const std::optional<lsa::LsaEncoder>& critic_encoder() const { return critic_enc_; }

  // obs: (B*N) x X stack of local observations -> B x K.
  Var encode_actor(Graph& g, Var obs) const { return encode_actor(g, params_, obs); }
  Var encode_critic(Graph& g, Var obs) const { return encode_critic(g, params_, obs); }

  // B x 5 tanh-bounded logits.
  Var actor_logits(Graph& g, Var obs) const { return actor_logits(g, params_, obs); }
  // obs: (B*c*N) x X with c = critic_obs_count(); for the joint scope each
  // sample holds all agents' observations in agent-id order. Result B x 1.
  Var critic_values(Graph& g, Var obs) const { return critic_values(g, params_, obs); }

  // Same, evaluated with `params`, which must have this model's layout (for
  // example a copy of params()).
  Var encode_actor(Graph& g, const ParamSet& params, Var obs) const;
  Var encode_critic(Graph& g, const ParamSet& params, Var obs) const;
  Var actor_logits(Graph& g, const ParamSet& params, Var obs) const;
  Var critic_values(Graph& g, const ParamSet& params, Var obs) const;

 private:
  void bind_all();

  PolicyConfig cfg_;
  ParamSet params_;
  std::optional<lsa::LsaEncoder> actor_enc_;
  std::optional<lsa::LsaEncoder> critic_enc_;
  Mlp actor_;
  Mlp critic_;
};

}  // namespace lsamarl::nets
