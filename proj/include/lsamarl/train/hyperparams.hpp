#pragma once

#include "lsamarl/nets/actor_critic.hpp"

namespace lsamarl::train {

struct Hyperparams {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;           // epsilon, shared by the policy and critic clips
  double critic_coef = 1.0;    // beta1
  double entropy_coef = 0.01;  // beta2
  int passes = 4;              // optimisation passes per batch
  int minibatches = 4;
  int rollout_length = 128;    // steps per env per epoch
  int n_envs = 4;
  double learning_rate = 3e-4;
  double max_grad_norm = 0.5;
  bool value_norm = true;         // critic regresses normalised targets
  double value_norm_decay = 0.95;  // per-epoch decay of the running statistics
  nets::CriticScope critic_scope = nets::CriticScope::kJoint;

  // Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

}  // namespace lsamarl::train
