#pragma once

#include <vector>

#include "lsamarl/sim/world.hpp"

namespace lsamarl::sim {

struct StepEvents {
  std::vector<int> active_cavs;  // CAVs alive when the step began
  bool cav_crashed = false;
  int cav_lane_changes = 0;
};

struct RewardBreakdown {
  double speed = 0.0;     // S
  double crash = 0.0;     // C
  double stall = 0.0;     // St
  double weave = 0.0;     // W
  double priority = 0.0;  // P
  double total = 0.0;
};

// How strongly a CAV blocks the priority vehicle's lane: 1 - d / d_pv for the
// nearest alive CAV ahead within d_pv, 0 when the lane is clear.
double pv_blocking(const WorldState& state, const ScenarioConfig& cfg);

/// Shared cooperative reward in [0, 1]:
///   clamp01(w_speed*S - w_crash*C - w_stall*St - w_weave*W - w_pv*P + offset)
RewardBreakdown compute_reward(const WorldState& state, const StepEvents& events, const ScenarioConfig& cfg);

}  // namespace lsamarl::sim
