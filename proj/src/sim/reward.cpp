#include "lsamarl/sim/reward.hpp"

#include <algorithm>

namespace lsamarl::sim {

double pv_blocking(const WorldState& state, const ScenarioConfig& cfg) {
  const int pv = state.pv_index();
  if (pv < 0 || !state.vehicles[pv].alive()) return 0.0;
  const auto& p = state.vehicles[pv];
  double worst = 0.0;
  for (const auto& v : state.vehicles) {
    if (v.kind != VehicleKind::kCav || !v.alive() || !v.occupies(p.target_lane) || v.x < p.x) continue;
    const double gap = std::max(v.x - p.x - cfg.vehicle.length, 0.0);
    if (gap < cfg.reward.pv_headway) worst = std::max(worst, 1.0 - gap / cfg.reward.pv_headway);
  }
  return worst;
}

RewardBreakdown compute_reward(const WorldState& state, const StepEvents& events, const ScenarioConfig& cfg) {
  RewardBreakdown r;
  const auto& vp = cfg.vehicle;
  const double n = static_cast<double>(events.active_cavs.size());
  int survivors = 0, stalled = 0;
  double speed_sum = 0.0;
  for (int id : events.active_cavs) {
    const auto& v = state.vehicles.at(id);
    if (v.crashed) continue;
    ++survivors;
    speed_sum += std::clamp((v.vx - vp.reward_speed_min) / (vp.v_max - vp.reward_speed_min), 0.0, 1.0);
    if (v.vx < vp.stall_speed) ++stalled;
  }
  r.speed = survivors > 0 ? speed_sum / survivors : 0.0;
  r.crash = events.cav_crashed ? 1.0 : 0.0;
  r.stall = n > 0 ? stalled / n : 0.0;
  r.weave = n > 0 ? events.cav_lane_changes / n : 0.0;
  r.priority = pv_blocking(state, cfg);
  const auto& w = cfg.reward;
  const double raw = w.speed * r.speed - w.crash * r.crash - w.stall * r.stall - w.weave * r.weave -
                     w.pv * r.priority + w.offset;
  r.total = std::clamp(raw, 0.0, 1.0);
  return r;
}

}  // namespace lsamarl::sim
