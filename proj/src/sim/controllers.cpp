#include "lsamarl/sim/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsamarl::sim {

double idm_acceleration(const IdmParams& p, double v, double v0, std::optional<Neighbor> leader) {
  double free_term = 1.0;
  if (v0 > 1e-9) {
    free_term = 1.0 - std::pow(std::max(v, 0.0) / v0, p.exponent);
  } else {
    free_term = v > 0.0 ? -1.0 : 0.0;
  }
  double a = p.accel_max * free_term;
  if (leader) {
    const double dv = v - leader->speed;
    const double desired =
        p.jam_gap + std::max(0.0, v * p.time_headway + v * dv / (2.0 * std::sqrt(p.accel_max * p.comfort_decel)));
    const double gap = std::max(leader->gap, 1e-3);
    a -= p.accel_max * (desired / gap) * (desired / gap);
  }
  return std::clamp(a, -p.decel_limit, p.accel_max);
}

double scripted_acceleration(const WorldState& state, const ScenarioConfig& cfg, std::size_t index) {
  const auto& me = state.vehicles.at(index);
  if (!me.alive()) return 0.0;
  double a = idm_acceleration(cfg.idm, me.vx, me.target_speed,
                              find_leader(state, me.lane, me.x, me.id, cfg.vehicle, cfg.idm.lookahead));
  if (me.changing_lane()) {
    a = std::min(a, idm_acceleration(cfg.idm, me.vx, me.target_speed,
                                     find_leader(state, me.target_lane, me.x, me.id, cfg.vehicle,
                                                 cfg.idm.lookahead)));
  }
  return a;
}

std::optional<int> adjacent_lane(const RoadGeometry& road, int lane, int dir, double x) {
  const int to = lane + dir;
  if (to < RoadGeometry::kRampLane || to > RoadGeometry::kLeftLane || dir == 0) return std::nullopt;
  const bool touches_ramp = lane == RoadGeometry::kRampLane || to == RoadGeometry::kRampLane;
  if (touches_ramp && !road.in_merge_window(x)) return std::nullopt;
  return to;
}

namespace {

ControlDecision mobil_control(const WorldState& state, const ScenarioConfig& cfg, std::size_t index,
                              double politeness) {
  const auto& vs = state.vehicles;
  const auto& me = vs.at(index);
  const auto& idm = cfg.idm;
  const auto& dims = cfg.vehicle;
  ControlDecision out;
  out.acceleration = scripted_acceleration(state, cfg, index);
  if (!me.alive() || me.changing_lane()) return out;

  const auto leader = find_leader(state, me.lane, me.x, me.id, dims, idm.lookahead);
  const double a_self = idm_acceleration(idm, me.vx, me.target_speed, leader);

  // Old follower: with me ahead now, with my leader ahead after I leave.
  double old_follower_gain = 0.0;
  if (auto f = find_follower(state, me.lane, me.x, me.id, dims, idm.lookahead); f && vs[f->index].alive()) {
    const auto& fv = vs[f->index];
    const double before = idm_acceleration(idm, fv.vx, fv.target_speed, Neighbor{index, f->gap, me.vx});
    std::optional<Neighbor> after;
    if (leader) after = Neighbor{leader->index, vs[leader->index].x - fv.x - dims.length, leader->speed};
    old_follower_gain = idm_acceleration(idm, fv.vx, fv.target_speed, after) - before;
  }

  double best = cfg.mobil.threshold;
  for (int dir : {+1, -1}) {
    const auto lane = adjacent_lane(state.road, me.lane, dir, me.x);
    if (!lane || *lane == RoadGeometry::kRampLane) continue;
    const auto new_leader = find_leader(state, *lane, me.x, me.id, dims, idm.lookahead);
    const auto new_follower = find_follower(state, *lane, me.x, me.id, dims, idm.lookahead);
    if ((new_leader && new_leader->gap <= 0.0) || (new_follower && new_follower->gap <= 0.0)) continue;

    const double a_self_new = idm_acceleration(idm, me.vx, me.target_speed, new_leader);
    if (a_self_new < -cfg.mobil.safe_decel) continue;

    double new_follower_gain = 0.0;
    if (new_follower && vs[new_follower->index].alive()) {
      const auto& nv = vs[new_follower->index];
      std::optional<Neighbor> current;
      if (new_leader) {
        current = Neighbor{new_leader->index, vs[new_leader->index].x - nv.x - dims.length, new_leader->speed};
      }
      const double before = idm_acceleration(idm, nv.vx, nv.target_speed, current);
      const double after = idm_acceleration(idm, nv.vx, nv.target_speed, Neighbor{index, new_follower->gap, me.vx});
      if (after < -cfg.mobil.safe_decel) continue;
      new_follower_gain = after - before;
    }

    const double incentive = a_self_new - a_self + politeness * (new_follower_gain + old_follower_gain);
    if (incentive > best) {
      best = incentive;
      out.lane_change = dir;
    }
  }
  return out;
}

}  // namespace

ControlDecision hdv_control(const WorldState& state, const ScenarioConfig& cfg, std::size_t index) {
  if (state.vehicles.at(index).kind != VehicleKind::kHdv) throw std::invalid_argument("hdv_control on non-HDV");
  return mobil_control(state, cfg, index, cfg.mobil.politeness_hdv);
}

ControlDecision pv_control(const WorldState& state, const ScenarioConfig& cfg, std::size_t index) {
  if (state.vehicles.at(index).kind != VehicleKind::kPv) throw std::invalid_argument("pv_control on non-PV");
  return mobil_control(state, cfg, index, cfg.mobil.politeness_pv);
}

double cav_acceleration(const VehicleRecord& v, const VehicleParams& p) {
  if (!v.alive()) return 0.0;
  return std::clamp(p.cav_speed_gain * (v.target_speed - v.vx), -p.cav_decel_max, p.cav_accel_max);
}

bool apply_action(VehicleRecord& vehicle, Action action, const ScenarioConfig& cfg) {
  if (vehicle.kind != VehicleKind::kCav) throw std::invalid_argument("apply_action on a scripted vehicle");
  const auto& p = cfg.vehicle;
  switch (action) {
    case Action::kFaster:
      vehicle.target_speed = std::min(vehicle.target_speed + p.speed_step, p.v_max);
      return false;
    case Action::kSlower:
      vehicle.target_speed = std::max(vehicle.target_speed - p.speed_step, 0.0);
      return false;
    case Action::kIdle:
      return false;
    case Action::kLaneLeft:
    case Action::kLaneRight: {
      const int dir = action == Action::kLaneLeft ? +1 : -1;
      const auto lane = adjacent_lane(cfg.road, vehicle.lane, dir, vehicle.x);
      if (!lane) return false;
      vehicle.target_lane = *lane;
      vehicle.vy = dir * cfg.road.lane_width / cfg.policy_period;
      return true;
    }
  }
  throw std::invalid_argument("invalid action id");
}

}  // namespace lsamarl::sim
