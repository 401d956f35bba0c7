#pragma once

#include <optional>

#include "lsamarl/sim/world.hpp"

namespace lsamarl::sim {

struct ControlDecision {
  double acceleration = 0.0;
  int lane_change = 0;  // -1 right, 0 keep, +1 left
};

// IDM acceleration for a follower at speed v with desired speed v0, clamped
// to [-decel_limit, accel_max]. Without a leader only the free-road term applies.
double idm_acceleration(const IdmParams& p, double v, double v0, std::optional<Neighbor> leader);

// Longitudinal IDM against every leader the vehicle currently has (both lanes
// while it changes lane).
double scripted_acceleration(const WorldState& state, const ScenarioConfig& cfg, std::size_t index);

// Intelligent Driver Model plus MOBIL lane change with HDV politeness.
ControlDecision hdv_control(const WorldState& state, const ScenarioConfig& cfg, std::size_t index);

// Same laws targeting twice the HDV speed, with zero politeness: the priority
// vehicle only changes lane to overtake and never yields.
ControlDecision pv_control(const WorldState& state, const ScenarioConfig& cfg, std::size_t index);

// Proportional speed tracking for CAVs.
double cav_acceleration(const VehicleRecord& v, const VehicleParams& p);

// Applies a CAV meta-action: speed steps adjust target_speed, lane actions
// start a one-step lane change. Lane actions without a valid adjacent lane
// degrade to IDLE. Returns true if a lane change started.
bool apply_action(VehicleRecord& vehicle, Action action, const ScenarioConfig& cfg);

// Lane reachable from `lane` at longitudinal position x in direction dir
// (+1 left, -1 right), or nullopt.
std::optional<int> adjacent_lane(const RoadGeometry& road, int lane, int dir, double x);

}  // namespace lsamarl::sim
