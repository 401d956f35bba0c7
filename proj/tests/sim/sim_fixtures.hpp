#pragma once

#include <vector>

#include "lsamarl/sim/world.hpp"

namespace fixture {

using namespace lsamarl::sim;

// One vehicle at lane center, cruising at `speed` with the same target.
inline VehicleRecord vehicle(int id, VehicleKind kind, int lane, double x, double speed,
                             const ScenarioConfig& cfg) {
  VehicleRecord v;
  v.id = id;
  v.kind = kind;
  v.lane = v.target_lane = lane;
  v.x = x;
  v.y = cfg.road.lane_center(lane);
  v.vx = speed;
  v.target_speed = speed;
  return v;
}

// Hand-built world; the PV slot (last) is parked off the road unless given.
inline WorldState world(const ScenarioConfig& cfg, std::vector<VehicleRecord> vs) {
  WorldState s;
  s.road = cfg.road;
  s.vehicles = std::move(vs);
  return s;
}

inline VehicleRecord parked_pv(int id, const ScenarioConfig& cfg) {
  auto v = vehicle(id, VehicleKind::kPv, RoadGeometry::kLeftLane, 0.0, 0.0, cfg);
  v.exited = true;
  return v;
}

// Two-CAV, HDV-free configuration for hand-built worlds.
inline ScenarioConfig bare_config(int n_cav = 2, int n_hdv = 0) {
  ScenarioConfig cfg = ScenarioConfig::preset(1);
  cfg.n_cav = n_cav;
  cfg.n_hdv = n_hdv;
  return cfg;
}

}  // namespace fixture
