#include "lsamarl/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lsamarl::sim {

namespace {

struct Slot {
  int lane;
  double x;
};

std::vector<Slot> make_slots(const std::vector<int>& lanes, double x_min, double x_max, double spacing) {
  std::vector<Slot> slots;
  for (int lane : lanes) {
    for (double x = x_min; x <= x_max + 1e-9; x += spacing) slots.push_back({lane, x});
  }
  return slots;
}

void shuffle(std::vector<Slot>& slots, Rng& rng) {
  for (std::size_t i = slots.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(slots[i - 1], slots[std::min(j, i - 1)]);
  }
}

double draw(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace

std::string_view to_string(VehicleKind kind) {
  switch (kind) {
    case VehicleKind::kCav: return "CAV";
    case VehicleKind::kHdv: return "HDV";
    case VehicleKind::kPv: return "PV";
  }
  return "?";
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kLaneLeft: return "LANE_LEFT";
    case Action::kLaneRight: return "LANE_RIGHT";
    case Action::kIdle: return "IDLE";
    case Action::kFaster: return "FASTER";
    case Action::kSlower: return "SLOWER";
  }
  return "?";
}

int WorldState::pv_index() const {
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (vehicles[i].kind == VehicleKind::kPv) return static_cast<int>(i);
  }
  return -1;
}

WorldState initial_state(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  WorldState s;
  s.road = cfg.road;
  s.rng = make_rng({seed, 0x5ce7a110ULL});

  const auto& sp = cfg.spawn;
  auto ramp_slots = make_slots({RoadGeometry::kRampLane}, sp.ramp_x_min, sp.ramp_x_max, sp.spacing);
  auto highway_slots = make_slots({RoadGeometry::kRightLane, RoadGeometry::kLeftLane}, sp.highway_x_min,
                                  sp.highway_x_max, sp.spacing);
  const int ramp_cavs = cfg.ramp_cavs();
  const int highway_cavs = cfg.n_cav - ramp_cavs;
  if (static_cast<int>(ramp_slots.size()) < ramp_cavs ||
      static_cast<int>(highway_slots.size()) < highway_cavs + cfg.n_hdv) {
    throw ConfigError("spawn ranges too small: need " + std::to_string(ramp_cavs) + " ramp and " +
                      std::to_string(highway_cavs + cfg.n_hdv) + " highway slots, have " +
                      std::to_string(ramp_slots.size()) + " and " + std::to_string(highway_slots.size()));
  }
  if (sp.pv_x + sp.spacing > sp.highway_x_min + 1e-9) {
    throw ConfigError("priority vehicle spawn overlaps highway traffic");
  }
  if (sp.ramp_x_max + cfg.vehicle.length / 2 >= cfg.road.merge_end) {
    throw ConfigError("ramp spawn range extends past the end of the ramp");
  }
  shuffle(ramp_slots, s.rng);
  shuffle(highway_slots, s.rng);

  auto add = [&](VehicleKind kind, Slot slot, double speed, double target) {
    VehicleRecord v;
    v.id = static_cast<int>(s.vehicles.size());
    v.kind = kind;
    v.lane = v.target_lane = slot.lane;
    v.x = slot.x;
    v.y = cfg.road.lane_center(slot.lane);
    v.vx = speed;
    v.target_speed = target;
    s.vehicles.push_back(v);
  };

  std::size_t next_highway = 0;
  for (int i = 0; i < cfg.n_cav; ++i) {
    const Slot slot = i < ramp_cavs ? ramp_slots[i] : highway_slots[next_highway++];
    const double speed = draw(s.rng, sp.cav_speed_min, sp.cav_speed_max);
    add(VehicleKind::kCav, slot, speed, speed);
  }
  for (int i = 0; i < cfg.n_hdv; ++i) {
    const double speed = draw(s.rng, sp.hdv_speed_min, sp.hdv_speed_max);
    add(VehicleKind::kHdv, highway_slots[next_highway++], speed, cfg.vehicle.hdv_target_speed);
  }
  add(VehicleKind::kPv, {RoadGeometry::kLeftLane, sp.pv_x}, sp.pv_speed, cfg.vehicle.pv_target_speed());
  return s;
}

std::vector<CrashEvent> collision_check(const WorldState& state, const VehicleParams& dims) {
  std::vector<CrashEvent> pairs;
  const auto& vs = state.vehicles;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!vs[i].present()) continue;
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      if (!vs[j].present()) continue;
      if (std::abs(vs[i].x - vs[j].x) < dims.length && std::abs(vs[i].y - vs[j].y) < dims.width) {
        pairs.push_back({vs[i].id, vs[j].id});
      }
    }
  }
  return pairs;
}

std::vector<int> barrier_check(const WorldState& state, const VehicleParams& dims) {
  std::vector<int> hits;
  const double ramp_edge = state.road.lane_center(RoadGeometry::kRampLane) + state.road.lane_width / 2;
  for (const auto& v : state.vehicles) {
    if (!v.present()) continue;
    if (v.x + dims.length / 2 > state.road.merge_end && v.y - dims.width / 2 < ramp_edge) hits.push_back(v.id);
  }
  return hits;
}

std::optional<Neighbor> find_leader(const WorldState& state, int lane, double x, int exclude_id,
                                    const VehicleParams& dims, double lookahead) {
  std::optional<Neighbor> best;
  for (std::size_t i = 0; i < state.vehicles.size(); ++i) {
    const auto& v = state.vehicles[i];
    if (v.id == exclude_id || !v.present() || !v.occupies(lane) || v.x < x) continue;
    if (v.x == x && v.id < exclude_id) continue;
    const double gap = v.x - x - dims.length;
    if (v.x - x > lookahead) continue;
    if (!best || gap < best->gap) best = Neighbor{i, gap, v.vx};
  }
  return best;
}

std::optional<Neighbor> find_follower(const WorldState& state, int lane, double x, int exclude_id,
                                      const VehicleParams& dims, double lookahead) {
  std::optional<Neighbor> best;
  for (std::size_t i = 0; i < state.vehicles.size(); ++i) {
    const auto& v = state.vehicles[i];
    if (v.id == exclude_id || !v.present() || !v.occupies(lane) || v.x > x) continue;
    if (v.x == x && v.id > exclude_id) continue;
    const double gap = x - v.x - dims.length;
    if (x - v.x > lookahead) continue;
    if (!best || gap < best->gap) best = Neighbor{i, gap, v.vx};
  }
  return best;
}

}  // namespace lsamarl::sim
