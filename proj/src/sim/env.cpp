#include "lsamarl/sim/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lsamarl/sim/controllers.hpp"

namespace lsamarl::sim {

HighwayEnv::HighwayEnv(ScenarioConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::vector<ObservationMatrix> HighwayEnv::reset(std::uint64_t seed) {
  state_ = initial_state(cfg_, seed);
  done_ = false;
  return observations();
}

void HighwayEnv::load_state(WorldState state) {
  state_ = std::move(state);
  done_ = false;
}

std::vector<ObservationMatrix> HighwayEnv::observations() const {
  std::vector<ObservationMatrix> out;
  out.reserve(cfg_.n_cav);
  for (int i = 0; i < cfg_.n_cav; ++i) out.push_back(observe(i));
  return out;
}

void HighwayEnv::integrate_substep(std::vector<int>& newly_crashed, std::vector<CrashEvent>& crashes) {
  auto& vs = state_.vehicles;
  const double dt = cfg_.dt();
  std::vector<double> accel(vs.size(), 0.0);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!vs[i].alive()) continue;
    accel[i] = vs[i].kind == VehicleKind::kCav ? cav_acceleration(vs[i], cfg_.vehicle)
                                               : scripted_acceleration(state_, cfg_, i);
  }
  for (std::size_t i = 0; i < vs.size(); ++i) {
    auto& v = vs[i];
    if (!v.alive()) continue;
    v.x += v.vx * dt;
    if (v.changing_lane()) v.y += v.vy * dt;
    v.vx = std::clamp(v.vx + accel[i] * dt, 0.0, cfg_.vehicle.v_max);
  }
  ++state_.sim_substep;

  auto crash = [&](int id) {
    auto& v = vs[id];
    if (v.crashed) return;
    v.crashed = true;
    v.vx = 0.0;
    v.vy = 0.0;
    // Frozen where it stopped; snap the lane index to the nearest center.
    v.lane = v.target_lane =
        std::clamp(static_cast<int>(std::lround(v.y / state_.road.lane_width)), 0, RoadGeometry::kLeftLane);
    newly_crashed.push_back(id);
  };
  for (const auto& pair : collision_check(state_, cfg_.vehicle)) {
    if (vs[pair.a].crashed && vs[pair.b].crashed) continue;
    crashes.push_back(pair);
    crash(pair.a);
    crash(pair.b);
  }
  for (int id : barrier_check(state_, cfg_.vehicle)) {
    if (vs[id].crashed) continue;
    crashes.push_back({id, kBarrierId});
    crash(id);
  }
  for (auto& v : vs) {
    if (v.alive() && v.x - cfg_.vehicle.length / 2 > cfg_.road.highway_length) v.exited = true;
  }
}

StepResult HighwayEnv::step(std::span<const Action> actions) {
  if (done_) throw std::logic_error("step() on a finished episode; call reset()");
  if (static_cast<int>(actions.size()) != cfg_.n_cav) {
    throw std::invalid_argument("expected " + std::to_string(cfg_.n_cav) + " actions, got " +
                                std::to_string(actions.size()));
  }
  auto& vs = state_.vehicles;
  state_.crash_events.clear();
  state_.lane_changes.clear();
  for (auto& v : vs) v.vy = 0.0;

  StepEvents events;
  StepResult result;
  std::vector<bool> was_present(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) was_present[i] = vs[i].present();

  for (int i = 0; i < cfg_.n_cav; ++i) {
    if (!vs[i].alive()) continue;
    events.active_cavs.push_back(i);
    if (apply_action(vs[i], actions[i], cfg_)) {
      result.info.cav_lane_changes.push_back(i);
      state_.lane_changes.push_back(i);
    }
  }
  events.cav_lane_changes = static_cast<int>(result.info.cav_lane_changes.size());

  // Scripted vehicles decide against the post-action world, all at once.
  std::vector<ControlDecision> decisions(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!vs[i].alive()) continue;
    if (vs[i].kind == VehicleKind::kHdv) decisions[i] = hdv_control(state_, cfg_, i);
    if (vs[i].kind == VehicleKind::kPv) decisions[i] = pv_control(state_, cfg_, i);
  }
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (decisions[i].lane_change == 0) continue;
    auto& v = vs[i];
    v.target_lane = v.lane + decisions[i].lane_change;
    v.vy = decisions[i].lane_change * cfg_.road.lane_width / cfg_.policy_period;
    state_.lane_changes.push_back(v.id);
  }

  std::vector<int> newly_crashed;
  for (int s = 0; s < cfg_.substeps; ++s) integrate_substep(newly_crashed, result.info.crashes);

  for (auto& v : vs) {
    if (v.crashed || !v.changing_lane()) continue;
    v.lane = v.target_lane;
    v.y = state_.road.lane_center(v.lane);
  }
  ++state_.t;
  state_.crash_events = result.info.crashes;

  for (int id : newly_crashed) {
    if (vs[id].kind == VehicleKind::kCav) result.info.newly_crashed_cavs.push_back(id);
  }
  std::sort(result.info.newly_crashed_cavs.begin(), result.info.newly_crashed_cavs.end());
  for (int i = 0; i < cfg_.n_cav; ++i) {
    if (was_present[i] && vs[i].exited) result.info.newly_exited_cavs.push_back(i);
  }
  events.cav_crashed = !result.info.newly_crashed_cavs.empty();

  result.info.reward = compute_reward(state_, events, cfg_);
  result.reward = result.info.reward.total;

  const bool any_cav_alive = std::any_of(vs.begin(), vs.begin() + cfg_.n_cav, [](const auto& v) { return v.alive(); });
  done_ = state_.t >= cfg_.horizon || !any_cav_alive;
  result.done = done_;
  result.observations = observations();
  return result;
}

TrajectoryWriter::TrajectoryWriter(std::ostream& out) : out_(out) {
  out_ << "step,vehicle_id,kind,lane,x,y,vx,vy,action,reward\n";
}

void TrajectoryWriter::write(const WorldState& state, std::span<const Action> actions, double reward) {
  for (const auto& v : state.vehicles) {
    out_ << state.t << ',' << v.id << ',' << to_string(v.kind) << ',' << v.lane << ',' << v.x << ',' << v.y << ','
         << v.vx << ',' << v.vy << ',';
    if (v.kind == VehicleKind::kCav && static_cast<std::size_t>(v.id) < actions.size()) {
      out_ << to_string(actions[v.id]);
    }
    out_ << ',' << reward << '\n';
  }
}

}  // namespace lsamarl::sim
