#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lsamarl/sim/observation.hpp"
#include "lsamarl/sim/reward.hpp"
#include "lsamarl/sim/world.hpp"

namespace lsamarl::sim {

struct StepInfo {
  std::vector<CrashEvent> crashes;
  std::vector<int> cav_lane_changes;
  std::vector<int> newly_crashed_cavs;
  std::vector<int> newly_exited_cavs;
  RewardBreakdown reward;
};

struct StepResult {
  std::vector<ObservationMatrix> observations;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// Highway on-ramp merge with CAV agents, IDM/MOBIL human drivers and one
/// priority vehicle. Single-threaded; separate instances share nothing.
class HighwayEnv {
 public:
  explicit HighwayEnv(ScenarioConfig cfg);

  std::vector<ObservationMatrix> reset(std::uint64_t seed);

  // One action per CAV slot (n_cav entries). Entries for crashed or exited
  // CAVs are ignored. Throws std::invalid_argument on a length mismatch and
  // std::logic_error when stepping a finished episode.
  StepResult step(std::span<const Action> actions);

  // Replaces the world (tests, replays). The episode counts as running.
  void load_state(WorldState state);

  const WorldState& state() const { return state_; }
  const ScenarioConfig& config() const { return cfg_; }
  bool done() const { return done_; }
  int num_agents() const { return cfg_.n_cav; }
  bool agent_active(int agent) const { return state_.vehicles.at(agent).alive(); }

  std::vector<ObservationMatrix> observations() const;
  ObservationMatrix observe(int agent) const { return sim::observe(state_, cfg_, agent); }

 private:
  void integrate_substep(std::vector<int>& newly_crashed, std::vector<CrashEvent>& crashes);

  ScenarioConfig cfg_;
  WorldState state_;
  bool done_ = true;
};

// CSV dump of a trajectory: step,vehicle_id,kind,lane,x,y,vx,vy,action,reward
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(std::ostream& out);
  // `actions` holds the action each CAV took into this state (empty at reset).
  void write(const WorldState& state, std::span<const Action> actions, double reward);

 private:
  std::ostream& out_;
};

}  // namespace lsamarl::sim
