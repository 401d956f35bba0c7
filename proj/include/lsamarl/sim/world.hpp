#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "lsamarl/sim/config.hpp"
#include "lsamarl/tensor/init.hpp"

namespace lsamarl::sim {

enum class VehicleKind { kCav, kHdv, kPv };
std::string_view to_string(VehicleKind kind);

// Meta-actions, in the order the policy head emits them.
enum class Action : int { kLaneLeft = 0, kLaneRight = 1, kIdle = 2, kFaster = 3, kSlower = 4 };
inline constexpr int kNumActions = 5;
std::string_view to_string(Action a);

struct VehicleRecord {
  int id = 0;
  VehicleKind kind = VehicleKind::kHdv;
  int lane = RoadGeometry::kRightLane;
  // Destination of an in-progress lane change; equals `lane` otherwise.
  int target_lane = RoadGeometry::kRightLane;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  // Lateral speed applied during the most recent policy step.
  double vy = 0.0;
  double target_speed = 0.0;
  bool crashed = false;
  bool exited = false;

  bool alive() const { return !crashed && !exited; }
  bool present() const { return !exited; }
  bool changing_lane() const { return target_lane != lane; }
  bool occupies(int l) const { return lane == l || target_lane == l; }

  friend bool operator==(const VehicleRecord&, const VehicleRecord&) = default;
};

inline constexpr int kBarrierId = -1;

struct CrashEvent {
  int a = 0;
  int b = 0;  // kBarrierId for the end of the ramp
  friend bool operator==(const CrashEvent&, const CrashEvent&) = default;
};

/// Full simulator state. Vehicle ids equal their index; CAVs come first so
/// CAV i is agent i, then HDVs, then the priority vehicle.
struct WorldState {
  std::vector<VehicleRecord> vehicles;
  int t = 0;
  std::int64_t sim_substep = 0;
  Rng rng;
  RoadGeometry road;
  std::vector<CrashEvent> crash_events;  // this step
  std::vector<int> lane_changes;         // vehicle ids that started a lane change this step

  int pv_index() const;
  friend bool operator==(const WorldState&, const WorldState&) = default;
};

// Spawns the initial traffic for `cfg`. Deterministic in (cfg, seed).
// Throws ConfigError if the spawn ranges cannot hold every vehicle.
WorldState initial_state(const ScenarioConfig& cfg, std::uint64_t seed);

// Overlapping footprint pairs (a < b) among vehicles still on the road.
std::vector<CrashEvent> collision_check(const WorldState& state, const VehicleParams& dims);
// Vehicles whose footprint has run past the end of the ramp.
std::vector<int> barrier_check(const WorldState& state, const VehicleParams& dims);

struct Neighbor {
  std::size_t index = 0;
  double gap = 0.0;  // bumper-to-bumper distance
  double speed = 0.0;
};

// Nearest vehicle ahead of / behind position x among vehicles occupying `lane`.
std::optional<Neighbor> find_leader(const WorldState& state, int lane, double x, int exclude_id,
                                    const VehicleParams& dims, double lookahead);
std::optional<Neighbor> find_follower(const WorldState& state, int lane, double x, int exclude_id,
                                      const VehicleParams& dims, double lookahead);

}  // namespace lsamarl::sim
