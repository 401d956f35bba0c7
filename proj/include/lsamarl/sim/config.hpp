#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lsamarl::sim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Column masks for the feature ablations. kAddAngles widens observations to
// 8 columns; every other mask zeroes columns in place.
enum class FeatureMask { kFull, kNoPosition, kNoPresencePriority, kNoVelocity, kAddAngles };

std::string_view to_string(FeatureMask mask);
FeatureMask parse_feature_mask(std::string_view name);

struct RoadGeometry {
  double highway_length = 520.0;
  double lane_width = 4.0;
  double merge_start = 200.0;
  double merge_end = 310.0;

  static constexpr int kRampLane = 0;
  static constexpr int kRightLane = 1;
  static constexpr int kLeftLane = 2;

  double lane_center(int lane) const { return lane * lane_width; }
  bool in_merge_window(double x) const { return x >= merge_start && x < merge_end; }
  void validate() const;

  friend bool operator==(const RoadGeometry&, const RoadGeometry&) = default;
};

struct VehicleParams {
  double length = 5.0;
  double width = 2.0;
  double v_max = 30.0;
  double hdv_target_speed = 15.0;
  double stall_speed = 5.0;
  double speed_step = 5.0;
  // Speed mapped to zero in the reward's speed term.
  double reward_speed_min = 15.0;
  // CAV speed tracking: a = gain * (target - v), clamped.
  double cav_speed_gain = 1.0 / 0.6;
  double cav_accel_max = 3.0;
  double cav_decel_max = 5.0;

  double pv_target_speed() const { return 2.0 * hdv_target_speed; }
};

// Intelligent Driver Model.
struct IdmParams {
  double accel_max = 3.0;
  double comfort_decel = 5.0;
  double time_headway = 1.5;
  double jam_gap = 2.0;
  double exponent = 4.0;
  double decel_limit = 9.0;
  double lookahead = 150.0;
};

// MOBIL lane-change model.
struct MobilParams {
  double politeness_hdv = 0.3;
  double politeness_pv = 0.0;
  double safe_decel = 4.0;
  double threshold = 0.2;
};

struct RewardWeights {
  double speed = 0.5;
  double crash = 2.0;
  double stall = 0.5;
  double weave = 0.1;
  double pv = 0.5;
  double offset = 0.5;
  double pv_headway = 40.0;
};

struct SpawnRanges {
  double highway_x_min = 30.0;
  double highway_x_max = 255.0;
  double ramp_x_min = 30.0;
  double ramp_x_max = 155.0;
  double spacing = 25.0;
  double pv_x = 0.0;
  double cav_speed_min = 18.0;
  double cav_speed_max = 22.0;
  double hdv_speed_min = 14.0;
  double hdv_speed_max = 16.0;
  double pv_speed = 25.0;
};

/// One traffic scenario plus every simulator constant.
struct ScenarioConfig {
  int scenario_id = 1;
  int n_cav = 2;
  int n_hdv = 4;
  int n_obs = 4;  // N: observed vehicles per agent, including itself
  int horizon = 120;
  double sensing_radius = 90.0;
  double policy_period = 1.0;
  int substeps = 15;
  std::uint64_t seed = 0;
  FeatureMask feature_mask = FeatureMask::kFull;

  RoadGeometry road;
  VehicleParams vehicle;
  IdmParams idm;
  MobilParams mobil;
  RewardWeights reward;
  SpawnRanges spawn;

  // Rows of the scenario table: (CAVs, HDVs, N) = (2,4,4) (3,3,4) (4,2,6) (4,4,6) (6,6,6).
  static ScenarioConfig preset(int id);

  int n_features() const { return feature_mask == FeatureMask::kAddAngles ? 8 : 6; }
  int n_vehicles() const { return n_cav + n_hdv + 1; }
  int ramp_cavs() const { return (n_cav + 1) / 2; }
  double dt() const { return policy_period / substeps; }

  void validate() const;
};

// Sectioned key-value (INI) file. Missing keys keep their defaults; when the
// file names a scenario, the preset for that id is the starting point.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);
ScenarioConfig parse_scenario_config(std::string_view text);
void save_scenario_config(const std::filesystem::path& path, const ScenarioConfig& cfg);
std::string format_scenario_config(const ScenarioConfig& cfg);

}  // namespace lsamarl::sim
