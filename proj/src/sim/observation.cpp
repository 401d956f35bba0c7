#include "lsamarl/sim/observation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsamarl::sim {

namespace {

double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

void write_angles(ObservationMatrix& obs, std::size_t row, const VehicleRecord& v) {
  const double angle = std::atan2(v.vy, v.vx);
  obs(row, feature::kCos) = std::cos(angle);
  obs(row, feature::kSin) = std::sin(angle);
}

}  // namespace

ObservationMatrix observe(const WorldState& state, const ScenarioConfig& cfg, int agent_id) {
  if (agent_id < 0 || agent_id >= static_cast<int>(state.vehicles.size()) ||
      state.vehicles[agent_id].kind != VehicleKind::kCav) {
    throw std::invalid_argument("unknown agent id " + std::to_string(agent_id));
  }
  const auto rows = static_cast<std::size_t>(cfg.n_obs);
  const auto cols = static_cast<std::size_t>(cfg.n_features());
  ObservationMatrix obs = Tensor::zeros(rows, cols);
  const auto& me = state.vehicles[agent_id];
  if (!me.alive()) return obs;

  const double radius = cfg.sensing_radius;
  const double vmax = cfg.vehicle.v_max;
  const bool angles = cfg.feature_mask == FeatureMask::kAddAngles;

  obs(0, feature::kPresent) = 1.0;
  obs(0, feature::kVx) = clamp1(me.vx / vmax);
  obs(0, feature::kVy) = clamp1(me.vy / vmax);
  if (angles) write_angles(obs, 0, me);

  struct Candidate {
    double distance;
    int id;
  };
  std::vector<Candidate> near;
  for (const auto& v : state.vehicles) {
    if (v.id == me.id || !v.present()) continue;
    const double d = std::hypot(v.x - me.x, v.y - me.y);
    if (d <= radius) near.push_back({d, v.id});
  }
  std::sort(near.begin(), near.end(), [](const Candidate& a, const Candidate& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });

  for (std::size_t k = 0; k + 1 < rows && k < near.size(); ++k) {
    const auto& v = state.vehicles[near[k].id];
    const std::size_t r = k + 1;
    obs(r, feature::kPresent) = 1.0;
    obs(r, feature::kPriority) = v.kind == VehicleKind::kPv ? 1.0 : 0.0;
    obs(r, feature::kX) = clamp1((v.x - me.x) / radius);
    obs(r, feature::kY) = clamp1((v.y - me.y) / radius);
    obs(r, feature::kVx) = clamp1((v.vx - me.vx) / vmax);
    obs(r, feature::kVy) = clamp1((v.vy - me.vy) / vmax);
    if (angles) write_angles(obs, r, v);
  }
  apply_feature_mask(obs, cfg.feature_mask);
  return obs;
}

void apply_feature_mask(ObservationMatrix& obs, FeatureMask mask) {
  std::vector<std::size_t> hidden;
  switch (mask) {
    case FeatureMask::kFull:
    case FeatureMask::kAddAngles:
      return;
    case FeatureMask::kNoPosition:
      hidden = {feature::kX, feature::kY};
      break;
    case FeatureMask::kNoPresencePriority:
      hidden = {feature::kPresent, feature::kPriority};
      break;
    case FeatureMask::kNoVelocity:
      hidden = {feature::kVx, feature::kVy};
      break;
  }
  for (std::size_t r = 0; r < obs.rows(); ++r) {
    for (auto c : hidden) obs(r, c) = 0.0;
  }
}

}  // namespace lsamarl::sim
